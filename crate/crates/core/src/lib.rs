//! Multi-antenna coded caching on a wrap-around grid of caches.
//!
//! * [`grid`]: torus geometry and network parameters,
//! * [`arrays`]: EPDAs, caching and delivery arrays and their verifiers,
//! * [`constructions`]: array constructions and the small EPDA search,
//! * [`scheme`]: placement, zero-forcing delivery, decoding and NDT,
//! * [`formats`]: text and JSON interchange.

pub mod arrays;
pub mod constructions;
pub mod error;
pub mod formats;
pub mod grid;
pub mod scalar;
pub mod scheme;

pub use arrays::{
    verify_delivery_array, verify_epda, CachingArray, Cell, ConditionReport, Counterexample,
    DeliveryArray, Epda, LabelOrder,
};
pub use constructions::{generalized_construct, lemma1_construct, optimal_construct, search_epda};
pub use error::{MaccError, Result};
pub use grid::{access_set, cyc, CacheId, GridPos, NetworkParams, Torus, UserId};
pub use scalar::{ExactInt, SimFloat, Tolerances};
pub use formats::{emit_report, parse_array, print_array, ArrayDocument};
pub use scheme::{MaccScheme, NdtReport};

pub type Channel = scheme::ChannelRealization<f64>;
pub type Channel32 = scheme::ChannelRealization<f32>;
pub type Plan = scheme::TransmissionPlan<f64>;
pub type Plan32 = scheme::TransmissionPlan<f32>;
pub type DecodeReport = scheme::DecodeReport<f64>;
pub type Ndt = scheme::NdtReport<i64>;
pub type BigNdt = scheme::NdtReport<num_bigint::BigInt>;
