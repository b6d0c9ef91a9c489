//! Placement, zero-forcing delivery and NDT accounting for a
//! (caching array, delivery array) pair.

mod channel;
mod decode;
pub mod linalg;
mod ndt;
mod placement;
mod plan;

pub use channel::ChannelRealization;
pub use decode::{
    simulate_decode, simulate_decode_with, DecodeFailure, DecodeReport, FailureKind, SubfileLibrary,
    UserDecode,
};
pub use ndt::{compute_ndt, epda_scheme, ndt_formulas, Formulas, NdtReport};
pub use placement::{build_placement, Demand, Placement};
pub use plan::{build_plan, build_plan_with, Occurrence, Transmission, TransmissionPlan};

use crate::arrays::{verify_delivery_array, CachingArray, DeliveryArray};
use crate::error::{MaccError, Result};
use crate::grid::NetworkParams;
use crate::scalar::{ExactInt, SimFloat, Tolerances};

/// Outcome of one simulated delivery.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial<T> {
    pub seed: u64,
    /// Channel redraws spent on degenerate realizations.
    pub redraws: u32,
    pub plan: TransmissionPlan<T>,
    pub decode: DecodeReport<T>,
}

/// A verified scheme ready for simulation.
#[derive(Debug, Clone)]
pub struct MaccScheme {
    params: NetworkParams,
    caching: CachingArray,
    delivery: DeliveryArray,
    placement: Placement,
}

impl MaccScheme {
    /// Fails unless `delivery` satisfies D1–D4 against `caching`.
    pub fn new(
        params: NetworkParams,
        caching: CachingArray,
        delivery: DeliveryArray,
        n_files: usize,
    ) -> Result<Self> {
        let report = verify_delivery_array(&delivery, &caching)?;
        if !report.passed() {
            let failed: Vec<&str> = report
                .outcomes
                .iter()
                .filter(|o| !o.passed())
                .map(|o| o.name)
                .collect();
            return Err(MaccError::Structural(format!(
                "delivery array fails {}",
                failed.join(", ")
            )));
        }
        if delivery.l() != params.l() || delivery.r() != params.r() {
            return Err(MaccError::Precondition(
                "delivery array and parameters disagree on L or r".into(),
            ));
        }
        let placement = build_placement(&caching, n_files)?;
        Ok(Self {
            params,
            caching,
            delivery,
            placement,
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn caching(&self) -> &CachingArray {
        &self.caching
    }

    pub fn delivery(&self) -> &DeliveryArray {
        &self.delivery
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn ndt<I: ExactInt>(&self) -> Result<NdtReport<I>> {
        compute_ndt(&self.caching, &self.delivery, &self.params)
    }

    /// Draws channel and subfile symbols from `seed` and decodes `demand`.
    pub fn run_trial<T: SimFloat>(&self, demand: &Demand, seed: u64) -> Result<Trial<T>> {
        self.run_trial_with(demand, seed, T::default_tolerances(), 0)
    }

    /// Like [`run_trial`](Self::run_trial), but answers a degenerate channel
    /// with up to `max_redraws` fresh channel draws.
    pub fn run_trial_with<T: SimFloat>(
        &self,
        demand: &Demand,
        seed: u64,
        tol: Tolerances<T>,
        max_redraws: u32,
    ) -> Result<Trial<T>> {
        let library = SubfileLibrary::draw(self.placement.n_files(), self.caching.f(), seed);
        let mut attempt = 0;
        loop {
            let h = ChannelRealization::draw_attempt(self.params.l(), self.params.users(), seed, attempt);
            match build_plan_with(&self.delivery, &h, demand, tol) {
                Ok(plan) => {
                    let decode = simulate_decode_with(&plan, &self.placement, &h, demand, &library, tol.decode)?;
                    return Ok(Trial {
                        seed,
                        redraws: attempt,
                        plan,
                        decode,
                    });
                }
                Err(MaccError::DegenerateChannel { .. }) if attempt < max_redraws => attempt += 1,
                Err(e) => return Err(e),
            }
        }
    }
}
