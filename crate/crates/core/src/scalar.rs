//! Scalar abstractions.
//!
//! The delivery simulation runs over any IEEE float implementing [`SimFloat`]
//! and the NDT bookkeeping over any exact integer type implementing
//! [`ExactInt`] (rationals are `Ratio<I>`).

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{Float, FromPrimitive, Signed};
use rand::Rng;
use rand_distr::StandardNormal;

/// Numeric thresholds used when building precoders and checking decodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Upper bound on `|h_gᵀ v|` for every interfered user `g`.
    pub nulling: T,
    /// Lower bound on `|h_kᵀ v|` for the intended user `k`.
    pub desired: T,
    /// Upper bound on the relative error of a decoded subfile symbol.
    pub decode: T,
}

/// Floating-point scalar for the channel simulation: f32 or f64.
pub trait SimFloat:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn default_tolerances() -> Tolerances<Self>;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every float type")
    }
}

impl SimFloat for f64 {
    fn default_tolerances() -> Tolerances<f64> {
        Tolerances {
            nulling: 1e-9,
            desired: 1e-3,
            decode: 1e-6,
        }
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }
}

impl SimFloat for f32 {
    fn default_tolerances() -> Tolerances<f32> {
        Tolerances {
            nulling: 1e-4,
            desired: 1e-3,
            decode: 1e-2,
        }
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f32 {
        rng.sample(StandardNormal)
    }
}

/// Exact integer type backing the NDT rationals.
pub trait ExactInt: Integer + Signed + Clone + FromPrimitive + Debug + Display {}

impl<I: Integer + Signed + Clone + FromPrimitive + Debug + Display> ExactInt for I {}
