use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::arrays::{CachingArray, DeliveryArray, Epda};
use crate::error::{MaccError, Result};
use crate::grid::NetworkParams;
use crate::scalar::ExactInt;

fn int<I: ExactInt>(x: i64) -> I {
    I::from_i64(x).expect("value fits the integer type")
}

fn ratio<I: ExactInt>(n: i64, d: i64) -> Ratio<I> {
    Ratio::new(int(n), int(d))
}

/// Exact NDT figures of a scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdtReport<I: ExactInt> {
    /// `S / F` of the delivery array.
    pub achieved: Ratio<I>,
    /// `K1K2(1 - r²μ) / (L + K1K2 μ)`.
    pub formula_remark1: Ratio<I>,
    /// `K1K2(1 - r²μ) / (L + K1K2 r² μ)`.
    pub formula_corollary1: Ratio<I>,
    /// Converse under uncoded placement and one-shot delivery,
    /// `max(0, formula_corollary1)`.
    pub lower_bound: Ratio<I>,
    /// `K1K2(1 - r²μ) / (1 + K1K2 μ)`, the best single-antenna NDT for the
    /// same grid when `r | K1` and `r | K2`.
    pub single_antenna_baseline: Ratio<I>,
    pub optimal_flag: bool,
}

pub struct Formulas<I: ExactInt> {
    pub block: Ratio<I>,
    pub converse: Ratio<I>,
    pub lower_bound: Ratio<I>,
    pub single_antenna: Ratio<I>,
}

/// Closed-form NDT expressions evaluated at `p`.
pub fn ndt_formulas<I: ExactInt>(p: &NetworkParams) -> Formulas<I> {
    let mu = ratio::<I>(*p.mu().numer(), *p.mu().denom());
    let n = Ratio::from_integer(int::<I>(p.users() as i64));
    let r2 = Ratio::from_integer(int::<I>((p.r() * p.r()) as i64));
    let l = Ratio::from_integer(int::<I>(p.l() as i64));
    let numer = n.clone() * (Ratio::one() - r2.clone() * mu.clone());
    let converse = numer.clone() / (l.clone() + n.clone() * r2 * mu.clone());
    let lower_bound = if converse < Ratio::zero() {
        Ratio::zero()
    } else {
        converse.clone()
    };
    Formulas {
        block: numer.clone() / (l + n.clone() * mu.clone()),
        converse,
        lower_bound,
        single_antenna: numer / (Ratio::one() + n * mu),
    }
}

pub fn compute_ndt<I: ExactInt>(
    c: &CachingArray,
    b: &DeliveryArray,
    p: &NetworkParams,
) -> Result<NdtReport<I>> {
    if (b.k1(), b.k2(), b.r(), b.l()) != (p.k1(), p.k2(), p.r(), p.l()) {
        return Err(MaccError::Precondition(format!(
            "delivery array is for (K1,K2,r,L) = ({},{},{},{}) but parameters are ({},{},{},{})",
            b.k1(),
            b.k2(),
            b.r(),
            b.l(),
            p.k1(),
            p.k2(),
            p.r(),
            p.l()
        )));
    }
    if c.f() != b.f() || (c.k1(), c.k2()) != (b.k1(), b.k2()) {
        return Err(MaccError::Structural("caching and delivery arrays differ in shape".into()));
    }
    let z_over_f = num_rational::Rational64::new(c.z() as i64, c.f() as i64);
    if z_over_f != p.mu() {
        return Err(MaccError::Precondition(format!(
            "M/N = {} does not match Z/F = {z_over_f}",
            p.mu()
        )));
    }
    let achieved = ratio::<I>(b.s() as i64, b.f() as i64);
    let f = ndt_formulas::<I>(p);
    Ok(NdtReport {
        optimal_flag: achieved == f.lower_bound,
        achieved,
        formula_remark1: f.block,
        formula_corollary1: f.converse,
        lower_bound: f.lower_bound,
        single_antenna_baseline: f.single_antenna,
    })
}

/// Cache fraction `Z/F` and NDT `S/F` of the dedicated-cache scheme given by
/// an EPDA.
pub fn epda_scheme<I: ExactInt>(a: &Epda) -> (Ratio<I>, Ratio<I>) {
    (
        ratio(a.z() as i64, a.f() as i64),
        ratio(a.s() as i64, a.f() as i64),
    )
}
