use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{MaccError, Result};
use crate::grid::UserId;
use crate::scalar::SimFloat;

use super::channel::{complex_normal, stream_rng, ChannelRealization, SYMBOL_STREAM};
use super::linalg::dot_t;
use super::placement::{Demand, Placement};
use super::plan::TransmissionPlan;

/// One complex symbol per subfile `W_{n,f}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubfileLibrary<T> {
    n_files: usize,
    f: usize,
    symbols: Vec<Complex<T>>,
}

impl<T: SimFloat> SubfileLibrary<T> {
    pub fn draw(n_files: usize, f: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, SYMBOL_STREAM);
        let symbols = (0..n_files * f).map(|_| complex_normal(&mut rng)).collect();
        Self { n_files, f, symbols }
    }

    /// `W_{file, subfile}`, both 1-based.
    pub fn symbol(&self, file: usize, subfile: usize) -> Complex<T> {
        self.symbols[(file - 1) * self.f + (subfile - 1)]
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureKind<T> {
    /// Recovered symbol off by `error` (relative).
    Residual { error: T },
    /// Subfile neither in the user's caches nor delivered.
    Undelivered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeFailure<T> {
    pub user: UserId,
    /// Transmission index, `None` for undelivered subfiles.
    pub s: Option<u32>,
    pub f: usize,
    pub kind: FailureKind<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserDecode<T> {
    pub user: UserId,
    pub max_error: T,
    pub from_cache: usize,
    pub from_delivery: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport<T> {
    pub tolerance: T,
    pub users: Vec<UserDecode<T>>,
    pub failures: Vec<DecodeFailure<T>>,
}

impl<T: SimFloat> DecodeReport<T> {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_error(&self) -> T {
        self.users.iter().map(|u| u.max_error).fold(T::zero(), T::max)
    }
}

/// Noiseless receiver: every user subtracts the terms it can rebuild from
/// its accessible caches and divides by its own effective gain.
pub fn simulate_decode<T: SimFloat>(
    plan: &TransmissionPlan<T>,
    placement: &Placement,
    h: &ChannelRealization<T>,
    d: &Demand,
    library: &SubfileLibrary<T>,
) -> Result<DecodeReport<T>> {
    simulate_decode_with(plan, placement, h, d, library, T::default_tolerances().decode)
}

pub fn simulate_decode_with<T: SimFloat>(
    plan: &TransmissionPlan<T>,
    placement: &Placement,
    h: &ChannelRealization<T>,
    d: &Demand,
    library: &SubfileLibrary<T>,
    tolerance: T,
) -> Result<DecodeReport<T>> {
    let torus = plan.torus;
    let users = torus.len();
    if placement.subfiles_per_file() != plan.f || d.len() != users || h.users() != users {
        return Err(MaccError::Precondition(
            "plan, placement, channel and demand describe different systems".into(),
        ));
    }
    if library.n_files() < placement.n_files() {
        return Err(MaccError::Precondition("subfile library smaller than the file set".into()));
    }
    let known: Vec<BTreeSet<usize>> = (1..=users)
        .map(|k| placement.accessible(&torus, UserId { flat: k }.pos(torus.k2)))
        .collect();
    let mut max_error = vec![T::zero(); users];
    let mut delivered: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); users];
    let mut failures = Vec::new();

    for tx in &plan.transmissions {
        let payload: Vec<Complex<T>> = tx
            .occurrences
            .iter()
            .map(|o| library.symbol(o.file, o.row))
            .collect();
        let mut x = vec![Complex::zero(); plan.l];
        for (v, w) in tx.precoders.iter().zip(&payload) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi = *xi + vi * w;
            }
        }
        for (alpha, o) in tx.occurrences.iter().enumerate() {
            let k = o.user.flat;
            let hk = h.column(o.user);
            let y = dot_t(hk, &x);
            let cached: Complex<T> = tx
                .occurrences
                .iter()
                .enumerate()
                .filter(|&(beta, ob)| beta != alpha && known[k - 1].contains(&ob.row))
                .fold(Complex::zero(), |acc, (beta, _)| {
                    acc + dot_t(hk, &tx.precoders[beta]) * payload[beta]
                });
            let estimate = (y - cached) / dot_t(hk, &tx.precoders[alpha]);
            let truth = payload[alpha];
            let error = (estimate - truth).norm() / truth.norm();
            max_error[k - 1] = max_error[k - 1].max(error);
            if error < tolerance {
                delivered[k - 1].insert(o.row);
            } else {
                failures.push(DecodeFailure {
                    user: o.user,
                    s: Some(tx.s),
                    f: o.row,
                    kind: FailureKind::Residual { error },
                });
            }
        }
    }

    let mut report_users = Vec::with_capacity(users);
    for k in 1..=users {
        let from_cache = known[k - 1].len();
        for f in 1..=plan.f {
            let recovered = known[k - 1].contains(&f) || delivered[k - 1].contains(&f);
            let residual_failure = failures.iter().any(|x| x.user.flat == k && x.f == f);
            if !recovered && !residual_failure {
                failures.push(DecodeFailure {
                    user: UserId { flat: k },
                    s: None,
                    f,
                    kind: FailureKind::Undelivered,
                });
            }
        }
        report_users.push(UserDecode {
            user: UserId { flat: k },
            max_error: max_error[k - 1],
            from_cache,
            from_delivery: delivered[k - 1].difference(&known[k - 1]).count(),
        });
    }
    Ok(DecodeReport {
        tolerance,
        users: report_users,
        failures,
    })
}
