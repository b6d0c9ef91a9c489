//! Zero-forcing transmission plan for a delivery array.
//!
//! Integer `s` of the delivery array is one transmission
//! `x(s) = Σ_α v_α W_{d_{k(α)}, f_α}` over its occurrences `α`. The vector
//! `v_α` must vanish on every user of the transmission that lacks subfile
//! `f_α` (the set `P_α`) and not on the intended user `k(α)`.
//!
//! For a fixed row `f`, all occurrences sitting in that row share
//! `Q_f = P_α ∪ {k(α)}`, so one pivoted QR of the stacked channels serves
//! the whole row. The normalized dual column for `k(α)` is the normalized
//! projection of `conj(h_{k(α)})` onto the null space of the rows
//! `{h_gᵀ : g ∈ P_α}`: the unit vector in that null space with the
//! largest `|h_{k(α)}ᵀ v|`.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::arrays::{Cell, DeliveryArray, IntegerArray};
use crate::error::{MaccError, Result};
use crate::grid::{Torus, UserId};
use crate::scalar::{SimFloat, Tolerances};

use super::channel::ChannelRealization;
use super::linalg::{dot_t, norm, PivotedQr};
use super::placement::Demand;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    /// Subfile index `f_α` (1-based row).
    pub row: usize,
    /// 1-based column position in the delivery array.
    pub column: usize,
    pub user: UserId,
    /// Demanded file `d_{k(α)}`.
    pub file: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission<T> {
    pub s: u32,
    pub occurrences: Vec<Occurrence>,
    /// `P_α` for each occurrence.
    pub interference: Vec<Vec<UserId>>,
    /// Columns of `V^(s)`, unit norm, each of length `L`.
    pub precoders: Vec<Vec<Complex<T>>>,
    /// `|h_{k(α)}ᵀ v_α|`.
    pub desired_gain: Vec<T>,
    /// `max_{g ∈ P_α} |h_gᵀ v_α|` (zero when `P_α` is empty).
    pub nulling_residual: Vec<T>,
}

impl<T: SimFloat> Transmission<T> {
    pub fn eta(&self) -> usize {
        self.occurrences.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPlan<T> {
    pub torus: Torus,
    pub l: usize,
    pub f: usize,
    pub transmissions: Vec<Transmission<T>>,
}

impl<T: SimFloat> TransmissionPlan<T> {
    pub fn max_interference_set(&self) -> usize {
        self.transmissions
            .iter()
            .flat_map(|t| t.interference.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    pub fn max_nulling_residual(&self) -> T {
        self.transmissions
            .iter()
            .flat_map(|t| t.nulling_residual.iter().copied())
            .fold(T::zero(), T::max)
    }

    pub fn min_desired_gain(&self) -> T {
        self.transmissions
            .iter()
            .flat_map(|t| t.desired_gain.iter().copied())
            .fold(T::infinity(), T::min)
    }
}

/// Occurrences of every integer, ordered by column position (then row).
fn occurrences(b: &DeliveryArray, d: &Demand) -> BTreeMap<u32, Vec<Occurrence>> {
    let mut out: BTreeMap<u32, Vec<Occurrence>> = (1..=b.s()).map(|s| (s, Vec::new())).collect();
    for col in 0..b.cols() {
        let user = UserId::from_pos(b.labels()[col], b.k2());
        for row in 0..b.f() {
            if let Cell::Int(s) = b.get(row, col) {
                out.entry(s).or_default().push(Occurrence {
                    row: row + 1,
                    column: col + 1,
                    user,
                    file: d.file_of(user.flat),
                });
            }
        }
    }
    out
}

pub fn build_plan<T: SimFloat>(
    b: &DeliveryArray,
    h: &ChannelRealization<T>,
    d: &Demand,
) -> Result<TransmissionPlan<T>> {
    build_plan_with(b, h, d, T::default_tolerances())
}

pub fn build_plan_with<T: SimFloat>(
    b: &DeliveryArray,
    h: &ChannelRealization<T>,
    d: &Demand,
    tol: Tolerances<T>,
) -> Result<TransmissionPlan<T>> {
    let users = b.k1() * b.k2();
    if h.antennas() != b.l() || h.users() != users {
        return Err(MaccError::Precondition(format!(
            "channel is {}x{}, expected L x K1K2 = {}x{users}",
            h.antennas(),
            h.users(),
            b.l()
        )));
    }
    if d.len() != users {
        return Err(MaccError::Precondition(format!(
            "demand has {} entries, expected {users}",
            d.len()
        )));
    }
    let rank_tol = T::epsilon() * T::lit((b.l() * 16) as f64);
    // integers served to the same users share interference sets; one QR
    // per distinct set
    let mut factored: BTreeMap<Vec<usize>, (PivotedQr<T>, usize)> = BTreeMap::new();
    let mut transmissions = Vec::with_capacity(b.s() as usize);
    for (s, occ) in occurrences(b, d) {
        let eta = occ.len();
        let mut precoders = vec![Vec::new(); eta];
        let mut interference = vec![Vec::new(); eta];
        let mut desired_gain = vec![T::zero(); eta];
        let mut nulling_residual = vec![T::zero(); eta];

        let mut by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (alpha, o) in occ.iter().enumerate() {
            by_row.entry(o.row).or_default().push(alpha);
        }
        for (&row, alphas) in &by_row {
            // users of this transmission that do not hold subfile `row`
            let group: Vec<usize> = (0..eta)
                .filter(|&beta| !b.get(row - 1, occ[beta].column - 1).is_star())
                .collect();
            if group.len() > b.l() {
                return Err(MaccError::Precondition(format!(
                    "row {row} of the sub-array for {s} has {} integers > L = {}",
                    group.len(),
                    b.l()
                )));
            }
            let key: Vec<usize> = group.iter().map(|&beta| occ[beta].user.flat).collect();
            let (qr, rank) = factored.entry(key).or_insert_with(|| {
                let conj: Vec<Vec<Complex<T>>> = group
                    .iter()
                    .map(|&beta| h.column(occ[beta].user).iter().map(Complex::conj).collect())
                    .collect();
                let cols: Vec<&[Complex<T>]> = conj.iter().map(Vec::as_slice).collect();
                let qr = PivotedQr::new(&cols);
                let rank = qr.rank(rank_tol);
                (qr, rank)
            });
            if *rank < group.len() {
                return Err(MaccError::DegenerateChannel {
                    s,
                    row,
                    detail: format!("{} interfering channels are linearly dependent", group.len()),
                });
            }
            for &alpha in alphas {
                let idx = group.iter().position(|&g| g == alpha).expect("occurrence holds an integer");
                let w = qr.dual_column(idx);
                let wn = norm(&w);
                let v: Vec<Complex<T>> = w.iter().map(|x| x / wn).collect();
                let gain = dot_t(h.column(occ[alpha].user), &v).norm();
                let others: Vec<UserId> = group
                    .iter()
                    .filter(|&&g| g != alpha)
                    .map(|&g| occ[g].user)
                    .collect();
                let residual = others
                    .iter()
                    .map(|&u| dot_t(h.column(u), &v).norm())
                    .fold(T::zero(), T::max);
                let within = gain > tol.desired && residual < tol.nulling;
                if !within {
                    return Err(MaccError::DegenerateChannel {
                        s,
                        row,
                        detail: format!(
                            "user {} gets desired gain {gain} with nulling residual {residual}",
                            occ[alpha].user.flat
                        ),
                    });
                }
                precoders[alpha] = v;
                interference[alpha] = others;
                desired_gain[alpha] = gain;
                nulling_residual[alpha] = residual;
            }
        }
        transmissions.push(Transmission {
            s,
            occurrences: occ,
            interference,
            precoders,
            desired_gain,
            nulling_residual,
        });
    }
    Ok(TransmissionPlan {
        torus: b.torus(),
        l: b.l(),
        f: b.f(),
        transmissions,
    })
}
