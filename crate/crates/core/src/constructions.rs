//! Caching/delivery array constructions and a small EPDA search.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::arrays::{
    stars_from_caching, verify_epda, CachingArray, Cell, DeliveryArray, Epda, IntegerArray,
    LabelOrder,
};
use crate::error::{MaccError, Result};
use crate::grid::{cyc, GridPos, NetworkParams, Torus};

/// Block geometry of the EPDA-based construction.
///
/// Caches are split into `r²` column groups `(u, v) ∈ [r]²`; group `(u, v)`
/// holds caches `((x-1)r + u, (y-1)r + v)` for `x ∈ [K1/r]`, `y ∈ [K2/r]` in
/// lexicographic `(x, y)` order. The delivery array has `r²` row bands with
/// the same `(u', v')` indexing; block `(band, group)` is a column
/// permutation of the EPDA with its integers shifted by `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Layout {
    k1: usize,
    k2: usize,
    r: usize,
    s: u32,
}

impl Lemma1Layout {
    pub fn new(k1: usize, k2: usize, r: usize, s: u32) -> Result<Self> {
        if r == 0 || !k1.is_multiple_of(r) || !k2.is_multiple_of(r) {
            return Err(MaccError::Precondition(format!(
                "requires r | K1 and r | K2 (got K1={k1}, K2={k2}, r={r})"
            )));
        }
        Ok(Self { k1, k2, r, s })
    }

    pub fn groups(&self) -> usize {
        self.r * self.r
    }

    /// Columns per group, `K1 K2 / r²`.
    pub fn group_size(&self) -> usize {
        self.k1 * self.k2 / self.groups()
    }

    /// `(u, v)` of a 1-based group or band index.
    pub fn coords(&self, g: usize) -> (usize, usize) {
        ((g - 1) / self.r + 1, (g - 1) % self.r + 1)
    }

    fn index_of(&self, u: usize, v: usize) -> usize {
        (u - 1) * self.r + v
    }

    /// Cache label of the `c`-th (0-based) column of group `g` (1-based).
    pub fn label(&self, g: usize, c: usize) -> GridPos {
        let (u, v) = self.coords(g);
        let per_row = self.k2 / self.r;
        let (x, y) = (c / per_row + 1, c % per_row + 1);
        GridPos::new((x - 1) * self.r + u, (y - 1) * self.r + v)
    }

    /// Position of a cache inside its group: `(group, column)`.
    pub fn locate(&self, pos: GridPos) -> (usize, usize) {
        let u = cyc(pos.row as i64, self.r as i64) as usize;
        let v = cyc(pos.col as i64, self.r as i64) as usize;
        let x = (pos.row - u) / self.r;
        let y = (pos.col - v) / self.r;
        (self.index_of(u, v), x * (self.k2 / self.r) + y)
    }

    /// Integer offset of block `(band, group)`, both 1-based.
    pub fn offset(&self, band: usize, group: usize) -> u32 {
        (((group - 1) * self.groups() + (band - 1)) as u32) * self.s
    }

    /// Column permutation of block `(band, group)`: entry `c` is the EPDA
    /// column serving the `c`-th user of `group`, i.e. the column of the one
    /// cache of group `band` inside that user's access window.
    pub fn permutation(&self, band: usize, group: usize) -> Vec<usize> {
        let (bu, bv) = self.coords(band);
        let (gu, gv) = self.coords(group);
        let r = self.r as i64;
        let du = (bu as i64 - gu as i64).rem_euclid(r);
        let dv = (bv as i64 - gv as i64).rem_euclid(r);
        let torus = Torus::new(self.k1, self.k2, self.r);
        (0..self.group_size())
            .map(|c| {
                let cache = torus.shift(self.label(group, c), du, dv);
                let (g, col) = self.locate(cache);
                debug_assert_eq!(g, band);
                col
            })
            .collect()
    }
}

fn precondition<T>(msg: String) -> Result<T> {
    Err(MaccError::Precondition(msg))
}

/// Builds a `(K1, K2, r²F, Z)` caching array and a `(C, r, L, r⁴S)`
/// delivery array from a `(K1K2/r², L, F, Z, S)` EPDA.
pub fn lemma1_construct(a: &Epda, p: &NetworkParams) -> Result<(CachingArray, DeliveryArray)> {
    let (k1, k2, r) = (p.k1(), p.k2(), p.r());
    let layout = Lemma1Layout::new(k1, k2, r, a.s())?;
    let groups = layout.groups();
    let k = layout.group_size();
    if a.k() != k {
        return precondition(format!(
            "EPDA has {} columns, expected K1 K2 / r² = {k}",
            a.k()
        ));
    }
    if a.l() > p.l() {
        return precondition(format!("EPDA bound L={} exceeds L={}", a.l(), p.l()));
    }
    let report = verify_epda(a);
    if !report.passed() {
        let failed: Vec<_> = report.counterexamples().map(|(n, _)| n).collect();
        return precondition(format!("input array is not an EPDA (fails {failed:?})"));
    }
    let mu = Rational64::new(a.z() as i64, (groups * a.f()) as i64);
    if mu != p.mu() {
        return precondition(format!(
            "M/N={} does not match Z/(r²F) = {mu} of the EPDA",
            p.mu()
        ));
    }

    let f = a.f();
    let rows = groups * f;
    let cols = k1 * k2;
    let mut labels = Vec::with_capacity(cols);
    for g in 1..=groups {
        labels.extend((0..k).map(|c| layout.label(g, c)));
    }
    let mut stars = vec![false; rows * cols];
    for g in 0..groups {
        for row in 0..f {
            for c in 0..k {
                stars[(g * f + row) * cols + g * k + c] = a.get(row, c).is_star();
            }
        }
    }
    let caching = CachingArray::new(k1, k2, rows, a.z(), stars, labels.clone())?;

    let mut cells = vec![Cell::Star; rows * cols];
    for band in 1..=groups {
        for group in 1..=groups {
            let perm = layout.permutation(band, group);
            let offset = layout.offset(band, group);
            for row in 0..f {
                for (c, &src) in perm.iter().enumerate() {
                    cells[((band - 1) * f + row) * cols + (group - 1) * k + c] = match a.get(row, src) {
                        Cell::Int(s) => Cell::Int(s + offset),
                        other => other,
                    };
                }
            }
        }
    }
    let s_total = (groups * groups) as u32 * a.s();
    let delivery = DeliveryArray::new(k1, k2, rows, r, p.l(), s_total, cells, labels)?;
    Ok((caching, delivery))
}

/// Single-star-per-column caching array: the cache in label position `i`
/// stores subfile `cyc(i + 1, f)`.
fn cyclic_caching(k1: usize, k2: usize, f: usize, order: LabelOrder) -> Result<CachingArray> {
    let cols = k1 * k2;
    let mut stars = vec![false; f * cols];
    for col in 0..cols {
        stars[(col % f) * cols + col] = true;
    }
    CachingArray::new(k1, k2, f, 1, stars, order.labels(k1, k2))
}

/// Delivery array with the stars forced by `c` and integers `1, 2, …`
/// assigned to the remaining rows of each column from top to bottom.
fn fill_top_to_bottom(c: &CachingArray, r: usize, l: usize) -> Result<DeliveryArray> {
    let mask = stars_from_caching(c, r);
    let cols = c.cols();
    let mut cells = vec![Cell::Star; c.f() * cols];
    let mut s_max = 0;
    for (col, &label) in c.labels().iter().enumerate() {
        let mut next = 0;
        for row in 0..c.f() {
            if !mask.is_star(row, label) {
                next += 1;
                cells[row * cols + col] = Cell::Int(next);
            }
        }
        s_max = s_max.max(next);
    }
    DeliveryArray::new(c.k1(), c.k2(), c.f(), r, l, s_max, cells, c.labels().to_vec())
}

/// Construction for `M/N = 1/(K1K2)` and `L = K1K2 - r²`.
pub fn optimal_construct(p: &NetworkParams) -> Result<(CachingArray, DeliveryArray)> {
    let n = p.users();
    let r2 = p.r() * p.r();
    if p.mu() != Rational64::new(1, n as i64) {
        return precondition(format!("requires M/N = 1/(K1 K2) = 1/{n} (got {})", p.mu()));
    }
    if r2 >= n || p.l() != n - r2 {
        return precondition(format!(
            "requires L = K1 K2 - r² = {} (got L={})",
            n as i64 - r2 as i64,
            p.l()
        ));
    }
    let c = cyclic_caching(p.k1(), p.k2(), n, LabelOrder::RowMajor)?;
    let b = fill_top_to_bottom(&c, p.r(), p.l())?;
    Ok((c, b))
}

/// Construction for integer `t = K1K2 M/N` with `t | K1, r ≤ K1/t` or
/// `t | K2, r ≤ K2/t`, and `L = K1K2 - r² t`.
///
/// When the `K1` side qualifies, columns are labeled row-major and the
/// cache `(k1, k2)` stores subfile `cyc((k1-1)K2 + k2, F)`; otherwise they
/// are labeled column-major and it stores `cyc((k2-1)K1 + k1, F)`. Either
/// way no user window holds two caches with the same subfile.
pub fn generalized_construct(p: &NetworkParams) -> Result<(CachingArray, DeliveryArray)> {
    let Some(t) = p.t_integer() else {
        return precondition(format!("requires integer t = K1 K2 M/N (got {})", p.t()));
    };
    let (k1, k2, r) = (p.k1(), p.k2(), p.r());
    let rows_ok = k1 % t == 0 && r <= k1 / t;
    let cols_ok = k2 % t == 0 && r <= k2 / t;
    if !rows_ok && !cols_ok {
        return precondition(format!(
            "requires t | K1 and r <= K1/t, or t | K2 and r <= K2/t (got K1={k1}, K2={k2}, r={r}, t={t})"
        ));
    }
    let n = p.users();
    if r * r * t >= n || p.l() != n - r * r * t {
        return precondition(format!(
            "requires L = K1 K2 - r² t = {} (got L={})",
            n as i64 - (r * r * t) as i64,
            p.l()
        ));
    }
    let order = if rows_ok { LabelOrder::RowMajor } else { LabelOrder::ColumnMajor };
    let c = cyclic_caching(k1, k2, n / t, order)?;
    let b = fill_top_to_bottom(&c, r, p.l())?;
    Ok((c, b))
}

/// Bound on the size of an exhaustive EPDA search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest admissible `k * f`.
    pub max_cells: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_cells: 36 }
    }
}

/// Smallest-`S` EPDA with the given shape, or `None` if no EPDA with
/// `S <= s_max` exists.
pub fn search_epda(k: usize, l: usize, f: usize, z: usize, s_max: u32) -> Result<Option<Epda>> {
    search_epda_with_budget(k, l, f, z, s_max, SearchBudget::default())
}

pub fn search_epda_with_budget(
    k: usize,
    l: usize,
    f: usize,
    z: usize,
    s_max: u32,
    budget: SearchBudget,
) -> Result<Option<Epda>> {
    if k * f > budget.max_cells {
        return Err(MaccError::BudgetExceeded {
            needed: k * f,
            budget: budget.max_cells,
        });
    }
    if k == 0 || f == 0 || l == 0 || z > f || f > 63 || k > 63 {
        return precondition(format!("no search over k={k}, l={l}, f={f}, z={z}"));
    }
    let patterns = star_patterns(f, z);
    // C3 forces f - z distinct integers per column; more than k (f - z)
    // integers cannot all occur.
    let lower = (f - z) as u32;
    let upper = s_max.min((k * (f - z)) as u32);
    for s in lower..=upper {
        let mut columns = Vec::with_capacity(k);
        if let Some(cells) = search_stars(&patterns, 0, k, &mut columns, &mut |cols| fill(cols, f, l, s)) {
            return Epda::from_rows(k, l, f, z, s, cells).map(Some);
        }
    }
    Ok(None)
}

fn star_patterns(f: usize, z: usize) -> Vec<u64> {
    (0u64..1 << f).filter(|m| m.count_ones() as usize == z).collect()
}

/// Non-decreasing sequences of star patterns, one per column. Column order
/// is irrelevant for every EPDA condition, so sorted sequences suffice.
fn search_stars<F>(
    patterns: &[u64],
    from: usize,
    k: usize,
    columns: &mut Vec<u64>,
    fill: &mut F,
) -> Option<Vec<Vec<Cell>>>
where
    F: FnMut(&[u64]) -> Option<Vec<Vec<Cell>>>,
{
    if columns.len() == k {
        return fill(columns);
    }
    for i in from..patterns.len() {
        columns.push(patterns[i]);
        let found = search_stars(patterns, i, k, columns, fill);
        columns.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

struct FillState<'a> {
    cells: Vec<(usize, usize)>,
    nonstar_row: Vec<u64>,
    col_used: Vec<u64>,
    rows_of: Vec<u64>,
    cols_of: Vec<u64>,
    value: Vec<u32>,
    l: u32,
    s: u32,
    columns: &'a [u64],
}

impl FillState<'_> {
    fn bound_ok(&self, v: usize) -> bool {
        let mut rows = self.rows_of[v];
        while rows != 0 {
            let row = rows.trailing_zeros() as usize;
            rows &= rows - 1;
            if (self.nonstar_row[row] & self.cols_of[v]).count_ones() > self.l {
                return false;
            }
        }
        true
    }

    fn assign(&mut self, idx: usize, max_used: u32) -> bool {
        if idx == self.cells.len() {
            return max_used == self.s;
        }
        if (self.s - max_used) as usize > self.cells.len() - idx {
            return false;
        }
        let (row, col) = self.cells[idx];
        for v in 1..=(max_used + 1).min(self.s) {
            let bit = 1u64 << v;
            if self.col_used[col] & bit != 0 {
                continue;
            }
            let (old_rows, old_cols) = (self.rows_of[v as usize], self.cols_of[v as usize]);
            self.col_used[col] |= bit;
            self.rows_of[v as usize] |= 1 << row;
            self.cols_of[v as usize] |= 1 << col;
            self.value[idx] = v;
            if self.bound_ok(v as usize) && self.assign(idx + 1, max_used.max(v)) {
                return true;
            }
            self.col_used[col] &= !bit;
            self.rows_of[v as usize] = old_rows;
            self.cols_of[v as usize] = old_cols;
        }
        false
    }

    fn grid(&self, f: usize) -> Vec<Vec<Cell>> {
        let mut grid: Vec<Vec<Cell>> = (0..f)
            .map(|row| {
                self.columns
                    .iter()
                    .map(|&m| if m >> row & 1 == 1 { Cell::Star } else { Cell::Null })
                    .collect()
            })
            .collect();
        for (&(row, col), &v) in self.cells.iter().zip(&self.value) {
            grid[row][col] = Cell::Int(v);
        }
        grid
    }
}

fn fill(columns: &[u64], f: usize, l: usize, s: u32) -> Option<Vec<Vec<Cell>>> {
    let cells: Vec<(usize, usize)> = columns
        .iter()
        .enumerate()
        .flat_map(|(c, &m)| (0..f).filter(move |&row| m >> row & 1 == 0).map(move |row| (row, c)))
        .collect();
    if s == 0 {
        return cells.is_empty().then(|| {
            (0..f).map(|_| vec![Cell::Star; columns.len()]).collect()
        });
    }
    if s > 63 {
        return None;
    }
    let mut nonstar_row = vec![0u64; f];
    for &(row, col) in &cells {
        nonstar_row[row] |= 1 << col;
    }
    let mut state = FillState {
        value: vec![0; cells.len()],
        cells,
        nonstar_row,
        col_used: vec![0; columns.len()],
        rows_of: vec![0; s as usize + 1],
        cols_of: vec![0; s as usize + 1],
        l: l as u32,
        s,
        columns,
    };
    state.assign(0, 0).then(|| state.grid(f))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Array parameters obtained by feeding the `(K, L, (t+L)C(K,t+L),
/// t C(K-1,t+L-1), (K-t)C(K,t+L))` EPDA family into [`lemma1_construct`],
/// with `K = K1K2/r²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParameters {
    pub k: usize,
    pub t: usize,
    pub l: usize,
    pub epda_f: BigUint,
    pub epda_z: BigUint,
    pub epda_s: BigUint,
    pub caching_f: BigUint,
    pub caching_z: BigUint,
    pub delivery_s: BigUint,
}

impl FamilyParameters {
    /// `S/F` of the resulting delivery array.
    pub fn ndt(&self) -> BigRational {
        BigRational::new(BigInt::from(self.delivery_s.clone()), BigInt::from(self.caching_f.clone()))
    }

    /// `Z/F` of the resulting caching array.
    pub fn cache_fraction(&self) -> BigRational {
        BigRational::new(BigInt::from(self.caching_z.clone()), BigInt::from(self.caching_f.clone()))
    }
}

pub fn epda_family_parameters(p: &NetworkParams) -> Result<FamilyParameters> {
    let r = p.r();
    Lemma1Layout::new(p.k1(), p.k2(), r, 0)?;
    let k = p.users() / (r * r);
    let Some(t) = p.t_integer() else {
        return precondition(format!("requires integer t = K1 K2 M/N (got {})", p.t()));
    };
    let l = p.l();
    if t + l > k {
        return precondition(format!("requires t + L <= K1 K2 / r² = {k} (got t={t}, L={l})"));
    }
    let groups = BigUint::from(r * r);
    let epda_f = BigUint::from(t + l) * binomial(k, t + l);
    let epda_z = BigUint::from(t) * binomial(k - 1, t + l - 1);
    let epda_s = BigUint::from(k - t) * binomial(k, t + l);
    Ok(FamilyParameters {
        k,
        t,
        l,
        caching_f: &groups * &epda_f,
        caching_z: epda_z.clone(),
        delivery_s: &groups * &groups * &epda_s,
        epda_f,
        epda_z,
        epda_s,
    })
}
