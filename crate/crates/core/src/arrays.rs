//! Star/integer arrays and their condition verifiers.
//!
//! Three array kinds appear in a scheme:
//!
//! * [`Epda`]: a `(K, L, F, Z, S)` extended placement delivery array
//!   (conditions C1–C4),
//! * [`CachingArray`]: a star/null array whose columns are caches,
//! * [`DeliveryArray`]: a star/integer array whose columns are users
//!   (conditions D1–D4, D1 tying its stars to a caching array).
//!
//! Cells are stored densely in row-major order. The `get` accessors take
//! 0-based storage indices; every row, column, subfile and label that leaves
//! this module in a report or sub-array is 1-based.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{MaccError, Result};
use crate::grid::{GridPos, Torus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Star,
    Null,
    Int(u32),
}

impl Cell {
    pub fn is_star(self) -> bool {
        matches!(self, Cell::Star)
    }

    pub fn int(self) -> Option<u32> {
        match self {
            Cell::Int(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Star => f.write_str("*"),
            Cell::Null => f.write_str("-"),
            Cell::Int(s) => write!(f, "{s}"),
        }
    }
}

/// Column labeling orders used by the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelOrder {
    /// `(1,1), (1,2), …, (1,K2), (2,1), …`: `k2` varies fastest.
    RowMajor,
    /// `(1,1), (2,1), …, (K1,1), (1,2), …`: `k1` varies fastest.
    ColumnMajor,
}

impl LabelOrder {
    pub fn labels(self, k1: usize, k2: usize) -> Vec<GridPos> {
        match self {
            LabelOrder::RowMajor => (1..=k1)
                .flat_map(|i| (1..=k2).map(move |j| GridPos::new(i, j)))
                .collect(),
            LabelOrder::ColumnMajor => (1..=k2)
                .flat_map(|j| (1..=k1).map(move |i| GridPos::new(i, j)))
                .collect(),
        }
    }
}

/// Read access shared by arrays made of stars and integers.
pub trait IntegerArray {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Cell at 0-based storage position.
    fn get(&self, row: usize, col: usize) -> Cell;
    /// Declared integer alphabet size `S`.
    fn alphabet(&self) -> u32;
    /// Declared per-row bound `L` of the sub-array condition.
    fn row_bound(&self) -> usize;
    fn label(&self, _col: usize) -> Option<GridPos> {
        None
    }
}

fn check_dims(f: usize, cols: usize, len: usize) -> Result<()> {
    if f == 0 || cols == 0 {
        return Err(MaccError::Structural(format!(
            "array must have at least one row and column (got {f}x{cols})"
        )));
    }
    if len != f * cols {
        return Err(MaccError::Structural(format!(
            "expected {f}x{cols} = {} cells, got {len}",
            f * cols
        )));
    }
    Ok(())
}

fn check_int_cells(cells: &[Cell], cols: usize, s: u32, allow_null: bool) -> Result<()> {
    for (idx, &c) in cells.iter().enumerate() {
        let (row, col) = (idx / cols + 1, idx % cols + 1);
        match c {
            Cell::Null if !allow_null => {
                return Err(MaccError::Structural(format!(
                    "null cell not allowed at row {row}, column {col}"
                )))
            }
            Cell::Int(v) if v == 0 || v > s => {
                return Err(MaccError::Structural(format!(
                    "integer {v} at row {row}, column {col} outside [1, {s}]"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Maps labels to column positions; fails unless `labels` is a bijection
/// onto the grid.
fn label_index(torus: &Torus, labels: &[GridPos]) -> Result<Vec<usize>> {
    if labels.len() != torus.len() {
        return Err(MaccError::Structural(format!(
            "expected {} column labels, got {}",
            torus.len(),
            labels.len()
        )));
    }
    let mut index = vec![usize::MAX; torus.len()];
    for (col, &pos) in labels.iter().enumerate() {
        if !torus.contains(pos) {
            return Err(MaccError::Structural(format!(
                "column label {pos} outside the {}x{} grid",
                torus.k1, torus.k2
            )));
        }
        let slot = &mut index[torus.index(pos)];
        if *slot != usize::MAX {
            return Err(MaccError::Structural(format!("duplicate column label {pos}")));
        }
        *slot = col;
    }
    Ok(index)
}

/// A `(K, L, F, Z, S)` extended placement delivery array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epda {
    k: usize,
    l: usize,
    f: usize,
    z: usize,
    s: u32,
    cells: Vec<Cell>,
}

impl Epda {
    /// `cells` in row-major order, `f` rows of `k` cells.
    pub fn new(k: usize, l: usize, f: usize, z: usize, s: u32, cells: Vec<Cell>) -> Result<Self> {
        check_dims(f, k, cells.len())?;
        check_int_cells(&cells, k, s, false)?;
        Ok(Self { k, l, f, z, s, cells })
    }

    pub fn from_rows(k: usize, l: usize, f: usize, z: usize, s: u32, rows: Vec<Vec<Cell>>) -> Result<Self> {
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(MaccError::Structural(format!(
                "row {} has {} cells, expected {k}",
                i + 1,
                row.len()
            )));
        }
        if rows.len() != f {
            return Err(MaccError::Structural(format!("expected {f} rows, got {}", rows.len())));
        }
        Self::new(k, l, f, z, s, rows.into_iter().flatten().collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn z(&self) -> usize {
        self.z
    }
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// New array whose column `c` is column `perm[c]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Epda> {
        let seen: BTreeSet<_> = perm.iter().copied().collect();
        if perm.len() != self.k || seen.len() != self.k || seen.iter().any(|&c| c >= self.k) {
            return Err(MaccError::Precondition("not a column permutation".into()));
        }
        let cells = (0..self.f)
            .flat_map(|row| perm.iter().map(move |&c| (row, c)))
            .map(|(row, c)| self.get(row, c))
            .collect();
        Epda::new(self.k, self.l, self.f, self.z, self.s, cells)
    }
}

impl IntegerArray for Epda {
    fn rows(&self) -> usize {
        self.f
    }
    fn cols(&self) -> usize {
        self.k
    }
    fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.k + col]
    }
    fn alphabet(&self) -> u32 {
        self.s
    }
    fn row_bound(&self) -> usize {
        self.l
    }
}

/// A `(K1, K2, F, Z)` caching array: `F` rows, one column per cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachingArray {
    k1: usize,
    k2: usize,
    f: usize,
    z: usize,
    stars: Vec<bool>,
    labels: Vec<GridPos>,
    index: Vec<usize>,
}

impl CachingArray {
    /// `stars` in row-major order; every column must hold exactly `z` stars.
    pub fn new(k1: usize, k2: usize, f: usize, z: usize, stars: Vec<bool>, labels: Vec<GridPos>) -> Result<Self> {
        let torus = Torus::new(k1, k2, 1);
        check_dims(f, torus.len(), stars.len())?;
        let index = label_index(&torus, &labels)?;
        let cols = torus.len();
        for col in 0..cols {
            let found = (0..f).filter(|&row| stars[row * cols + col]).count();
            if found != z {
                return Err(MaccError::Structural(format!(
                    "caching column {} (cache {}) holds {found} stars, expected {z}",
                    col + 1,
                    labels[col]
                )));
            }
        }
        Ok(Self { k1, k2, f, z, stars, labels, index })
    }

    pub fn k1(&self) -> usize {
        self.k1
    }
    pub fn k2(&self) -> usize {
        self.k2
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn z(&self) -> usize {
        self.z
    }
    pub fn cols(&self) -> usize {
        self.k1 * self.k2
    }
    pub fn labels(&self) -> &[GridPos] {
        &self.labels
    }

    /// Column position holding cache `pos` (0-based).
    pub fn column_of(&self, pos: GridPos) -> usize {
        self.index[(pos.row - 1) * self.k2 + (pos.col - 1)]
    }

    pub fn is_star(&self, row: usize, col: usize) -> bool {
        self.stars[row * self.cols() + col]
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        if self.is_star(row, col) {
            Cell::Star
        } else {
            Cell::Null
        }
    }

    /// Subfile indices (1-based) stored by cache `pos`.
    pub fn star_rows(&self, pos: GridPos) -> Vec<usize> {
        let col = self.column_of(pos);
        (0..self.f).filter(|&row| self.is_star(row, col)).map(|r| r + 1).collect()
    }
}

/// A `(C, r, L, S)` delivery array: `F` rows, one column per user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryArray {
    k1: usize,
    k2: usize,
    f: usize,
    r: usize,
    l: usize,
    s: u32,
    cells: Vec<Cell>,
    labels: Vec<GridPos>,
    index: Vec<usize>,
}

impl DeliveryArray {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k1: usize,
        k2: usize,
        f: usize,
        r: usize,
        l: usize,
        s: u32,
        cells: Vec<Cell>,
        labels: Vec<GridPos>,
    ) -> Result<Self> {
        let torus = Torus::new(k1, k2, r);
        check_dims(f, torus.len(), cells.len())?;
        if r == 0 || l == 0 {
            return Err(MaccError::Structural("r and l must be positive".into()));
        }
        check_int_cells(&cells, torus.len(), s, false)?;
        let index = label_index(&torus, &labels)?;
        Ok(Self { k1, k2, f, r, l, s, cells, labels, index })
    }

    pub fn k1(&self) -> usize {
        self.k1
    }
    pub fn k2(&self) -> usize {
        self.k2
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn s(&self) -> u32 {
        self.s
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    pub fn labels(&self) -> &[GridPos] {
        &self.labels
    }
    pub fn torus(&self) -> Torus {
        Torus::new(self.k1, self.k2, self.r)
    }

    pub fn column_of(&self, pos: GridPos) -> usize {
        self.index[(pos.row - 1) * self.k2 + (pos.col - 1)]
    }

    /// Same array with a different declared antenna bound.
    pub fn with_l(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(MaccError::Structural("l must be positive".into()));
        }
        Ok(Self { l, ..self.clone() })
    }
}

impl IntegerArray for DeliveryArray {
    fn rows(&self) -> usize {
        self.f
    }
    fn cols(&self) -> usize {
        self.k1 * self.k2
    }
    fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.cols() + col]
    }
    fn alphabet(&self) -> u32 {
        self.s
    }
    fn row_bound(&self) -> usize {
        self.l
    }
    fn label(&self, col: usize) -> Option<GridPos> {
        Some(self.labels[col])
    }
}

/// First violation found for a condition. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    StarCount {
        column: usize,
        expected: usize,
        found: usize,
    },
    StarMismatch {
        row: usize,
        column: usize,
        label: GridPos,
        expected_star: bool,
    },
    MissingInteger {
        s: u32,
    },
    Repeated {
        s: u32,
        column: usize,
        first_row: usize,
        second_row: usize,
    },
    /// A row of the sub-array for `s` holds `count > bound` integers.
    RowOverload {
        s: u32,
        row: usize,
        count: usize,
        bound: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Epda,
    Delivery,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionOutcome {
    pub name: &'static str,
    pub counterexample: Option<Counterexample>,
}

impl ConditionOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub kind: ArrayKind,
    pub outcomes: Vec<ConditionOutcome>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(ConditionOutcome::passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = (&'static str, &Counterexample)> {
        self.outcomes
            .iter()
            .filter_map(|o| o.counterexample.as_ref().map(|c| (o.name, c)))
    }
}

/// Rows (1-based) and columns (1-based) retained for integer `s`, with the
/// induced sub-grid in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubArray {
    pub s: u32,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub cells: Vec<Cell>,
}

impl SubArray {
    pub fn get(&self, i: usize, j: usize) -> Cell {
        self.cells[i * self.cols.len() + j]
    }

    pub fn row_integer_count(&self, i: usize) -> usize {
        (0..self.cols.len()).filter(|&j| self.get(i, j).int().is_some()).count()
    }
}

/// The sub-array obtained by deleting every row and column without `s`.
pub fn subarray<A: IntegerArray + ?Sized>(a: &A, s: u32) -> Result<SubArray> {
    if s == 0 || s > a.alphabet() {
        return Err(MaccError::Precondition(format!(
            "integer {s} outside [1, {}]",
            a.alphabet()
        )));
    }
    let (rows, cols) = occupancy(a, s);
    let cells = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .map(|(r, c)| a.get(r, c))
        .collect();
    Ok(SubArray {
        s,
        rows: rows.into_iter().map(|r| r + 1).collect(),
        cols: cols.into_iter().map(|c| c + 1).collect(),
        cells,
    })
}

/// 0-based rows and columns containing `s`, ascending.
fn occupancy<A: IntegerArray + ?Sized>(a: &A, s: u32) -> (Vec<usize>, Vec<usize>) {
    let mut rows = BTreeSet::new();
    let mut cols = BTreeSet::new();
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            if a.get(r, c) == Cell::Int(s) {
                rows.insert(r);
                cols.insert(c);
            }
        }
    }
    (rows.into_iter().collect(), cols.into_iter().collect())
}

/// Occurrence, repetition and sub-array row-bound checks (C2–C4 / D2–D4).
fn integer_conditions<A: IntegerArray + ?Sized>(
    a: &A,
) -> (Option<Counterexample>, Option<Counterexample>, Option<Counterexample>, Vec<String>) {
    let s_max = a.alphabet();
    let mut seen = vec![false; s_max as usize + 1];
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            if let Cell::Int(s) = a.get(r, c) {
                seen[s as usize] = true;
            }
        }
    }
    let missing: Vec<u32> = (1..=s_max).filter(|&s| !seen[s as usize]).collect();
    let mut notes = Vec::new();
    if !missing.is_empty() {
        notes.push(format!(
            "declared S={s_max} is not tight: integers {missing:?} never occur"
        ));
    }
    let occurs = missing.first().map(|&s| Counterexample::MissingInteger { s });

    // row-major scan, reporting the second occurrence of a repeated integer
    let mut first_row: Vec<Vec<Option<usize>>> = vec![vec![None; s_max as usize + 1]; a.cols()];
    let mut repeated = None;
    'scan: for r in 0..a.rows() {
        for c in 0..a.cols() {
            if let Cell::Int(s) = a.get(r, c) {
                match first_row[c][s as usize] {
                    Some(prev) => {
                        repeated = Some(Counterexample::Repeated {
                            s,
                            column: c + 1,
                            first_row: prev + 1,
                            second_row: r + 1,
                        });
                        break 'scan;
                    }
                    None => first_row[c][s as usize] = Some(r),
                }
            }
        }
    }

    let bound = a.row_bound();
    let mut overload = None;
    'ints: for s in 1..=s_max {
        let (rows, cols) = occupancy(a, s);
        for &r in &rows {
            let count = cols.iter().filter(|&&c| a.get(r, c).int().is_some()).count();
            if count > bound {
                overload = Some(Counterexample::RowOverload {
                    s,
                    row: r + 1,
                    count,
                    bound,
                });
                break 'ints;
            }
        }
    }
    (occurs, repeated, overload, notes)
}

/// Checks C1–C4 for an EPDA.
pub fn verify_epda(a: &Epda) -> ConditionReport {
    let mut star_count = None;
    for col in 0..a.k {
        let found = (0..a.f).filter(|&r| a.get(r, col).is_star()).count();
        if found != a.z {
            star_count = Some(Counterexample::StarCount {
                column: col + 1,
                expected: a.z,
                found,
            });
            break;
        }
    }
    let (c2, c3, c4, notes) = integer_conditions(a);
    ConditionReport {
        kind: ArrayKind::Epda,
        outcomes: vec![
            ConditionOutcome { name: "C1", counterexample: star_count },
            ConditionOutcome { name: "C2", counterexample: c2 },
            ConditionOutcome { name: "C3", counterexample: c3 },
            ConditionOutcome { name: "C4", counterexample: c4 },
        ],
        notes,
    }
}

/// Star pattern forced on a delivery array by a caching array: user
/// `(i, j)` sees a star at row `f` iff one of its accessible caches stores
/// subfile `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarMask {
    f: usize,
    torus: Torus,
    bits: Vec<bool>,
}

impl StarMask {
    /// Row is 0-based.
    pub fn is_star(&self, row: usize, user: GridPos) -> bool {
        self.bits[row * self.torus.len() + self.torus.index(user)]
    }

    /// Starred subfile indices (1-based) for a user.
    pub fn star_rows(&self, user: GridPos) -> Vec<usize> {
        (0..self.f).filter(|&r| self.is_star(r, user)).map(|r| r + 1).collect()
    }

    pub fn rows(&self) -> usize {
        self.f
    }
}

pub fn stars_from_caching(c: &CachingArray, r: usize) -> StarMask {
    let torus = Torus::new(c.k1, c.k2, r);
    let n = torus.len();
    let mut bits = vec![false; c.f * n];
    for user in torus.positions() {
        let u = torus.index(user);
        for cache in torus.access_set(user) {
            let col = c.column_of(cache);
            for row in 0..c.f {
                if c.is_star(row, col) {
                    bits[row * n + u] = true;
                }
            }
        }
    }
    StarMask { f: c.f, torus, bits }
}

/// Checks D1–D4 for `b` against the caching array `c`.
pub fn verify_delivery_array(b: &DeliveryArray, c: &CachingArray) -> Result<ConditionReport> {
    if b.k1 != c.k1 || b.k2 != c.k2 || b.f != c.f {
        return Err(MaccError::Structural(format!(
            "delivery array is {}x{} over a {}x{} grid but caching array is {}x{} over {}x{}",
            b.f,
            b.cols(),
            b.k1,
            b.k2,
            c.f,
            c.cols(),
            c.k1,
            c.k2
        )));
    }
    let mask = stars_from_caching(c, b.r);
    let mut d1 = None;
    'scan: for row in 0..b.f {
        for col in 0..b.cols() {
            let label = b.labels[col];
            let expected_star = mask.is_star(row, label);
            if expected_star != b.get(row, col).is_star() {
                d1 = Some(Counterexample::StarMismatch {
                    row: row + 1,
                    column: col + 1,
                    label,
                    expected_star,
                });
                break 'scan;
            }
        }
    }
    let (d2, d3, d4, notes) = integer_conditions(b);
    Ok(ConditionReport {
        kind: ArrayKind::Delivery,
        outcomes: vec![
            ConditionOutcome { name: "D1", counterexample: d1 },
            ConditionOutcome { name: "D2", counterexample: d2 },
            ConditionOutcome { name: "D3", counterexample: d3 },
            ConditionOutcome { name: "D4", counterexample: d4 },
        ],
        notes,
    })
}
