//! Wrap-around grid geometry.
//!
//! Caches sit on a `k1 × k2` torus; the user at grid position `(i, j)`
//! reads the `r × r` block of caches `(i + a, j + b)`, `a, b ∈ [0, r)`,
//! with indices reduced by [`cyc`]. All coordinates are 1-based.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{MaccError, Result};

/// Residue of `x` modulo `m` in `1..=m` (a zero residue maps to `m`).
pub fn cyc(x: i64, m: i64) -> i64 {
    debug_assert!(m >= 1);
    let r = x.rem_euclid(m);
    if r == 0 {
        m
    } else {
        r
    }
}

/// A position on the grid, used both for cache ids and for user positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPos {
    pub row: usize,
    pub col: usize,
}

impl GridPos {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

pub type CacheId = GridPos;

/// User `U_k` with flat index `k = (i - 1) * k2 + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId {
    pub flat: usize,
}

impl UserId {
    pub fn from_pos(pos: GridPos, k2: usize) -> Self {
        Self {
            flat: (pos.row - 1) * k2 + pos.col,
        }
    }

    pub fn pos(self, k2: usize) -> GridPos {
        GridPos::new((self.flat - 1) / k2 + 1, (self.flat - 1) % k2 + 1)
    }
}

/// Grid shape plus access radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub k1: usize,
    pub k2: usize,
    pub r: usize,
}

impl Torus {
    pub fn new(k1: usize, k2: usize, r: usize) -> Self {
        Self { k1, k2, r }
    }

    pub fn len(&self) -> usize {
        self.k1 * self.k2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, pos: GridPos) -> bool {
        (1..=self.k1).contains(&pos.row) && (1..=self.k2).contains(&pos.col)
    }

    /// Positions in row-major (lexicographic, `k2` fastest) order.
    pub fn positions(&self) -> impl Iterator<Item = GridPos> + '_ {
        (1..=self.k1).flat_map(move |i| (1..=self.k2).map(move |j| GridPos::new(i, j)))
    }

    /// Row-major dense index of a position, 0-based.
    pub fn index(&self, pos: GridPos) -> usize {
        (pos.row - 1) * self.k2 + (pos.col - 1)
    }

    pub fn shift(&self, pos: GridPos, da: i64, db: i64) -> GridPos {
        GridPos::new(
            cyc(pos.row as i64 + da, self.k1 as i64) as usize,
            cyc(pos.col as i64 + db, self.k2 as i64) as usize,
        )
    }

    /// The `r²` caches read by the user at `user`, ordered by `(a, b)`.
    pub fn access_set(&self, user: GridPos) -> Vec<CacheId> {
        let r = self.r as i64;
        (0..r)
            .flat_map(|a| (0..r).map(move |b| (a, b)))
            .map(|(a, b)| self.shift(user, a, b))
            .collect()
    }
}

/// The `(K1, K2, r, L, M/N)` system parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkParams {
    k1: usize,
    k2: usize,
    r: usize,
    l: usize,
    mu: Rational64,
}

impl NetworkParams {
    pub fn new(k1: usize, k2: usize, r: usize, l: usize, mu: Rational64) -> Result<Self> {
        if k1 == 0 || k2 == 0 || r == 0 || l == 0 {
            return Err(MaccError::InvalidParams(
                "k1, k2, r and l must be positive".into(),
            ));
        }
        if k2 < k1 {
            return Err(MaccError::InvalidParams(format!(
                "requires k2 >= k1 (got k1={k1}, k2={k2})"
            )));
        }
        if r >= k1 {
            return Err(MaccError::InvalidParams(format!(
                "requires r < k1 (got r={r}, k1={k1})"
            )));
        }
        if mu <= Rational64::zero() || mu > Rational64::one() {
            return Err(MaccError::InvalidParams(format!(
                "requires 0 < M/N <= 1 (got {mu})"
            )));
        }
        Ok(Self { k1, k2, r, l, mu })
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Normalized cache size `M/N`.
    pub fn mu(&self) -> Rational64 {
        self.mu
    }

    pub fn users(&self) -> usize {
        self.k1 * self.k2
    }

    /// `t = K1 K2 M/N`, exact.
    pub fn t(&self) -> Rational64 {
        self.mu * Rational64::from_integer(self.users() as i64)
    }

    pub fn t_integer(&self) -> Option<usize> {
        let t = self.t();
        t.is_integer().then(|| t.to_integer() as usize)
    }

    pub fn torus(&self) -> Torus {
        Torus::new(self.k1, self.k2, self.r)
    }
}

/// Caches accessed by user `u` under `p`.
pub fn access_set(u: UserId, p: &NetworkParams) -> Vec<CacheId> {
    let t = p.torus();
    t.access_set(u.pos(p.k2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn params(k1: usize, k2: usize, r: usize) -> NetworkParams {
        NetworkParams::new(k1, k2, r, 1, Rational64::new(1, (k1 * k2) as i64)).unwrap()
    }

    fn set(v: &[(usize, usize)]) -> BTreeSet<GridPos> {
        v.iter().map(|&(a, b)| GridPos::new(a, b)).collect()
    }

    // brute force over the max-distance rule with 0-based forward offsets
    fn brute_access(k1: usize, k2: usize, r: usize, user: GridPos) -> BTreeSet<GridPos> {
        let mut out = BTreeSet::new();
        for c1 in 1..=k1 {
            for c2 in 1..=k2 {
                let d1 = (c1 + k1 - user.row) % k1;
                let d2 = (c2 + k2 - user.col) % k2;
                if d1.max(d2) < r {
                    out.insert(GridPos::new(c1, c2));
                }
            }
        }
        out
    }

    #[test]
    fn cyc_examples() {
        assert_eq!(cyc(7, 3), 1);
        assert_eq!(cyc(6, 3), 3);
        assert_eq!(cyc(0, 4), 4);
        assert_eq!(cyc(-1, 4), 3);
        assert_eq!(cyc(5, 5), 5);
    }

    #[test]
    fn user_flat_index_roundtrip() {
        for k2 in 1..7 {
            for flat in 1..=(k2 * 5) {
                let u = UserId { flat };
                assert_eq!(UserId::from_pos(u.pos(k2), k2), u);
            }
        }
        assert_eq!(UserId { flat: 3 }.pos(3), GridPos::new(1, 3));
        assert_eq!(UserId::from_pos(GridPos::new(2, 1), 3).flat, 4);
    }

    #[test]
    fn access_set_examples() {
        let got: BTreeSet<_> = access_set(UserId { flat: 3 }, &params(3, 3, 2)).into_iter().collect();
        assert_eq!(got, set(&[(1, 3), (1, 1), (2, 3), (2, 1)]));

        let got = access_set(UserId { flat: 5 }, &params(3, 3, 1));
        assert_eq!(got, vec![GridPos::new(2, 2)]);

        let p = params(3, 4, 2);
        let user = UserId::from_pos(GridPos::new(3, 4), 4);
        let got: BTreeSet<_> = access_set(user, &p).into_iter().collect();
        assert_eq!(got, set(&[(3, 4), (3, 1), (1, 4), (1, 1)]));
        assert_eq!(got, brute_access(3, 4, 2, GridPos::new(3, 4)));
    }

    #[test]
    fn example_two_access_lists() {
        let p = params(3, 3, 2);
        let expected = [
            [(1, 1), (1, 2), (2, 1), (2, 2)],
            [(1, 2), (1, 3), (2, 2), (2, 3)],
            [(1, 3), (1, 1), (2, 3), (2, 1)],
            [(2, 1), (2, 2), (3, 1), (3, 2)],
            [(2, 2), (2, 3), (3, 2), (3, 3)],
            [(2, 3), (2, 1), (3, 3), (3, 1)],
            [(3, 1), (3, 2), (1, 1), (1, 2)],
            [(3, 2), (3, 3), (1, 2), (1, 3)],
            [(3, 3), (3, 1), (1, 3), (1, 1)],
        ];
        for (k, exp) in expected.iter().enumerate() {
            let got: BTreeSet<_> = access_set(UserId { flat: k + 1 }, &p).into_iter().collect();
            assert_eq!(got, set(exp), "user {}", k + 1);
        }
    }

    #[test]
    fn every_cache_accessed_by_r_squared_users() {
        for k1 in 1..=8 {
            for k2 in k1..=8 {
                for r in 1..=k1 {
                    let t = Torus::new(k1, k2, r);
                    let mut hits = vec![0usize; t.len()];
                    for u in t.positions() {
                        let acc = t.access_set(u);
                        let distinct: BTreeSet<_> = acc.iter().copied().collect();
                        assert_eq!(distinct.len(), r * r);
                        assert_eq!(distinct, brute_access(k1, k2, r, u));
                        for c in acc {
                            hits[t.index(c)] += 1;
                        }
                    }
                    assert!(hits.iter().all(|&h| h == r * r), "k1={k1} k2={k2} r={r}");
                }
            }
        }
    }

    #[test]
    fn residue_classes_hit_once_when_r_divides() {
        for (k1, k2, r) in [(4, 4, 2), (6, 6, 3), (4, 6, 2), (6, 6, 2)] {
            let t = Torus::new(k1, k2, r);
            for u in t.positions() {
                let classes: BTreeSet<_> = t
                    .access_set(u)
                    .into_iter()
                    .map(|c| (c.row % r, c.col % r))
                    .collect();
                assert_eq!(classes.len(), r * r);
            }
        }
    }

    #[test]
    fn param_invariants() {
        let mu = Rational64::new(1, 9);
        assert!(NetworkParams::new(3, 3, 2, 5, mu).is_ok());
        assert!(NetworkParams::new(4, 3, 2, 5, mu).is_err());
        assert!(NetworkParams::new(3, 3, 3, 5, mu).is_err());
        assert!(NetworkParams::new(3, 3, 1, 5, Rational64::new(0, 1)).is_err());
        assert!(NetworkParams::new(3, 3, 1, 5, Rational64::new(3, 2)).is_err());
        let p = NetworkParams::new(3, 4, 2, 4, Rational64::new(1, 6)).unwrap();
        assert_eq!(p.t_integer(), Some(2));
        let p = NetworkParams::new(3, 4, 2, 4, Rational64::new(1, 5)).unwrap();
        assert_eq!(p.t_integer(), None);
    }

    proptest::proptest! {
        #[test]
        fn access_set_commutes_with_shift(
            k1 in 2usize..8, dk in 0usize..4, r in 1usize..4,
            i in 1usize..10, j in 1usize..12, a in -9i64..9, b in -9i64..9,
        ) {
            let k2 = k1 + dk;
            let r = r.min(k1 - 1).max(1);
            let t = Torus::new(k1, k2, r);
            let u = GridPos::new((i - 1) % k1 + 1, (j - 1) % k2 + 1);
            let moved: BTreeSet<_> = t.access_set(t.shift(u, a, b)).into_iter().collect();
            let shifted: BTreeSet<_> = t.access_set(u).into_iter().map(|c| t.shift(c, a, b)).collect();
            proptest::prop_assert_eq!(moved, shifted);
        }
    }
}
