use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::arrays::CachingArray;
use crate::error::{MaccError, Result};
use crate::grid::{CacheId, GridPos, Torus};

use super::channel::{stream_rng, DEMAND_STREAM};

/// Uncoded placement: cache `(k1, k2)` stores subfile `f` of every file
/// whenever the caching array has a star at `(f, (k1, k2))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    n_files: usize,
    subfiles_per_file: usize,
    z: usize,
    cache_contents: BTreeMap<CacheId, BTreeSet<usize>>,
}

pub fn build_placement(c: &CachingArray, n_files: usize) -> Result<Placement> {
    let users = c.k1() * c.k2();
    if n_files < users {
        return Err(MaccError::Precondition(format!(
            "requires N >= K1 K2 = {users} files (got N={n_files})"
        )));
    }
    let cache_contents = c
        .labels()
        .iter()
        .map(|&pos| (pos, c.star_rows(pos).into_iter().collect()))
        .collect();
    Ok(Placement {
        n_files,
        subfiles_per_file: c.f(),
        z: c.z(),
        cache_contents,
    })
}

impl Placement {
    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn subfiles_per_file(&self) -> usize {
        self.subfiles_per_file
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Subfile indices (1-based) held by a cache, identical for every file.
    pub fn contents(&self, cache: CacheId) -> &BTreeSet<usize> {
        &self.cache_contents[&cache]
    }

    pub fn caches(&self) -> impl Iterator<Item = (&CacheId, &BTreeSet<usize>)> {
        self.cache_contents.iter()
    }

    /// Subfile indices a user can read from the caches in its window.
    pub fn accessible(&self, torus: &Torus, user: GridPos) -> BTreeSet<usize> {
        torus
            .access_set(user)
            .into_iter()
            .flat_map(|c| self.contents(c).iter().copied())
            .collect()
    }
}

/// Demand vector `d`: `files[k - 1]` is the file (1-based) wanted by `U_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    files: Vec<usize>,
}

impl Demand {
    pub fn new(files: Vec<usize>, users: usize, n_files: usize) -> Result<Self> {
        if files.len() != users {
            return Err(MaccError::Precondition(format!(
                "demand has {} entries, expected {users}",
                files.len()
            )));
        }
        if let Some(bad) = files.iter().find(|&&d| d == 0 || d > n_files) {
            return Err(MaccError::Precondition(format!(
                "demanded file {bad} outside [1, {n_files}]"
            )));
        }
        Ok(Self { files })
    }

    /// Worst case `d_k = k`.
    pub fn distinct(users: usize) -> Self {
        Self {
            files: (1..=users).collect(),
        }
    }

    /// Uniform over `[N]^{K1K2}`.
    pub fn random(users: usize, n_files: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, DEMAND_STREAM);
        Self {
            files: (0..users).map(|_| rng.random_range(1..=n_files)).collect(),
        }
    }

    pub fn files(&self) -> &[usize] {
        &self.files
    }

    pub fn file_of(&self, user_flat: usize) -> usize {
        self.files[user_flat - 1]
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}
