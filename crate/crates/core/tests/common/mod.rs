#![allow(dead_code)]

use macc_core::arrays::{CachingArray, Cell, DeliveryArray, Epda};
use macc_core::constructions::{generalized_construct, lemma1_construct, optimal_construct, search_epda};
use macc_core::formats::{parse_caching, parse_delivery, parse_epda};
use macc_core::NetworkParams;
use num_rational::Rational64;

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn grid3_caching() -> CachingArray {
    parse_caching(&data("grid3_caching.txt")).unwrap()
}

pub fn grid3_delivery() -> DeliveryArray {
    parse_delivery(&data("grid3_delivery.txt")).unwrap()
}

pub fn grid34_caching() -> CachingArray {
    parse_caching(&data("grid34_caching.txt")).unwrap()
}

pub fn grid34_delivery() -> DeliveryArray {
    parse_delivery(&data("grid34_delivery.txt")).unwrap()
}

pub fn small_epda() -> Epda {
    parse_epda(&data("epda_4_2_4_2_2.txt")).unwrap()
}

pub fn params(k1: usize, k2: usize, r: usize, l: usize, n: i64, d: i64) -> NetworkParams {
    NetworkParams::new(k1, k2, r, l, Rational64::new(n, d)).unwrap()
}

/// `(K, K-1, K, 1, K-1)` EPDA: star on the diagonal, `(c - f) mod K`
/// elsewhere.
pub fn diagonal_epda(k: usize) -> Epda {
    let cells = (0..k)
        .flat_map(|f| (0..k).map(move |c| (f, c)))
        .map(|(f, c)| {
            if f == c {
                Cell::Star
            } else {
                Cell::Int(((c + k - f) % k) as u32)
            }
        })
        .collect();
    Epda::new(k, k - 1, k, 1, (k - 1) as u32, cells).unwrap()
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub params: NetworkParams,
    pub caching: CachingArray,
    pub delivery: DeliveryArray,
}

/// Every construction admissible for `K1, K2 ∈ 2..=6`, `r ∈ {1, 2}`.
pub fn sweep() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut push = |name: String, params: NetworkParams, pair: (CachingArray, DeliveryArray)| {
        out.push(Instance {
            name,
            params,
            caching: pair.0,
            delivery: pair.1,
        })
    };
    for k1 in 2..=6usize {
        for k2 in k1..=6usize {
            let n = k1 * k2;
            for r in [1usize, 2].into_iter().filter(|&r| r < k1) {
                if r * r < n {
                    let p = params(k1, k2, r, n - r * r, 1, n as i64);
                    push(format!("optimal {k1}x{k2} r={r}"), p.clone(), optimal_construct(&p).unwrap());
                }
                for t in 2..=k2 {
                    let fits = (k1 % t == 0 && r <= k1 / t) || (k2 % t == 0 && r <= k2 / t);
                    if !fits || r * r * t >= n {
                        continue;
                    }
                    let p = params(k1, k2, r, n - r * r * t, t as i64, n as i64);
                    push(
                        format!("generalized {k1}x{k2} r={r} t={t}"),
                        p.clone(),
                        generalized_construct(&p).unwrap(),
                    );
                }
                if k1 % r != 0 || k2 % r != 0 {
                    continue;
                }
                let k = n / (r * r);
                let mut epdas = Vec::new();
                if k >= 2 {
                    epdas.push(("diagonal", diagonal_epda(k)));
                }
                if k == 4 {
                    epdas.push(("small", small_epda()));
                }
                if k <= 6 {
                    if let Some(a) = search_epda(k, 1, 2, 1, u32::MAX).unwrap() {
                        epdas.push(("searched", a));
                    }
                }
                for (label, a) in epdas {
                    let mu = Rational64::new(a.z() as i64, (r * r * a.f()) as i64);
                    let p = NetworkParams::new(k1, k2, r, a.l(), mu).unwrap();
                    push(
                        format!("lemma1 {k1}x{k2} r={r} {label} epda"),
                        p.clone(),
                        lemma1_construct(&a, &p).unwrap(),
                    );
                }
            }
        }
    }
    out
}
