//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p macc-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use macc_core::arrays::{subarray, verify_delivery_array, verify_epda, Counterexample};
use macc_core::formats::{emit_report, parse_array, print_array, print_caching, print_delivery, ArrayDocument};
use macc_core::scheme::{compute_ndt, Demand, MaccScheme};
use macc_core::{generalized_construct, lemma1_construct, optimal_construct, search_epda, Ndt, SimFloat};
use num_rational::Rational64;
use rayon::prelude::*;

const TRIALS: u64 = 100;
const MAX_REDRAWS: u32 = 3;
const NULLING_TOL: f64 = 1e-9;
const GAIN_FLOOR: f64 = 1e-3;
const SWEEP_LIMIT: Duration = Duration::from_secs(60);
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const SEARCH_LIMIT: Duration = Duration::from_secs(10);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn golden_example() -> Verdict {
    let start = Instant::now();
    let (c, b) = optimal_construct(&params(3, 3, 2, 5, 1, 9)).unwrap();
    let elapsed = start.elapsed();
    let same_c = print_caching(&c) == strip_comments(&data("grid3_caching.txt"));
    let same_b = print_delivery(&b) == strip_comments(&data("grid3_delivery.txt"));
    verdict(
        same_c && same_b && elapsed < GOLDEN_LIMIT,
        format!("C equal: {same_c}, B equal: {same_b}, {elapsed:?}"),
    )
}

fn golden_generalized() -> Verdict {
    let start = Instant::now();
    let (c, b) = generalized_construct(&params(3, 4, 2, 4, 1, 6)).unwrap();
    let elapsed = start.elapsed();
    let same_c = print_caching(&c) == strip_comments(&data("grid34_caching.txt"));
    let same_b = print_delivery(&b) == strip_comments(&data("grid34_delivery.txt"));
    verdict(
        same_c && same_b && elapsed < GOLDEN_LIMIT,
        format!("C1 equal: {same_c}, B1 equal: {same_b}, {elapsed:?}"),
    )
}

fn ndt_exactness() -> Verdict {
    let q = Rational64::new;
    let grid3: Ndt = compute_ndt(&grid3_caching(), &grid3_delivery(), &params(3, 3, 2, 5, 1, 9)).unwrap();
    let grid34: Ndt = compute_ndt(&grid34_caching(), &grid34_delivery(), &params(3, 4, 2, 4, 1, 6)).unwrap();
    let p = params(4, 4, 2, 2, 1, 8);
    let (c, b) = lemma1_construct(&small_epda(), &p).unwrap();
    let lem: Ndt = compute_ndt(&c, &b, &p).unwrap();
    let ok = grid3.achieved == q(5, 9)
        && grid34.achieved == q(1, 3)
        && grid34.lower_bound == q(1, 3)
        && grid34.optimal_flag
        && lem.achieved == q(2, 1)
        && lem.achieved == lem.formula_remark1;
    verdict(
        ok,
        format!(
            "3x3 grid {}, 3x4 grid {} (bound {}, optimal {}), block array {} (formula {})",
            grid3.achieved, grid34.achieved, grid34.lower_bound, grid34.optimal_flag, lem.achieved, lem.formula_remark1
        ),
    )
}

fn verifier_tightness() -> Verdict {
    let c = grid3_caching();
    let b5 = grid3_delivery();
    let b4 = b5.with_l(4).unwrap();
    let pass5 = verify_delivery_array(&b5, &c).unwrap().passed();
    let r4 = verify_delivery_array(&b4, &c).unwrap();
    let d4 = r4.condition("D4").and_then(|o| o.counterexample.clone());
    let others_pass = ["D1", "D2", "D3"].iter().all(|n| r4.condition(n).unwrap().passed());
    let located = match &d4 {
        Some(Counterexample::RowOverload { s, row, count, bound }) => {
            subarray(&b4, *s).unwrap().rows.contains(row) && *count > *bound && *bound == 4
        }
        _ => false,
    };
    verdict(
        pass5 && others_pass && located,
        format!("L=5 pass: {pass5}, L=4 counterexample: {d4:?}"),
    )
}

#[derive(Default)]
struct SweepStats {
    instances: usize,
    trials: u64,
    failures: Vec<String>,
    max_residual: f64,
    min_gain: f64,
    max_error: f64,
    certificate_violations: Vec<String>,
    max_interference: usize,
    redraws: Vec<String>,
}

fn run_sweep() -> (SweepStats, Duration) {
    let start = Instant::now();
    let instances = sweep();
    let per: Vec<SweepStats> = instances
        .par_iter()
        .map(|inst| {
            let users = inst.params.users();
            let l = inst.params.l();
            let mut st = SweepStats { instances: 1, min_gain: f64::INFINITY, ..Default::default() };
            let d4 = verify_delivery_array(&inst.delivery, &inst.caching)
                .unwrap()
                .condition("D4")
                .unwrap()
                .passed();
            let scheme = match MaccScheme::new(inst.params.clone(), inst.caching.clone(), inst.delivery.clone(), users) {
                Ok(s) => s,
                Err(e) => {
                    st.failures.push(format!("{}: {e}", inst.name));
                    return st;
                }
            };
            for seed in 0..TRIALS {
                let demand = if seed % 2 == 0 {
                    Demand::distinct(users)
                } else {
                    Demand::random(users, users, seed)
                };
                st.trials += 1;
                match scheme.run_trial_with::<f64>(&demand, seed, f64::default_tolerances(), MAX_REDRAWS) {
                    Ok(t) => {
                        if t.redraws > 0 {
                            st.redraws.push(format!("{} seed {seed}", inst.name));
                        }
                        st.max_residual = st.max_residual.max(t.plan.max_nulling_residual());
                        st.min_gain = st.min_gain.min(t.plan.min_desired_gain());
                        st.max_error = st.max_error.max(t.decode.max_error());
                        let p = t.plan.max_interference_set();
                        st.max_interference = st.max_interference.max(p);
                        if p > l - 1 || !d4 {
                            st.certificate_violations
                                .push(format!("{} seed {seed}: |P| = {p}, L = {l}, D4 {d4}", inst.name));
                        }
                        if !t.decode.ok() {
                            st.failures.push(format!("{} seed {seed}: {:?}", inst.name, t.decode.failures[0]));
                        }
                    }
                    Err(e) => st.failures.push(format!("{} seed {seed}: {e}", inst.name)),
                }
            }
            st
        })
        .collect();
    let mut total = SweepStats { min_gain: f64::INFINITY, ..Default::default() };
    for st in per {
        total.instances += st.instances;
        total.trials += st.trials;
        total.failures.extend(st.failures);
        total.redraws.extend(st.redraws);
        total.certificate_violations.extend(st.certificate_violations);
        total.max_residual = total.max_residual.max(st.max_residual);
        total.min_gain = total.min_gain.min(st.min_gain);
        total.max_error = total.max_error.max(st.max_error);
        total.max_interference = total.max_interference.max(st.max_interference);
    }
    (total, start.elapsed())
}

fn soundness(st: &SweepStats, elapsed: Duration) -> Verdict {
    let ok = st.failures.is_empty()
        && st.max_residual < NULLING_TOL
        && st.min_gain > GAIN_FLOOR
        && st.trials >= 100 * st.instances as u64
        && elapsed < SWEEP_LIMIT;
    let mut detail = format!(
        "{} schemes x {TRIALS} trials, {} failures, {} channel redraws {:?}, max residual {:.3e}, min gain {:.3e}, max decode error {:.3e}, {elapsed:.2?}",
        st.instances,
        st.failures.len(),
        st.redraws.len(),
        st.redraws,
        st.max_residual,
        st.min_gain,
        st.max_error
    );
    if let Some(first) = st.failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    verdict(ok, detail)
}

fn certificate(st: &SweepStats) -> Verdict {
    verdict(
        st.certificate_violations.is_empty() && st.instances > 0,
        format!(
            "max |P| = {} over {} schemes, {} violations",
            st.max_interference,
            st.instances,
            st.certificate_violations.len()
        ),
    )
}

fn search_oracle() -> Verdict {
    let timed = |k, l, f, z, s_max| {
        let start = Instant::now();
        let a = search_epda(k, l, f, z, s_max).unwrap();
        (a, start.elapsed())
    };
    let (a, t1) = timed(4, 2, 4, 2, 2);
    let (b, t2) = timed(2, 1, 2, 1, 1);
    let s_a = a.as_ref().filter(|a| verify_epda(a).passed()).map(|a| a.s());
    let s_b = b.as_ref().filter(|b| verify_epda(b).passed()).map(|b| b.s());
    verdict(
        s_a == Some(2) && s_b == Some(1) && t1 < SEARCH_LIMIT && t2 < SEARCH_LIMIT,
        format!("(4,2,4,2,2) -> S={s_a:?} in {t1:?}; (2,1,2,1,1) -> S={s_b:?} in {t2:?}"),
    )
}

fn round_trip_and_determinism() -> Verdict {
    let mut docs = Vec::new();
    for inst in sweep() {
        docs.push(ArrayDocument::Caching(inst.caching));
        docs.push(ArrayDocument::Delivery(inst.delivery));
    }
    docs.push(ArrayDocument::Epda(small_epda()));
    let broken = docs
        .iter()
        .filter(|d| parse_array(&print_array(d)).ok().as_ref() != Some(*d))
        .count();

    let report = || {
        let scheme = MaccScheme::new(params(3, 4, 2, 4, 1, 6), grid34_caching(), grid34_delivery(), 12).unwrap();
        let trial = scheme.run_trial::<f64>(&Demand::random(12, 12, 5), 5).unwrap();
        let ndt: Ndt = scheme.ndt().unwrap();
        let verify = verify_delivery_array(scheme.delivery(), scheme.caching()).unwrap();
        format!("{}{}{}", emit_report(&trial), emit_report(&ndt), emit_report(&verify))
    };
    let (a, b) = (report(), report());
    verdict(
        broken == 0 && a == b,
        format!("{} documents, {broken} round-trip mismatches, reports identical: {}", docs.len(), a == b),
    )
}

fn main() -> ExitCode {
    let (stats, elapsed) = run_sweep();
    let results = [
        ("1 golden optimal construction", golden_example()),
        ("2 golden generalized construction", golden_generalized()),
        ("3 exact NDT values", ndt_exactness()),
        ("4 verifier tightness", verifier_tightness()),
        ("5 decode soundness sweep", soundness(&stats, elapsed)),
        ("6 interference set certificate", certificate(&stats)),
        ("7 EPDA search", search_oracle()),
        ("8 round trip and determinism", round_trip_and_determinism()),
    ];
    let mut all = true;
    for (name, v) in &results {
        println!("criterion {name}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        all &= v.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
