mod common;

use common::*;
use macc_core::arrays::verify_delivery_array;
use macc_core::formats::{
    emit_report, parse_array, print_array, print_caching, print_epda, ArrayDocument,
};
use macc_core::scheme::{compute_ndt, Demand, MaccScheme};
use macc_core::{search_epda, Ndt};
use proptest::prelude::*;

fn round_trip(doc: ArrayDocument) {
    let text = print_array(&doc);
    let back = parse_array(&text).unwrap();
    assert_eq!(back, doc);
    assert_eq!(print_array(&back), text);
}

#[test]
fn golden_files_are_canonical_up_to_comments() {
    for name in ["grid3_caching.txt", "grid3_delivery.txt", "grid34_caching.txt", "grid34_delivery.txt", "epda_4_2_4_2_2.txt"] {
        let text = data(name);
        let stripped: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(print_array(&parse_array(&text).unwrap()), stripped, "{name}");
    }
}

#[test]
fn grid3_document_verifies() {
    let report = verify_delivery_array(&grid3_delivery(), &grid3_caching()).unwrap();
    assert!(report.passed());
}

#[test]
fn sweep_round_trips() {
    for inst in sweep() {
        round_trip(ArrayDocument::Caching(inst.caching.clone()));
        round_trip(ArrayDocument::Delivery(inst.delivery.clone()));
    }
    round_trip(ArrayDocument::Epda(small_epda()));
    round_trip(ArrayDocument::Epda(diagonal_epda(5)));
}

#[test]
fn grid3_ndt_json() {
    let ndt: Ndt = compute_ndt(&grid3_caching(), &grid3_delivery(), &params(3, 3, 2, 5, 1, 9)).unwrap();
    let json = emit_report(&ndt);
    assert!(json.contains("\"achieved\": \"5/9\""), "{json}");
}

#[test]
fn grid34_ndt_json_flags_optimal() {
    let ndt: Ndt = compute_ndt(&grid34_caching(), &grid34_delivery(), &params(3, 4, 2, 4, 1, 6)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&emit_report(&ndt)).unwrap();
    assert_eq!(v["optimal_flag"], serde_json::json!(true));
    assert_eq!(v["lower_bound"], serde_json::json!("1/3"));
}

#[test]
fn trial_reports_are_byte_identical() {
    let scheme = MaccScheme::new(params(3, 3, 2, 5, 1, 9), grid3_caching(), grid3_delivery(), 9).unwrap();
    let run = || emit_report(&scheme.run_trial::<f64>(&Demand::distinct(9), 11).unwrap());
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn searched_epdas_round_trip(k in 1usize..5, f in 1usize..5, z_seed in 0usize..5, l in 1usize..4) {
        let z = z_seed % (f + 1);
        if let Some(a) = search_epda(k, l, f, z, 12).unwrap() {
            let text = print_epda(&a);
            prop_assert_eq!(parse_array(&text).unwrap(), ArrayDocument::Epda(a));
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored(pad in proptest::collection::vec(prop_oneof![Just(""), Just("# note"), Just("   ")], 0..4)) {
        let mut text = String::new();
        for line in print_caching(&grid3_caching()).lines() {
            for p in &pad {
                text.push_str(p);
                text.push('\n');
            }
            text.push_str(line);
            text.push('\n');
        }
        prop_assert_eq!(parse_array(&text).unwrap(), ArrayDocument::Caching(grid3_caching()));
    }
}
