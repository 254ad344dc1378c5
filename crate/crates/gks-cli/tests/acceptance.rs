//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass line (failures surface as failed tests).

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gks_core::code::{self, hamming_distance, TauSearchOutcome};
use gks_core::game::{
    verify_exhaustive, verify_sampled, verify_structured, Outcome, RunMode, StrategyProfile,
    ViolationClause,
};
use gks_core::hypercube::{
    component_shapes, contains_forbidden_pattern, is_winning, min_k_with,
    minimal_winning_subgraphs, minimality_check, no_2_5_certificate_with, parse_star_edges,
    shape_equivalent, strategy_from_subgraph, subgraph_from_strategy,
    validate_no_2_5_certificate, SearchCache, Shape, ShapeKind,
};
use gks_core::strategy::{
    alice_mode_compose, block_square_strategy, bound_curve, code_family_strategy,
    product_compose, six_word_family, tau_strategy, trivial_strategy, upper_bound_table,
};

fn pass(number: u32, what: &str, elapsed: Duration) {
    println!("criterion {number} ({what}): PASS in {elapsed:.2?}");
}

fn bob_one_based(profile: &StrategyProfile, bits: &[u8]) -> Vec<usize> {
    profile
        .bob_answer(&Outcome::new(bits.to_vec()))
        .into_iter()
        .map(|p| p + 1)
        .collect()
}

#[test]
fn criterion_1_block_strategy_reproduction() {
    let start = Instant::now();
    let profile = block_square_strategy(2);
    let report = verify_exhaustive(&profile).unwrap();
    assert!(report.valid, "{:?}", report.failure);
    assert_eq!(report.runs_checked, 48); // 4! * 2
    assert_eq!(bob_one_based(&profile, &[1, 0, 0, 1]), vec![1, 4]);
    assert_eq!(bob_one_based(&profile, &[0, 0, 1, 0]), vec![1, 2]);
    assert_eq!(bob_one_based(&profile, &[1, 1, 1, 0]), vec![1, 2]);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "{elapsed:.2?}");
    pass(1, "(2,4) block strategy", elapsed);
}

#[test]
fn criterion_2_six_word_family_and_its_composition() {
    let start = Instant::now();
    let family = six_word_family();
    // independent brute force over all pairs
    let mut min = u32::MAX;
    for (i, &a) in family.words().iter().enumerate() {
        for &b in &family.words()[i + 1..] {
            min = min.min(hamming_distance(a, b));
        }
    }
    assert_eq!(min, 3);

    let base = code_family_strategy(&family);
    assert_eq!((base.k, base.k_alice, base.n), (5, Some(1), 6));
    let report = verify_structured(&base).unwrap();
    assert!(report.valid, "{:?}", report.failure);

    let composed = alice_mode_compose(&base).unwrap();
    assert_eq!((composed.k, composed.n), (5, 30));
    let report = verify_structured(&composed).unwrap();
    assert!(report.valid, "{:?}", report.failure);
    let report = verify_sampled(&composed, 100_000, 0).unwrap();
    assert!(report.valid, "{:?}", report.failure);
    assert_eq!(report.runs_checked, 200_000);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "{elapsed:.2?}");
    pass(2, "(5,1,6) family and the (5,30) composition", elapsed);
}

#[test]
fn criterion_3_product_closure_and_worked_example() {
    let start = Instant::now();
    let bases = vec![
        trivial_strategy(1),
        trivial_strategy(2),
        trivial_strategy(3),
        block_square_strategy(2),
        code_family_strategy(&six_word_family()),
    ];
    for base in &bases {
        assert!(verify_exhaustive(base).unwrap().valid);
    }
    for p in &bases {
        for q in &bases {
            if p.n * q.n > 8 {
                continue;
            }
            let composed = product_compose(p, q);
            let report = verify_exhaustive(&composed).unwrap();
            assert!(
                report.valid,
                "({},{}) x ({},{}): {:?}",
                p.k, p.n, q.k, q.n, report.failure
            );
        }
    }

    // Worked example: inner strategies pinned by lookup tables; completing
    // block 2 must set its parity to the outer bit for the prefix (3,4,2).
    let inner_alice = |prefix: &[usize]| -> u8 {
        match prefix {
            [2] => 0,
            [2, 1] => 1,
            [1] => 0,
            [1, 0] => 0,
            [0] => 1,
            [0, 1] => 0,
            _ => 0,
        }
    };
    let outer_alice = |prefix: &[usize]| -> u8 {
        match prefix {
            [2] => 1,
            [2, 3] => 0,
            [2, 3, 1] => 0,
            _ => 0,
        }
    };
    let p = StrategyProfile::new(
        3,
        3,
        Arc::new(inner_alice),
        Arc::new(|_: &Outcome| (0..3).collect::<BTreeSet<_>>()),
    );
    let q = StrategyProfile::new(
        4,
        4,
        Arc::new(outer_alice),
        Arc::new(|_: &Outcome| (0..4).collect::<BTreeSet<_>>()),
    );
    let composed = product_compose(&p, &q);
    let reveals: Vec<usize> = [8, 7, 9, 10, 11, 12, 3, 6, 5, 4]
        .iter()
        .map(|p| p - 1)
        .collect();
    let mut bits = [None::<u8>; 12];
    for i in 0..reveals.len() {
        bits[reveals[i]] = Some(composed.alice_bit(&reveals[..=i]));
    }
    let shown: Vec<String> = bits
        .iter()
        .map(|b| b.map(|v| v.to_string()).unwrap_or_else(|| "*".into()))
        .collect();
    let grouped = format!(
        "({})({})({})({})",
        shown[..3].join(""),
        shown[3..6].join(""),
        shown[6..9].join(""),
        shown[9..].join("")
    );
    assert_eq!(grouped, "(**0)(110)(001)(101)");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "{elapsed:.2?}");
    pass(3, "product closure and the forced-parity assignment", elapsed);
}

#[test]
fn criterion_4_growth_bound_over_the_table() {
    let start = Instant::now();
    let table = upper_bound_table(1000);
    for n in 1..=1000 {
        assert!(
            (table.best_k(n) as f64) <= bound_curve(n),
            "n = {n}: k = {} exceeds {}",
            table.best_k(n),
            bound_curve(n)
        );
    }
    assert!(table.best_k(30) <= 5);
    assert!(table.best_k(900) <= 25);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "{elapsed:.2?}");
    pass(4, "bound curve over sizes up to 1000", elapsed);
}

#[test]
fn criterion_5_minimal_winning_subgraphs() {
    let start = Instant::now();
    let expectations: [(usize, usize, Shape); 4] = [
        (1, 1, Shape::from_digits("1", ShapeKind::Path).unwrap()),
        (2, 2, Shape::from_digits("12", ShapeKind::Path).unwrap()),
        (3, 2, Shape::from_digits("3123", ShapeKind::Path).unwrap()),
        (4, 2, Shape::from_digits("31234214", ShapeKind::Cycle).unwrap()),
    ];
    for (n, k, expected_shape) in &expectations {
        let classes = minimal_winning_subgraphs(*n, *k).unwrap();
        assert_eq!(classes.len(), 1, "({n},{k})");
        let graph = &classes[0];
        assert!(minimality_check(graph).unwrap());
        let shapes = component_shapes(graph).unwrap();
        assert_eq!(shapes.len(), 1, "({n},{k})");
        assert!(
            shape_equivalent(&shapes[0], expected_shape),
            "({n},{k}): got {}, expected {}",
            shapes[0],
            expected_shape
        );
        assert!(!contains_forbidden_pattern(&shapes[0]));
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1800), "{elapsed:.2?}");
    pass(5, "minimal winning subgraph classes", elapsed);
}

#[test]
fn criterion_6_certificate_and_exact_table() {
    let start = Instant::now();
    let mut cache = SearchCache::new();
    let cert = no_2_5_certificate_with(&mut cache).unwrap();
    assert!(cert.accepted);
    validate_no_2_5_certificate(&cert).unwrap();
    assert_eq!(cert.minimal_2_4_classes.len(), 1);
    assert_eq!(
        (cert.counting_line.cycles, cert.counting_line.cycle_vertices),
        (5, 8)
    );
    assert_eq!(cert.counting_line.product, 40);
    assert!(cert.counting_line.product > cert.counting_line.cube_vertices);

    // serialized certificates are re-validated on load
    let reloaded =
        gks_core::hypercube::No25Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(reloaded, cert);

    let expected = [1, 2, 2, 2, 3, 3, 3, 3, 3];
    for n in 1..=9 {
        let result = min_k_with(&mut cache, n).unwrap();
        assert_eq!(
            result.exact,
            Some(expected[n - 1]),
            "n = {n}: {result:?}"
        );
    }
    // beyond size 9 only an interval is reported
    let result = min_k_with(&mut cache, 12).unwrap();
    assert_eq!(result.exact, None);
    assert_eq!((result.lower, result.upper), (3, 4));
    let elapsed = start.elapsed();
    pass(6, "dimension-5 impossibility and the exact table", elapsed);
}

#[test]
fn criterion_7_equivalence_round_trip() {
    let start = Instant::now();
    let graphs = [
        "*0, 0*",
        "10*, *00, 0*0, 01*",
        "*000, 0*00, 01*0, 011*, 0*11, *011, 101*, 10*0",
    ];
    for text in graphs {
        let graph = parse_star_edges(text).unwrap();
        assert!(is_winning(&graph).unwrap());
        let profile = strategy_from_subgraph(&graph).unwrap();
        assert_eq!(profile.k, 2, "{text}");
        let report = verify_exhaustive(&profile).unwrap();
        assert!(report.valid, "{text}: {:?}", report.failure);
        let extraction = subgraph_from_strategy(&profile).unwrap();
        assert!(
            extraction.graph.edges().is_subset(graph.edges()),
            "{text}: extracted graph is not contained in the original"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "{elapsed:.2?}");
    pass(7, "strategy/subgraph round trip", elapsed);
}

#[test]
fn criterion_8_tau_pipeline() {
    let start = Instant::now();
    let codebook = code::hamming_code(4).unwrap();

    let match_start = Instant::now();
    let first = code::tau_matching(&codebook, 4).unwrap();
    assert!(match_start.elapsed() < Duration::from_secs(10));
    let second = code::tau_matching(&codebook, 4).unwrap();
    // reproducible verdict and map
    assert_eq!(format!("{first:?}"), format!("{second:?}"));

    match first {
        TauSearchOutcome::Saturated(map) => {
            let flipped = tau_strategy(&codebook, &map, true).unwrap();
            assert_eq!((flipped.k, flipped.k_alice, flipped.n), (11, Some(1), 15));
            let report = verify_structured(&flipped).unwrap();
            assert!(report.valid, "{:?}", report.failure);

            let composed = alice_mode_compose(&flipped).unwrap();
            assert_eq!((composed.k, composed.n), (11, 165));

            let unflipped = tau_strategy(&codebook, &map, false).unwrap();
            let report = verify_structured(&unflipped).unwrap();
            assert!(!report.valid);
            let violation = report.failure.unwrap();
            assert_eq!(violation.clause, ViolationClause::AnswerExceedsKAlice);
            assert_eq!(violation.mode, Some(RunMode::Normal));
        }
        TauSearchOutcome::Deficient {
            max_matching,
            left_count,
            witness,
            neighborhood_size,
        } => {
            // a deficient outcome must come with a checkable witness
            assert!(max_matching < left_count);
            assert!(witness.len() > neighborhood_size);
        }
    }
    let elapsed = start.elapsed();
    pass(8, "subset-to-codeword pipeline", elapsed);
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical command output
// ---------------------------------------------------------------------------

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_gks"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_9_command_determinism() {
    let start = Instant::now();
    let code6: PathBuf = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/code6.txt");
    let code6 = code6.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", "--spec", "blocksq(2)", "--mode", "exhaustive", "--json"],
        vec!["verify", "--spec", "amc(code6)", "--mode", "structured", "--json"],
        vec![
            "verify", "--spec", "trivial(4)", "--mode", "sampled", "--samples", "2000",
            "--seed", "7", "--json",
        ],
        vec!["table", "--n-max", "3", "--json"],
        vec!["table", "--n-max", "3", "--csv"],
        vec!["subgraph", "solve", "--edges", "*0,0*", "--json"],
        vec!["subgraph", "minimal", "--n", "3", "--k", "2", "--json"],
        vec![
            "subgraph", "shapes", "--edges",
            "*000, 0*00, 01*0, 011*, 0*11, *011, 101*, 10*0", "--json",
        ],
        vec!["subgraph", "to-strategy", "--edges", "*0,0*", "--json"],
        vec!["code", "gen-hamming", "--r", "3", "--json"],
        vec!["code", "distance", "--code", code6, "--json"],
        vec!["code", "puncture", "--code", code6, "--position", "6", "--json"],
        vec!["code", "tau-match", "--code", "hamming3", "--m", "1", "--json"],
        vec!["subgraph", "certify-no25", "--json"],
    ];
    for args in &commands {
        let (out1, code1) = run_cli(args);
        let (out2, code2) = run_cli(args);
        assert_eq!(code1, 0, "{args:?} should succeed");
        assert_eq!(code1, code2, "{args:?}");
        assert_eq!(out1, out2, "output differs between reruns of {args:?}");
        assert!(!out1.is_empty(), "{args:?} printed nothing");
    }
    pass(9, "byte-identical command reruns", start.elapsed());
}
