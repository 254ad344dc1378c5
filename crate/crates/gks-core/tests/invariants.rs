//! Cross-module invariants: agreement between the verification routes,
//! closure properties of the combinators, and solver symmetries.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use proptest::prelude::*;

use gks_core::code::{self, TauSearchOutcome};
use gks_core::game::{
    run_game, run_game_alice_mode, verify_exhaustive, verify_sampled, verify_structured, Outcome,
    RequestOrder, StrategyProfile,
};
use gks_core::hypercube::{
    canonical_form, is_winning, max_degree, subgraph_from_strategy, Edge, HypercubeSubgraph,
};
use gks_core::strategy::{
    alice_mode_compose, block_square_strategy, code_family_strategy, pad_strategy,
    product_compose, six_word_family, tau_strategy, trivial_strategy,
};

fn all_orders(n: usize) -> Vec<RequestOrder> {
    fn rec(remaining: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let x = remaining.remove(i);
            prefix.push(x);
            rec(remaining, prefix, out);
            prefix.pop();
            remaining.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|p| RequestOrder::from_zero_based(p, n).unwrap())
        .collect()
}

fn data_file(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

// ============================================================================
// Alice-outcome sets
// ============================================================================

/// The declared alice-outcome predicate accepts exactly the outcomes that
/// alice-mode runs can produce.
#[test]
fn alice_outcome_predicates_are_exact() {
    let profiles: Vec<StrategyProfile> = (1..=5)
        .map(trivial_strategy)
        .chain([code_family_strategy(&six_word_family())])
        .collect();
    for profile in &profiles {
        let n = profile.n;
        let reached: BTreeSet<Outcome> = all_orders(n)
            .iter()
            .map(|o| run_game_alice_mode(profile, o).unwrap())
            .collect();
        let accepted: BTreeSet<Outcome> = (0..1u64 << n)
            .map(|mask| Outcome::from_mask(mask, n))
            .filter(|o| profile.in_alice_outcomes(o) == Some(true))
            .collect();
        assert_eq!(reached, accepted, "n = {n}");
    }
}

// ============================================================================
// Verifier agreement
// ============================================================================

/// A deliberately broken profile that still reports its reachable outcomes
/// truthfully: bob points one position past the adversary.
fn sabotaged_trivial(n: usize) -> StrategyProfile {
    let truthful = trivial_strategy(n);
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let ones: Vec<usize> = (0..n).filter(|&i| outcome.bit(i) == 1).collect();
        match ones.len() {
            1 => [(ones[0] + 1) % n].into(),
            _ => (0..n).collect(),
        }
    };
    let enumerator = move || truthful.enumerate_reachable().unwrap();
    StrategyProfile::new(n, n, Arc::new(|_| 0), Arc::new(bob))
        .with_alice_mode(
            1,
            Arc::new(|_| 1),
            Arc::new(|outcome: &Outcome| outcome.weight() == 1),
        )
        .with_enumerator(Arc::new(enumerator))
}

#[test]
fn structured_and_exhaustive_verdicts_agree() {
    let hamming3 = code::hamming_code(3).unwrap();
    let TauSearchOutcome::Saturated(map) = code::tau_matching(&hamming3, 1).unwrap() else {
        panic!("length-7 matching with m = 1 saturates");
    };
    let profiles = vec![
        trivial_strategy(3),
        trivial_strategy(5),
        code_family_strategy(&six_word_family()),
        alice_mode_compose(&trivial_strategy(2)).unwrap(),
        tau_strategy(&hamming3, &map, true).unwrap(),
        tau_strategy(&hamming3, &map, false).unwrap(),
        sabotaged_trivial(4),
    ];
    for profile in &profiles {
        let structured = verify_structured(profile).unwrap();
        let exhaustive = verify_exhaustive(profile).unwrap();
        assert_eq!(
            structured.valid, exhaustive.valid,
            "verdicts disagree on ({}, {:?}, {})",
            profile.k, profile.k_alice, profile.n
        );
    }
}

#[test]
fn sampling_never_contradicts_exhaustive_validity() {
    let profiles = vec![
        trivial_strategy(4),
        block_square_strategy(2),
        code_family_strategy(&six_word_family()),
        pad_strategy(&block_square_strategy(2), 3).unwrap(),
    ];
    for profile in &profiles {
        assert!(verify_exhaustive(profile).unwrap().valid);
        for seed in [0, 1, 42] {
            let report = verify_sampled(profile, 500, seed).unwrap();
            assert!(
                report.valid,
                "seed {seed} found a violation on a valid profile: {:?}",
                report.failure
            );
        }
    }
}

#[test]
fn sampled_product_of_block_strategies_is_clean() {
    let composed = product_compose(&block_square_strategy(2), &block_square_strategy(2));
    assert_eq!((composed.k, composed.n), (4, 16));
    let report = verify_sampled(&composed, 100_000, 0).unwrap();
    assert!(report.valid, "{:?}", report.failure);
    assert_eq!(report.runs_checked, 200_000);
}

#[test]
fn sampling_finds_reachable_violations() {
    // blocksq(2) with bob emptied on one reachable outcome
    let good = block_square_strategy(2);
    let broken = Outcome::new(vec![0, 1, 0, 0]);
    let inner = good.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        if *outcome == broken {
            BTreeSet::new()
        } else {
            inner.bob_answer(outcome)
        }
    };
    let good_alice = good.clone();
    let sabotaged = StrategyProfile::new(
        4,
        2,
        Arc::new(move |prefix: &[usize]| good_alice.alice_bit(prefix)),
        Arc::new(bob),
    );
    let report = verify_sampled(&sabotaged, 100_000, 0).unwrap();
    assert!(!report.valid);
    assert_eq!(report.failure.unwrap().outcome.to_string(), "0100");
}

// ============================================================================
// Block strategy against an independent consistency oracle
// ============================================================================

/// For every outcome reachable in the `(2, 4)` block strategy, bob's answer
/// equals the set of adversary positions consistent with that outcome,
/// computed by replaying every run.
#[test]
fn block_square_two_answers_match_consistency_oracle() {
    let profile = block_square_strategy(2);
    let mut consistent: std::collections::BTreeMap<Outcome, BTreeSet<usize>> = Default::default();
    for order in all_orders(4) {
        for bit in 0..2u8 {
            let outcome = run_game(&profile, &order, bit).unwrap();
            let merlin = *order.positions().last().unwrap();
            consistent.entry(outcome).or_default().insert(merlin);
        }
    }
    for (outcome, positions) in &consistent {
        assert_eq!(
            &profile.bob_answer(outcome),
            positions,
            "outcome {outcome}"
        );
    }
}

// ============================================================================
// Combinator closures
// ============================================================================

#[test]
fn product_closure_over_verified_bases() {
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
            assert_eq!((composed.k, composed.n), (p.k * q.k, p.n * q.n));
            let report = verify_exhaustive(&composed).unwrap();
            assert!(
                report.valid,
                "({},{}) x ({},{}): {:?}",
                p.k, p.n, q.k, q.n, report.failure
            );
        }
    }
}

#[test]
fn alice_mode_closure_over_verified_bases() {
    for k in 1..=2 {
        let base = trivial_strategy(k);
        assert!(verify_exhaustive(&base).unwrap().valid);
        let composed = alice_mode_compose(&base).unwrap();
        assert_eq!((composed.k, composed.n), (k, k * k));
        assert!(verify_exhaustive(&composed).unwrap().valid);
    }
}

#[test]
fn padding_preserves_validity_everywhere() {
    let profiles = vec![
        trivial_strategy(4),
        block_square_strategy(2),
        code_family_strategy(&six_word_family()),
        product_compose(&trivial_strategy(2), &trivial_strategy(3)),
    ];
    for profile in &profiles {
        assert!(profile.n <= 8);
        assert!(verify_exhaustive(profile).unwrap().valid);
        for m in 1..profile.n {
            let padded = pad_strategy(profile, m).unwrap();
            assert_eq!((padded.k, padded.n), (profile.k, m));
            let report = verify_exhaustive(&padded).unwrap();
            assert!(
                report.valid,
                "padding ({}, {}) to {m}: {:?}",
                profile.k, profile.n, report.failure
            );
        }
    }
}

// ============================================================================
// Subgraph extraction
// ============================================================================

#[test]
fn extracted_subgraphs_respect_the_answer_bound() {
    let profiles = vec![
        trivial_strategy(2),
        trivial_strategy(3),
        block_square_strategy(2),
        pad_strategy(&block_square_strategy(2), 3).unwrap(),
        code_family_strategy(&six_word_family()),
    ];
    for profile in &profiles {
        assert!(verify_exhaustive(profile).unwrap().valid);
        let extraction = subgraph_from_strategy(profile).unwrap();
        assert!(
            extraction.degree_within_k,
            "degree {} > k {} at n {}",
            extraction.max_degree, profile.k, profile.n
        );
        if profile.n <= 6 {
            assert_eq!(extraction.winning, Some(true));
        }
    }
}

// ============================================================================
// Shipped data: the 40-word length-9 code
// ============================================================================

#[test]
fn shipped_length_nine_code_drives_a_verified_pipeline() {
    let codebook = code::load_code(data_file("code_9_40_3.txt")).unwrap();
    assert_eq!(codebook.length(), 9);
    assert_eq!(codebook.len(), 40);
    assert_eq!(codebook.min_distance().unwrap(), 3);

    // puncturing drops at most one unit of distance and keeps all words
    let punctured = code::puncture(&codebook, 0).unwrap();
    assert_eq!(punctured.len(), 40);
    assert!(punctured.min_distance().unwrap() >= 2);

    // 36 pairs against 40 words
    match code::tau_matching(&codebook, 2).unwrap() {
        TauSearchOutcome::Saturated(map) => {
            let profile = tau_strategy(&codebook, &map, true).unwrap();
            assert_eq!((profile.k, profile.k_alice, profile.n), (7, Some(1), 9));
            assert!(verify_structured(&profile).unwrap().valid);
            let composed = alice_mode_compose(&profile).unwrap();
            assert_eq!((composed.k, composed.n), (7, 63));
            assert!(verify_structured(&composed).unwrap().valid);
        }
        TauSearchOutcome::Deficient { .. } => {
            panic!("the shipped code admits a saturating matching");
        }
    }
}

#[test]
fn shipped_six_word_file_matches_builtin_family() {
    let codebook = code::load_code(data_file("code6.txt")).unwrap();
    assert_eq!(codebook.length(), 6);
    assert_eq!(codebook.len(), 6);
    assert_eq!(codebook.min_distance().unwrap(), 3);
    let family = six_word_family();
    for w in family.words() {
        assert!(codebook.contains(*w));
    }
}

// ============================================================================
// Property tests
// ============================================================================

fn arbitrary_subgraph(n: usize) -> impl Strategy<Value = HypercubeSubgraph> {
    let all_edges: Vec<Edge> = (0..1u32 << n)
        .flat_map(|v| {
            (0..n)
                .filter(move |&d| v >> d & 1 == 0)
                .map(move |d| Edge::new(v, d))
        })
        .collect();
    let count = all_edges.len();
    prop::collection::btree_set(0..count, 0..=count.min(12)).prop_map(move |idx| {
        let edges = idx.iter().map(|&i| all_edges[i]).collect();
        HypercubeSubgraph::new(n, edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winning_is_invariant_under_canonicalization(g in (1usize..=4).prop_flat_map(arbitrary_subgraph)) {
        let canonical = canonical_form(&g).unwrap();
        prop_assert_eq!(is_winning(&g).unwrap(), is_winning(&canonical).unwrap());
        prop_assert_eq!(max_degree(&g), max_degree(&canonical));
        // idempotent
        prop_assert_eq!(canonical_form(&canonical).unwrap(), canonical.clone());
    }

    #[test]
    fn winning_is_monotone_under_edge_addition(
        g in (1usize..=4).prop_flat_map(arbitrary_subgraph),
        extra in any::<prop::sample::Index>(),
    ) {
        let n = g.n();
        let all_edges: Vec<Edge> = (0..1u32 << n)
            .flat_map(|v| (0..n).filter(move |&d| v >> d & 1 == 0).map(move |d| Edge::new(v, d)))
            .collect();
        let e = all_edges[extra.index(all_edges.len())];
        let mut edges = g.edges().clone();
        edges.insert(e);
        let bigger = HypercubeSubgraph::new(n, edges).unwrap();
        if is_winning(&g).unwrap() {
            prop_assert!(is_winning(&bigger).unwrap());
        }
    }

    #[test]
    fn star_notation_round_trips(g in (1usize..=4).prop_flat_map(arbitrary_subgraph)) {
        prop_assume!(g.edge_count() > 0);
        let text = gks_core::hypercube::format_star_edges(&g);
        let back = gks_core::hypercube::parse_star_edges(&text).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn code_files_round_trip(words in prop::collection::btree_set(0u32..1 << 9, 1..40)) {
        let codebook = code::BinaryCode::new(9, words.into_iter().collect()).unwrap();
        let text = code::format_code(&codebook);
        let back = code::parse_code(&text).unwrap();
        prop_assert_eq!(codebook, back);
    }

    #[test]
    fn trivial_runs_have_weight_at_most_one(
        n in 1usize..=6,
        seed in any::<u64>(),
    ) {
        let profile = trivial_strategy(n);
        // a pseudo-random order derived from the seed
        let mut positions: Vec<usize> = (0..n).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            positions.swap(i, (state >> 33) as usize % (i + 1));
        }
        let order = RequestOrder::from_zero_based(positions, n).unwrap();
        for bit in 0..2u8 {
            let outcome = run_game(&profile, &order, bit).unwrap();
            prop_assert!(outcome.weight() <= 1);
            let answer = profile.bob_answer(&outcome);
            prop_assert!(answer.contains(order.positions().last().unwrap()));
        }
    }
}
