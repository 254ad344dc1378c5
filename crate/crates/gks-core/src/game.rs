//! Game semantics and verification.
//!
//! A profile is checked against every adversary behaviour: the adversary
//! picks the order in which positions are revealed and the final bit.  A
//! profile declaring an answer bound `k_alice` for alice-mode outcomes is
//! additionally checked on alice-mode runs (alice sets the final bit herself)
//! and on every outcome its alice-outcome predicate accepts, however that
//! outcome was reached.
//!
//! Positions are 1-based in every textual or serialized form and 0-based in
//! memory.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Largest `n` for which full `n! * 2` enumeration is allowed.
pub const EXHAUSTIVE_MAX_N: usize = 10;
/// Defaults for sampled verification.
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("position {0} out of range 1..={1}")]
    PositionOutOfRange(usize, usize),
    #[error("duplicate position {0}")]
    DuplicatePosition(usize),
    #[error("order has {0} positions, expected a full permutation of {1}")]
    NotFullPermutation(usize, usize),
    #[error("profile does not declare alice-mode support")]
    NoAliceMode,
    #[error("profile does not supply an outcome enumerator")]
    NoEnumerator,
    #[error(
        "n = {0} exceeds the exhaustive limit {EXHAUSTIVE_MAX_N}; \
         use structured or sampled verification"
    )]
    TooLargeForExhaustive(usize),
    #[error("samples must be at least 1")]
    NoSamples,
}

// ============================================================================
// Outcomes and request orders
// ============================================================================

/// The final array: one bit per position.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    bits: Vec<u8>,
}

impl Outcome {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Outcome { bits }
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        Outcome::new((0..n).map(|i| (mask >> i & 1) as u8).collect())
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Bit `i` of the mask is position `i + 1`.
    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| m | (b as u64) << i)
    }

    /// The `size` bits starting at position `block * size` (0-based).
    pub fn block(&self, block: usize, size: usize) -> Outcome {
        Outcome::new(self.bits[block * size..(block + 1) * size].to_vec())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Outcome({self})")
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A sequence of distinct positions (the adversary's reveal order, possibly a
/// prefix).  Stored 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RequestOrder {
    positions: Vec<usize>,
}

impl RequestOrder {
    pub fn from_zero_based(positions: Vec<usize>, n: usize) -> Result<Self, GameError> {
        let mut seen = vec![false; n];
        for &p in &positions {
            if p >= n {
                return Err(GameError::PositionOutOfRange(p + 1, n));
            }
            if seen[p] {
                return Err(GameError::DuplicatePosition(p + 1));
            }
            seen[p] = true;
        }
        Ok(RequestOrder { positions })
    }

    pub fn from_one_based(positions: Vec<usize>, n: usize) -> Result<Self, GameError> {
        if positions.contains(&0) {
            return Err(GameError::PositionOutOfRange(0, n));
        }
        Self::from_zero_based(positions.into_iter().map(|p| p - 1).collect(), n)
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.positions.iter().map(|&p| p + 1).collect()
    }
}

// ============================================================================
// Strategy profiles
// ============================================================================

pub type AliceFn = Arc<dyn Fn(&[usize]) -> u8 + Send + Sync>;
pub type BobFn = Arc<dyn Fn(&Outcome) -> BTreeSet<usize> + Send + Sync>;
pub type OutcomePredicate = Arc<dyn Fn(&Outcome) -> bool + Send + Sync>;
pub type OutcomeEnumerator = Arc<dyn Fn() -> Vec<ReachableTriple> + Send + Sync>;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Normal,
    AliceMode,
}

/// One class of reachable outcomes, for structured verification: the outcome,
/// the set of adversary positions that can produce it (0-based, empty for
/// alice-mode runs), and the mode.
#[derive(Clone, Debug)]
pub struct ReachableTriple {
    pub outcome: Outcome,
    pub merlin_positions: BTreeSet<usize>,
    pub mode: RunMode,
}

/// A pair of strategies plus declared parameters.
///
/// `alice` maps a non-empty reveal-order prefix (0-based positions) to the
/// bit assigned to the prefix's last position.  `bob` maps an outcome to a
/// set of candidate positions (0-based).  Profiles with alice-mode support
/// additionally carry the final-bit rule, the alice-outcome predicate and the
/// `k_alice` bound.
#[derive(Clone)]
pub struct StrategyProfile {
    pub n: usize,
    pub k: usize,
    pub k_alice: Option<usize>,
    alice: AliceFn,
    alice_mode_final: Option<AliceFn>,
    bob: BobFn,
    in_o_a: Option<OutcomePredicate>,
    enumerator: Option<OutcomeEnumerator>,
}

impl fmt::Debug for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrategyProfile")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("k_alice", &self.k_alice)
            .finish()
    }
}

impl StrategyProfile {
    pub fn new(n: usize, k: usize, alice: AliceFn, bob: BobFn) -> Self {
        StrategyProfile {
            n,
            k,
            k_alice: None,
            alice,
            alice_mode_final: None,
            bob,
            in_o_a: None,
            enumerator: None,
        }
    }

    pub fn with_alice_mode(
        mut self,
        k_alice: usize,
        final_bit: AliceFn,
        in_o_a: OutcomePredicate,
    ) -> Self {
        self.k_alice = Some(k_alice);
        self.alice_mode_final = Some(final_bit);
        self.in_o_a = Some(in_o_a);
        self
    }

    pub fn with_enumerator(mut self, enumerator: OutcomeEnumerator) -> Self {
        self.enumerator = Some(enumerator);
        self
    }

    pub fn has_alice_mode(&self) -> bool {
        self.k_alice.is_some() && self.alice_mode_final.is_some()
    }

    pub fn has_enumerator(&self) -> bool {
        self.enumerator.is_some()
    }

    pub fn alice_bit(&self, prefix: &[usize]) -> u8 {
        debug_assert!(!prefix.is_empty());
        (self.alice)(prefix) & 1
    }

    pub fn alice_final_bit(&self, order: &[usize]) -> Result<u8, GameError> {
        let f = self.alice_mode_final.as_ref().ok_or(GameError::NoAliceMode)?;
        Ok(f(order) & 1)
    }

    pub fn bob_answer(&self, outcome: &Outcome) -> BTreeSet<usize> {
        (self.bob)(outcome)
    }

    pub fn in_alice_outcomes(&self, outcome: &Outcome) -> Option<bool> {
        self.in_o_a.as_ref().map(|p| p(outcome))
    }

    pub fn enumerate_reachable(&self) -> Result<Vec<ReachableTriple>, GameError> {
        let e = self.enumerator.as_ref().ok_or(GameError::NoEnumerator)?;
        Ok(e())
    }
}

// ============================================================================
// Running games
// ============================================================================

/// Runs one game: alice answers every prefix, the adversary sets the last
/// revealed position to `merlin_bit`.
pub fn run_game(
    profile: &StrategyProfile,
    order: &RequestOrder,
    merlin_bit: u8,
) -> Result<Outcome, GameError> {
    if order.len() != profile.n {
        return Err(GameError::NotFullPermutation(order.len(), profile.n));
    }
    let positions = order.positions();
    let mut bits = vec![0u8; profile.n];
    for i in 0..profile.n - 1 {
        bits[positions[i]] = profile.alice_bit(&positions[..=i]);
    }
    bits[positions[profile.n - 1]] = merlin_bit & 1;
    Ok(Outcome::new(bits))
}

/// Runs one alice-mode game: alice also sets the final position.
pub fn run_game_alice_mode(
    profile: &StrategyProfile,
    order: &RequestOrder,
) -> Result<Outcome, GameError> {
    if order.len() != profile.n {
        return Err(GameError::NotFullPermutation(order.len(), profile.n));
    }
    if !profile.has_alice_mode() {
        return Err(GameError::NoAliceMode);
    }
    let positions = order.positions();
    let mut bits = vec![0u8; profile.n];
    for i in 0..profile.n - 1 {
        bits[positions[i]] = profile.alice_bit(&positions[..=i]);
    }
    bits[positions[profile.n - 1]] = profile.alice_final_bit(positions)?;
    Ok(Outcome::new(bits))
}

// ============================================================================
// Verification
// ============================================================================

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationMode {
    Exhaustive,
    Structured,
    Sampled,
}

impl fmt::Display for VerificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationMode::Exhaustive => write!(f, "exhaustive"),
            VerificationMode::Structured => write!(f, "structured"),
            VerificationMode::Sampled => write!(f, "sampled"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationClause {
    /// The adversary's position is missing from bob's answer.
    MerlinNotCovered,
    /// Bob's answer exceeds `k`.
    AnswerExceedsK,
    /// An alice-mode run produced an outcome outside the alice-outcome set.
    AliceOutcomeOutsideSet,
    /// Bob's answer on an alice-set outcome exceeds `k_alice`.
    AnswerExceedsKAlice,
}

impl fmt::Display for ViolationClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationClause::MerlinNotCovered => {
                write!(f, "adversary position not covered by bob's answer")
            }
            ViolationClause::AnswerExceedsK => write!(f, "bob's answer exceeds k"),
            ViolationClause::AliceOutcomeOutsideSet => {
                write!(f, "alice-mode outcome outside the declared alice-outcome set")
            }
            ViolationClause::AnswerExceedsKAlice => {
                write!(f, "bob's answer on an alice-set outcome exceeds k_alice")
            }
        }
    }
}

/// The first failing check, with enough context to replay it.  Order and bit
/// are absent for failures found by structured triples or the alice-outcome
/// scan.  Positions are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub order: Option<Vec<usize>>,
    pub merlin_bit: Option<u8>,
    pub mode: Option<RunMode>,
    pub outcome: Outcome,
    pub bob_answer: Vec<usize>,
    pub clause: ViolationClause,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub mode: VerificationMode,
    pub valid: bool,
    pub runs_checked: u64,
    pub failure: Option<Violation>,
}

impl VerificationReport {
    fn ok(mode: VerificationMode, runs_checked: u64) -> Self {
        VerificationReport {
            mode,
            valid: true,
            runs_checked,
            failure: None,
        }
    }

    fn fail(mode: VerificationMode, runs_checked: u64, violation: Violation) -> Self {
        VerificationReport {
            mode,
            valid: false,
            runs_checked,
            failure: Some(violation),
        }
    }

    /// Line-oriented text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("mode: {}\n", self.mode));
        out.push_str(&format!("valid: {}\n", self.valid));
        out.push_str(&format!("runs_checked: {}\n", self.runs_checked));
        match &self.failure {
            None => out.push_str("failure: none\n"),
            Some(v) => {
                out.push_str("failure:\n");
                match &v.order {
                    Some(order) => out.push_str(&format!(
                        "  order: {}\n",
                        order
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )),
                    None => out.push_str("  order: -\n"),
                }
                match v.merlin_bit {
                    Some(b) => out.push_str(&format!("  merlin_bit: {b}\n")),
                    None => out.push_str("  merlin_bit: -\n"),
                }
                match v.mode {
                    Some(RunMode::Normal) => out.push_str("  run_mode: normal\n"),
                    Some(RunMode::AliceMode) => out.push_str("  run_mode: alice_mode\n"),
                    None => out.push_str("  run_mode: -\n"),
                }
                out.push_str(&format!("  outcome: {}\n", v.outcome));
                out.push_str(&format!(
                    "  bob_answer: {}\n",
                    v.bob_answer
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
                out.push_str(&format!("  clause: {}\n", v.clause));
                out.push_str(&format!("  note: {}\n", v.note));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn one_based(set: &BTreeSet<usize>) -> Vec<usize> {
    set.iter().map(|&p| p + 1).collect()
}

/// Checks one normal run: coverage, the `k` bound, and the `k_alice` bound
/// when the outcome lands in the alice-outcome set.
fn check_normal_run(
    profile: &StrategyProfile,
    order: &RequestOrder,
    merlin_bit: u8,
) -> Result<Option<Violation>, GameError> {
    let outcome = run_game(profile, order, merlin_bit)?;
    let answer = profile.bob_answer(&outcome);
    let merlin_pos = *order.positions().last().expect("non-empty order");
    let violation = |clause, note: String| Violation {
        order: Some(order.one_based()),
        merlin_bit: Some(merlin_bit),
        mode: Some(RunMode::Normal),
        outcome: outcome.clone(),
        bob_answer: one_based(&answer),
        clause,
        note,
    };
    if !answer.contains(&merlin_pos) {
        return Ok(Some(violation(
            ViolationClause::MerlinNotCovered,
            format!("position {} missing", merlin_pos + 1),
        )));
    }
    if answer.len() > profile.k {
        return Ok(Some(violation(
            ViolationClause::AnswerExceedsK,
            format!("answer size {} > k = {}", answer.len(), profile.k),
        )));
    }
    if let (Some(k_alice), Some(true)) = (profile.k_alice, profile.in_alice_outcomes(&outcome)) {
        if answer.len() > k_alice {
            return Ok(Some(violation(
                ViolationClause::AnswerExceedsKAlice,
                format!("answer size {} > k_alice = {}", answer.len(), k_alice),
            )));
        }
    }
    Ok(None)
}

/// Checks one alice-mode run: membership in the alice-outcome set and the
/// `k_alice` bound.
fn check_alice_run(
    profile: &StrategyProfile,
    order: &RequestOrder,
) -> Result<Option<Violation>, GameError> {
    let outcome = run_game_alice_mode(profile, order)?;
    let answer = profile.bob_answer(&outcome);
    let k_alice = profile.k_alice.expect("alice mode declared");
    let violation = |clause, note: String| Violation {
        order: Some(order.one_based()),
        merlin_bit: None,
        mode: Some(RunMode::AliceMode),
        outcome: outcome.clone(),
        bob_answer: one_based(&answer),
        clause,
        note,
    };
    if profile.in_alice_outcomes(&outcome) != Some(true) {
        return Ok(Some(violation(
            ViolationClause::AliceOutcomeOutsideSet,
            "alice-mode run left the declared outcome set".into(),
        )));
    }
    if answer.len() > k_alice {
        return Ok(Some(violation(
            ViolationClause::AnswerExceedsKAlice,
            format!("answer size {} > k_alice = {}", answer.len(), k_alice),
        )));
    }
    Ok(None)
}

/// Calls `f` on every permutation of `0..n` in lexicographic order until it
/// returns `false`.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if !f(&perm) {
            return;
        }
        // next_permutation in place
        let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
            return;
        };
        let j = perm.iter().rposition(|&x| x > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Full enumeration: every permutation with both adversary bits, every
/// alice-mode run, and (for alice-mode profiles) every outcome accepted by
/// the alice-outcome predicate.
pub fn verify_exhaustive(profile: &StrategyProfile) -> Result<VerificationReport, GameError> {
    if profile.n > EXHAUSTIVE_MAX_N {
        return Err(GameError::TooLargeForExhaustive(profile.n));
    }
    let mode = VerificationMode::Exhaustive;
    let mut runs: u64 = 0;
    let mut first: Option<Violation> = None;
    let has_alice = profile.k_alice.is_some() && profile.has_alice_mode();

    for_each_permutation(profile.n, |perm| {
        let order = RequestOrder {
            positions: perm.to_vec(),
        };
        for bit in 0..2u8 {
            runs += 1;
            if let Some(v) = check_normal_run(profile, &order, bit).expect("valid order") {
                first = Some(v);
                return false;
            }
        }
        if has_alice {
            runs += 1;
            if let Some(v) = check_alice_run(profile, &order).expect("valid order") {
                first = Some(v);
                return false;
            }
        }
        true
    });
    if let Some(v) = first {
        return Ok(VerificationReport::fail(mode, runs, v));
    }

    // The k_alice bound applies to every outcome the predicate accepts, no
    // matter how it was reached; scan the whole outcome space.
    if let (Some(k_alice), true) = (profile.k_alice, profile.in_o_a.is_some()) {
        for mask in 0..1u64 << profile.n {
            runs += 1;
            let outcome = Outcome::from_mask(mask, profile.n);
            if profile.in_alice_outcomes(&outcome) == Some(true) {
                let answer = profile.bob_answer(&outcome);
                if answer.len() > k_alice {
                    let v = Violation {
                        order: None,
                        merlin_bit: None,
                        mode: None,
                        outcome,
                        bob_answer: one_based(&answer),
                        clause: ViolationClause::AnswerExceedsKAlice,
                        note: format!(
                            "answer size {} > k_alice = {} (outcome-space scan)",
                            answer.len(),
                            k_alice
                        ),
                    };
                    return Ok(VerificationReport::fail(mode, runs, v));
                }
            }
        }
    }
    Ok(VerificationReport::ok(mode, runs))
}

/// Verification over the profile's enumerated reachable triples.  Sound
/// exactly when the enumerator is exhaustive; the enumerators supplied by the
/// built-in constructions are spot-checked against [`verify_exhaustive`] at
/// small sizes in the test suite.
pub fn verify_structured(profile: &StrategyProfile) -> Result<VerificationReport, GameError> {
    let triples = profile.enumerate_reachable()?;
    let mode = VerificationMode::Structured;
    let mut runs: u64 = 0;
    for triple in &triples {
        runs += 1;
        let answer = profile.bob_answer(&triple.outcome);
        let violation = |clause, note: String| Violation {
            order: None,
            merlin_bit: None,
            mode: Some(triple.mode),
            outcome: triple.outcome.clone(),
            bob_answer: one_based(&answer),
            clause,
            note,
        };
        match triple.mode {
            RunMode::Normal => {
                if let Some(&p) = triple.merlin_positions.iter().find(|p| !answer.contains(p)) {
                    return Ok(VerificationReport::fail(
                        mode,
                        runs,
                        violation(
                            ViolationClause::MerlinNotCovered,
                            format!("position {} missing", p + 1),
                        ),
                    ));
                }
                if answer.len() > profile.k {
                    return Ok(VerificationReport::fail(
                        mode,
                        runs,
                        violation(
                            ViolationClause::AnswerExceedsK,
                            format!("answer size {} > k = {}", answer.len(), profile.k),
                        ),
                    ));
                }
                if let (Some(k_alice), Some(true)) =
                    (profile.k_alice, profile.in_alice_outcomes(&triple.outcome))
                {
                    if answer.len() > k_alice {
                        return Ok(VerificationReport::fail(
                            mode,
                            runs,
                            violation(
                                ViolationClause::AnswerExceedsKAlice,
                                format!(
                                    "answer size {} > k_alice = {} on a normal-mode outcome",
                                    answer.len(),
                                    k_alice
                                ),
                            ),
                        ));
                    }
                }
            }
            RunMode::AliceMode => {
                if profile.in_alice_outcomes(&triple.outcome) != Some(true) {
                    return Ok(VerificationReport::fail(
                        mode,
                        runs,
                        violation(
                            ViolationClause::AliceOutcomeOutsideSet,
                            "enumerated alice-mode outcome outside the declared set".into(),
                        ),
                    ));
                }
                if let Some(k_alice) = profile.k_alice {
                    if answer.len() > k_alice {
                        return Ok(VerificationReport::fail(
                            mode,
                            runs,
                            violation(
                                ViolationClause::AnswerExceedsKAlice,
                                format!(
                                    "answer size {} > k_alice = {}",
                                    answer.len(),
                                    k_alice
                                ),
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(VerificationReport::ok(mode, runs))
}

/// Random spot checks: `samples` uniform permutations, both adversary bits
/// each, plus an alice-mode run per sample when the profile declares one.
/// Deterministic for a fixed seed; a clean report is evidence, not proof.
pub fn verify_sampled(
    profile: &StrategyProfile,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport, GameError> {
    if samples == 0 {
        return Err(GameError::NoSamples);
    }
    let mode = VerificationMode::Sampled;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let has_alice = profile.k_alice.is_some() && profile.has_alice_mode();
    let mut runs: u64 = 0;
    for _ in 0..samples {
        let mut perm: Vec<usize> = (0..profile.n).collect();
        perm.shuffle(&mut rng);
        let order = RequestOrder { positions: perm };
        for bit in 0..2u8 {
            runs += 1;
            if let Some(v) = check_normal_run(profile, &order, bit)? {
                return Ok(VerificationReport::fail(mode, runs, v));
            }
        }
        if has_alice {
            runs += 1;
            if let Some(v) = check_alice_run(profile, &order)? {
                return Ok(VerificationReport::fail(mode, runs, v));
            }
        }
    }
    Ok(VerificationReport::ok(mode, runs))
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    /// Alice answers 0 everywhere; bob answers a fixed set.
    fn constant_profile(n: usize, k: usize, bob_set: &[usize]) -> StrategyProfile {
        let set: BTreeSet<usize> = bob_set.iter().copied().collect();
        StrategyProfile::new(
            n,
            k,
            Arc::new(|_| 0),
            Arc::new(move |_| set.clone()),
        )
    }

    #[test]
    fn request_order_validation() {
        assert!(RequestOrder::from_one_based(vec![1, 2, 3], 3).is_ok());
        assert!(matches!(
            RequestOrder::from_one_based(vec![1, 1], 3),
            Err(GameError::DuplicatePosition(1))
        ));
        assert!(matches!(
            RequestOrder::from_one_based(vec![4], 3),
            Err(GameError::PositionOutOfRange(4, 3))
        ));
    }

    #[test]
    fn run_game_rejects_partial_orders() {
        let p = constant_profile(3, 3, &[0, 1, 2]);
        let partial = RequestOrder::from_one_based(vec![1, 2], 3).unwrap();
        assert!(matches!(
            run_game(&p, &partial, 0),
            Err(GameError::NotFullPermutation(2, 3))
        ));
    }

    #[test]
    fn run_game_all_zero_profile() {
        // alice answers 0 everywhere and the adversary agrees
        let p = constant_profile(3, 3, &[0, 1, 2]);
        for order in [[1, 2, 3], [3, 1, 2], [2, 3, 1]] {
            let o = RequestOrder::from_one_based(order.to_vec(), 3).unwrap();
            assert_eq!(run_game(&p, &o, 0).unwrap().to_string(), "000");
        }
    }

    #[test]
    fn run_game_is_deterministic() {
        let p = constant_profile(4, 4, &[0]);
        let o = RequestOrder::from_one_based(vec![2, 4, 1, 3], 4).unwrap();
        assert_eq!(run_game(&p, &o, 1).unwrap(), run_game(&p, &o, 1).unwrap());
    }

    #[test]
    fn alice_mode_requires_support() {
        let p = constant_profile(3, 3, &[0, 1, 2]);
        let o = RequestOrder::from_one_based(vec![1, 2, 3], 3).unwrap();
        assert!(matches!(
            run_game_alice_mode(&p, &o),
            Err(GameError::NoAliceMode)
        ));
    }

    #[test]
    fn exhaustive_rejects_large_n() {
        let p = constant_profile(11, 11, &[0]);
        assert!(matches!(
            verify_exhaustive(&p),
            Err(GameError::TooLargeForExhaustive(11))
        ));
    }

    #[test]
    fn sabotaged_profile_yields_concrete_failure() {
        // bob always answers {1}; the adversary finishing at position 2 wins
        let p = constant_profile(2, 2, &[0]);
        let report = verify_exhaustive(&p).unwrap();
        assert!(!report.valid);
        let v = report.failure.unwrap();
        assert_eq!(v.clause, ViolationClause::MerlinNotCovered);
        // lexicographically first failing run
        assert_eq!(v.order, Some(vec![1, 2]));
        assert_eq!(v.merlin_bit, Some(0));
        assert_eq!(v.outcome.to_string(), "00");
        assert_eq!(v.bob_answer, vec![1]);
    }

    #[test]
    fn structured_requires_enumerator() {
        let p = constant_profile(2, 2, &[0, 1]);
        assert!(matches!(
            verify_structured(&p),
            Err(GameError::NoEnumerator)
        ));
    }

    #[test]
    fn sampled_requires_samples() {
        let p = constant_profile(2, 2, &[0, 1]);
        assert!(matches!(
            verify_sampled(&p, 0, 0),
            Err(GameError::NoSamples)
        ));
    }

    #[test]
    fn sampled_is_deterministic_per_seed() {
        let p = constant_profile(4, 4, &[0, 1, 2, 3]);
        let a = verify_sampled(&p, 50, 7).unwrap();
        let b = verify_sampled(&p, 50, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn report_serialization_shapes() {
        let p = constant_profile(2, 2, &[0, 1]);
        let report = verify_exhaustive(&p).unwrap();
        assert!(report.valid);
        assert_eq!(report.runs_checked, 4); // 2! * 2
        let text = report.to_text();
        assert!(text.contains("mode: exhaustive"));
        assert!(text.contains("failure: none"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["valid"], serde_json::Value::Bool(true));
        assert!(json["failure"].is_null());
    }

    #[test]
    fn permutations_enumerated_in_lex_order() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p| {
            seen.push(p.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[5], vec![2, 1, 0]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }
}
