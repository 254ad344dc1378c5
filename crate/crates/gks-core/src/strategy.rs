//! Strategy constructions and compositions.
//!
//! Base constructions: the trivial all-zeros strategy, distance-3 codeword
//! families (including the built-in six-word family), and tau strategies
//! driven by a subset-to-codeword map.  Combinators: the parity product, the
//! alice-mode block composition, and padding.  [`upper_bound_table`] closes
//! the verified base strategies under the combinators and reports the best
//! known answer bound per game size.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::code::{self, BinaryCode, CodeError, TauMap, Word};
use crate::game::{
    Outcome, OutcomeEnumerator, ReachableTriple, RunMode, StrategyProfile,
};
use crate::spec::StrategySpec;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("{0}")]
    Invalid(String),
    #[error("profile does not declare alice-mode support")]
    NoAliceMode,
    #[error("padding requires 1 <= m < n, got m = {m}, n = {n}")]
    BadPadding { m: usize, n: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

// ============================================================================
// Trivial strategy
// ============================================================================

/// The all-zeros strategy: alice answers 0 everywhere (1 on the final
/// position in alice mode); bob answers every position on the all-zero
/// outcome and the single set position otherwise.  An `(n, 1, n)` profile.
pub fn trivial_strategy(n: usize) -> StrategyProfile {
    assert!(n >= 1, "game size must be at least 1");
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let ones: Vec<usize> = (0..n).filter(|&i| outcome.bit(i) == 1).collect();
        match ones.len() {
            0 => (0..n).collect(),
            1 => ones.into_iter().collect(),
            // not producible by this strategy; stay generous so block
            // compositions point at the whole suspect block
            _ => (0..n).collect(),
        }
    };
    let enumerator = move || -> Vec<ReachableTriple> {
        let mut triples = Vec::new();
        triples.push(ReachableTriple {
            outcome: Outcome::new(vec![0; n]),
            merlin_positions: (0..n).collect(),
            mode: RunMode::Normal,
        });
        for p in 0..n {
            let mut bits = vec![0; n];
            bits[p] = 1;
            triples.push(ReachableTriple {
                outcome: Outcome::new(bits),
                merlin_positions: [p].into(),
                mode: RunMode::Normal,
            });
        }
        for p in 0..n {
            let mut bits = vec![0; n];
            bits[p] = 1;
            triples.push(ReachableTriple {
                outcome: Outcome::new(bits),
                merlin_positions: BTreeSet::new(),
                mode: RunMode::AliceMode,
            });
        }
        triples
    };
    StrategyProfile::new(n, n, Arc::new(|_| 0), Arc::new(bob))
        .with_alice_mode(
            1,
            Arc::new(|_| 1),
            Arc::new(|outcome: &Outcome| outcome.weight() == 1),
        )
        .with_enumerator(Arc::new(enumerator))
}

// ============================================================================
// Codeword families
// ============================================================================

/// `n` words of `n` bits each, indexed by the first-touched position, with
/// pairwise Hamming distance at least 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordFamily {
    n: usize,
    words: Vec<Word>,
}

impl CodewordFamily {
    pub fn new(n: usize, words: Vec<Word>) -> Result<Self, StrategyError> {
        if words.len() != n {
            return Err(StrategyError::Invalid(format!(
                "need {n} words, got {}",
                words.len()
            )));
        }
        for (i, &a) in words.iter().enumerate() {
            for &b in &words[i + 1..] {
                if code::hamming_distance(a, b) < 3 {
                    return Err(StrategyError::Invalid(format!(
                        "words {} and {} are at distance {} < 3",
                        code::word_to_string(a, n),
                        code::word_to_string(b, n),
                        code::hamming_distance(a, b)
                    )));
                }
            }
        }
        Ok(CodewordFamily { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, first_touch: usize) -> Word {
        self.words[first_touch]
    }
}

/// The built-in family of six 6-bit words at pairwise distance 3.
pub fn six_word_family() -> CodewordFamily {
    let words = ["000000", "100110", "010101", "001011", "111000", "111111"]
        .iter()
        .map(|s| code::word_from_str(s).unwrap().0)
        .collect();
    CodewordFamily::new(6, words).expect("built-in family has distance 3")
}

fn word_bit(w: Word, i: usize) -> u8 {
    (w >> i & 1) as u8
}

/// Decodes an outcome against a family: the unique word within distance 1,
/// plus the flipped position when the distance is exactly 1.
fn family_decode(family: &CodewordFamily, mask: Word) -> Option<(usize, Option<usize>)> {
    for (i, &w) in family.words().iter().enumerate() {
        match code::hamming_distance(w, mask) {
            0 => return Some((i, None)),
            1 => return Some((i, Some((w ^ mask).trailing_zeros() as usize))),
            _ => {}
        }
    }
    None
}

/// Strategy committed to one codeword per first touch: on first touch at
/// position `i` alice plays `w_i` across the block, flipping the final bit
/// when she owns it (alice mode).  Bob decodes within distance 1.  An
/// `(n-1, 1, n)` profile.
pub fn code_family_strategy(family: &CodewordFamily) -> StrategyProfile {
    let n = family.n();
    let fam = Arc::new(family.clone());

    let fam_a = fam.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        let committed = fam_a.word(prefix[0]);
        word_bit(committed, *prefix.last().unwrap())
    };

    let fam_f = fam.clone();
    let final_bit = move |order: &[usize]| -> u8 {
        let committed = fam_f.word(order[0]);
        1 - word_bit(committed, *order.last().unwrap())
    };

    let fam_b = fam.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        match family_decode(&fam_b, outcome.to_mask() as Word) {
            // the adversary agreed with the committed word: anything but the
            // first touch can be his position
            Some((i, None)) => (0..n).filter(|&p| p != i).collect(),
            Some((_, Some(p))) => [p].into(),
            // distance >= 2 from every word: unreachable
            None => (0..n).collect(),
        }
    };

    let fam_o = fam.clone();
    let in_o_a = move |outcome: &Outcome| -> bool {
        matches!(
            family_decode(&fam_o, outcome.to_mask() as Word),
            Some((i, Some(p))) if p != i
        )
    };

    let fam_e = fam.clone();
    let enumerator = move || -> Vec<ReachableTriple> {
        let mut triples = Vec::new();
        for i in 0..n {
            let w = fam_e.word(i);
            for p in (0..n).filter(|&p| p != i) {
                for bit in 0..2u8 {
                    let mask = (w & !(1 << p)) | (Word::from(bit) << p);
                    triples.push(ReachableTriple {
                        outcome: Outcome::from_mask(mask as u64, n),
                        merlin_positions: [p].into(),
                        mode: RunMode::Normal,
                    });
                }
            }
            for p in (0..n).filter(|&p| p != i) {
                triples.push(ReachableTriple {
                    outcome: Outcome::from_mask((w ^ (1 << p)) as u64, n),
                    merlin_positions: BTreeSet::new(),
                    mode: RunMode::AliceMode,
                });
            }
        }
        triples
    };

    StrategyProfile::new(n, n - 1, Arc::new(alice), Arc::new(bob))
        .with_alice_mode(1, Arc::new(final_bit), Arc::new(in_o_a))
        .with_enumerator(Arc::new(enumerator))
}

// ============================================================================
// Alice-mode block composition
// ============================================================================

/// Positions of `prefix` lying in block `j`, mapped to block-local indices,
/// in request order.
fn block_prefix(prefix: &[usize], block: usize, size: usize) -> Vec<usize> {
    prefix
        .iter()
        .filter(|&&p| p / size == block)
        .map(|&p| p % size)
        .collect()
}

/// Plays a `(b, a, n)` profile independently on `floor(b/a)` size-`n` blocks,
/// in alice mode everywhere except the block completed last; bob answers the
/// first block that left the alice-outcome set, or the union over blocks.
/// Yields a `(b, floor(b/a) * n)` profile.
pub fn alice_mode_compose(inner: &StrategyProfile) -> Result<StrategyProfile, StrategyError> {
    if !inner.has_alice_mode() {
        return Err(StrategyError::NoAliceMode);
    }
    let a = inner.k_alice.expect("alice mode declared");
    let blocks = inner.k / a;
    if blocks < 1 {
        return Err(StrategyError::Invalid(format!(
            "floor(k / k_alice) = floor({} / {a}) < 1",
            inner.k
        )));
    }
    let size = inner.n;
    let n = blocks * size;
    let k = inner.k;

    let p_a = inner.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        let cur = *prefix.last().unwrap();
        let local = block_prefix(prefix, cur / size, size);
        if local.len() < size {
            p_a.alice_bit(&local)
        } else {
            // the block just completed before the game's final request, so
            // alice owns its last bit
            p_a.alice_final_bit(&local).expect("alice mode declared")
        }
    };

    let p_b = inner.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let contents: Vec<Outcome> = (0..blocks).map(|j| outcome.block(j, size)).collect();
        let bad = (0..blocks).find(|&j| p_b.in_alice_outcomes(&contents[j]) != Some(true));
        let offset = |j: usize, set: BTreeSet<usize>| -> BTreeSet<usize> {
            set.into_iter().map(|p| j * size + p).collect()
        };
        match bad {
            Some(j) => offset(j, p_b.bob_answer(&contents[j])),
            None => (0..blocks)
                .flat_map(|j| offset(j, p_b.bob_answer(&contents[j])))
                .collect(),
        }
    };

    let mut profile = StrategyProfile::new(n, k, Arc::new(alice), Arc::new(bob));
    if inner.has_enumerator() {
        profile = profile.with_enumerator(composed_enumerator(inner.clone(), blocks, size));
    }
    Ok(profile)
}

/// Reachable triples of the block composition, reduced blockwise.
///
/// A reachable composed outcome is: one block holding any normal-mode
/// reachable inner outcome (the adversary's block) and every other block
/// holding an alice-mode reachable inner outcome, independently.  Coverage of
/// the adversary position depends only on the adversary block, and the union
/// answer is largest when each remaining block maximizes its own answer, so
/// it suffices to enumerate inner normal triples per adversary block with the
/// other blocks pinned to an answer-maximizing alice outcome.  When some
/// alice-mode run leaves the declared outcome set, a representative composed
/// outcome exhibiting the resulting misdirected answer is emitted instead.
fn composed_enumerator(
    inner: StrategyProfile,
    blocks: usize,
    size: usize,
) -> OutcomeEnumerator {
    Arc::new(move || -> Vec<ReachableTriple> {
        let inner_triples = inner.enumerate_reachable().expect("inner enumerator");
        let normal: Vec<&ReachableTriple> = inner_triples
            .iter()
            .filter(|t| t.mode == RunMode::Normal)
            .collect();
        let alice_outcomes: Vec<&Outcome> = inner_triples
            .iter()
            .filter(|t| t.mode == RunMode::AliceMode)
            .map(|t| &t.outcome)
            .collect();
        let in_set: Vec<&Outcome> = alice_outcomes
            .iter()
            .copied()
            .filter(|o| inner.in_alice_outcomes(o) == Some(true))
            .collect();
        let escaped: Option<&Outcome> = alice_outcomes
            .iter()
            .copied()
            .find(|o| inner.in_alice_outcomes(o) != Some(true));
        // answer-maximizing filler for non-adversary blocks
        let filler: &Outcome = in_set
            .iter()
            .copied()
            .max_by_key(|o| (inner.bob_answer(o).len(), std::cmp::Reverse(o.to_mask())))
            .or_else(|| alice_outcomes.first().copied())
            .expect("alice-mode outcomes exist");

        let compose = |per_block: &[&Outcome]| -> Outcome {
            let mut bits = Vec::with_capacity(blocks * size);
            for o in per_block {
                bits.extend_from_slice(o.bits());
            }
            Outcome::new(bits)
        };

        let mut triples = Vec::new();
        for m in 0..blocks {
            for t in &normal {
                let per_block: Vec<&Outcome> =
                    (0..blocks).map(|j| if j == m { &t.outcome } else { filler }).collect();
                triples.push(ReachableTriple {
                    outcome: compose(&per_block),
                    merlin_positions: t
                        .merlin_positions
                        .iter()
                        .map(|&p| m * size + p)
                        .collect(),
                    mode: RunMode::Normal,
                });
            }
        }
        if let (Some(bad), true) = (escaped, blocks >= 2) {
            // an escaped alice block in front of the adversary block
            // misdirects bob; one representative suffices per position pair
            let m = blocks - 1;
            if let Some(t) = normal.first() {
                let per_block: Vec<&Outcome> = (0..blocks)
                    .map(|j| {
                        if j == m {
                            &t.outcome
                        } else if j == 0 {
                            bad
                        } else {
                            filler
                        }
                    })
                    .collect();
                triples.push(ReachableTriple {
                    outcome: compose(&per_block),
                    merlin_positions: t
                        .merlin_positions
                        .iter()
                        .map(|&p| m * size + p)
                        .collect(),
                    mode: RunMode::Normal,
                });
            }
        }
        triples
    })
}

/// The square block strategy: the alice-mode composition of the trivial
/// strategy, giving a `(k, k^2)` profile.
pub fn block_square_strategy(k: usize) -> StrategyProfile {
    assert!(k >= 1, "block size must be at least 1");
    alice_mode_compose(&trivial_strategy(k)).expect("trivial strategy has alice mode")
}

// ============================================================================
// Parity product composition
// ============================================================================

/// Composes a `(k, n)` profile with a `(k', n')` profile into a `(kk', nn')`
/// profile: `n'` consecutive blocks of size `n`; inside a block alice plays
/// the first profile, and the bit completing a block is chosen so the block
/// parity equals what the second profile's alice would answer on the array of
/// block parities.  Bob folds blocks to parities, asks the outer bob for
/// candidate blocks, and the inner bob for positions inside them.
pub fn product_compose(p: &StrategyProfile, q: &StrategyProfile) -> StrategyProfile {
    let size = p.n;
    let blocks = q.n;
    let n = size * blocks;
    let k = p.k * q.k;

    let p_a = p.clone();
    let q_a = q.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        let cur = *prefix.last().unwrap();
        let block = cur / size;
        let local = block_prefix(prefix, block, size);
        if local.len() < size {
            return p_a.alice_bit(&local);
        }
        // completion order of blocks so far, as the outer game's prefix
        let mut counts = vec![0usize; blocks];
        let mut completion: Vec<usize> = Vec::new();
        for &pos in prefix.iter() {
            let b = pos / size;
            counts[b] += 1;
            if counts[b] == size {
                completion.push(b);
            }
        }
        debug_assert_eq!(completion.last(), Some(&block));
        let outer_bit = q_a.alice_bit(&completion);
        // parity of the block's already-set bits
        let parity = (1..size. max(1))
            .map(|t| p_a.alice_bit(&local[..t]))
            .fold(0u8, |acc, b| acc ^ b);
        outer_bit ^ parity
    };

    let p_b = p.clone();
    let q_b = q.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let contents: Vec<Outcome> = (0..blocks).map(|j| outcome.block(j, size)).collect();
        let parities = Outcome::new(
            contents
                .iter()
                .map(|c| c.bits().iter().fold(0u8, |acc, &b| acc ^ b))
                .collect(),
        );
        q_b.bob_answer(&parities)
            .into_iter()
            .flat_map(|j| {
                p_b.bob_answer(&contents[j])
                    .into_iter()
                    .map(move |p| j * size + p)
            })
            .collect()
    };

    StrategyProfile::new(n, k, Arc::new(alice), Arc::new(bob))
}

// ============================================================================
// Padding
// ============================================================================

/// Derives a `(k, m)` profile from a `(k, n)` profile, `m < n`: positions
/// `m+1..n` are pre-simulated in ascending order before the real game starts;
/// bob extends his view with the simulated bits and drops simulated positions
/// from his answer.  The simulated transcript is a legal run of the inner
/// game whose adversary position lies among the real positions.
pub fn pad_strategy(p: &StrategyProfile, m: usize) -> Result<StrategyProfile, StrategyError> {
    if m == 0 || m >= p.n {
        return Err(StrategyError::BadPadding { m, n: p.n });
    }
    let n = p.n;
    let sim_positions: Vec<usize> = (m..n).collect();
    let sim_bits: Vec<u8> = (0..n - m)
        .map(|t| p.alice_bit(&sim_positions[..=t]))
        .collect();

    let p_a = p.clone();
    let sim_a = sim_positions.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        let mut full = sim_a.clone();
        full.extend_from_slice(prefix);
        p_a.alice_bit(&full)
    };

    let p_b = p.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let mut bits = outcome.bits().to_vec();
        bits.extend_from_slice(&sim_bits);
        p_b.bob_answer(&Outcome::new(bits))
            .into_iter()
            .filter(|&pos| pos < m)
            .collect()
    };

    Ok(StrategyProfile::new(m, p.k, Arc::new(alice), Arc::new(bob)))
}

// ============================================================================
// Tau strategies
// ============================================================================

/// Strategy driven by a subset-to-codeword map over a distance-3 code: alice
/// answers 1 on the first `m` revealed positions (the set `H`) and follows
/// `tau(H)` afterwards; with `flip_final` she flips the final bit in alice
/// mode.  Bob decodes within distance 1 and inverts the map.  A candidate
/// `(n-m, 1, n)` profile whose validity is decided by verification, not
/// assumed.
pub fn tau_strategy(
    codebook: &BinaryCode,
    tau: &TauMap,
    flip_final: bool,
) -> Result<StrategyProfile, StrategyError> {
    let n = codebook.length();
    let m = tau.m();
    if tau.length() != n {
        return Err(StrategyError::Invalid(format!(
            "map length {} differs from code length {n}",
            tau.length()
        )));
    }
    if codebook.min_distance()? < 3 {
        return Err(StrategyError::Invalid(
            "code minimum distance must be at least 3".into(),
        ));
    }
    for (_, x) in tau.entries() {
        if !codebook.contains(x) {
            return Err(StrategyError::Invalid(format!(
                "map image {} is not a codeword",
                code::word_to_string(x, n)
            )));
        }
    }
    let k = n - m;
    let tau = Arc::new(tau.clone());
    let inverse = Arc::new(tau.inverse());
    let codebook = Arc::new(codebook.clone());

    let subset_of = |prefix: &[usize], m: usize| -> Word {
        prefix[..m].iter().fold(0, |acc, &p| acc | 1 << p)
    };

    let tau_a = tau.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        if prefix.len() <= m {
            return 1;
        }
        let x = tau_a.get(subset_of(prefix, m)).expect("map is total");
        word_bit(x, *prefix.last().unwrap())
    };

    let tau_f = tau.clone();
    let final_bit = move |order: &[usize]| -> u8 {
        let x = tau_f.get(subset_of(order, m)).expect("map is total");
        let bit = word_bit(x, *order.last().unwrap());
        if flip_final {
            1 - bit
        } else {
            bit
        }
    };

    let unreachable_answer = move |x: Word| -> BTreeSet<usize> {
        (0..n).filter(|&p| word_bit(x, p) == 0).take(k).collect()
    };

    let cb = codebook.clone();
    let inv_b = inverse.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let mask = outcome.to_mask() as Word;
        match cb.decode_within_one(mask) {
            Some((x, flip)) => match (inv_b.get(&x), flip) {
                (Some(&h), None) => (0..n).filter(|&p| h >> p & 1 == 0).collect(),
                (Some(_), Some(p)) => [p].into(),
                // decoded to a codeword outside the map's image: unreachable
                (None, _) => unreachable_answer(x),
            },
            None => (0..k).collect(),
        }
    };

    let cb_o = codebook.clone();
    let inv_o = inverse.clone();
    let in_o_a = move |outcome: &Outcome| -> bool {
        let mask = outcome.to_mask() as Word;
        match cb_o.decode_within_one(mask) {
            Some((x, flip)) => match inv_o.get(&x) {
                Some(&h) => {
                    if flip_final {
                        matches!(flip, Some(p) if h >> p & 1 == 0)
                    } else {
                        flip.is_none()
                    }
                }
                None => false,
            },
            None => false,
        }
    };

    let tau_e = tau.clone();
    let enumerator = move || -> Vec<ReachableTriple> {
        let mut triples = Vec::new();
        for (h, x) in tau_e.entries() {
            let outside: Vec<usize> = (0..n).filter(|&p| h >> p & 1 == 0).collect();
            for &p in &outside {
                for bit in 0..2u8 {
                    let mask = (x & !(1 << p)) | (Word::from(bit) << p);
                    triples.push(ReachableTriple {
                        outcome: Outcome::from_mask(mask as u64, n),
                        merlin_positions: [p].into(),
                        mode: RunMode::Normal,
                    });
                }
            }
            for &p in &outside {
                let mask = if flip_final { x ^ (1 << p) } else { x };
                triples.push(ReachableTriple {
                    outcome: Outcome::from_mask(mask as u64, n),
                    merlin_positions: BTreeSet::new(),
                    mode: RunMode::AliceMode,
                });
            }
        }
        triples
    };

    Ok(
        StrategyProfile::new(n, k, Arc::new(alice), Arc::new(bob))
            .with_alice_mode(1, Arc::new(final_bit), Arc::new(in_o_a))
            .with_enumerator(Arc::new(enumerator)),
    )
}

// ============================================================================
// Upper bound table
// ============================================================================

/// `log_30(5)`, the exponent of the composition family's growth.
pub const GROWTH_EXPONENT: f64 = 0.473_192_200_859_245_3;

/// The bound curve `5 * n^log_30(5)`.
pub fn bound_curve(n: usize) -> f64 {
    5.0 * (n as f64).powf(GROWTH_EXPONENT)
}

/// A seed strategy for the closure: declared `(k, n)` plus its derivation.
#[derive(Debug, Clone)]
pub struct SeedStrategy {
    pub k: usize,
    pub n: usize,
    pub spec: StrategySpec,
}

/// One table row: the best known `k` for games of size `n`, with the
/// derivation achieving it (possibly padded down from `exact_size`).
#[derive(Debug, Clone)]
pub struct TableEntry {
    pub n: usize,
    pub k: usize,
    pub spec: StrategySpec,
    pub exact_size: usize,
}

#[derive(Debug, Clone)]
pub struct UpperBoundTable {
    entries: Vec<TableEntry>,
}

impl UpperBoundTable {
    pub fn entry(&self, n: usize) -> &TableEntry {
        &self.entries[n - 1]
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn best_k(&self, n: usize) -> usize {
        self.entry(n).k
    }
}

/// The default verified seeds: the single edge, the square block strategies,
/// and the six-word family composition `(5, 30)`.
pub fn default_seeds(cap: usize) -> Vec<SeedStrategy> {
    let mut seeds = vec![SeedStrategy {
        k: 1,
        n: 1,
        spec: StrategySpec::Trivial(1),
    }];
    let mut k = 2;
    while k * k <= cap {
        seeds.push(SeedStrategy {
            k,
            n: k * k,
            spec: StrategySpec::BlockSquare(k),
        });
        k += 1;
    }
    if cap >= 30 {
        seeds.push(SeedStrategy {
            k: 5,
            n: 30,
            spec: StrategySpec::Amc(Box::new(StrategySpec::CodeSix)),
        });
    }
    seeds
}

/// Best known `k` per game size up to `n_max`, from the closure of the seed
/// strategies under the product composition and padding (the alice-mode
/// composition only applies to the alice-capable bases, whose compositions
/// are already among the seeds).  Ties on `k` prefer a shallower derivation.
pub fn upper_bound_table(n_max: usize) -> UpperBoundTable {
    upper_bound_table_with(n_max, &[])
}

pub fn upper_bound_table_with(n_max: usize, extra_seeds: &[SeedStrategy]) -> UpperBoundTable {
    assert!(n_max >= 1);
    // Any composition overshooting this cap is dominated within it: every
    // seed has k >= n^0.46, so a product larger than 36 * n_max either loses
    // to the square fallback or sheds a factor (each at most size 36 among
    // the useful ones) and lands inside the cap with a smaller k.
    let cap = n_max.saturating_mul(36).max(4);
    let mut seeds = default_seeds(cap);
    seeds.extend(extra_seeds.iter().cloned());
    seeds.retain(|s| s.n <= cap);

    // best[s] = (k, depth, derivation) for exact size s
    let mut best: Vec<Option<(usize, usize, StrategySpec)>> = vec![None; cap + 1];
    let relax = |slot: &mut Option<(usize, usize, StrategySpec)>,
                     k: usize,
                     depth: usize,
                     spec: &StrategySpec| {
        let better = match slot {
            None => true,
            Some((bk, bd, _)) => k < *bk || (k == *bk && depth < *bd),
        };
        if better {
            *slot = Some((k, depth, spec.clone()));
        }
    };
    for seed in &seeds {
        let (lo, hi) = best.split_at_mut(seed.n);
        let _ = lo;
        relax(&mut hi[0], seed.k, 1, &seed.spec);
    }
    for s in 2..=cap {
        let Some((k, depth, spec)) = best[s].clone() else {
            continue;
        };
        for seed in &seeds {
            if seed.n < 2 || s > cap / seed.n {
                continue;
            }
            let product = StrategySpec::Prod(Box::new(spec.clone()), Box::new(seed.spec.clone()));
            let (lo, hi) = best.split_at_mut(s * seed.n);
            let _ = lo;
            relax(&mut hi[0], k * seed.k, depth.max(1) + 1, &product);
        }
    }

    // padding: the best k for size n is the best over exact sizes >= n
    let mut entries: Vec<Option<TableEntry>> = vec![None; n_max + 1];
    let mut running: Option<(usize, usize, StrategySpec, usize)> = None;
    for s in (1..=cap).rev() {
        if let Some((k, depth, spec)) = &best[s] {
            let better = match &running {
                None => true,
                Some((rk, rd, _, _)) => k < rk || (k == rk && *depth < *rd),
            };
            if better {
                running = Some((*k, *depth, spec.clone(), s));
            }
        }
        if s <= n_max {
            let (k, _, spec, exact) = running.clone().expect("size-1 seed exists");
            let spec = if exact > s {
                StrategySpec::Pad(Box::new(spec), s)
            } else {
                spec
            };
            entries[s] = Some(TableEntry {
                n: s,
                k,
                spec,
                exact_size: exact,
            });
        }
    }
    UpperBoundTable {
        entries: entries.into_iter().skip(1).map(|e| e.unwrap()).collect(),
    }
}

// ============================================================================
// Tests
// ============================================================================
