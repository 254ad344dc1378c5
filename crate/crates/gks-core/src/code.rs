//! Binary block codes and the subset-to-codeword matching.
//!
//! Words are stored as little bitmasks: bit `i` of a [`Word`] is position
//! `i + 1` of the word, so the leftmost character of the textual form
//! `"100110"` is position 1.  All public position arguments and textual forms
//! are 1-based; in-memory indices are 0-based.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// A codeword of length at most 31, bit `i` = position `i + 1`.
pub type Word = u32;

/// Longest supported word; everything here is desk scale.
pub const MAX_WORD_LEN: usize = 31;

/// Left/right side cap for [`tau_matching`].
pub const MAX_MATCHING_SIDE: usize = 100_000;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("refusing: {0}")]
    TooLarge(String),
    #[error("need at least two words to compute a distance")]
    TooFewWords,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn hamming_distance(a: Word, b: Word) -> u32 {
    (a ^ b).count_ones()
}

pub fn word_to_string(w: Word, length: usize) -> String {
    (0..length)
        .map(|i| if w >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn word_from_str(s: &str) -> Result<(Word, usize), CodeError> {
    if s.is_empty() || s.len() > MAX_WORD_LEN {
        return Err(CodeError::Invalid(format!(
            "word length must be 1..={MAX_WORD_LEN}, got {}",
            s.len()
        )));
    }
    let mut w = 0;
    for (i, c) in s.chars().enumerate() {
        match c {
            '1' => w |= 1 << i,
            '0' => {}
            other => {
                return Err(CodeError::Invalid(format!(
                    "invalid character {other:?} in word {s:?}"
                )))
            }
        }
    }
    Ok((w, s.len()))
}

// ============================================================================
// BinaryCode
// ============================================================================

/// A set of distinct binary words of a common length, with its exact minimum
/// pairwise Hamming distance computed up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    length: usize,
    words: Vec<Word>,
    min_distance: Option<u32>,
}

impl BinaryCode {
    /// Builds a code from raw words.  Words must be distinct and fit in
    /// `length` bits.
    pub fn new(length: usize, mut words: Vec<Word>) -> Result<Self, CodeError> {
        if length == 0 || length > MAX_WORD_LEN {
            return Err(CodeError::Invalid(format!(
                "word length must be 1..={MAX_WORD_LEN}, got {length}"
            )));
        }
        for &w in &words {
            if length < MAX_WORD_LEN && w >> length != 0 {
                return Err(CodeError::Invalid(format!(
                    "word {w:#b} does not fit in {length} bits"
                )));
            }
        }
        words.sort_unstable();
        if words.windows(2).any(|p| p[0] == p[1]) {
            return Err(CodeError::Invalid("duplicate words".into()));
        }
        let min_distance = brute_force_min_distance(&words);
        Ok(BinaryCode {
            length,
            words,
            min_distance,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// The words in ascending numeric order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: Word) -> bool {
        self.words.binary_search(&w).is_ok()
    }

    /// Exact minimum pairwise distance; errors on fewer than two words.
    pub fn min_distance(&self) -> Result<u32, CodeError> {
        self.min_distance.ok_or(CodeError::TooFewWords)
    }

    /// Nearest codeword within Hamming distance 1, together with the flipped
    /// position (0-based) when the distance is exactly 1.  Unique whenever the
    /// code has minimum distance at least 3.
    pub fn decode_within_one(&self, w: Word) -> Option<(Word, Option<usize>)> {
        if self.contains(w) {
            return Some((w, None));
        }
        (0..self.length)
            .map(|p| (w ^ (1 << p), p))
            .find(|&(c, _)| self.contains(c))
            .map(|(c, p)| (c, Some(p)))
    }

    /// True iff the words form a group under bitwise addition.
    pub fn is_linear(&self) -> bool {
        if !self.contains(0) {
            return false;
        }
        self.words
            .iter()
            .all(|&a| self.words.iter().all(|&b| self.contains(a ^ b)))
    }
}

fn brute_force_min_distance(words: &[Word]) -> Option<u32> {
    if words.len() < 2 {
        return None;
    }
    let mut best = u32::MAX;
    for (i, &a) in words.iter().enumerate() {
        for &b in &words[i + 1..] {
            best = best.min(hamming_distance(a, b));
        }
    }
    Some(best)
}

/// Free-function form of [`BinaryCode::min_distance`].
pub fn min_distance(code: &BinaryCode) -> Result<u32, CodeError> {
    code.min_distance()
}

/// The single-error-correcting code of length `2^r - 1` whose parity checks
/// are the binary representations of the column indices `1..2^r - 1`.
pub fn hamming_code(r: u32) -> Result<BinaryCode, CodeError> {
    if !(2..=4).contains(&r) {
        return Err(CodeError::TooLarge(format!(
            "parameter r must be in 2..=4, got {r}"
        )));
    }
    let n = (1usize << r) - 1;
    let words = (0..1u32 << n)
        .filter(|&x| {
            let mut syndrome = 0u32;
            for i in 0..n {
                if x >> i & 1 == 1 {
                    syndrome ^= (i + 1) as u32;
                }
            }
            syndrome == 0
        })
        .collect();
    BinaryCode::new(n, words)
}

/// Deletes one coordinate (0-based) from every word, de-duplicating the
/// result.  The minimum distance may drop by one.
pub fn puncture(code: &BinaryCode, position: usize) -> Result<BinaryCode, CodeError> {
    if position >= code.length {
        return Err(CodeError::Invalid(format!(
            "position {} out of range 0..{}",
            position, code.length
        )));
    }
    let low_mask = (1u32 << position) - 1;
    let mut words: Vec<Word> = code
        .words
        .iter()
        .map(|&w| (w & low_mask) | (w >> (position + 1)) << position)
        .collect();
    words.sort_unstable();
    words.dedup();
    BinaryCode::new(code.length - 1, words)
}

// ============================================================================
// File I/O
// ============================================================================

/// Parses the code file format: optional `#` comment lines, one binary word
/// per line, length inferred from the first word.
pub fn parse_code(text: &str) -> Result<BinaryCode, CodeError> {
    let mut length = None;
    let mut words = Vec::new();
    let mut seen = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (w, len) = word_from_str(line).map_err(|e| CodeError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        match length {
            None => length = Some(len),
            Some(l) if l != len => {
                return Err(CodeError::Parse {
                    line: line_no,
                    msg: format!("word length {len} differs from first word length {l}"),
                })
            }
            _ => {}
        }
        if let Some(first) = seen.insert(w, line_no) {
            return Err(CodeError::Parse {
                line: line_no,
                msg: format!("duplicate word (first seen on line {first})"),
            });
        }
        words.push(w);
    }
    let length = length.ok_or(CodeError::Parse {
        line: 0,
        msg: "file contains no words".into(),
    })?;
    BinaryCode::new(length, words)
}

pub fn load_code(path: impl AsRef<Path>) -> Result<BinaryCode, CodeError> {
    parse_code(&fs::read_to_string(path)?)
}

pub fn format_code(code: &BinaryCode) -> String {
    let mut out = String::new();
    for &w in code.words() {
        out.push_str(&word_to_string(w, code.length()));
        out.push('\n');
    }
    out
}

pub fn save_code(code: &BinaryCode, path: impl AsRef<Path>) -> Result<(), CodeError> {
    Ok(fs::write(path, format_code(code))?)
}

/// Randomized greedy search for a `(length, target)` code of the given
/// minimum distance.  Keeps the best attempt over `restarts` shuffles; there
/// is no promise that `target` is reached.
pub fn greedy_search(
    length: usize,
    min_dist: u32,
    target: usize,
    seed: u64,
    restarts: usize,
) -> Result<BinaryCode, CodeError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    if length > 16 {
        return Err(CodeError::TooLarge(format!(
            "greedy search enumerates 2^length words; length {length} > 16"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<Word> = (0..1u32 << length).collect();
    let mut best: Vec<Word> = Vec::new();
    for _ in 0..restarts.max(1) {
        let mut order = all.clone();
        order.shuffle(&mut rng);
        let mut chosen: Vec<Word> = Vec::new();
        for &w in &order {
            if chosen.iter().all(|&c| hamming_distance(c, w) >= min_dist) {
                chosen.push(w);
            }
        }
        if chosen.len() > best.len() {
            best = chosen;
        }
        if best.len() >= target {
            break;
        }
    }
    BinaryCode::new(length, best)
}

// ============================================================================
// Tau maps and the bipartite matching
// ============================================================================

/// An injective assignment of codewords to `m`-subsets of positions such that
/// every assigned word is all ones on its subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauMap {
    m: usize,
    length: usize,
    entries: BTreeMap<Word, Word>, // subset mask -> codeword
}

impl TauMap {
    /// Validates completeness over all `m`-subsets, injectivity and the
    /// covering property; partial or non-injective maps are rejected.
    pub fn new(
        length: usize,
        m: usize,
        entries: BTreeMap<Word, Word>,
    ) -> Result<Self, CodeError> {
        if m == 0 || m >= length {
            return Err(CodeError::Invalid(format!(
                "subset size {m} must be in 1..{length}"
            )));
        }
        let expected = binomial(length, m);
        if entries.len() != expected {
            return Err(CodeError::Invalid(format!(
                "map covers {} of {} subsets",
                entries.len(),
                expected
            )));
        }
        let mut images: Vec<Word> = Vec::with_capacity(entries.len());
        for (&h, &x) in &entries {
            if h.count_ones() as usize != m || (length < MAX_WORD_LEN && h >> length != 0) {
                return Err(CodeError::Invalid(format!(
                    "key {h:#b} is not an {m}-subset of 1..={length}"
                )));
            }
            if x & h != h {
                return Err(CodeError::Invalid(format!(
                    "word {} is not all ones on subset {}",
                    word_to_string(x, length),
                    subset_to_string(h)
                )));
            }
            images.push(x);
        }
        images.sort_unstable();
        if images.windows(2).any(|p| p[0] == p[1]) {
            return Err(CodeError::Invalid("map is not injective".into()));
        }
        Ok(TauMap { m, length, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn get(&self, subset: Word) -> Option<Word> {
        self.entries.get(&subset).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        self.entries.iter().map(|(&h, &x)| (h, x))
    }

    /// Word-to-subset lookup table for decoding.
    pub fn inverse(&self) -> BTreeMap<Word, Word> {
        self.entries.iter().map(|(&h, &x)| (x, h)).collect()
    }

    /// Lines `i1,i2,...,im -> word`, subsets in ascending mask order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&h, &x) in &self.entries {
            out.push_str(&subset_to_string(h));
            out.push_str(" -> ");
            out.push_str(&word_to_string(x, self.length));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, length: usize, m: usize) -> Result<Self, CodeError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or(CodeError::Parse {
                line: line_no,
                msg: "expected `positions -> word`".into(),
            })?;
            let mut mask: Word = 0;
            for part in lhs.trim().split(',') {
                let pos: usize = part.trim().parse().map_err(|_| CodeError::Parse {
                    line: line_no,
                    msg: format!("bad position {part:?}"),
                })?;
                if pos == 0 || pos > length {
                    return Err(CodeError::Parse {
                        line: line_no,
                        msg: format!("position {pos} out of range 1..={length}"),
                    });
                }
                mask |= 1 << (pos - 1);
            }
            let (word, len) = word_from_str(rhs.trim()).map_err(|e| CodeError::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            if len != length {
                return Err(CodeError::Parse {
                    line: line_no,
                    msg: format!("word length {len}, expected {length}"),
                });
            }
            entries.insert(mask, word);
        }
        TauMap::new(length, m, entries)
    }
}

fn subset_to_string(mask: Word) -> String {
    let mut parts = Vec::new();
    for i in 0..32 {
        if mask >> i & 1 == 1 {
            parts.push((i + 1).to_string());
        }
    }
    parts.join(",")
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All `m`-subset masks of `0..length` in ascending (colexicographic) order.
pub fn subsets(length: usize, m: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(binomial(length, m));
    if m == 0 || m > length {
        return out;
    }
    // Gosper's hack.
    let limit: u64 = 1 << length;
    let mut v: u64 = (1 << m) - 1;
    while v < limit {
        out.push(v as Word);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Result of the subset-to-codeword matching.
#[derive(Debug, Clone)]
pub enum TauSearchOutcome {
    /// Every `m`-subset received its own covering codeword.
    Saturated(TauMap),
    /// The maximum matching leaves some subsets unmatched; `witness` is a set
    /// of subsets whose joint neighborhood is smaller than the set.
    Deficient {
        max_matching: usize,
        left_count: usize,
        witness: Vec<Word>,
        neighborhood_size: usize,
    },
}

/// Maximum bipartite matching between `m`-subsets (left) and codewords
/// (right), with an edge wherever the word is all ones on the subset.
/// Vertex orders are fixed (subsets ascending, words ascending) so the result
/// is reproducible.
pub fn tau_matching(code: &BinaryCode, m: usize) -> Result<TauSearchOutcome, CodeError> {
    if m == 0 || m >= code.length() {
        return Err(CodeError::Invalid(format!(
            "subset size {m} must be in 1..{}",
            code.length()
        )));
    }
    let left = subsets(code.length(), m);
    if left.len() > MAX_MATCHING_SIDE || code.len() > MAX_MATCHING_SIDE {
        return Err(CodeError::TooLarge(format!(
            "matching sides {} x {} exceed {MAX_MATCHING_SIDE}",
            left.len(),
            code.len()
        )));
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&h| {
            code.words()
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x & h == h)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    let matching = hopcroft_karp(&adj, code.len());
    let matched = matching.pair_left.iter().filter(|p| p.is_some()).count();

    // Maximality re-check: one extra layering pass must find no augmenting path.
    assert!(
        !has_augmenting_path(&adj, &matching),
        "matching returned with an augmenting path remaining"
    );

    if matched == left.len() {
        let entries = left
            .iter()
            .enumerate()
            .map(|(i, &h)| (h, code.words()[matching.pair_left[i].unwrap()]))
            .collect();
        Ok(TauSearchOutcome::Saturated(TauMap::new(
            code.length(),
            m,
            entries,
        )?))
    } else {
        let (witness_idx, neighborhood_size) = hall_witness(&adj, &matching);
        let witness: Vec<Word> = witness_idx.iter().map(|&i| left[i]).collect();
        assert!(witness.len() > neighborhood_size);
        Ok(TauSearchOutcome::Deficient {
            max_matching: matched,
            left_count: left.len(),
            witness,
            neighborhood_size,
        })
    }
}

struct Matching {
    pair_left: Vec<Option<usize>>,
    pair_right: Vec<Option<usize>>,
}

/// Hopcroft–Karp: breadth-first layering plus depth-first augmentation along
/// shortest alternating paths.
fn hopcroft_karp(adj: &[Vec<usize>], right_count: usize) -> Matching {
    const INF: u32 = u32::MAX;
    let n_left = adj.len();
    let mut pair_left: Vec<Option<usize>> = vec![None; n_left];
    let mut pair_right: Vec<Option<usize>> = vec![None; right_count];
    let mut dist = vec![INF; n_left];

    loop {
        // BFS from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for (u, d) in dist.iter_mut().enumerate() {
            if pair_left[u].is_none() {
                *d = 0;
                queue.push_back(u);
            } else {
                *d = INF;
            }
        }
        let mut found_free_right = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match pair_right[v] {
                    None => found_free_right = true,
                    Some(w) if dist[w] == INF => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found_free_right {
            break;
        }
        // DFS along layered edges.
        fn try_augment(
            u: usize,
            adj: &[Vec<usize>],
            pair_left: &mut [Option<usize>],
            pair_right: &mut [Option<usize>],
            dist: &mut [u32],
        ) -> bool {
            for &v in &adj[u] {
                let advance = match pair_right[v] {
                    None => true,
                    Some(w) => {
                        dist[w] == dist[u] + 1
                            && try_augment(w, adj, pair_left, pair_right, dist)
                    }
                };
                if advance {
                    pair_left[u] = Some(v);
                    pair_right[v] = Some(u);
                    return true;
                }
            }
            dist[u] = u32::MAX;
            false
        }
        for u in 0..n_left {
            if pair_left[u].is_none() && dist[u] == 0 {
                try_augment(u, adj, &mut pair_left, &mut pair_right, &mut dist);
            }
        }
    }
    Matching {
        pair_left,
        pair_right,
    }
}

fn has_augmenting_path(adj: &[Vec<usize>], matching: &Matching) -> bool {
    let (reachable_left, reachable_right) = alternating_reach(adj, matching);
    reachable_right
        .iter()
        .enumerate()
        .any(|(v, &r)| r && matching.pair_right[v].is_none())
        && !reachable_left.is_empty()
}

/// Left and right vertices reachable from free left vertices along
/// alternating paths (unmatched left→right, matched right→left).
fn alternating_reach(adj: &[Vec<usize>], matching: &Matching) -> (Vec<usize>, Vec<bool>) {
    let mut seen_left = vec![false; adj.len()];
    let mut seen_right = vec![false; matching.pair_right.len()];
    let mut stack: Vec<usize> = (0..adj.len())
        .filter(|&u| matching.pair_left[u].is_none())
        .collect();
    for &u in &stack {
        seen_left[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if matching.pair_left[u] == Some(v) {
                continue;
            }
            if !seen_right[v] {
                seen_right[v] = true;
                if let Some(w) = matching.pair_right[v] {
                    if !seen_left[w] {
                        seen_left[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
    }
    let lefts = seen_left
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(u, _)| u)
        .collect();
    (lefts, seen_right)
}

/// For a non-saturating matching: the reachable left set violates Hall's
/// condition, `|N(S)| < |S|`.
fn hall_witness(adj: &[Vec<usize>], matching: &Matching) -> (Vec<usize>, usize) {
    let (lefts, seen_right) = alternating_reach(adj, matching);
    let neighborhood = seen_right.iter().filter(|&&s| s).count();
    (lefts, neighborhood)
}

// ============================================================================
// Tests
// ============================================================================
