//! The equivalent game on subgraphs of the n-cube.
//!
//! The Divider names coordinates one at a time; the Chooser halves the cube
//! on each named coordinate; after `n - 1` rounds two vertices remain and the
//! Chooser wins if they form an edge of the target subgraph.  A `(k, n)`
//! strategy for the array game exists exactly when some subgraph of maximum
//! degree `k` lets the Chooser win.

mod search;
mod shape;

pub use search::{
    find_any_winning, min_k, min_k_with, minimal_winning_subgraphs, no_2_5_certificate,
    no_2_5_certificate_with, validate_no_2_5_certificate, CountingLine, MinKResult,
    No25Certificate, SearchCache,
};
pub use shape::{component_shapes, contains_forbidden_pattern, shape_equivalent, Shape, ShapeKind};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::game::{run_game, GameError, Outcome, RequestOrder, StrategyProfile};

/// Solver limit: the memo table has `3^n` entries.
pub const SOLVER_MAX_N: usize = 6;
/// Canonicalization limit: `2^n * n!` signed permutations.
pub const CANONICAL_MAX_N: usize = 5;
/// Minimal-subgraph search limit.
pub const SEARCH_MAX_N: usize = 4;
/// Strategy-to-subgraph extraction enumerates all `n!` orders.
pub const EXTRACT_MAX_N: usize = 8;

#[derive(Debug, Error)]
pub enum HypercubeError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("n = {n} exceeds the {what} limit {max}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },
    #[error("maximum degree {0} exceeds 2; components are not paths and cycles")]
    DegreeTooHigh(usize),
    #[error("the Chooser loses on this subgraph; no strategy can be extracted")]
    LosingGraph,
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

// ============================================================================
// Subgraphs
// ============================================================================

/// An edge of the n-cube, keyed by its lower endpoint (the vertex with a 0 in
/// the varying coordinate) and the varying coordinate (0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub vertex: u32,
    pub direction: usize,
}

impl Edge {
    pub fn new(vertex: u32, direction: usize) -> Self {
        debug_assert_eq!(vertex >> direction & 1, 0, "vertex must be the lower endpoint");
        Edge { vertex, direction }
    }

    pub fn endpoints(&self) -> (u32, u32) {
        (self.vertex, self.vertex | 1 << self.direction)
    }

    fn to_star(self, n: usize) -> String {
        (0..n)
            .map(|i| {
                if i == self.direction {
                    '*'
                } else if self.vertex >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// A subgraph of the n-cube given by its edge set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypercubeSubgraph {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl HypercubeSubgraph {
    pub fn new(n: usize, edges: BTreeSet<Edge>) -> Result<Self, HypercubeError> {
        if n == 0 || n > 31 {
            return Err(HypercubeError::Invalid(format!(
                "dimension must be 1..=31, got {n}"
            )));
        }
        for e in &edges {
            if e.direction >= n || e.vertex >> n != 0 {
                return Err(HypercubeError::Invalid(format!(
                    "edge ({:#b}, {}) outside the {n}-cube",
                    e.vertex, e.direction
                )));
            }
            if e.vertex >> e.direction & 1 == 1 {
                return Err(HypercubeError::Invalid(
                    "edge vertex must have a 0 in its direction coordinate".into(),
                ));
            }
        }
        Ok(HypercubeSubgraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Membership test accepting either endpoint.
    pub fn contains_edge(&self, vertex: u32, direction: usize) -> bool {
        self.edges
            .contains(&Edge::new(vertex & !(1 << direction), direction))
    }

    pub fn without_edge(&self, edge: &Edge) -> HypercubeSubgraph {
        let mut edges = self.edges.clone();
        edges.remove(edge);
        HypercubeSubgraph { n: self.n, edges }
    }

    /// Vertices touched by at least one edge.
    pub fn vertices(&self) -> BTreeSet<u32> {
        self.edges
            .iter()
            .flat_map(|e| {
                let (a, b) = e.endpoints();
                [a, b]
            })
            .collect()
    }

    pub fn degree(&self, vertex: u32) -> usize {
        (0..self.n)
            .filter(|&d| self.contains_edge(vertex, d))
            .count()
    }

    /// Directions that appear on at least one edge (0-based).
    pub fn directions_used(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.direction).collect()
    }
}

impl fmt::Display for HypercubeSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_star_edges(self))
    }
}

/// Maximum vertex degree; 0 for the empty graph.
pub fn max_degree(graph: &HypercubeSubgraph) -> usize {
    graph
        .vertices()
        .into_iter()
        .map(|v| graph.degree(v))
        .max()
        .unwrap_or(0)
}

// ============================================================================
// Star notation
// ============================================================================

/// Parses comma/whitespace separated edge tokens over `{0,1,*}`, each with
/// exactly one `*` marking the varying coordinate.  The leftmost character is
/// coordinate 1.
pub fn parse_star_edges(text: &str) -> Result<HypercubeSubgraph, HypercubeError> {
    let tokens: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(HypercubeError::Parse("no edge tokens".into()));
    }
    let n = tokens[0].len();
    let mut edges = BTreeSet::new();
    for tok in tokens {
        if tok.len() != n {
            return Err(HypercubeError::Parse(format!(
                "token {tok:?} has length {}, expected {n}",
                tok.len()
            )));
        }
        let mut direction = None;
        let mut vertex = 0u32;
        for (i, c) in tok.chars().enumerate() {
            match c {
                '*' => {
                    if direction.replace(i).is_some() {
                        return Err(HypercubeError::Parse(format!(
                            "token {tok:?} has more than one '*'"
                        )));
                    }
                }
                '1' => vertex |= 1 << i,
                '0' => {}
                other => {
                    return Err(HypercubeError::Parse(format!(
                        "invalid character {other:?} in token {tok:?}"
                    )))
                }
            }
        }
        let direction = direction.ok_or_else(|| {
            HypercubeError::Parse(format!("token {tok:?} has no '*'"))
        })?;
        edges.insert(Edge::new(vertex, direction));
    }
    HypercubeSubgraph::new(n, edges)
}

/// Canonical text form: edges in ascending order, comma-space separated.
pub fn format_star_edges(graph: &HypercubeSubgraph) -> String {
    graph
        .edges
        .iter()
        .map(|e| e.to_star(graph.n))
        .collect::<Vec<_>>()
        .join(", ")
}

// ============================================================================
// Solver
// ============================================================================

/// Per-coordinate assignment: 0, 1, or free.  States are encoded in base 3
/// with the free digit being 2, so determining any coordinate decreases the
/// encoded index.
pub(crate) fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Winning status for every assignment state, bottom up.  `table[v * n + d]`
/// marks edge presence.
pub(crate) fn solve_all_states(n: usize, edge_table: &[bool]) -> Vec<bool> {
    let states = pow3(n);
    let mut result = vec![false; states];
    let mut digits = vec![0u8; n];
    for idx in 0..states {
        // decode digits of idx
        let mut rest = idx;
        let mut free = Vec::with_capacity(n);
        let mut vertex = 0u32;
        for (d, digit) in digits.iter_mut().enumerate() {
            *digit = (rest % 3) as u8;
            rest /= 3;
            match digit {
                1 => vertex |= 1 << d,
                2 => free.push(d),
                _ => {}
            }
        }
        result[idx] = match free.len() {
            0 => false,
            1 => edge_table[vertex as usize * n + free[0]],
            _ => free.iter().all(|&d| {
                let p = pow3(d);
                result[idx - 2 * p] || result[idx - p]
            }),
        };
    }
    result
}

pub(crate) fn edge_table(graph: &HypercubeSubgraph) -> Vec<bool> {
    let n = graph.n;
    let mut table = vec![false; (1 << n) * n];
    for e in &graph.edges {
        table[e.vertex as usize * n + e.direction] = true;
    }
    table
}

/// Whether the Chooser wins the halving game on `graph`.
pub fn is_winning(graph: &HypercubeSubgraph) -> Result<bool, HypercubeError> {
    if graph.n > SOLVER_MAX_N {
        return Err(HypercubeError::TooLarge {
            what: "solver",
            n: graph.n,
            max: SOLVER_MAX_N,
        });
    }
    let result = solve_all_states(graph.n, &edge_table(graph));
    Ok(result[pow3(graph.n) - 1])
}

/// True iff the graph is winning and every single-edge deletion is losing.
pub fn minimality_check(graph: &HypercubeSubgraph) -> Result<bool, HypercubeError> {
    if !is_winning(graph)? {
        return Ok(false);
    }
    for e in graph.edges.iter() {
        if is_winning(&graph.without_edge(e))? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ============================================================================
// Automorphisms and canonical forms
// ============================================================================

/// All signed coordinate permutations of the n-cube as vertex maps together
/// with the direction permutation.
pub(crate) fn automorphisms(n: usize) -> Vec<(Vec<u32>, Vec<usize>)> {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permutations(&mut current, n, &mut perms);
    perms.sort();
    let mut out = Vec::with_capacity(perms.len() << n);
    for perm in &perms {
        for mask in 0..1u32 << n {
            let vertex_map: Vec<u32> = (0..1u32 << n)
                .map(|v| {
                    let mut image = 0u32;
                    for (i, &pi) in perm.iter().enumerate() {
                        if v >> i & 1 == 1 {
                            image |= 1 << pi;
                        }
                    }
                    image ^ mask
                })
                .collect();
            out.push((vertex_map, perm.clone()));
        }
    }
    out
}

fn heap_permutations(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(current, k - 1, out);
        if k.is_multiple_of(2) {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

pub(crate) fn apply_automorphism(
    graph: &HypercubeSubgraph,
    vertex_map: &[u32],
    dir_perm: &[usize],
) -> BTreeSet<Edge> {
    graph
        .edges
        .iter()
        .map(|e| {
            let image = vertex_map[e.vertex as usize];
            let d = dir_perm[e.direction];
            Edge::new(image & !(1 << d), d)
        })
        .collect()
}

/// Lexicographically least image of the edge set under all `2^n n!` signed
/// coordinate permutations.
pub fn canonical_form(graph: &HypercubeSubgraph) -> Result<HypercubeSubgraph, HypercubeError> {
    if graph.n > CANONICAL_MAX_N {
        return Err(HypercubeError::TooLarge {
            what: "canonicalization",
            n: graph.n,
            max: CANONICAL_MAX_N,
        });
    }
    let mut best: Option<BTreeSet<Edge>> = None;
    for (vertex_map, dir_perm) in automorphisms(graph.n) {
        let image = apply_automorphism(graph, &vertex_map, &dir_perm);
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    Ok(HypercubeSubgraph {
        n: graph.n,
        edges: best.expect("identity automorphism exists"),
    })
}

// ============================================================================
// Strategy conversions
// ============================================================================

/// The Chooser's play as a strategy profile: alice keeps the remaining
/// subcube winnable (preferring bit 0 on ties) and bob answers the graph
/// neighbors of the final vertex.  Gives a `(max_degree, n)` profile.
pub fn strategy_from_subgraph(
    graph: &HypercubeSubgraph,
) -> Result<StrategyProfile, HypercubeError> {
    if !is_winning(graph)? {
        return Err(HypercubeError::LosingGraph);
    }
    let n = graph.n;
    let k = max_degree(graph);
    let result = Arc::new(solve_all_states(n, &edge_table(graph)));
    let table = Arc::new(edge_table(graph));

    let res_a = result.clone();
    let alice = move |prefix: &[usize]| -> u8 {
        let mut idx = pow3(n) - 1;
        for (i, &p) in prefix.iter().enumerate() {
            let child0 = idx - 2 * pow3(p);
            let child1 = idx - pow3(p);
            let bit = if res_a[child0] {
                0
            } else if res_a[child1] {
                1
            } else {
                0 // losing either way: only reachable on a losing graph
            };
            if i + 1 == prefix.len() {
                return bit;
            }
            idx = if bit == 0 { child0 } else { child1 };
        }
        unreachable!("prefix is non-empty")
    };

    let table_b = table.clone();
    let bob = move |outcome: &Outcome| -> BTreeSet<usize> {
        let v = outcome.to_mask() as u32;
        (0..n)
            .filter(|&d| table_b[(v & !(1 << d)) as usize * n + d])
            .collect()
    };

    Ok(StrategyProfile::new(n, k, Arc::new(alice), Arc::new(bob)))
}

/// Result of replaying a profile into a subgraph, with the checked
/// postconditions.
#[derive(Debug, Clone)]
pub struct SubgraphExtraction {
    pub graph: HypercubeSubgraph,
    pub max_degree: usize,
    pub degree_within_k: bool,
    /// Solver verdict when the dimension permits it.
    pub winning: Option<bool>,
}

/// Collects the final vertex pair of every adversary order into an edge set:
/// for each order the two outcomes (bit 0 and bit 1) differ exactly in the
/// adversary's coordinate.
pub fn subgraph_from_strategy(
    profile: &StrategyProfile,
) -> Result<SubgraphExtraction, HypercubeError> {
    let n = profile.n;
    if n > EXTRACT_MAX_N {
        return Err(HypercubeError::TooLarge {
            what: "strategy extraction",
            n,
            max: EXTRACT_MAX_N,
        });
    }
    let mut edges = BTreeSet::new();
    crate::game::for_each_permutation(n, |perm| {
        let order = RequestOrder::from_zero_based(perm.to_vec(), n).expect("permutation");
        let o0 = run_game(profile, &order, 0).expect("full order");
        let o1 = run_game(profile, &order, 1).expect("full order");
        let v0 = o0.to_mask() as u32;
        let v1 = o1.to_mask() as u32;
        let d = *perm.last().unwrap();
        debug_assert_eq!(v0 ^ v1, 1 << d);
        edges.insert(Edge::new(v0.min(v1), d));
        true
    });
    let graph = HypercubeSubgraph::new(n, edges)?;
    let degree = max_degree(&graph);
    let winning = if n <= SOLVER_MAX_N {
        Some(is_winning(&graph)?)
    } else {
        None
    };
    Ok(SubgraphExtraction {
        degree_within_k: degree <= profile.k,
        max_degree: degree,
        graph,
        winning,
    })
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::verify_exhaustive;
    use crate::strategy::{block_square_strategy, trivial_strategy};

    pub(crate) const SQUARE_PATH: &str = "*0, 0*";
    pub(crate) const CUBE_PATH: &str = "10*, *00, 0*0, 01*";
    pub(crate) const CYCLE_8: &str = "*000, 0*00, 01*0, 011*, 0*11, *011, 101*, 10*0";

    #[test]
    fn star_round_trip() {
        for text in [SQUARE_PATH, CUBE_PATH, CYCLE_8] {
            let g = parse_star_edges(text).unwrap();
            let again = parse_star_edges(&format_star_edges(&g)).unwrap();
            assert_eq!(g, again);
        }
    }

    #[test]
    fn star_parse_errors() {
        assert!(parse_star_edges("1**").is_err());
        assert!(parse_star_edges("10").is_err());
        assert!(parse_star_edges("*0, 0*0").is_err());
        assert!(parse_star_edges("x0").is_err());
        assert!(parse_star_edges("").is_err());
    }

    #[test]
    fn degrees() {
        assert_eq!(max_degree(&parse_star_edges(SQUARE_PATH).unwrap()), 2);
        assert_eq!(max_degree(&parse_star_edges(CYCLE_8).unwrap()), 2);
        // the full square
        let q2 = parse_star_edges("*0, *1, 0*, 1*").unwrap();
        assert_eq!(max_degree(&q2), 2);
        let empty = HypercubeSubgraph::new(2, BTreeSet::new()).unwrap();
        assert_eq!(max_degree(&empty), 0);
    }

    #[test]
    fn winning_known_graphs() {
        assert!(is_winning(&parse_star_edges(SQUARE_PATH).unwrap()).unwrap());
        assert!(is_winning(&parse_star_edges(CUBE_PATH).unwrap()).unwrap());
        assert!(is_winning(&parse_star_edges(CYCLE_8).unwrap()).unwrap());
        for n in 1..=4 {
            let empty = HypercubeSubgraph::new(n, BTreeSet::new()).unwrap();
            assert!(!is_winning(&empty).unwrap());
        }
        // a single edge loses as soon as the Divider can name its direction
        let single = parse_star_edges("*0").unwrap();
        assert!(!is_winning(&single).unwrap());
        let single1 = parse_star_edges("*").unwrap();
        assert!(is_winning(&single1).unwrap());
    }

    #[test]
    fn winning_is_monotone_under_edge_addition() {
        let g = parse_star_edges(SQUARE_PATH).unwrap();
        let mut edges = g.edges().clone();
        edges.insert(Edge::new(0b10, 0)); // *1
        let bigger = HypercubeSubgraph::new(2, edges).unwrap();
        assert!(is_winning(&bigger).unwrap());
    }

    #[test]
    fn canonical_form_idempotent_and_merges_complements() {
        let a = parse_star_edges("*0, 0*").unwrap();
        let b = parse_star_edges("*1, 1*").unwrap();
        let ca = canonical_form(&a).unwrap();
        let cb = canonical_form(&b).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(canonical_form(&ca).unwrap(), ca);
    }

    #[test]
    fn orbit_size_divides_group_order() {
        let g = parse_star_edges(SQUARE_PATH).unwrap();
        let mut orbit = BTreeSet::new();
        for (vm, dp) in automorphisms(2) {
            orbit.insert(apply_automorphism(&g, &vm, &dp));
        }
        let group = 4 * 2; // 2^2 * 2!
        assert_eq!(group % orbit.len(), 0);
        assert_eq!(orbit.len(), 4);
    }

    #[test]
    fn minimality_of_known_graphs() {
        let cycle = parse_star_edges(CYCLE_8).unwrap();
        assert!(minimality_check(&cycle).unwrap());
        // adding any extra edge breaks minimality
        let mut edges = cycle.edges().clone();
        edges.insert(Edge::new(0b1000, 1));
        let bigger = HypercubeSubgraph::new(4, edges).unwrap();
        assert!(is_winning(&bigger).unwrap());
        assert!(!minimality_check(&bigger).unwrap());
        let single1 = parse_star_edges("*").unwrap();
        assert!(minimality_check(&single1).unwrap());
    }

    #[test]
    fn strategies_from_known_graphs_verify() {
        for (text, expect_k) in [(SQUARE_PATH, 2), (CUBE_PATH, 2), (CYCLE_8, 2)] {
            let g = parse_star_edges(text).unwrap();
            let p = strategy_from_subgraph(&g).unwrap();
            assert_eq!(p.k, expect_k);
            let report = verify_exhaustive(&p).unwrap();
            assert!(report.valid, "{text}: {:?}", report.failure);
        }
    }

    #[test]
    fn losing_graph_yields_no_strategy() {
        let single = parse_star_edges("*0").unwrap();
        assert!(matches!(
            strategy_from_subgraph(&single),
            Err(HypercubeError::LosingGraph)
        ));
    }

    #[test]
    fn extraction_round_trip_is_contained() {
        for text in [SQUARE_PATH, CYCLE_8] {
            let g = parse_star_edges(text).unwrap();
            let p = strategy_from_subgraph(&g).unwrap();
            let extraction = subgraph_from_strategy(&p).unwrap();
            assert!(extraction.degree_within_k);
            assert_eq!(extraction.winning, Some(true));
            assert!(extraction.graph.edges().is_subset(g.edges()));
        }
    }

    #[test]
    fn extraction_from_strategies() {
        let e = subgraph_from_strategy(&trivial_strategy(2)).unwrap();
        assert!(e.degree_within_k);
        assert_eq!(e.winning, Some(true));
        let e = subgraph_from_strategy(&block_square_strategy(2)).unwrap();
        assert!(e.max_degree <= 2);
        assert_eq!(e.winning, Some(true));
        // it must contain an 8-cycle: every vertex of the cycle has degree 2
        let shapes = component_shapes(&e.graph).unwrap();
        assert!(shapes
            .iter()
            .any(|s| s.kind() == ShapeKind::Cycle && s.len() == 8));
    }
}
