//! Shapes of degree-two subgraphs: the direction sequence along each path or
//! cycle component, compared up to relabeling, reversal and (for cycles)
//! rotation.

use std::collections::BTreeMap;

use super::{max_degree, HypercubeError, HypercubeSubgraph};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShapeKind {
    Path,
    Cycle,
}

/// The sequence of edge directions (1-based) along one component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Shape {
    directions: Vec<usize>,
    kind: ShapeKind,
}

impl Shape {
    pub fn new(directions: Vec<usize>, kind: ShapeKind) -> Result<Self, HypercubeError> {
        if directions.is_empty() {
            return Err(HypercubeError::Invalid("empty shape".into()));
        }
        // an immediate repeat would revisit an edge
        if directions.windows(2).any(|w| w[0] == w[1]) {
            return Err(HypercubeError::Invalid(
                "consecutive shape entries must differ".into(),
            ));
        }
        Ok(Shape { directions, kind })
    }

    /// Parses a digit string such as `"31234214"` as a path or cycle shape.
    pub fn from_digits(digits: &str, kind: ShapeKind) -> Result<Self, HypercubeError> {
        let directions = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize)
                    .ok_or_else(|| {
                        HypercubeError::Parse(format!("invalid shape digit {c:?}"))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Shape::new(directions, kind)
    }

    pub fn directions(&self) -> &[usize] {
        &self.directions
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn to_digits(&self) -> String {
        self.directions
            .iter()
            .map(|d| {
                if *d <= 9 {
                    d.to_string()
                } else {
                    format!("[{d}]")
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            ShapeKind::Path => "path",
            ShapeKind::Cycle => "cycle",
        };
        write!(f, "{} ({kind})", self.to_digits())
    }
}

/// One shape per connected component, walked deterministically.  Requires
/// maximum degree at most 2.
pub fn component_shapes(graph: &HypercubeSubgraph) -> Result<Vec<Shape>, HypercubeError> {
    let degree = max_degree(graph);
    if degree > 2 {
        return Err(HypercubeError::DegreeTooHigh(degree));
    }
    // adjacency (sorted by direction, then neighbor)
    let mut adjacency: BTreeMap<u32, Vec<(u32, usize)>> = BTreeMap::new();
    for e in graph.edges() {
        let (a, b) = e.endpoints();
        adjacency.entry(a).or_default().push((b, e.direction));
        adjacency.entry(b).or_default().push((a, e.direction));
    }
    for nbrs in adjacency.values_mut() {
        nbrs.sort_by_key(|&(v, d)| (d, v));
    }

    let mut visited: BTreeMap<u32, bool> = adjacency.keys().map(|&v| (v, false)).collect();
    let mut shapes = Vec::new();
    let vertices: Vec<u32> = adjacency.keys().copied().collect();
    for &start in &vertices {
        if visited[&start] {
            continue;
        }
        // collect the component
        let mut component = vec![start];
        visited.insert(start, true);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[&v] {
                if !visited[&w] {
                    visited.insert(w, true);
                    component.push(w);
                    stack.push(w);
                }
            }
        }
        let endpoints: Vec<u32> = component
            .iter()
            .copied()
            .filter(|&v| adjacency[&v].len() == 1)
            .collect();
        let (kind, walk_start) = if endpoints.is_empty() {
            (ShapeKind::Cycle, *component.iter().min().unwrap())
        } else {
            (ShapeKind::Path, endpoints.iter().copied().min().unwrap())
        };
        // walk edge by edge, never reusing the edge just traversed
        let mut directions = Vec::new();
        let mut prev: Option<(u32, usize)> = None;
        let mut current = walk_start;
        loop {
            let next = adjacency[&current]
                .iter()
                .copied()
                .find(|&(w, d)| prev != Some((w, d)) || adjacency[&current].len() == 1);
            let Some((w, d)) = next else {
                break;
            };
            // for paths this terminates at the far endpoint; for cycles when
            // back at the start
            directions.push(d + 1);
            prev = Some((current, d));
            current = w;
            match kind {
                ShapeKind::Path => {
                    if adjacency[&current].len() == 1 && current != walk_start {
                        break;
                    }
                }
                ShapeKind::Cycle => {
                    if current == walk_start {
                        break;
                    }
                }
            }
        }
        shapes.push(Shape::new(directions, kind)?);
    }
    Ok(shapes)
}

/// Equality up to direction relabeling, reversal and (for cycles) rotation.
pub fn shape_equivalent(a: &Shape, b: &Shape) -> bool {
    if a.kind != b.kind || a.len() != b.len() {
        return false;
    }
    candidate_sequences(b).iter().any(|seq| relabels_to(&a.directions, seq))
}

fn candidate_sequences(shape: &Shape) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let forward = shape.directions.clone();
    let mut reversed = forward.clone();
    reversed.reverse();
    match shape.kind {
        ShapeKind::Path => {
            out.push(forward);
            out.push(reversed);
        }
        ShapeKind::Cycle => {
            let len = shape.len();
            for base in [forward, reversed] {
                for r in 0..len {
                    let mut rotated = base[r..].to_vec();
                    rotated.extend_from_slice(&base[..r]);
                    out.push(rotated);
                }
            }
        }
    }
    out
}

/// Is there a direction bijection mapping `b` onto `a` position by position?
fn relabels_to(a: &[usize], b: &[usize]) -> bool {
    let mut forward: BTreeMap<usize, usize> = BTreeMap::new();
    let mut backward: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b.iter()) {
        if *forward.entry(y).or_insert(x) != x || *backward.entry(x).or_insert(y) != y {
            return false;
        }
    }
    true
}

/// Scans for the pattern `a, b, a` (three edges of a 2-face), cyclically for
/// cycle shapes.
pub fn contains_forbidden_pattern(shape: &Shape) -> bool {
    let dirs = &shape.directions;
    let len = dirs.len();
    if len < 3 {
        return false;
    }
    let window_count = match shape.kind {
        ShapeKind::Path => len - 2,
        ShapeKind::Cycle => len,
    };
    (0..window_count).any(|i| {
        let a = dirs[i];
        let b = dirs[(i + 1) % len];
        let c = dirs[(i + 2) % len];
        a == c && a != b
    })
}

// ============================================================================
// Tests
// ============================================================================
