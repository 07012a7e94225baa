//! Exact enumeration of rooted connected vertex sets and the quantities
//! built on it: anchored expansion profiles (per-size boundary minima and
//! their suffix minima) and boundary-indexed animal counts.
//!
//! Enumeration uses canonical recursive extension: at each node the eligible
//! frontier vertices are tried in increasing id order, and each tried vertex
//! is excluded from the rest of its siblings' subtrees, so every connected
//! superset is generated exactly once with no memory of previously seen
//! sets. Ids in a [`FiniteGraph`] are assigned in canonical key order, so
//! the recursion order is reproducible across runs.

use crate::graph::{FiniteGraph, GraphError, GraphOracle};
use std::collections::{BTreeMap, BTreeSet};

/// Abort threshold for a single enumeration run.
pub const SET_BUDGET: u64 = 50_000_000;

#[derive(Debug, thiserror::Error)]
pub enum ExpansionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(
        "enumeration budget exceeded: more than {emitted} connected sets \
         (raise the budget or lower max_size)"
    )]
    SetBudget { emitted: u64 },
    #[error(
        "truncation too small: boundaries of size-{max_size} sets need a \
         ball of radius at least {need}, graph provides {have}"
    )]
    TruncationTooSmall { max_size: usize, need: u32, have: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Which boundary a profile or count measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Edges with exactly one endpoint in the set.
    Edge,
    /// Outside vertices adjacent to the set.
    Vertex,
}

impl std::fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryMode::Edge => write!(f, "edge"),
            BoundaryMode::Vertex => write!(f, "vertex"),
        }
    }
}

/// Boundary sizes of one enumerated set, measured in the ambient graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetAnnotation {
    pub edge_boundary: u64,
    pub vertex_boundary: u64,
}

/// Emits every connected vertex set that contains the graph's center and has
/// at most `max_size` vertices, exactly once, together with its exact edge-
/// and vertex-boundary sizes. The visitor receives the member ids in
/// insertion order (center first). Returns the number of sets emitted.
pub fn enumerate_connected_sets<F>(
    graph: &FiniteGraph,
    max_size: usize,
    mut visit: F,
) -> Result<u64, ExpansionError>
where
    F: FnMut(&[u32], SetAnnotation),
{
    if max_size == 0 {
        return Err(ExpansionError::InvalidParameter("max_size must be at least 1".into()));
    }
    let n = graph.len();
    let mut state = EnumState {
        graph,
        max_size,
        in_set: vec![false; n],
        excluded: vec![false; n],
        adj_count: vec![0u32; n],
        members: Vec::with_capacity(max_size),
        edge_boundary: 0,
        vertex_boundary: 0,
        emitted: 0,
    };
    let root = graph.center();
    state.add(root);
    state.recurse(&mut visit)?;
    state.remove(root);
    debug_assert_eq!(state.edge_boundary, 0);
    debug_assert_eq!(state.vertex_boundary, 0);
    Ok(state.emitted)
}

struct EnumState<'g> {
    graph: &'g FiniteGraph,
    max_size: usize,
    in_set: Vec<bool>,
    excluded: Vec<bool>,
    /// For vertices outside the set: how many set members they touch.
    adj_count: Vec<u32>,
    members: Vec<u32>,
    edge_boundary: u64,
    vertex_boundary: u64,
    emitted: u64,
}

impl EnumState<'_> {
    fn add(&mut self, v: u32) {
        let vi = v as usize;
        debug_assert!(!self.in_set[vi]);
        if self.adj_count[vi] > 0 {
            self.vertex_boundary -= 1;
        }
        self.in_set[vi] = true;
        let mut inside = 0i64;
        for &w in self.graph.neighbors(v) {
            let wi = w as usize;
            if self.in_set[wi] {
                inside += 1;
            } else {
                self.adj_count[wi] += 1;
                if self.adj_count[wi] == 1 {
                    self.vertex_boundary += 1;
                }
            }
        }
        let delta = self.graph.degree(v) as i64 - 2 * inside;
        self.edge_boundary = (self.edge_boundary as i64 + delta) as u64;
        self.members.push(v);
    }

    fn remove(&mut self, v: u32) {
        let vi = v as usize;
        debug_assert_eq!(self.members.last(), Some(&v));
        self.members.pop();
        let mut inside = 0i64;
        for &w in self.graph.neighbors(v) {
            let wi = w as usize;
            if self.in_set[wi] {
                inside += 1;
            } else {
                self.adj_count[wi] -= 1;
                if self.adj_count[wi] == 0 {
                    self.vertex_boundary -= 1;
                }
            }
        }
        self.in_set[vi] = false;
        let delta = self.graph.degree(v) as i64 - 2 * inside;
        self.edge_boundary = (self.edge_boundary as i64 - delta) as u64;
        if self.adj_count[vi] > 0 {
            self.vertex_boundary += 1;
        }
    }

    fn recurse<F>(&mut self, visit: &mut F) -> Result<(), ExpansionError>
    where
        F: FnMut(&[u32], SetAnnotation),
    {
        self.emitted += 1;
        if self.emitted > SET_BUDGET {
            return Err(ExpansionError::SetBudget { emitted: self.emitted - 1 });
        }
        visit(
            &self.members,
            SetAnnotation {
                edge_boundary: self.edge_boundary,
                vertex_boundary: self.vertex_boundary,
            },
        );
        if self.members.len() == self.max_size {
            return Ok(());
        }
        // Eligible frontier: outside, unexcluded vertices adjacent to the
        // set, in increasing id (= canonical key) order.
        let mut frontier: Vec<u32> = Vec::new();
        for &v in &self.members {
            for &w in self.graph.neighbors(v) {
                let wi = w as usize;
                if !self.in_set[wi] && !self.excluded[wi] {
                    frontier.push(w);
                }
            }
        }
        frontier.sort_unstable();
        frontier.dedup();

        for (i, &c) in frontier.iter().enumerate() {
            self.excluded[c as usize] = true;
            self.add(c);
            let result = self.recurse(visit);
            self.remove(c);
            if result.is_err() {
                for &d in &frontier[..=i] {
                    self.excluded[d as usize] = false;
                }
                return result;
            }
        }
        for &c in &frontier {
            self.excluded[c as usize] = false;
        }
        Ok(())
    }
}

/// Exact per-size boundary minimum: the smallest boundary over connected
/// sets of exactly `size` vertices containing the center.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SizeMinimum {
    pub size: u64,
    pub min_boundary: u64,
    /// `min_boundary / size` as a float (the fraction is exact in the
    /// integer fields).
    pub ratio: f64,
}

/// Suffix minimum of the per-size ratios: the anchored expansion value when
/// sets of fewer than `n` vertices are ignored.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AnchoredPoint {
    pub n: u64,
    /// Boundary and size of the minimizing set (exact fraction).
    pub boundary: u64,
    pub size: u64,
    pub value: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExpansionProfile {
    pub mode: BoundaryMode,
    pub max_size: u64,
    /// `f(k)` for `k = 1..=max_size`.
    pub per_size: Vec<SizeMinimum>,
    /// Anchored tail `min_(n <= k <= max_size) f(k)` for `n = 1..=max_size`;
    /// nondecreasing in `n` by construction.
    pub anchored: Vec<AnchoredPoint>,
}

/// Exact expansion profile of a finite graph around its center. When the
/// graph is a truncated ball, its radius must exceed `max_size` so that no
/// counted boundary is distorted by the truncation.
pub fn expansion_profile_finite(
    graph: &FiniteGraph,
    max_size: usize,
    mode: BoundaryMode,
) -> Result<ExpansionProfile, ExpansionError> {
    check_truncation(graph, max_size)?;
    let mut min_boundary: Vec<Option<u64>> = vec![None; max_size + 1];
    enumerate_connected_sets(graph, max_size, |members, ann| {
        let b = match mode {
            BoundaryMode::Edge => ann.edge_boundary,
            BoundaryMode::Vertex => ann.vertex_boundary,
        };
        let k = members.len();
        if min_boundary[k].is_none_or(|cur| b < cur) {
            min_boundary[k] = Some(b);
        }
    })?;

    let mut per_size = Vec::with_capacity(max_size);
    for (k, entry) in min_boundary.iter().enumerate().skip(1) {
        let Some(b) = *entry else {
            // The whole component is smaller than max_size; sizes beyond it
            // do not occur.
            break;
        };
        per_size.push(SizeMinimum { size: k as u64, min_boundary: b, ratio: b as f64 / k as f64 });
    }

    // Suffix minima with exact fraction comparison (a/b < c/d iff ad < cb).
    let mut anchored: Vec<AnchoredPoint> = Vec::with_capacity(per_size.len());
    let mut best: Option<(u64, u64)> = None;
    for sm in per_size.iter().rev() {
        let cand = (sm.min_boundary, sm.size);
        best = Some(match best {
            None => cand,
            Some(cur) => {
                if (cand.0 as u128) * (cur.1 as u128) < (cur.0 as u128) * (cand.1 as u128) {
                    cand
                } else {
                    cur
                }
            }
        });
        let (b, s) = best.unwrap();
        anchored.push(AnchoredPoint { n: sm.size, boundary: b, size: s, value: b as f64 / s as f64 });
    }
    anchored.reverse();

    Ok(ExpansionProfile { mode, max_size: max_size as u64, per_size, anchored })
}

/// Materializes the ball of radius `max_size + 1` around the oracle's
/// basepoint and computes the exact profile there.
pub fn expansion_profile(
    oracle: &GraphOracle,
    max_size: usize,
    mode: BoundaryMode,
    ball_budget: usize,
) -> Result<ExpansionProfile, ExpansionError> {
    let ball = oracle.ball(&oracle.basepoint(), max_size as u32 + 1, ball_budget)?;
    expansion_profile_finite(&ball, max_size, mode)
}

fn check_truncation(graph: &FiniteGraph, max_size: usize) -> Result<(), ExpansionError> {
    if let Some(r) = graph.ball_radius() {
        let need = max_size as u32 + 1;
        if r < need {
            return Err(ExpansionError::TruncationTooSmall { max_size, need, have: r });
        }
    }
    Ok(())
}

/// Counts of connected sets through the center indexed by boundary size.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AnimalCounts {
    pub mode: BoundaryMode,
    pub max_boundary: u64,
    /// Only sets of at most this many vertices are counted.
    pub size_cap: u64,
    /// `counts[n]` = number of connected sets through the center with
    /// boundary exactly `n` and size within the cap.
    pub counts: BTreeMap<u64, u64>,
    /// Boundary sizes whose count hit the size cap: sets at the cap with
    /// this boundary exist, so enlarging the region could enlarge the count
    /// (unbounded within region).
    pub saturated: BTreeSet<u64>,
}

impl AnimalCounts {
    pub fn count(&self, n: u64) -> u64 {
        *self.counts.get(&n).unwrap_or(&0)
    }

    /// True when the count for `n` is exact for every region size: no
    /// counted set sits at the size cap.
    pub fn is_exact(&self, n: u64) -> bool {
        !self.saturated.contains(&n)
    }
}

pub fn animal_counts_finite(
    graph: &FiniteGraph,
    max_boundary: u64,
    size_cap: usize,
    mode: BoundaryMode,
) -> Result<AnimalCounts, ExpansionError> {
    check_truncation(graph, size_cap)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut saturated: BTreeSet<u64> = BTreeSet::new();
    enumerate_connected_sets(graph, size_cap, |members, ann| {
        let b = match mode {
            BoundaryMode::Edge => ann.edge_boundary,
            BoundaryMode::Vertex => ann.vertex_boundary,
        };
        if b <= max_boundary {
            *counts.entry(b).or_insert(0) += 1;
            if members.len() == size_cap {
                saturated.insert(b);
            }
        }
    })?;
    Ok(AnimalCounts { mode, max_boundary, size_cap: size_cap as u64, counts, saturated })
}

pub fn animal_counts(
    oracle: &GraphOracle,
    max_boundary: u64,
    size_cap: usize,
    mode: BoundaryMode,
    ball_budget: usize,
) -> Result<AnimalCounts, ExpansionError> {
    let ball = oracle.ball(&oracle.basepoint(), size_cap as u32 + 1, ball_budget)?;
    animal_counts_finite(&ball, max_boundary, size_cap, mode)
}
