//! Deterministic Bernoulli bond/site percolation and the ordered-edge
//! cluster-exploration process.
//!
//! A configuration is a function of `(seed, edge)` or `(seed, vertex)`
//! through the keyed PRF, so the same seed always describes the same
//! environment — across runs, across worker counts, and across the generic
//! and specialized exploration paths. Exploration grows the cluster of a
//! start vertex one frontier edge at a time in a canonical order (FIFO over
//! discovered vertices, edge-key order within a vertex), recording the
//! accept/reject outcome `Y_j` of every examination.

use crate::graph::{edge_fp, vertex_fp, GraphError, GraphOracle, Vertex, VertexKey};
use crate::prf::{prf64, trial_seed, unit_uniform, Domain};
use std::collections::{BTreeMap, HashSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercolationMode {
    Bond,
    Site,
}

impl std::fmt::Display for PercolationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PercolationMode::Bond => write!(f, "bond"),
            PercolationMode::Site => write!(f, "site"),
        }
    }
}

/// A Bernoulli(p) environment: every edge (bond mode) or vertex (site mode)
/// is open independently with probability `p`, decided by hashing its
/// structural fingerprint with the seed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PercolationConfig {
    pub p: f64,
    pub mode: PercolationMode,
    pub seed: u64,
}

impl PercolationConfig {
    pub fn new(p: f64, mode: PercolationMode, seed: u64) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(GraphError::InvalidParameter(format!(
                "retention probability must lie in [0, 1], got {p}"
            )));
        }
        Ok(PercolationConfig { p, mode, seed })
    }

    /// Openness of the edge between two vertex fingerprints. Symmetric in
    /// its arguments and monotone in `p` under a fixed seed (raising `p`
    /// only opens more edges).
    #[inline]
    pub fn edge_open(&self, fu: u64, fv: u64) -> bool {
        unit_uniform(prf64(self.seed, Domain::Bond, edge_fp(fu, fv))) < self.p
    }

    /// Openness of a vertex by fingerprint (site mode).
    #[inline]
    pub fn vertex_open(&self, f: u64) -> bool {
        unit_uniform(prf64(self.seed, Domain::Site, f)) < self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ExplorationStatus {
    /// The frontier was exhausted: the report describes the full cluster.
    Finite,
    /// The vertex budget was reached; the cluster extends beyond the report.
    BudgetExceeded,
}

/// Outcome of exploring one cluster.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClusterReport {
    pub status: ExplorationStatus,
    /// Cluster vertices in discovery order (the start vertex first). In
    /// site mode a closed start leaves this empty.
    pub vertices: Vec<VertexKey>,
    /// Open edges with both endpoints inside the explored set: the accepted
    /// spanning edges plus any open edges closing cycles.
    pub open_edge_count: u64,
    /// Bond mode: edges from the explored set to the outside (all closed),
    /// counted after termination so rejected edges later swallowed by the
    /// cluster are excluded. Site mode: distinct closed vertices adjacent
    /// to the cluster. Exact boundary size only when status is `Finite`.
    pub closed_boundary_count: u64,
    /// Accept/reject outcome of each examination, in examination order:
    /// `1` = open (accepted), `0` = closed (rejected).
    pub trace: Vec<u8>,
    /// Number of examinations performed (the length of `trace`).
    pub examined_count: u64,
}

impl ClusterReport {
    pub fn vertex_count(&self) -> u64 {
        self.vertices.len() as u64
    }

    /// Number of accepted examinations (`sum of Y_j`).
    pub fn accepted_count(&self) -> u64 {
        self.trace.iter().map(|&y| y as u64).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.status == ExplorationStatus::Finite
    }
}

fn check_budget(budget: usize) -> Result<(), GraphError> {
    if budget == 0 {
        return Err(GraphError::InvalidParameter("vertex budget must be at least 1".into()));
    }
    Ok(())
}

/// Explores the bond-percolation cluster of `start` by repeatedly examining
/// the first unexamined edge with exactly one endpoint in the current
/// cluster: open edges are accepted (adopting the far vertex), closed edges
/// rejected. Edges whose far endpoint arrives by another route first are
/// never examined. Stops when no frontier edge remains (`Finite`) or when
/// the cluster reaches `vertex_budget` vertices (`BudgetExceeded`).
pub fn explore_cluster(
    oracle: &GraphOracle,
    cfg: &PercolationConfig,
    start: &Vertex,
    vertex_budget: usize,
) -> Result<ClusterReport, GraphError> {
    if cfg.mode != PercolationMode::Bond {
        return Err(GraphError::InvalidParameter(
            "explore_cluster is the bond-mode process; use site_explore_cluster".into(),
        ));
    }
    check_budget(vertex_budget)?;
    oracle.validate(start)?;

    let mut discovered: HashSet<VertexKey> = HashSet::new();
    let mut members: Vec<(VertexKey, Vertex)> = Vec::new();
    let mut queue: VecDeque<(Vertex, u64)> = VecDeque::new();
    let mut trace: Vec<u8> = Vec::new();
    let mut rejected_far: Vec<VertexKey> = Vec::new();

    let start_key = start.encode();
    discovered.insert(start_key.clone());
    members.push((start_key, start.clone()));
    queue.push_back((start.clone(), vertex_fp(start)));
    let mut status = ExplorationStatus::Finite;

    if vertex_budget == 1 {
        status = ExplorationStatus::BudgetExceeded;
        queue.clear();
    }

    'grow: while let Some((u, fu)) = queue.pop_front() {
        for (wk, w, fw) in keyed_neighbors(oracle, &u)? {
            if discovered.contains(&wk) {
                continue;
            }
            let open = cfg.edge_open(fu, fw);
            trace.push(open as u8);
            if open {
                discovered.insert(wk.clone());
                members.push((wk, w.clone()));
                queue.push_back((w, fw));
                if members.len() >= vertex_budget {
                    status = ExplorationStatus::BudgetExceeded;
                    break 'grow;
                }
            } else {
                rejected_far.push(wk);
            }
        }
    }

    // Post-pass: count every open edge induced on the explored set. The
    // accepted edges re-evaluate to open (same PRF), and open edges that
    // close cycles — never examined by the growth process — are added here.
    let mut open_edge_count = 0u64;
    for (uk, u) in &members {
        let fu = vertex_fp(u);
        for (wk, _w, fw) in keyed_neighbors(oracle, u)? {
            if *uk < wk && discovered.contains(&wk) && cfg.edge_open(fu, fw) {
                open_edge_count += 1;
            }
        }
    }

    let closed_boundary_count =
        rejected_far.iter().filter(|k| !discovered.contains(*k)).count() as u64;

    Ok(ClusterReport {
        status,
        vertices: members.into_iter().map(|(k, _)| k).collect(),
        open_edge_count,
        closed_boundary_count,
        examined_count: trace.len() as u64,
        trace,
    })
}

/// Site-mode exploration: the start vertex is examined first (a closed
/// start yields the empty cluster); each open vertex then examines its
/// not-yet-examined neighbors in key order. Every closed vertex adjacent to
/// the cluster is examined exactly once, so the rejected count is the
/// vertex boundary.
pub fn site_explore_cluster(
    oracle: &GraphOracle,
    cfg: &PercolationConfig,
    start: &Vertex,
    vertex_budget: usize,
) -> Result<ClusterReport, GraphError> {
    if cfg.mode != PercolationMode::Site {
        return Err(GraphError::InvalidParameter(
            "site_explore_cluster is the site-mode process; use explore_cluster".into(),
        ));
    }
    check_budget(vertex_budget)?;
    oracle.validate(start)?;

    let mut examined: HashSet<VertexKey> = HashSet::new();
    let mut discovered: HashSet<VertexKey> = HashSet::new();
    let mut members: Vec<(VertexKey, Vertex)> = Vec::new();
    let mut queue: VecDeque<Vertex> = VecDeque::new();
    let mut trace: Vec<u8> = Vec::new();
    let mut rejected = 0u64;
    let mut status = ExplorationStatus::Finite;

    let start_key = start.encode();
    examined.insert(start_key.clone());
    let root_open = cfg.vertex_open(vertex_fp(start));
    trace.push(root_open as u8);
    if root_open {
        discovered.insert(start_key.clone());
        members.push((start_key, start.clone()));
        if vertex_budget == 1 {
            status = ExplorationStatus::BudgetExceeded;
        } else {
            queue.push_back(start.clone());
        }
    }

    'grow: while let Some(u) = queue.pop_front() {
        for (wk, w, fw) in keyed_neighbors(oracle, &u)? {
            if !examined.insert(wk.clone()) {
                continue;
            }
            let open = cfg.vertex_open(fw);
            trace.push(open as u8);
            if open {
                discovered.insert(wk.clone());
                members.push((wk, w.clone()));
                queue.push_back(w);
                if members.len() >= vertex_budget {
                    status = ExplorationStatus::BudgetExceeded;
                    break 'grow;
                }
            } else {
                rejected += 1;
            }
        }
    }

    // All edges between open sites are present in the site configuration.
    let mut open_edge_count = 0u64;
    for (uk, u) in &members {
        for (wk, _, _) in keyed_neighbors(oracle, u)? {
            if *uk < wk && discovered.contains(&wk) {
                open_edge_count += 1;
            }
        }
    }

    Ok(ClusterReport {
        status,
        vertices: members.into_iter().map(|(k, _)| k).collect(),
        open_edge_count,
        closed_boundary_count: rejected,
        examined_count: trace.len() as u64,
        trace,
    })
}

/// Neighbors of `u` with their canonical keys and fingerprints, sorted by
/// key — which, for a fixed inside endpoint, is exactly edge-key order.
fn keyed_neighbors(
    oracle: &GraphOracle,
    u: &Vertex,
) -> Result<Vec<(VertexKey, Vertex, u64)>, GraphError> {
    let mut out: Vec<(VertexKey, Vertex, u64)> = oracle
        .neighbors(u)?
        .into_iter()
        .map(|w| {
            let k = w.encode();
            let f = vertex_fp(&w);
            (k, w, f)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Lightweight exploration outcome for high-volume drivers.
#[derive(Debug, Clone, Copy)]
pub struct ClusterSummary {
    pub finite: bool,
    pub vertices: u64,
    pub closed_boundary: u64,
    pub examined: u64,
}

/// Summary-only exploration that dispatches to an allocation-free fast path
/// on regular trees (where the growth process never meets a cycle) and to
/// the generic process elsewhere. Decision-for-decision identical to
/// `explore_cluster`/`site_explore_cluster`: same PRF draws in the same
/// order.
pub fn explore_summary(
    oracle: &GraphOracle,
    cfg: &PercolationConfig,
    start: &Vertex,
    vertex_budget: usize,
) -> Result<ClusterSummary, GraphError> {
    if let (Some(b), Vertex::TreePath { path, .. }) = (oracle.tree_branching(), start) {
        if path.is_empty() {
            return Ok(explore_tree_root(b, cfg, vertex_budget));
        }
    }
    let report = match cfg.mode {
        PercolationMode::Bond => explore_cluster(oracle, cfg, start, vertex_budget)?,
        PercolationMode::Site => site_explore_cluster(oracle, cfg, start, vertex_budget)?,
    };
    Ok(ClusterSummary {
        finite: report.is_finite(),
        vertices: report.vertex_count(),
        closed_boundary: report.closed_boundary_count,
        examined: report.examined_count,
    })
}

/// Fast exploration from the root of the `(b+1)`-regular tree. Children are
/// examined in step order, matching the generic process's edge-key order,
/// and fingerprints are extended incrementally instead of re-hashed, so
/// every openness decision matches the generic path bit for bit.
fn explore_tree_root(b: u8, cfg: &PercolationConfig, vertex_budget: usize) -> ClusterSummary {
    debug_assert!(vertex_budget >= 1);
    let root_fp = crate::graph::tree_root_fp(b);
    // (fingerprint, child count): the root has b+1 subtrees, others b.
    let mut queue: VecDeque<(u64, u16)> = VecDeque::new();
    let mut vertices = 1u64;
    let mut rejected = 0u64;
    let mut examined = 0u64;
    let budget = vertex_budget as u64;

    match cfg.mode {
        PercolationMode::Bond => {
            if budget == 1 {
                return ClusterSummary { finite: false, vertices, closed_boundary: 0, examined };
            }
            queue.push_back((root_fp, b as u16 + 1));
            while let Some((fu, n_children)) = queue.pop_front() {
                for step in 0..n_children {
                    let fw = crate::graph::tree_child_fp(fu, step as u8);
                    examined += 1;
                    if cfg.edge_open(fu, fw) {
                        vertices += 1;
                        queue.push_back((fw, b as u16));
                        if vertices >= budget {
                            return ClusterSummary {
                                finite: false,
                                vertices,
                                closed_boundary: rejected,
                                examined,
                            };
                        }
                    } else {
                        rejected += 1;
                    }
                }
            }
            ClusterSummary { finite: true, vertices, closed_boundary: rejected, examined }
        }
        PercolationMode::Site => {
            examined += 1;
            if !cfg.vertex_open(root_fp) {
                return ClusterSummary { finite: true, vertices: 0, closed_boundary: 0, examined };
            }
            if budget == 1 {
                return ClusterSummary { finite: false, vertices, closed_boundary: 0, examined };
            }
            queue.push_back((root_fp, b as u16 + 1));
            while let Some((fu, n_children)) = queue.pop_front() {
                for step in 0..n_children {
                    let fw = crate::graph::tree_child_fp(fu, step as u8);
                    examined += 1;
                    if cfg.vertex_open(fw) {
                        vertices += 1;
                        queue.push_back((fw, b as u16));
                        if vertices >= budget {
                            return ClusterSummary {
                                finite: false,
                                vertices,
                                closed_boundary: rejected,
                                examined,
                            };
                        }
                    } else {
                        rejected += 1;
                    }
                }
            }
            ClusterSummary { finite: true, vertices, closed_boundary: rejected, examined }
        }
    }
}

/// Empirical distribution of the closed-boundary size over finite clusters.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundaryHistogram {
    /// `counts[n]` = number of trials that ended finite with boundary `n`.
    pub counts: BTreeMap<u64, u64>,
    pub trials: u64,
    pub finite_trials: u64,
    pub budget_hits: u64,
}

impl BoundaryHistogram {
    /// Empirical `P(finite and boundary = n)`.
    pub fn probability(&self, n: u64) -> f64 {
        *self.counts.get(&n).unwrap_or(&0) as f64 / self.trials as f64
    }
}

/// Repeats bond exploration from the basepoint under independent seeds and
/// histograms the closed-boundary size of finite clusters.
pub fn boundary_tail_histogram(
    oracle: &GraphOracle,
    p: f64,
    trials: u64,
    vertex_budget: usize,
    seed: u64,
) -> Result<BoundaryHistogram, GraphError> {
    let start = oracle.basepoint();
    let outcomes = run_trials(trials, |t| {
        let cfg = PercolationConfig::new(p, PercolationMode::Bond, trial_seed(seed, t))?;
        explore_summary(oracle, &cfg, &start, vertex_budget)
    })?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut finite_trials = 0u64;
    let mut budget_hits = 0u64;
    for s in &outcomes {
        if s.finite {
            finite_trials += 1;
            *counts.entry(s.closed_boundary).or_insert(0) += 1;
        } else {
            budget_hits += 1;
        }
    }
    Ok(BoundaryHistogram { counts, trials, finite_trials, budget_hits })
}

/// Fraction of trials whose cluster reached the vertex budget: a
/// finite-volume stand-in for the survival probability.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SurvivalEstimate {
    pub p: f64,
    pub survived: u64,
    pub trials: u64,
    pub fraction: f64,
}

pub fn survival_fraction(
    oracle: &GraphOracle,
    p: f64,
    mode: PercolationMode,
    trials: u64,
    vertex_budget: usize,
    seed: u64,
) -> Result<SurvivalEstimate, GraphError> {
    let start = oracle.basepoint();
    let outcomes = run_trials(trials, |t| {
        let cfg = PercolationConfig::new(p, mode, trial_seed(seed, t))?;
        explore_summary(oracle, &cfg, &start, vertex_budget)
    })?;
    let survived = outcomes.iter().filter(|s| !s.finite).count() as u64;
    Ok(SurvivalEstimate { p, survived, trials, fraction: survived as f64 / trials as f64 })
}

/// Runs indexed trials (in parallel when a rayon pool is available) and
/// returns outcomes in index order, so any later reduction is independent
/// of scheduling.
pub(crate) fn run_trials<T, E, F>(trials: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}
