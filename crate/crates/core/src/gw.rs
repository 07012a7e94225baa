//! Galton-Watson machinery: offspring laws, extinction probabilities, the
//! backbone/bush decomposition of supercritical trees conditioned on
//! survival, size-tail sampling for trees conditioned on extinction, and the
//! unary-chain view that turns a law with `p_1 > 0` into a random stretch of
//! a reduced law.

use crate::stats::kahan_sum;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Probability tolerance accepted when validating that a law sums to one.
const SUM_TOL: f64 = 1e-9;

/// Largest supported offspring count.
pub const MAX_OFFSPRING: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum GwError {
    #[error("invalid offspring law: {0}")]
    InvalidDistribution(String),
    #[error("law is not supercritical (mean {mean} <= 1)")]
    NotSupercritical { mean: f64 },
    #[error("extinction probability is zero; no law conditioned on extinction exists")]
    NoFiniteTrees,
    #[error("stretch view requires p_0 = 0 and p_1 < 1: {0}")]
    NotStretchViewable(String),
}

/// Offspring law `p_0, ..., p_K` with `K <= 64`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OffspringDistribution {
    probs: Vec<f64>,
}

impl OffspringDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, GwError> {
        if probs.is_empty() || probs.len() > MAX_OFFSPRING + 1 {
            return Err(GwError::InvalidDistribution(format!(
                "supported offspring counts are 0..={MAX_OFFSPRING}, got {} entries",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p) || p.is_nan()) {
            return Err(GwError::InvalidDistribution("entries must lie in [0, 1]".into()));
        }
        let total = kahan_sum(probs.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(GwError::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(OffspringDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_offspring(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mean(&self) -> f64 {
        kahan_sum(self.probs.iter().enumerate().map(|(k, &p)| k as f64 * p))
    }

    /// Probability generating function `f(s) = sum p_k s^k`.
    pub fn pgf(&self, s: f64) -> f64 {
        // Horner evaluation keeps the iteration map monotone and stable.
        self.probs.iter().rev().fold(0.0, |acc, &p| acc * s + p)
    }

    /// Inverse CDF at `u in [0, 1)`: the smallest `k` with `CDF(k) > u`.
    /// All lazily generated trees and all samplers draw through this, so a
    /// uniform variate maps to the same child count everywhere.
    #[inline]
    pub fn quantile(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        self.probs.len() - 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.quantile(rng.random::<f64>())
    }
}

/// Smallest fixed point of the generating function in `[0, 1]`: the
/// extinction probability. Returns exactly 1 for laws with mean at most 1;
/// otherwise iterates `s <- f(s)` from 0, which increases monotonically to
/// the fixed point, until successive steps differ by less than `tol`.
pub fn extinction_probability(dist: &OffspringDistribution, tol: f64) -> f64 {
    if dist.mean() <= 1.0 + 1e-12 {
        return 1.0;
    }
    let mut s = 0.0f64;
    for _ in 0..1_000_000 {
        let next = dist.pgf(s);
        debug_assert!(next >= s - 1e-15, "iteration must be monotone");
        if next - s < tol {
            return next;
        }
        s = next;
    }
    s
}

/// Survival-conditioned decomposition of a supercritical law: the law of the
/// number of children attached to a surviving (open) vertex, the law of the
/// trees hanging off non-surviving (closed) vertices, and the probability
/// that a given child is itself open.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BackboneDecomposition {
    /// Extinction probability of the original law.
    pub q: f64,
    /// `P(Y = k) = p_k (1 - q^k) / (1 - q)`, supported on `k >= 1`.
    pub backbone: Vec<f64>,
    /// Law of trees conditioned on extinction: `p_k q^(k-1)`.
    pub bush: OffspringDistribution,
    /// Probability `1 - q` that a child of an open vertex is open.
    pub open_prob: f64,
}

pub fn backbone_decompose(dist: &OffspringDistribution) -> Result<BackboneDecomposition, GwError> {
    let mean = dist.mean();
    if mean <= 1.0 {
        return Err(GwError::NotSupercritical { mean });
    }
    let q = extinction_probability(dist, 1e-15);
    if q == 0.0 {
        return Err(GwError::NoFiniteTrees);
    }
    let mut backbone = vec![0.0; dist.probs.len()];
    for (k, &p) in dist.probs.iter().enumerate().skip(1) {
        backbone[k] = p * (1.0 - q.powi(k as i32)) / (1.0 - q);
    }
    let bush_probs: Vec<f64> = dist
        .probs
        .iter()
        .enumerate()
        .map(|(k, &p)| p * q.powi(k as i32 - 1))
        .collect();
    let bush = OffspringDistribution::new(bush_probs)
        .map_err(|e| GwError::InvalidDistribution(format!("derived bush law: {e}")))?;
    Ok(BackboneDecomposition { q, backbone, bush, open_prob: 1.0 - q })
}

/// A sampled ordered tree: child counts in breadth-first order. When
/// `truncated` is set, generation stopped at the vertex budget and
/// `vertex_count` counts the materialized vertices (drawn plus pending).
#[derive(Debug, Clone)]
pub struct SampledTree {
    pub counts: Vec<u8>,
    pub truncated: bool,
    pub vertex_count: usize,
}

impl SampledTree {
    pub fn is_extinct(&self) -> bool {
        !self.truncated
    }

    pub fn size(&self) -> usize {
        self.vertex_count
    }
}

/// Samples a tree by drawing child counts in breadth-first order from a
/// ChaCha stream seeded with `seed`. Deterministic in `(dist, seed,
/// max_vertices)`.
pub fn sample_tree(dist: &OffspringDistribution, seed: u64, max_vertices: usize) -> SampledTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_tree_with(dist, &mut rng, max_vertices)
}

pub fn sample_tree_with<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    rng: &mut R,
    max_vertices: usize,
) -> SampledTree {
    let mut counts: Vec<u8> = Vec::new();
    let mut pending: usize = 1;
    let mut materialized: usize = 1;
    while pending > 0 {
        if materialized >= max_vertices {
            return SampledTree { counts, truncated: true, vertex_count: materialized };
        }
        let c = dist.sample(rng);
        counts.push(c as u8);
        pending += c;
        pending -= 1;
        materialized += c;
    }
    SampledTree { counts, truncated: false, vertex_count: materialized }
}

/// Canonical encoding of the depth-`depth` truncation of an ordered tree:
/// a preorder walk emitting each kept vertex's kept-child count.
pub fn depth_truncated_shape(tree: &SampledTree, depth: u32) -> Vec<u8> {
    // Rebuild child lists from the BFS layout, then walk.
    let n = tree.counts.len();
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); tree.vertex_count];
    let mut next_child: usize = 1;
    for (v, &count) in tree.counts.iter().enumerate().take(n) {
        for _ in 0..count {
            children[v].push(next_child as u32);
            next_child += 1;
        }
    }
    let mut out = Vec::new();
    preorder_shape(&children, 0, depth, &mut out);
    out
}

fn preorder_shape(children: &[Vec<u32>], v: usize, depth_left: u32, out: &mut Vec<u8>) {
    if depth_left == 0 {
        out.push(0);
        return;
    }
    let kids = children.get(v).map(Vec::as_slice).unwrap_or(&[]);
    out.push(kids.len() as u8);
    for &c in kids {
        preorder_shape(children, c as usize, depth_left - 1, out);
    }
}

/// Samples the depth-`depth` truncation shape of a tree directly, drawing
/// child counts in preorder and never descending past the cutoff.
pub fn sample_shape<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    rng: &mut R,
    depth: u32,
) -> Vec<u8> {
    let mut out = Vec::new();
    sample_shape_rec(dist, rng, depth, &mut out);
    out
}

fn sample_shape_rec<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    rng: &mut R,
    depth_left: u32,
    out: &mut Vec<u8>,
) {
    if depth_left == 0 {
        out.push(0);
        return;
    }
    let c = dist.sample(rng);
    out.push(c as u8);
    for _ in 0..c {
        sample_shape_rec(dist, rng, depth_left - 1, out);
    }
}

/// Samples the depth-truncated shape of a supercritical tree conditioned on
/// survival by explicit construction: the root is open; each open vertex
/// draws `Y` children from the backbone law and assigns open/closed labels
/// with probability `1 - q` each, redrawing the whole assignment until at
/// least one child is open; closed children carry independent trees from the
/// bush law.
pub fn sample_survival_shape<R: Rng + ?Sized>(
    decomp: &BackboneDecomposition,
    rng: &mut R,
    depth: u32,
) -> Vec<u8> {
    let mut out = Vec::new();
    survival_shape_rec(decomp, rng, depth, &mut out);
    out
}

fn survival_shape_rec<R: Rng + ?Sized>(
    decomp: &BackboneDecomposition,
    rng: &mut R,
    depth_left: u32,
    out: &mut Vec<u8>,
) {
    if depth_left == 0 {
        out.push(0);
        return;
    }
    let y = sample_from_weights(&decomp.backbone, rng);
    let mut open = vec![false; y];
    loop {
        let mut any = false;
        for o in open.iter_mut() {
            *o = rng.random::<f64>() < decomp.open_prob;
            any |= *o;
        }
        if any {
            break;
        }
    }
    out.push(y as u8);
    for &o in &open {
        if o {
            survival_shape_rec(decomp, rng, depth_left - 1, out);
        } else {
            sample_shape_rec(&decomp.bush, rng, depth_left - 1, out);
        }
    }
}

/// Samples only the open skeleton (the leafless backbone tree), truncated at
/// `depth`. Every emitted internal vertex has at least one child.
pub fn sample_backbone_shape<R: Rng + ?Sized>(
    decomp: &BackboneDecomposition,
    rng: &mut R,
    depth: u32,
) -> Vec<u8> {
    let mut out = Vec::new();
    backbone_shape_rec(decomp, rng, depth, &mut out);
    out
}

fn backbone_shape_rec<R: Rng + ?Sized>(
    decomp: &BackboneDecomposition,
    rng: &mut R,
    depth_left: u32,
    out: &mut Vec<u8>,
) {
    if depth_left == 0 {
        out.push(0);
        return;
    }
    let y = sample_from_weights(&decomp.backbone, rng);
    let mut open_count = 0usize;
    let mut open = vec![false; y];
    while open_count == 0 {
        open_count = 0;
        for o in open.iter_mut() {
            *o = rng.random::<f64>() < decomp.open_prob;
            open_count += usize::from(*o);
        }
    }
    out.push(open_count as u8);
    for _ in 0..open_count {
        backbone_shape_rec(decomp, rng, depth_left - 1, out);
    }
}

fn sample_from_weights<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// View of a law with `p_0 = 0` and `p_1 < 1` as a random stretch: the
/// reduced law `p'_k = p_k / (1 - p_1)` on `k >= 2` describes the branching
/// skeleton, and edge lengths follow `Geometric(1 - p_1)` (length 1 plus the
/// geometric run of single-child vertices). `p_1 = 0` degenerates to the
/// identity view with constant length 1.
pub fn geometric_stretch_view(
    dist: &OffspringDistribution,
) -> Result<(OffspringDistribution, crate::graph::StretchDescriptor), GwError> {
    use crate::graph::StretchDescriptor;
    let p = &dist.probs;
    if p[0] != 0.0 {
        return Err(GwError::NotStretchViewable(format!("p_0 = {}", p[0])));
    }
    let p1 = if p.len() > 1 { p[1] } else { 0.0 };
    if p1 >= 1.0 - 1e-12 {
        return Err(GwError::NotStretchViewable("p_1 = 1 leaves no branching".into()));
    }
    let mut reduced = vec![0.0; p.len()];
    for (k, &pk) in p.iter().enumerate().skip(2) {
        reduced[k] = pk / (1.0 - p1);
    }
    let reduced = OffspringDistribution::new(reduced)
        .map_err(|e| GwError::InvalidDistribution(format!("derived reduced law: {e}")))?;
    let nu = if p1 == 0.0 {
        StretchDescriptor::Constant { length: 1 }
    } else {
        StretchDescriptor::Geometric { q: 1.0 - p1 }
    };
    Ok((reduced, nu))
}

/// Samples the depth-truncated shape of the stretch view: a geometric run of
/// single-child vertices above the root (the unary prefix a tree with
/// `p_1 > 0` may have before its first branching vertex), then the reduced
/// skeleton with every edge dilated by an independent length from `nu`.
pub fn sample_stretch_view_shape<R: Rng + ?Sized>(
    reduced: &OffspringDistribution,
    nu: &crate::graph::StretchDescriptor,
    rng: &mut R,
    depth: u32,
) -> Vec<u8> {
    let mut out = Vec::new();
    // Unary prefix: nu - 1 vertices above the first branching vertex.
    let prefix = nu.quantile(rng.random::<f64>()) - 1;
    stretch_shape_rec(reduced, nu, rng, depth, prefix, &mut out);
    out
}

fn stretch_shape_rec<R: Rng + ?Sized>(
    reduced: &OffspringDistribution,
    nu: &crate::graph::StretchDescriptor,
    rng: &mut R,
    depth_left: u32,
    unary_above: u32,
    out: &mut Vec<u8>,
) {
    if depth_left == 0 {
        out.push(0);
        return;
    }
    if unary_above > 0 {
        out.push(1);
        stretch_shape_rec(reduced, nu, rng, depth_left - 1, unary_above - 1, out);
        return;
    }
    let k = reduced.sample(rng);
    out.push(k as u8);
    for _ in 0..k {
        let run = nu.quantile(rng.random::<f64>()) - 1;
        stretch_shape_rec(reduced, nu, rng, depth_left - 1, run, out);
    }
}
