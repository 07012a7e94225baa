//! Word-metric helpers for lamplighter states over integer lattices.
//!
//! On a one-dimensional base the distance to the basepoint has a closed
//! form: the marker must sweep an interval covering the origin, every lit
//! site, and its final position, and each lamp costs its group word length
//! on top. Higher-dimensional bases get a bracket instead: a cost-counting
//! lower bound and a tour-based upper bound through a greedily joined
//! connected set.

use super::WalkError;
use crate::graph::{FiniteGroupGraph, GraphOracle, LampState, Vertex, VertexKey};
use std::collections::HashSet;

/// Splits a lamplighter-over-lattice oracle into its lamp group and base
/// dimension; any other family is rejected.
pub(crate) fn lamp_parts(oracle: &GraphOracle) -> Result<(&FiniteGroupGraph, usize), WalkError> {
    let group = oracle
        .lamp_group()
        .ok_or(WalkError::UnsupportedFamily { family: oracle.family_name() })?;
    let base = oracle.base().expect("lamplighter oracles wrap a base");
    let d = base
        .lattice_dim()
        .ok_or(WalkError::UnsupportedFamily { family: base.family_name() })? as usize;
    Ok((group, d))
}

fn decode_site(key: &VertexKey, d: usize) -> Result<Vec<i64>, WalkError> {
    match key.decode()? {
        Vertex::Lattice(coords) if coords.len() == d => Ok(coords),
        Vertex::Lattice(coords) => Err(WalkError::InvalidParameter(format!(
            "lamp site has {} coordinates, base is Z^{d}",
            coords.len()
        ))),
        other => Err(WalkError::InvalidParameter(format!(
            "lamp site belongs to family {}, base is a lattice",
            crate::graph::vertex_family_name(&other)
        ))),
    }
}

/// Exact distance from `state` to the basepoint on a lamplighter graph with
/// base `Z^1`: lamp word lengths plus the shortest marker tour that starts
/// at the origin, covers every lit site, and ends at the marker.
///
/// With `a = min(0, m, lit sites)` and `b = max(0, m, lit sites)` the tour
/// costs `(b - a) + min((-a) + (b - m), b + (m - a))` — sweep one side
/// first, then the other, whichever order is cheaper.
pub fn lamplighter_distance_d1(oracle: &GraphOracle, state: &LampState) -> Result<u64, WalkError> {
    let (group, d) = lamp_parts(oracle)?;
    if d != 1 {
        return Err(WalkError::ExactMetricUnavailable { d: d as u8 });
    }
    oracle.validate(&Vertex::Lamp(Box::new(state.clone())))?;
    let m = decode_site(&state.marker_key, 1)?[0];
    let mut a = 0i64.min(m);
    let mut b = 0i64.max(m);
    let mut weight = 0u64;
    for (site, &elem) in &state.lamps {
        let s = decode_site(site, 1)?[0];
        a = a.min(s);
        b = b.max(s);
        weight += group.dist_from_identity(elem) as u64;
    }
    let tour = (b - a) + ((-a) + (b - m)).min(b + (m - a));
    Ok(weight + tour as u64)
}

/// Distance bracket `[lower, upper]` from `state` to the basepoint on a
/// lamplighter graph over `Z^d`.
///
/// Lower bound: marker displacement plus total lamp word length — marker
/// moves and lamp switches are disjoint step types and each costs one step.
/// Upper bound: walk a spanning tour of a connected site set containing the
/// origin, the marker, and every lit site (built by greedily joining the
/// nearest outstanding site with an axis-by-axis path), switching lamps en
/// route: `|m| + 2 * (set size - 1) + total lamp word length`.
pub fn lamplighter_distance_bounds(
    oracle: &GraphOracle,
    state: &LampState,
) -> Result<(u64, u64), WalkError> {
    let (group, d) = lamp_parts(oracle)?;
    oracle.validate(&Vertex::Lamp(Box::new(state.clone())))?;
    let marker = decode_site(&state.marker_key, d)?;
    let l1: u64 = marker.iter().map(|c| c.unsigned_abs()).sum();
    let mut weight = 0u64;
    let mut targets: Vec<Vec<i64>> = Vec::with_capacity(state.lamps.len() + 1);
    for (site, &elem) in &state.lamps {
        targets.push(decode_site(site, d)?);
        weight += group.dist_from_identity(elem) as u64;
    }
    targets.push(marker);
    let size = greedy_join_size(d, targets);
    Ok((l1 + weight, l1 + 2 * (size - 1) + weight))
}

/// Size of a connected subset of `Z^d` containing the origin and every
/// target, grown by repeatedly connecting the nearest outstanding target to
/// the current set along an axis-by-axis lattice path. Deterministic: ties
/// break on smaller target, then smaller anchor (lexicographic coordinates).
fn greedy_join_size(d: usize, mut targets: Vec<Vec<i64>>) -> u64 {
    let mut set: HashSet<Vec<i64>> = HashSet::new();
    set.insert(vec![0i64; d]);
    targets.sort();
    targets.dedup();
    targets.retain(|t| !set.contains(t));
    while !targets.is_empty() {
        let mut best: Option<(u64, usize, Vec<i64>)> = None;
        for (ti, t) in targets.iter().enumerate() {
            for anchor in &set {
                let dist: u64 = t
                    .iter()
                    .zip(anchor)
                    .map(|(a, b)| a.abs_diff(*b))
                    .sum();
                let candidate = (dist, &targets[ti], anchor);
                let replace = match &best {
                    None => true,
                    Some((bd, bi, ba)) => {
                        candidate < (*bd, &targets[*bi], ba)
                    }
                };
                if replace {
                    best = Some((dist, ti, anchor.clone()));
                }
            }
        }
        let (_, ti, anchor) = best.expect("targets nonempty");
        let target = targets.remove(ti);
        let mut cur = anchor;
        for axis in 0..d {
            while cur[axis] != target[axis] {
                cur[axis] += (target[axis] - cur[axis]).signum();
                set.insert(cur.clone());
            }
        }
    }
    set.len() as u64
}
