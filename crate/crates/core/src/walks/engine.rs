//! Incremental state engine for walks on lamplighter graphs over `Z^d`.
//!
//! The walker keeps the marker coordinates, the lamp configuration, and the
//! structural fingerprints of the current state, updating all of them in
//! O(d) per step instead of re-encoding vertices. Neighbor indexing and
//! fingerprint values agree bit-for-bit with [`GraphOracle::neighbors`]
//! (lamp generators first, then marker moves axis-major `+1`/`-1`), so
//! percolation decisions taken through this engine match decisions taken on
//! fully materialized vertices — a property the tests assert by coupling.

use super::WalkError;
use crate::graph::{
    lamp_entry_term, lamp_fp_from_raw, lattice_coord_term, lattice_fp_from_raw, FiniteGroupGraph,
    GraphOracle, LampState, Vertex,
};
use crate::percolation::PercolationConfig;
use rand::Rng;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Result of one delayed (or simple) step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepOutcome {
    /// Index of the neighbor actually moved to, or `None` when the walker
    /// stayed put (self-choice or closed edge).
    pub executed: Option<usize>,
    /// Marker fingerprint after the step.
    pub marker_fp: u64,
}

pub(crate) struct LampWalker<'a> {
    group: &'a FiniteGroupGraph,
    d: usize,
    marker: Vec<i64>,
    marker_raw: u64,
    marker_fp: u64,
    lamps: HashMap<Vec<i64>, u16>,
    lamps_raw: u64,
    /// Sum of lamp-group word lengths over the lit sites.
    lamp_weight: u64,
    /// Distinct marker positions visited so far (the marker range).
    visited: HashSet<Vec<i64>>,
    degree: usize,
}

impl<'a> LampWalker<'a> {
    /// Builds a walker at the basepoint (origin marker, all lamps off).
    /// Requires a lamplighter oracle over a lattice base.
    pub fn new(oracle: &'a GraphOracle) -> Result<Self, WalkError> {
        let group = oracle
            .lamp_group()
            .ok_or(WalkError::UnsupportedFamily { family: oracle.family_name() })?;
        let base = oracle.base().expect("lamplighter oracles wrap a base");
        let d = base
            .lattice_dim()
            .ok_or(WalkError::UnsupportedFamily { family: base.family_name() })?
            as usize;
        let marker = vec![0i64; d];
        let mut marker_raw = 0u64;
        for axis in 0..d {
            marker_raw ^= lattice_coord_term(axis, 0);
        }
        let mut visited = HashSet::new();
        visited.insert(marker.clone());
        Ok(LampWalker {
            group,
            d,
            marker,
            marker_fp: lattice_fp_from_raw(marker_raw),
            marker_raw,
            lamps: HashMap::new(),
            lamps_raw: 0,
            lamp_weight: 0,
            visited,
            degree: group.generator_count() + 2 * d,
        })
    }

    /// Ambient degree of every state (the graph is regular).
    #[cfg(test)]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generator_count(&self) -> usize {
        self.group.generator_count()
    }

    pub fn marker_fp(&self) -> u64 {
        self.marker_fp
    }

    /// Fingerprint of the current state (matches `Vertex::fingerprint` of the
    /// materialized lamp state).
    pub fn state_fp(&self) -> u64 {
        lamp_fp_from_raw(self.marker_fp, self.lamps_raw)
    }

    /// Fingerprint of neighbor `idx` without committing the move.
    fn neighbor_fp(&self, idx: usize) -> u64 {
        let n_gens = self.group.generator_count();
        if idx < n_gens {
            let g = self.group.generators()[idx];
            let cur = self.lamps.get(&self.marker).copied().unwrap_or(0);
            let next = self.group.mul(cur, g);
            let mut raw = self.lamps_raw;
            if cur != 0 {
                raw ^= lamp_entry_term(self.marker_fp, cur);
            }
            if next != 0 {
                raw ^= lamp_entry_term(self.marker_fp, next);
            }
            lamp_fp_from_raw(self.marker_fp, raw)
        } else {
            let k = idx - n_gens;
            let axis = k / 2;
            let delta = if k.is_multiple_of(2) { 1i64 } else { -1 };
            let c = self.marker[axis];
            let raw =
                self.marker_raw ^ lattice_coord_term(axis, c) ^ lattice_coord_term(axis, c + delta);
            lamp_fp_from_raw(lattice_fp_from_raw(raw), self.lamps_raw)
        }
    }

    /// Commits the move to neighbor `idx`.
    fn apply(&mut self, idx: usize) {
        let n_gens = self.group.generator_count();
        if idx < n_gens {
            let g = self.group.generators()[idx];
            let cur = self.lamps.get(&self.marker).copied().unwrap_or(0);
            let next = self.group.mul(cur, g);
            if cur != 0 {
                self.lamps_raw ^= lamp_entry_term(self.marker_fp, cur);
            }
            if next != 0 {
                self.lamps_raw ^= lamp_entry_term(self.marker_fp, next);
            }
            let dw = self.group.dist_from_identity(next) as i64
                - self.group.dist_from_identity(cur) as i64;
            self.lamp_weight = (self.lamp_weight as i64 + dw) as u64;
            if next == 0 {
                self.lamps.remove(&self.marker);
            } else {
                self.lamps.insert(self.marker.clone(), next);
            }
        } else {
            let k = idx - n_gens;
            let axis = k / 2;
            let delta = if k.is_multiple_of(2) { 1i64 } else { -1 };
            let c = self.marker[axis];
            self.marker_raw ^=
                lattice_coord_term(axis, c) ^ lattice_coord_term(axis, c + delta);
            self.marker[axis] = c + delta;
            self.marker_fp = lattice_fp_from_raw(self.marker_raw);
            if !self.visited.contains(&self.marker) {
                self.visited.insert(self.marker.clone());
            }
        }
    }

    /// Simple-random-walk step: moves to a uniformly chosen neighbor and
    /// returns its index.
    pub fn srw_step(&mut self, rng: &mut impl Rng) -> usize {
        let idx = rng.random_range(0..self.degree);
        self.apply(idx);
        idx
    }

    /// Replays a simple-random-walk move by explicit neighbor index.
    #[cfg(test)]
    pub fn apply_index(&mut self, idx: usize) {
        assert!(idx < self.degree, "neighbor index out of range");
        self.apply(idx);
    }

    /// Delayed step: one uniform choice over the current state and its
    /// ambient neighbors (`degree + 1` outcomes); a chosen neighbor is
    /// entered only if the connecting edge is open, otherwise the walker
    /// stays. Choice `0` is the explicit stay.
    pub fn delayed_step(&mut self, cfg: &PercolationConfig, rng: &mut impl Rng) -> StepOutcome {
        let choice = rng.random_range(0..=self.degree);
        self.delayed_step_choice(choice, cfg)
    }

    /// Deterministic core of [`LampWalker::delayed_step`], exposed so tests
    /// can drive both the engine and the generic oracle path from one
    /// choice stream.
    pub fn delayed_step_choice(&mut self, choice: usize, cfg: &PercolationConfig) -> StepOutcome {
        debug_assert!(choice <= self.degree);
        if choice == 0 {
            return StepOutcome { executed: None, marker_fp: self.marker_fp };
        }
        let idx = choice - 1;
        let from = self.state_fp();
        let to = self.neighbor_fp(idx);
        if cfg.edge_open(from, to) {
            self.apply(idx);
            StepOutcome { executed: Some(idx), marker_fp: self.marker_fp }
        } else {
            StepOutcome { executed: None, marker_fp: self.marker_fp }
        }
    }

    pub fn marker_l1(&self) -> u64 {
        self.marker.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn marker_at_origin(&self) -> bool {
        self.marker.iter().all(|&c| c == 0)
    }

    pub fn is_initial_state(&self) -> bool {
        self.marker_at_origin() && self.lamps.is_empty()
    }

    pub fn lamp_count(&self) -> u64 {
        self.lamps.len() as u64
    }

    pub fn lamp_weight(&self) -> u64 {
        self.lamp_weight
    }

    /// Number of distinct marker positions visited so far.
    pub fn range_size(&self) -> u64 {
        self.visited.len() as u64
    }

    /// Exact word distance to the basepoint when the base is `Z^1`: the
    /// marker must sweep an interval covering the origin, the lit sites and
    /// its final position, and pay each lamp's word length once.
    pub fn exact_distance_z1(&self) -> Option<u64> {
        if self.d != 1 {
            return None;
        }
        let m = self.marker[0];
        let mut a = 0i64.min(m);
        let mut b = 0i64.max(m);
        for site in self.lamps.keys() {
            a = a.min(site[0]);
            b = b.max(site[0]);
        }
        let tour = (b - a) + ((-a) + (b - m)).min(b + (m - a));
        Some(self.lamp_weight + tour as u64)
    }

    /// Materializes the current state.
    pub fn to_state(&self) -> LampState {
        let marker_key = Vertex::Lattice(self.marker.clone()).encode();
        let lamps: BTreeMap<_, _> = self
            .lamps
            .iter()
            .map(|(site, &e)| (Vertex::Lattice(site.clone()).encode(), e))
            .collect();
        LampState { marker_key, lamps }
    }
}
