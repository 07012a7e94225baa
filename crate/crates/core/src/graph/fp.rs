//! Structural 64-bit fingerprints of vertices and edges, the PRF keys for
//! percolation, stretching, and lazy tree generation.
//!
//! Fingerprints are defined structurally rather than over raw key bytes so
//! that simulation kernels can maintain them incrementally: a lattice point
//! is an XOR of per-axis terms (one term changes per unit move), a lamp
//! configuration is an XOR of per-entry terms (one term toggles per lamp
//! switch), and a tree path folds one step at a time. Part of the versioned
//! PRF contract: changing any constant or combination rule here changes
//! every seeded experiment.

use super::{StretchedVertex, Vertex};
use crate::prf::mix64;

const C_LATTICE: u64 = 0x8f0c_94a7_33b1_62e5;
const C_COORD: u64 = 0x6e1f_2b85_49d3_07c1;
const C_TREE: u64 = 0xa93d_5e07_c8b2_1f4b;
const C_EXPLICIT: u64 = 0xb184_7c39_26ef_50d3;
const C_GW: u64 = 0xc255_0aeb_71d9_348f;
const C_STRETCH_ORIG: u64 = 0xd3c6_91bd_5ea0_4217;
const C_STRETCH_INT: u64 = 0xe437_28f1_b06c_59ab;
const C_LAMP: u64 = 0xf5a8_b623_0d97_6e39;
const C_LAMP_ENTRY: u64 = 0x17b9_4d05_62c8_83ad;
const C_EDGE: u64 = 0x2a0a_e4d7_f153_9021;

/// Per-axis term of a lattice point; the full point fingerprint is
/// [`lattice_fp_from_raw`] of the XOR of its terms.
#[inline]
pub fn lattice_coord_term(axis: usize, coord: i64) -> u64 {
    let zigzag = ((coord << 1) ^ (coord >> 63)) as u64;
    mix64(mix64(C_COORD.wrapping_add(axis as u64)) ^ zigzag)
}

#[inline]
pub fn lattice_fp_from_raw(raw: u64) -> u64 {
    mix64(C_LATTICE ^ raw)
}

/// Per-lamp term; a lamp configuration's raw value is the XOR of its terms.
#[inline]
pub fn lamp_entry_term(site_fp: u64, elem: u16) -> u64 {
    mix64(mix64(C_LAMP_ENTRY ^ site_fp) ^ elem as u64)
}

#[inline]
pub fn lamp_fp_from_raw(marker_fp: u64, lamps_raw: u64) -> u64 {
    mix64(mix64(C_LAMP ^ marker_fp) ^ lamps_raw)
}

#[inline]
pub(crate) fn tree_root_fp(b: u8) -> u64 {
    mix64(C_TREE ^ b as u64)
}

#[inline]
pub(crate) fn tree_child_fp(parent_fp: u64, step: u8) -> u64 {
    mix64(parent_fp ^ (step as u64 + 1))
}

#[inline]
pub(crate) fn tree_path_fp(b: u8, path: &[u8]) -> u64 {
    let mut h = tree_root_fp(b);
    for &s in path {
        h = tree_child_fp(h, s);
    }
    h
}

#[inline]
pub(crate) fn gw_path_fp(path: &[u8]) -> u64 {
    let mut h = C_GW;
    for &s in path {
        h = mix64(h ^ (s as u64 + 1));
    }
    h
}

pub(crate) fn stretch_interior_fp(base_edge_fp: u64, index: u32) -> u64 {
    mix64(mix64(C_STRETCH_INT ^ base_edge_fp) ^ index as u64)
}

/// Structural fingerprint of a vertex.
pub fn vertex_fp(v: &Vertex) -> u64 {
    match v {
        Vertex::Lattice(coords) => {
            let mut raw = 0u64;
            for (i, &c) in coords.iter().enumerate() {
                raw ^= lattice_coord_term(i, c);
            }
            lattice_fp_from_raw(raw)
        }
        Vertex::TreePath { b, path } => tree_path_fp(*b, path),
        Vertex::Explicit(idx) => mix64(C_EXPLICIT ^ *idx as u64),
        Vertex::GwPath(path) => gw_path_fp(path),
        Vertex::Stretched(sv) => match sv.as_ref() {
            StretchedVertex::Original(inner) => mix64(C_STRETCH_ORIG ^ vertex_fp(inner)),
            StretchedVertex::PathInterior { edge, index } => {
                let ef = edge_fp(vertex_fp(&edge.0), vertex_fp(&edge.1));
                stretch_interior_fp(ef, *index)
            }
        },
        Vertex::Lamp(state) => {
            let marker_fp = match state.marker_key.decode() {
                Ok(m) => vertex_fp(&m),
                // Malformed marker keys cannot arise from this crate's
                // constructors; fold the raw bytes so the function stays total.
                Err(_) => crate::prf::fp_bytes(state.marker_key.as_bytes()),
            };
            let mut raw = 0u64;
            for (site, &elem) in &state.lamps {
                let site_fp = match site.decode() {
                    Ok(s) => vertex_fp(&s),
                    Err(_) => crate::prf::fp_bytes(site.as_bytes()),
                };
                raw ^= lamp_entry_term(site_fp, elem);
            }
            lamp_fp_from_raw(marker_fp, raw)
        }
    }
}

/// Symmetric fingerprint of the unordered edge with endpoint fingerprints
/// `fu`, `fv`.
#[inline]
pub fn edge_fp(fu: u64, fv: u64) -> u64 {
    let (lo, hi) = if fu <= fv { (fu, fv) } else { (fv, fu) };
    mix64(mix64(C_EDGE ^ lo) ^ hi)
}
