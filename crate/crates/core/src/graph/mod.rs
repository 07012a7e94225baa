//! Graph substrate: vertex identities, canonical keys, and the immutable
//! neighborhood oracles for every supported family.
//!
//! A vertex is a structured value ([`Vertex`]); its canonical byte encoding
//! ([`VertexKey`]) doubles as the global tie-breaker wherever a deterministic
//! order matters (edge examination order, enumeration order, output order).
//! Oracles are pure: `neighbors` depends only on the oracle's parameters and
//! the queried vertex, so lazily generated families (Galton-Watson trees,
//! random stretches, percolation) look the same no matter when or how often
//! a region is visited.

mod ball;
mod explicit;
mod fp;
mod group;
mod key;
mod stretch;

pub use ball::FiniteGraph;
pub use explicit::ExplicitGraph;
pub use fp::{edge_fp, lamp_entry_term, lamp_fp_from_raw, lattice_coord_term, lattice_fp_from_raw, vertex_fp};
pub(crate) use fp::{tree_child_fp, tree_root_fp};
pub use group::{FiniteGroupGraph, GroupError};
pub use stretch::StretchDescriptor;

use crate::gw::OffspringDistribution;
use crate::prf::{prf64, unit_uniform, Domain};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Canonical byte encoding of a vertex. Lexicographic byte order is the
/// crate-wide total order on vertices of a common graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexKey(pub(crate) Vec<u8>);

impl serde::Serialize for VertexKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl VertexKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Lowercase hex rendering of the canonical bytes; hex order equals
    /// byte order, so sorted output stays in canonical order.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.0.len() * 2);
        for b in &self.0 {
            use std::fmt::Write;
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    /// Family discriminant (the leading tag byte).
    pub fn family_tag(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn decode(&self) -> Result<Vertex, GraphError> {
        key::decode(&self.0)
    }
}

/// Structured vertex identity, one variant per graph family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Vertex {
    /// Point of the hypercubic lattice `Z^d`.
    Lattice(Vec<i64>),
    /// Vertex of the `(b+1)`-regular infinite tree, addressed by its path
    /// from the root: the first step has `b+1` choices, later steps `b`.
    TreePath { b: u8, path: Vec<u8> },
    /// Vertex of an explicitly stored finite graph.
    Explicit(u32),
    /// Vertex of a lazily generated Galton-Watson tree, addressed by child
    /// indices along the path from the root.
    GwPath(Vec<u8>),
    /// Vertex of a random stretch of a base graph.
    Stretched(Box<StretchedVertex>),
    /// Vertex of a lamplighter-type product: marker position plus the finite
    /// configuration of non-identity lamp values.
    Lamp(Box<LampState>),
}

impl Vertex {
    pub fn encode(&self) -> VertexKey {
        VertexKey(key::encode(self))
    }

    /// Structural fingerprint used as the PRF key for this vertex.
    pub fn fingerprint(&self) -> u64 {
        fp::vertex_fp(self)
    }
}

/// Vertex of a stretched graph: either an original base vertex or one of the
/// `L_e - 1` interior vertices of the path that replaced base edge `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StretchedVertex {
    Original(Vertex),
    /// `index` counts from the endpoint with the smaller vertex key, so an
    /// interior vertex at `index i` sits at distance `i` from `edge.0` and
    /// `L_e - i` from `edge.1`.
    PathInterior { edge: (Vertex, Vertex), index: u32 },
}

/// Lamplighter state: marker position in the base graph and the finitely
/// many lamps holding a non-identity group element, keyed by the canonical
/// encoding of their base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LampState {
    pub marker_key: VertexKey,
    pub lamps: BTreeMap<VertexKey, u16>,
}

impl LampState {
    pub fn new(marker: &Vertex) -> Self {
        LampState { marker_key: marker.encode(), lamps: BTreeMap::new() }
    }
}

/// Unordered edge: the two endpoint keys stored smaller-first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    a: VertexKey,
    b: VertexKey,
}

impl EdgeKey {
    pub fn new(u: VertexKey, v: VertexKey) -> Result<Self, GraphError> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Ok(EdgeKey { a: u, b: v }),
            std::cmp::Ordering::Greater => Ok(EdgeKey { a: v, b: u }),
            std::cmp::Ordering::Equal => Err(GraphError::SelfLoop),
        }
    }

    pub fn endpoints(&self) -> (&VertexKey, &VertexKey) {
        (&self.a, &self.b)
    }

    /// Structural fingerprint (symmetric in the endpoints).
    pub fn fingerprint(&self) -> Result<u64, GraphError> {
        let u = self.a.decode()?;
        let v = self.b.decode()?;
        Ok(fp::edge_fp(fp::vertex_fp(&u), fp::vertex_fp(&v)))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("vertex belongs to family {found}, oracle serves {expected}")]
    WrongFamily { expected: &'static str, found: &'static str },
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),
    #[error("malformed vertex key: {0}")]
    MalformedKey(String),
    #[error("vertex budget {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge endpoints coincide")]
    SelfLoop,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Immutable neighborhood oracle over one graph family.
#[derive(Debug, Clone)]
pub struct GraphOracle {
    family: Family,
}

#[derive(Debug, Clone)]
enum Family {
    Lattice { d: u8 },
    RegularTree { b: u8 },
    Explicit { graph: Arc<ExplicitGraph> },
    Gw { offspring: OffspringDistribution, seed: u64 },
    Stretch { base: Arc<GraphOracle>, descriptor: StretchDescriptor, seed: u64 },
    Lamplighter { base: Arc<GraphOracle>, group: Arc<FiniteGroupGraph> },
}

/// Product of a base graph with lamps over a finite group: vertices are
/// `(marker, lamp configuration)`; moves either step the marker along a base
/// edge or multiply the lamp at the marker by one generator.
pub fn lamplighter_product(
    base: GraphOracle,
    group: FiniteGroupGraph,
) -> GraphOracle {
    GraphOracle {
        family: Family::Lamplighter { base: Arc::new(base), group: Arc::new(group) },
    }
}

impl GraphOracle {
    /// `Z^d` with `2d` unit moves per vertex.
    pub fn lattice(d: u8) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::InvalidParameter("lattice dimension must be >= 1".into()));
        }
        Ok(GraphOracle { family: Family::Lattice { d } })
    }

    /// The `(b+1)`-regular infinite tree.
    pub fn regular_tree(b: u8) -> Result<Self, GraphError> {
        if b == 0 {
            return Err(GraphError::InvalidParameter("tree branching must be >= 1".into()));
        }
        Ok(GraphOracle { family: Family::RegularTree { b } })
    }

    pub fn explicit(graph: ExplicitGraph) -> Self {
        GraphOracle { family: Family::Explicit { graph: Arc::new(graph) } }
    }

    /// Galton-Watson tree generated lazily: the child count of each vertex is
    /// a pure function of `(seed, path)`, so revisits always agree.
    pub fn gw_tree(offspring: OffspringDistribution, seed: u64) -> Self {
        GraphOracle { family: Family::Gw { offspring, seed } }
    }

    /// Random stretch of `base`: every base edge is replaced by a path whose
    /// length is a pure function of `(seed, edge)` drawn from `descriptor`.
    pub fn stretch(base: GraphOracle, descriptor: StretchDescriptor, seed: u64) -> Result<Self, GraphError> {
        descriptor.validate()?;
        Ok(GraphOracle { family: Family::Stretch { base: Arc::new(base), descriptor, seed } })
    }

    pub fn lamplighter(base: GraphOracle, group: FiniteGroupGraph) -> Self {
        lamplighter_product(base, group)
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Lattice { .. } => "lattice",
            Family::RegularTree { .. } => "regular-tree",
            Family::Explicit { .. } => "explicit",
            Family::Gw { .. } => "gw-tree",
            Family::Stretch { .. } => "stretch",
            Family::Lamplighter { .. } => "lamplighter",
        }
    }

    /// The distinguished anchor: lattice origin, tree root, explicit root,
    /// stretch of the base anchor, or `(base anchor, all lamps off)`.
    pub fn basepoint(&self) -> Vertex {
        match &self.family {
            Family::Lattice { d } => Vertex::Lattice(vec![0; *d as usize]),
            Family::RegularTree { b } => Vertex::TreePath { b: *b, path: Vec::new() },
            Family::Explicit { graph } => Vertex::Explicit(graph.root()),
            Family::Gw { .. } => Vertex::GwPath(Vec::new()),
            Family::Stretch { base, .. } => {
                Vertex::Stretched(Box::new(StretchedVertex::Original(base.basepoint())))
            }
            Family::Lamplighter { base, .. } => {
                Vertex::Lamp(Box::new(LampState::new(&base.basepoint())))
            }
        }
    }

    /// Lamplighter group component, when this oracle is a lamplighter.
    pub fn lamp_group(&self) -> Option<&FiniteGroupGraph> {
        match &self.family {
            Family::Lamplighter { group, .. } => Some(group),
            _ => None,
        }
    }

    /// Base oracle, when this oracle wraps one (stretch or lamplighter).
    pub fn base(&self) -> Option<&GraphOracle> {
        match &self.family {
            Family::Stretch { base, .. } | Family::Lamplighter { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn lattice_dim(&self) -> Option<u8> {
        match &self.family {
            Family::Lattice { d } => Some(*d),
            _ => None,
        }
    }

    pub fn tree_branching(&self) -> Option<u8> {
        match &self.family {
            Family::RegularTree { b } => Some(*b),
            _ => None,
        }
    }

    pub fn stretch_parts(&self) -> Option<(&GraphOracle, &StretchDescriptor, u64)> {
        match &self.family {
            Family::Stretch { base, descriptor, seed } => Some((base, descriptor, *seed)),
            _ => None,
        }
    }

    /// Checks that `v` is a structurally valid vertex of this oracle's graph.
    pub fn validate(&self, v: &Vertex) -> Result<(), GraphError> {
        match (&self.family, v) {
            (Family::Lattice { d }, Vertex::Lattice(coords)) => {
                if coords.len() != *d as usize {
                    return Err(GraphError::InvalidVertex(format!(
                        "lattice point has {} coordinates, oracle is Z^{}",
                        coords.len(),
                        d
                    )));
                }
                Ok(())
            }
            (Family::RegularTree { b }, Vertex::TreePath { b: vb, path }) => {
                if vb != b {
                    return Err(GraphError::InvalidVertex(format!(
                        "tree path has branching {vb}, oracle has {b}"
                    )));
                }
                for (i, &s) in path.iter().enumerate() {
                    let limit = if i == 0 { *b as u16 + 1 } else { *b as u16 };
                    if (s as u16) >= limit {
                        return Err(GraphError::InvalidVertex(format!(
                            "tree step {i} is {s}, out of range"
                        )));
                    }
                }
                Ok(())
            }
            (Family::Explicit { graph }, Vertex::Explicit(idx)) => {
                if (*idx as usize) >= graph.len() {
                    return Err(GraphError::InvalidVertex(format!(
                        "vertex {idx} outside explicit graph of {} vertices",
                        graph.len()
                    )));
                }
                Ok(())
            }
            (Family::Gw { offspring, seed }, Vertex::GwPath(path)) => {
                // Walk down from the root, checking each step against the
                // lazily drawn child count of its parent.
                let mut prefix: Vec<u8> = Vec::with_capacity(path.len());
                for &s in path {
                    let count = gw_child_count(offspring, *seed, &prefix);
                    if s as usize >= count {
                        return Err(GraphError::InvalidVertex(format!(
                            "child index {s} at depth {} exceeds generated count {count}",
                            prefix.len()
                        )));
                    }
                    prefix.push(s);
                }
                Ok(())
            }
            (Family::Stretch { base, descriptor, seed }, Vertex::Stretched(sv)) => {
                match sv.as_ref() {
                    StretchedVertex::Original(inner) => base.validate(inner),
                    StretchedVertex::PathInterior { edge, index } => {
                        base.validate(&edge.0)?;
                        base.validate(&edge.1)?;
                        let (ka, kb) = (edge.0.encode(), edge.1.encode());
                        if ka >= kb {
                            return Err(GraphError::InvalidVertex(
                                "interior edge endpoints not in canonical order".into(),
                            ));
                        }
                        if !base.neighbors(&edge.0)?.contains(&edge.1) {
                            return Err(GraphError::InvalidVertex(
                                "interior vertex names a non-edge of the base graph".into(),
                            ));
                        }
                        let len = stretch::length(descriptor, *seed, &edge.0, &edge.1);
                        if *index == 0 || *index >= len {
                            return Err(GraphError::InvalidVertex(format!(
                                "interior index {index} outside 1..{len}"
                            )));
                        }
                        Ok(())
                    }
                }
            }
            (Family::Lamplighter { base, group }, Vertex::Lamp(state)) => {
                base.validate(&state.marker_key.decode()?)?;
                for (site, &elem) in &state.lamps {
                    base.validate(&site.decode()?)?;
                    if elem == 0 {
                        return Err(GraphError::InvalidVertex(
                            "lamp configuration stores an identity element".into(),
                        ));
                    }
                    if elem >= group.order() {
                        return Err(GraphError::InvalidVertex(format!(
                            "lamp element {elem} outside group of order {}",
                            group.order()
                        )));
                    }
                }
                Ok(())
            }
            (_, v) => Err(GraphError::WrongFamily {
                expected: self.family_name(),
                found: vertex_family_name(v),
            }),
        }
    }

    /// Neighbor set of `v`: duplicate-free, never contains `v`, and symmetric
    /// (`u` lists `v` exactly when `v` lists `u`).
    pub fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>, GraphError> {
        self.validate(v)?;
        Ok(match (&self.family, v) {
            (Family::Lattice { .. }, Vertex::Lattice(coords)) => {
                let mut out = Vec::with_capacity(2 * coords.len());
                for i in 0..coords.len() {
                    for delta in [1i64, -1] {
                        let mut c = coords.clone();
                        c[i] += delta;
                        out.push(Vertex::Lattice(c));
                    }
                }
                out
            }
            (Family::RegularTree { b }, Vertex::TreePath { path, .. }) => {
                let mut out = Vec::new();
                if !path.is_empty() {
                    let mut parent = path.clone();
                    parent.pop();
                    out.push(Vertex::TreePath { b: *b, path: parent });
                }
                let child_count = if path.is_empty() { *b as u16 + 1 } else { *b as u16 };
                for s in 0..child_count {
                    let mut child = path.clone();
                    child.push(s as u8);
                    out.push(Vertex::TreePath { b: *b, path: child });
                }
                out
            }
            (Family::Explicit { graph }, Vertex::Explicit(idx)) => graph
                .neighbors(*idx)
                .iter()
                .map(|&n| Vertex::Explicit(n))
                .collect(),
            (Family::Gw { offspring, seed }, Vertex::GwPath(path)) => {
                let mut out = Vec::new();
                if !path.is_empty() {
                    let mut parent = path.clone();
                    parent.pop();
                    out.push(Vertex::GwPath(parent));
                }
                let count = gw_child_count(offspring, *seed, path);
                for s in 0..count {
                    let mut child = path.clone();
                    child.push(s as u8);
                    out.push(Vertex::GwPath(child));
                }
                out
            }
            (Family::Stretch { base, descriptor, seed }, Vertex::Stretched(sv)) => {
                stretch::neighbors(base, descriptor, *seed, sv)?
            }
            (Family::Lamplighter { base, group }, Vertex::Lamp(state)) => {
                let marker = state.marker_key.decode()?;
                let mut out = Vec::with_capacity(group.generator_count() + base.degree(&marker)?);
                let current = state.lamps.get(&state.marker_key).copied().unwrap_or(0);
                for &g in group.generators() {
                    let next = group.mul(current, g);
                    let mut lamps = state.lamps.clone();
                    if next == 0 {
                        lamps.remove(&state.marker_key);
                    } else {
                        lamps.insert(state.marker_key.clone(), next);
                    }
                    out.push(Vertex::Lamp(Box::new(LampState {
                        marker_key: state.marker_key.clone(),
                        lamps,
                    })));
                }
                for m in base.neighbors(&marker)? {
                    out.push(Vertex::Lamp(Box::new(LampState {
                        marker_key: m.encode(),
                        lamps: state.lamps.clone(),
                    })));
                }
                out
            }
            _ => unreachable!("validate already rejected family mismatches"),
        })
    }

    pub fn degree(&self, v: &Vertex) -> Result<usize, GraphError> {
        self.validate(v)?;
        Ok(match (&self.family, v) {
            (Family::Lattice { d }, _) => 2 * *d as usize,
            (Family::RegularTree { b }, Vertex::TreePath { path, .. }) => {
                // Root and non-root vertices both have degree b + 1.
                let _ = path;
                *b as usize + 1
            }
            (Family::Explicit { graph }, Vertex::Explicit(idx)) => graph.neighbors(*idx).len(),
            (Family::Gw { offspring, seed }, Vertex::GwPath(path)) => {
                let parent = usize::from(!path.is_empty());
                parent + gw_child_count(offspring, *seed, path)
            }
            (Family::Stretch { base, descriptor, seed }, Vertex::Stretched(sv)) => match sv.as_ref() {
                StretchedVertex::Original(inner) => base.degree(inner)?,
                StretchedVertex::PathInterior { .. } => {
                    let _ = (descriptor, seed);
                    2
                }
            },
            (Family::Lamplighter { base, group }, Vertex::Lamp(state)) => {
                group.generator_count() + base.degree(&state.marker_key.decode()?)?
            }
            _ => unreachable!("validate already rejected family mismatches"),
        })
    }

    /// Key-level convenience wrapper around [`GraphOracle::neighbors`].
    pub fn neighbors_key(&self, key: &VertexKey) -> Result<Vec<VertexKey>, GraphError> {
        let v = key.decode()?;
        Ok(self.neighbors(&v)?.iter().map(Vertex::encode).collect())
    }

    /// Length assigned to base edge `(u, v)` when this oracle is a stretch.
    pub fn stretch_edge_length(&self, u: &Vertex, v: &Vertex) -> Result<u32, GraphError> {
        match &self.family {
            Family::Stretch { base, descriptor, seed } => {
                base.validate(u)?;
                base.validate(v)?;
                if !base.neighbors(u)?.contains(v) {
                    return Err(GraphError::InvalidVertex("not a base edge".into()));
                }
                Ok(stretch::length(descriptor, *seed, u, v))
            }
            _ => Err(GraphError::WrongFamily { expected: "stretch", found: self.family_name() }),
        }
    }

    /// Closed ball of the given radius around `center`, materialized as a
    /// finite graph with distance labels. Fails with `BudgetExceeded` when
    /// more than `budget` vertices would be needed.
    pub fn ball(&self, center: &Vertex, radius: u32, budget: usize) -> Result<FiniteGraph, GraphError> {
        ball::ball(self, center, radius, budget)
    }
}

pub(crate) fn vertex_family_name(v: &Vertex) -> &'static str {
    match v {
        Vertex::Lattice(_) => "lattice",
        Vertex::TreePath { .. } => "regular-tree",
        Vertex::Explicit(_) => "explicit",
        Vertex::GwPath(_) => "gw-tree",
        Vertex::Stretched(_) => "stretch",
        Vertex::Lamp(_) => "lamplighter",
    }
}

/// Child count of the GW vertex addressed by `path`: the offspring law's
/// quantile at a PRF draw keyed by the path fingerprint.
fn gw_child_count(offspring: &OffspringDistribution, seed: u64, path: &[u8]) -> usize {
    let fp = fp::gw_path_fp(path);
    offspring.quantile(unit_uniform(prf64(seed, Domain::Offspring, fp)))
}
