//! Materialized finite graphs: closed balls of an oracle or wrapped explicit
//! graphs, with vertices indexed in canonical key order and distance labels
//! from the center.

use super::{ExplicitGraph, GraphError, GraphOracle, Vertex, VertexKey};
use std::collections::{HashMap, VecDeque};

/// A finite graph with canonical vertex order. When built as a ball of
/// radius `r`, adjacency is the induced subgraph; vertices at distance `< r`
/// are guaranteed to carry their complete ambient neighborhood.
#[derive(Debug, Clone)]
pub struct FiniteGraph {
    keys: Vec<VertexKey>,
    vertices: Vec<Vertex>,
    adj: Vec<Vec<u32>>,
    center: u32,
    dist: Vec<u32>,
    ball_radius: Option<u32>,
}

impl FiniteGraph {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: u32) -> &VertexKey {
        &self.keys[id as usize]
    }

    pub fn vertex(&self, id: u32) -> &Vertex {
        &self.vertices[id as usize]
    }

    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.adj[id as usize]
    }

    pub fn degree(&self, id: u32) -> usize {
        self.adj[id as usize].len()
    }

    /// Index of the ball center (respectively the wrapped root).
    pub fn center(&self) -> u32 {
        self.center
    }

    /// Distance from the center.
    pub fn dist(&self, id: u32) -> u32 {
        self.dist[id as usize]
    }

    /// Radius this graph was materialized at; `None` when the graph is a
    /// complete universe rather than a truncation.
    pub fn ball_radius(&self) -> Option<u32> {
        self.ball_radius
    }

    pub fn id_of(&self, key: &VertexKey) -> Option<u32> {
        self.keys.binary_search(key).ok().map(|i| i as u32)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Wraps an explicit graph as a complete (untruncated) finite graph.
    pub fn from_explicit(graph: &ExplicitGraph) -> Self {
        let n = graph.len();
        // Explicit keys encode the index big-endian, so index order is
        // already canonical key order.
        let vertices: Vec<Vertex> = (0..n as u32).map(Vertex::Explicit).collect();
        let keys: Vec<VertexKey> = vertices.iter().map(Vertex::encode).collect();
        let adj: Vec<Vec<u32>> = (0..n as u32).map(|v| graph.neighbors(v).to_vec()).collect();
        let dist = bfs_dist(&adj, graph.root());
        FiniteGraph {
            keys,
            vertices,
            adj,
            center: graph.root(),
            dist,
            ball_radius: None,
        }
    }
}

fn bfs_dist(adj: &[Vec<u32>], source: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u as usize] {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub(super) fn ball(
    oracle: &GraphOracle,
    center: &Vertex,
    radius: u32,
    budget: usize,
) -> Result<FiniteGraph, GraphError> {
    oracle.validate(center)?;
    if budget == 0 {
        return Err(GraphError::BudgetExceeded { budget });
    }

    // Pass 1: collect the vertex set with distances.
    let mut found: HashMap<VertexKey, (u32, Vertex)> = HashMap::new();
    found.insert(center.encode(), (0, center.clone()));
    let mut queue = VecDeque::from([(center.clone(), 0u32)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for u in oracle.neighbors(&v)? {
            let key = u.encode();
            if !found.contains_key(&key) {
                if found.len() >= budget {
                    return Err(GraphError::BudgetExceeded { budget });
                }
                found.insert(key, (d + 1, u.clone()));
                queue.push_back((u, d + 1));
            }
        }
    }

    // Canonical order.
    let mut keys: Vec<VertexKey> = found.keys().cloned().collect();
    keys.sort_unstable();
    let index: HashMap<&VertexKey, u32> =
        keys.iter().enumerate().map(|(i, k)| (k, i as u32)).collect();

    // Pass 2: induced adjacency.
    let mut vertices = Vec::with_capacity(keys.len());
    let mut dist = Vec::with_capacity(keys.len());
    for k in &keys {
        let (d, v) = &found[k];
        dist.push(*d);
        vertices.push(v.clone());
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); keys.len()];
    for (id, v) in vertices.iter().enumerate() {
        for u in oracle.neighbors(v)? {
            let key = u.encode();
            if let Some(&uid) = index.get(&key) {
                adj[id].push(uid);
            }
        }
        adj[id].sort_unstable();
    }

    let center_id = index[&center.encode()];
    Ok(FiniteGraph {
        keys,
        vertices,
        adj,
        center: center_id,
        dist,
        ball_radius: Some(radius),
    })
}
