//! Explicitly stored finite graphs: adjacency lists over dense indices plus
//! a distinguished root. These serve both as a standalone oracle family and
//! as the carrier for small hand-built test graphs.

use super::GraphError;

#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    adj: Vec<Vec<u32>>,
    root: u32,
}

impl ExplicitGraph {
    /// Builds from adjacency lists. Lists are sorted and must be symmetric,
    /// duplicate-free, and loop-free.
    pub fn new(mut adj: Vec<Vec<u32>>, root: u32) -> Result<Self, GraphError> {
        let n = adj.len();
        if n == 0 {
            return Err(GraphError::InvalidParameter("graph must have at least one vertex".into()));
        }
        if root as usize >= n {
            return Err(GraphError::InvalidParameter(format!(
                "root {root} outside 0..{n}"
            )));
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        for (u, list) in adj.iter().enumerate() {
            for pair in list.windows(2) {
                if pair[0] == pair[1] {
                    return Err(GraphError::InvalidParameter(format!(
                        "duplicate edge at vertex {u}"
                    )));
                }
            }
            for &v in list {
                if v as usize >= n {
                    return Err(GraphError::InvalidParameter(format!(
                        "vertex {u} lists neighbor {v} outside 0..{n}"
                    )));
                }
                if v as usize == u {
                    return Err(GraphError::InvalidParameter(format!("self loop at {u}")));
                }
                if adj[v as usize].binary_search(&(u as u32)).is_err() {
                    return Err(GraphError::InvalidParameter(format!(
                        "edge {u}-{v} is not symmetric"
                    )));
                }
            }
        }
        Ok(ExplicitGraph { adj, root })
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)], root: u32) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::InvalidParameter(format!(
                    "edge ({u}, {v}) outside 0..{n}"
                )));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Self::new(adj, root)
    }

    /// Path on `n` vertices, rooted at one end.
    pub fn path(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges, 0).expect("path construction is valid")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        edges.push((n as u32 - 1, 0));
        Self::from_edges(n, &edges, 0).expect("cycle construction is valid")
    }

    /// Rooted tree in which every vertex down to the given depth has exactly
    /// `arity` children (the root included), in breadth-first layout.
    pub fn full_tree(arity: usize, depth: u32) -> Self {
        assert!(arity >= 1);
        let mut adj: Vec<Vec<u32>> = vec![Vec::new()];
        let mut level: Vec<u32> = vec![0];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * arity);
            for &v in &level {
                for _ in 0..arity {
                    let child = adj.len() as u32;
                    adj.push(vec![v]);
                    adj[v as usize].push(child);
                    next.push(child);
                }
            }
            level = next;
        }
        Self::new(adj, 0).expect("tree construction is valid")
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}
