//! Random stretches: every base edge `e` is replaced by a path of `L_e`
//! edges, where `L_e` is drawn from a length law as a pure function of
//! `(seed, e)`. Interior path vertices are indexed from the endpoint with
//! the smaller vertex key, so both endpoints derive identical geometry.

use super::{edge_fp, fp, GraphError, GraphOracle, StretchedVertex, Vertex};
use crate::prf::{prf64, unit_uniform, Domain};

/// Length law for stretched edges. All laws are supported on `{1, 2, ...}`;
/// length 1 means the edge is kept as is.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum StretchDescriptor {
    /// Every edge becomes a path of exactly `L` edges.
    Constant { length: u32 },
    /// `P(L = l) = (1 - q)^(l-1) q`, mean `1/q`.
    Geometric { q: f64 },
    /// `P(L = l)` proportional to `l^(-beta)` for `l = 1..=cap`.
    TruncatedPowerLaw { beta: f64, cap: u32 },
}

impl StretchDescriptor {
    pub fn validate(&self) -> Result<(), GraphError> {
        match self {
            StretchDescriptor::Constant { length } => {
                if *length == 0 {
                    return Err(GraphError::InvalidParameter("stretch length must be >= 1".into()));
                }
            }
            StretchDescriptor::Geometric { q } => {
                if !(*q > 0.0 && *q <= 1.0) {
                    return Err(GraphError::InvalidParameter(format!(
                        "geometric parameter must lie in (0, 1], got {q}"
                    )));
                }
            }
            StretchDescriptor::TruncatedPowerLaw { beta, cap } => {
                if !beta.is_finite() || *beta <= 1.0 {
                    return Err(GraphError::InvalidParameter(format!(
                        "power-law exponent must be finite and > 1, got {beta}"
                    )));
                }
                if *cap == 0 {
                    return Err(GraphError::InvalidParameter("power-law cap must be >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Inverse CDF at `u in [0, 1)`.
    pub fn quantile(&self, u: f64) -> u32 {
        match self {
            StretchDescriptor::Constant { length } => *length,
            StretchDescriptor::Geometric { q } => {
                if *q >= 1.0 {
                    return 1;
                }
                // Smallest l with 1 - (1-q)^l > u.
                let l = (1.0 - u).ln() / (1.0 - q).ln();
                let l = l.ceil().max(1.0);
                if l >= u32::MAX as f64 {
                    u32::MAX
                } else {
                    // Guard the boundary case where l lands exactly on an
                    // integer and ceil fails to advance.
                    let li = l as u32;
                    let cdf = 1.0 - (1.0 - q).powi(li as i32);
                    if cdf > u {
                        li
                    } else {
                        li + 1
                    }
                }
            }
            StretchDescriptor::TruncatedPowerLaw { beta, cap } => {
                let weights: Vec<f64> =
                    (1..=*cap).map(|l| (l as f64).powf(-beta)).collect();
                let total: f64 = weights.iter().sum();
                let mut acc = 0.0;
                for (i, w) in weights.iter().enumerate() {
                    acc += w / total;
                    if u < acc {
                        return i as u32 + 1;
                    }
                }
                *cap
            }
        }
    }

    /// Mean length (the power-law mean is for the truncated law).
    pub fn mean(&self) -> f64 {
        match self {
            StretchDescriptor::Constant { length } => *length as f64,
            StretchDescriptor::Geometric { q } => 1.0 / q,
            StretchDescriptor::TruncatedPowerLaw { beta, cap } => {
                let total: f64 = (1..=*cap).map(|l| (l as f64).powf(-beta)).sum();
                let first: f64 = (1..=*cap).map(|l| (l as f64).powf(1.0 - beta)).sum();
                first / total
            }
        }
    }
}

/// Length assigned to base edge `(u, v)`: the law's quantile at a PRF draw
/// keyed by the symmetric edge fingerprint.
pub(super) fn length(desc: &StretchDescriptor, seed: u64, u: &Vertex, v: &Vertex) -> u32 {
    let ef = edge_fp(fp::vertex_fp(u), fp::vertex_fp(v));
    desc.quantile(unit_uniform(prf64(seed, Domain::Stretch, ef)))
}

/// Neighbors within the stretched graph.
pub(super) fn neighbors(
    base: &GraphOracle,
    desc: &StretchDescriptor,
    seed: u64,
    sv: &StretchedVertex,
) -> Result<Vec<Vertex>, GraphError> {
    Ok(match sv {
        StretchedVertex::Original(v) => {
            let mut out = Vec::new();
            for u in base.neighbors(v)? {
                let l = length(desc, seed, v, &u);
                if l == 1 {
                    out.push(Vertex::Stretched(Box::new(StretchedVertex::Original(u))));
                } else {
                    // Interior indices count from the smaller endpoint, so
                    // the vertex adjacent to `v` is 1 or l-1 accordingly.
                    let (edge, index) = if v.encode() < u.encode() {
                        ((v.clone(), u), 1)
                    } else {
                        ((u, v.clone()), l - 1)
                    };
                    out.push(Vertex::Stretched(Box::new(StretchedVertex::PathInterior {
                        edge,
                        index,
                    })));
                }
            }
            out
        }
        StretchedVertex::PathInterior { edge, index } => {
            let l = length(desc, seed, &edge.0, &edge.1);
            let mut out = Vec::with_capacity(2);
            for target in [index - 1, index + 1] {
                if target == 0 {
                    out.push(Vertex::Stretched(Box::new(StretchedVertex::Original(
                        edge.0.clone(),
                    ))));
                } else if target == l {
                    out.push(Vertex::Stretched(Box::new(StretchedVertex::Original(
                        edge.1.clone(),
                    ))));
                } else {
                    out.push(Vertex::Stretched(Box::new(StretchedVertex::PathInterior {
                        edge: edge.clone(),
                        index: target,
                    })));
                }
            }
            out
        }
    })
}

