//! Computational toolkit for anchored isoperimetry, percolation cluster
//! exploration, random stretches, Galton-Watson trees, and (delayed) random
//! walks on lamplighter graphs.
//!
//! Everything downstream of a seed is deterministic: graph families are
//! immutable oracles, percolation environments and random stretch lengths
//! are keyed-hash functions of structural identity, and Monte Carlo drivers
//! derive one sub-seed per trial so results are independent of scheduling.

pub mod expansion;
pub mod formulas;
pub mod graph;
pub mod gw;
pub mod percolation;
pub mod prf;
pub mod stats;
pub mod walks;

pub use expansion::{
    AnimalCounts, BoundaryMode, ExpansionError, ExpansionProfile, SetAnnotation,
};
pub use formulas::Thresholds;
pub use graph::{
    EdgeKey, ExplicitGraph, FiniteGraph, FiniteGroupGraph, GraphError, GraphOracle, LampState,
    StretchDescriptor, StretchedVertex, Vertex, VertexKey,
};
pub use gw::{BackboneDecomposition, GwError, OffspringDistribution, SampledTree};
pub use percolation::{
    ClusterReport, ExplorationStatus, PercolationConfig, PercolationMode,
};
pub use stats::{LineFit, MeanCi};
pub use walks::{
    ExitEstimate, ReturnCurve, ReturnPoint, SpeedEstimate, SpeedPoint, StepRecord, WalkCheckpoint,
    WalkError, WalkTrace,
};
