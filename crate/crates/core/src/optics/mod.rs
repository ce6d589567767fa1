//! Two-state-vector presence analysis on discrete-time optical networks.
//!
//! A photon is present on an edge at a time step iff both the forward wave
//! (from the source) and the backward wave (from the post-selected
//! detector) are nonzero there. A gate is counterfactual when no channel
//! edge is ever present, checked separately for each classical switch
//! branch.

mod builders;
mod certify;
mod network;
mod propagate;

pub use builders::{
    build_cf_gate_network, build_interferometer, census, Census, GateNetwork, GateVariant, GATE_NETWORK_BUDGET,
};
pub use certify::{analyze_branch, branch_output, certify_gate_counterfactual, BranchReport, CertificationReport};
pub use network::{
    pol_norm_sqr, Edge, EdgeId, EdgeRole, ElementKind, Node, NodeId, OpticalNetwork, Pol, ShutterState, DARK,
};
pub use propagate::{minimal_horizon, propagate, PresenceMap, PRESENCE_EPS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpticsError {
    #[error("network needs exactly one source, found {0}")]
    SourceCount(usize),
    #[error("network has no detector")]
    NoDetector,
    #[error("network contains a cycle")]
    Cyclic,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("port {port} of node {node} does not exist or is already connected")]
    BadPort { node: NodeId, port: usize },
    #[error("node {node} is not unitary (defect {defect:e})")]
    NotUnitary { node: NodeId, defect: f64 },
    #[error("node {0} is not a detector")]
    NotADetector(NodeId),
    #[error("horizon {horizon} too short: the detector is reached at t = {needed}")]
    HorizonTooShort { horizon: usize, needed: usize },
    #[error("no amplitude reaches the detector")]
    DarkDetector,
    #[error("gate network needs M ≥ 2 and N ≥ 2 (got M={m}, N={n})")]
    Degenerate { m: u32, n: u32 },
    #[error("M·N = {} exceeds the budget of {budget}", u64::from(*m) * u64::from(*n))]
    BudgetExceeded { m: u32, n: u32, budget: u64 },
}
