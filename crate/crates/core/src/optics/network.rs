use std::fmt::{self, Write as _};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::OpticsError;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Polarization amplitudes `(H, V)` carried on an edge.
pub type Pol = [Complex64; 2];

pub const DARK: Pol = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];

pub fn pol_norm_sqr(p: &Pol) -> f64 {
    p[0].norm_sqr() + p[1].norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShutterState {
    Block,
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    Source,
    Detector,
    /// Real rotation `[[cos θ, sin θ], [−sin θ, cos θ]]` on the two spatial
    /// ports, both polarizations alike; θ = π/4 is 50/50.
    BeamSplitter {
        theta: f64,
    },
    /// Transmits H (in0→out0, in1→out1) and reflects V (in0→out1, in1→out0).
    Pbs,
    /// `(H, V) ↦ (cos a·H − sin a·V, sin a·H + cos a·V)`.
    Rotator {
        angle: f64,
    },
    Mirror,
    SingleSidedMirror,
    DoubleSidedMirror,
    Shutter(ShutterState),
    Absorber,
}

impl ElementKind {
    pub fn ports(&self) -> (usize, usize) {
        match self {
            ElementKind::Source => (0, 1),
            ElementKind::Detector | ElementKind::Absorber => (1, 0),
            ElementKind::BeamSplitter { .. } | ElementKind::Pbs => (2, 2),
            _ => (1, 1),
        }
    }

    /// Not expected to conserve norm.
    pub fn is_lossy(&self) -> bool {
        matches!(
            self,
            ElementKind::Shutter(ShutterState::Block) | ElementKind::Absorber | ElementKind::Detector
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::Source => "source",
            ElementKind::Detector => "detector",
            ElementKind::BeamSplitter { .. } => "beamsplitter",
            ElementKind::Pbs => "pbs",
            ElementKind::Rotator { .. } => "rotator",
            ElementKind::Mirror => "mirror",
            ElementKind::SingleSidedMirror => "single_sided_mirror",
            ElementKind::DoubleSidedMirror => "double_sided_mirror",
            ElementKind::Shutter(_) => "shutter",
            ElementKind::Absorber => "absorber",
        }
    }

    /// Scattering matrix from inputs to outputs, indexed `2·port + pol`.
    /// Sources and sinks have empty matrices.
    pub fn scattering(&self) -> DMatrix<Complex64> {
        let (n_in, n_out) = self.ports();
        let mut s = DMatrix::<Complex64>::zeros(2 * n_out, 2 * n_in);
        let r = |x: f64| Complex64::new(x, 0.0);
        match *self {
            ElementKind::Source | ElementKind::Detector | ElementKind::Absorber => {}
            ElementKind::BeamSplitter { theta } => {
                let (sn, c) = theta.sin_cos();
                for pol in 0..2 {
                    s[(pol, pol)] = r(c);
                    s[(pol, 2 + pol)] = r(sn);
                    s[(2 + pol, pol)] = r(-sn);
                    s[(2 + pol, 2 + pol)] = r(c);
                }
            }
            ElementKind::Pbs => {
                s[(0, 0)] = r(1.0);
                s[(3, 1)] = r(1.0);
                s[(2, 2)] = r(1.0);
                s[(1, 3)] = r(1.0);
            }
            ElementKind::Rotator { angle } => {
                let (sn, c) = angle.sin_cos();
                s[(0, 0)] = r(c);
                s[(0, 1)] = r(-sn);
                s[(1, 0)] = r(sn);
                s[(1, 1)] = r(c);
            }
            ElementKind::Mirror
            | ElementKind::SingleSidedMirror
            | ElementKind::DoubleSidedMirror
            | ElementKind::Shutter(ShutterState::Pass) => {
                s[(0, 0)] = r(1.0);
                s[(1, 1)] = r(1.0);
            }
            ElementKind::Shutter(ShutterState::Block) => {}
        }
        s
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self {
            ElementKind::BeamSplitter { theta } => write!(f, " theta={theta}"),
            ElementKind::Rotator { angle } => write!(f, " angle={angle}"),
            ElementKind::Shutter(ShutterState::Block) => f.write_str(" block"),
            ElementKind::Shutter(ShutterState::Pass) => f.write_str(" pass"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: ElementKind,
    pub label: String,
    pub inputs: Vec<Option<EdgeId>>,
    pub outputs: Vec<Option<EdgeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeRole {
    Internal,
    /// Channel leg from Alice toward Bob.
    ChannelOut,
    /// Channel leg from Bob back toward Alice.
    ChannelReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub from_port: usize,
    pub to: NodeId,
    pub to_port: usize,
    pub role: EdgeRole,
}

impl Edge {
    pub fn is_channel(&self) -> bool {
        self.role != EdgeRole::Internal
    }
}

/// Directed graph of optical elements; every edge is one time step long.
/// Output ports left unconnected absorb whatever reaches them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpticalNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl OpticalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, kind: ElementKind, label: impl Into<String>) -> NodeId {
        let (n_in, n_out) = kind.ports();
        self.nodes.push(Node {
            kind,
            label: label.into(),
            inputs: vec![None; n_in],
            outputs: vec![None; n_out],
        });
        self.nodes.len() - 1
    }

    pub fn connect(
        &mut self,
        from: NodeId,
        from_port: usize,
        to: NodeId,
        to_port: usize,
        role: EdgeRole,
    ) -> Result<EdgeId, OpticsError> {
        let n = self.nodes.len();
        if from >= n || to >= n {
            return Err(OpticsError::UnknownNode(from.max(to)));
        }
        let id = self.edges.len();
        match self.nodes[from].outputs.get(from_port) {
            Some(None) => {}
            _ => {
                return Err(OpticsError::BadPort {
                    node: from,
                    port: from_port,
                })
            }
        }
        match self.nodes[to].inputs.get(to_port) {
            Some(None) => {}
            _ => {
                return Err(OpticsError::BadPort {
                    node: to,
                    port: to_port,
                })
            }
        }
        self.nodes[from].outputs[from_port] = Some(id);
        self.nodes[to].inputs[to_port] = Some(id);
        self.edges.push(Edge {
            from,
            from_port,
            to,
            to_port,
            role,
        });
        Ok(id)
    }

    /// Connects a chain of single-port elements, returning the last node.
    pub(crate) fn chain(
        &mut self,
        from: (NodeId, usize),
        kinds: &[(ElementKind, String)],
    ) -> Result<NodeId, OpticsError> {
        let (mut node, mut port) = from;
        for (kind, label) in kinds {
            let next = self.add_node(*kind, label.clone());
            self.connect(node, port, next, 0, EdgeRole::Internal)?;
            node = next;
            port = 0;
        }
        Ok(node)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.label == label)
    }

    pub fn channel_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_channel()).collect()
    }

    pub fn source(&self) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.kind == ElementKind::Source)
    }

    pub fn detectors(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind == ElementKind::Detector)
            .collect()
    }

    /// Kahn order; `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indegree: Vec<usize> = self.nodes.iter().map(|n| n.inputs.iter().flatten().count()).collect();
        let mut ready: Vec<NodeId> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop() {
            order.push(n);
            for &e in self.nodes[n].outputs.iter().flatten() {
                let to = self.edges[e].to;
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    ready.push(to);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Checks the structural invariants: one source, at least one detector,
    /// no cycles, and unitary scattering for every lossless element.
    pub fn validate(&self) -> Result<(), OpticsError> {
        let sources = self.nodes.iter().filter(|n| n.kind == ElementKind::Source).count();
        if sources != 1 {
            return Err(OpticsError::SourceCount(sources));
        }
        if self.detectors().is_empty() {
            return Err(OpticsError::NoDetector);
        }
        if self.topological_order().is_none() {
            return Err(OpticsError::Cyclic);
        }
        for i in 0..self.nodes.len() {
            if let Some(defect) = self.unitarity_defect(i) {
                if defect > 1e-12 {
                    return Err(OpticsError::NotUnitary { node: i, defect });
                }
            }
        }
        Ok(())
    }

    /// `‖S†S − I‖_max` of a lossless two-sided element; `None` for sources,
    /// sinks and lossy elements.
    pub fn unitarity_defect(&self, node: NodeId) -> Option<f64> {
        let kind = self.nodes[node].kind;
        let (n_in, n_out) = kind.ports();
        if kind.is_lossy() || n_in == 0 || n_out == 0 {
            return None;
        }
        let s = kind.scattering();
        let dim = s.ncols();
        let defect = (s.adjoint() * &s - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Some(defect)
    }

    /// Longest source-to-node path length in edges, per node.
    pub fn depths(&self) -> Result<Vec<Option<usize>>, OpticsError> {
        let order = self.topological_order().ok_or(OpticsError::Cyclic)?;
        let mut depth: Vec<Option<usize>> = vec![None; self.nodes.len()];
        if let Some(s) = self.source() {
            depth[s] = Some(0);
        }
        for n in order {
            let Some(d) = depth[n] else { continue };
            for &e in self.nodes[n].outputs.iter().flatten() {
                let to = self.edges[e].to;
                depth[to] = Some(depth[to].map_or(d + 1, |x| x.max(d + 1)));
            }
        }
        Ok(depth)
    }

    /// Plain-text adjacency: `<id> <label> <kind> [params] -> <to>:<port> …`,
    /// channel edges starred.
    pub fn adjacency_listing(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "{i} {} {} ->", n.label, n.kind);
            for (port, e) in n.outputs.iter().enumerate() {
                match e {
                    Some(e) => {
                        let edge = &self.edges[*e];
                        let star = if edge.is_channel() { "*" } else { "" };
                        let _ = write!(out, " {port}:{}:{}{star}", edge.to, edge.to_port);
                    }
                    None => {
                        let _ = write!(out, " {port}:-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
