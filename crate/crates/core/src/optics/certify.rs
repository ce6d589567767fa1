use std::fmt;

use crate::gate_model::CfGateParams;

use super::builders::{build_cf_gate_network, GateNetwork, GateVariant};
use super::network::{pol_norm_sqr, EdgeId, EdgeRole, Pol, ShutterState};
use super::propagate::{minimal_horizon, propagate, PresenceMap};
use super::OpticsError;

#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub switch: ShutterState,
    /// `(edge, time, label of the edge's source node)` for every present
    /// pair on a channel edge.
    pub channel_presence: Vec<(EdgeId, usize, String)>,
    pub detection_probability: f64,
    /// Largest forward norm on any channel-return edge.
    pub return_forward_max: f64,
    pub forward_norm_defect: f64,
    pub backward_norm_defect: f64,
}

impl BranchReport {
    pub fn is_counterfactual(&self) -> bool {
        self.channel_presence.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub params: CfGateParams,
    pub variant: GateVariant,
    pub block: BranchReport,
    pub pass: BranchReport,
}

impl CertificationReport {
    /// Both switch branches leave no presence in the channel; superposed
    /// switch states inherit this branch by branch.
    pub fn certified(&self) -> bool {
        self.block.is_counterfactual() && self.pass.is_counterfactual()
    }
}

/// Builds and propagates one frozen switch branch.
pub fn analyze_branch(
    params: &CfGateParams,
    switch: ShutterState,
    variant: GateVariant,
) -> Result<(GateNetwork, PresenceMap, BranchReport), OpticsError> {
    let gate = build_cf_gate_network(params, switch, variant)?;
    let net = &gate.network;
    let horizon = minimal_horizon(net, gate.detector)?;
    let map = propagate(net, gate.detector, horizon)?;
    let channel_presence = map
        .channel_presence(net)
        .into_iter()
        .map(|(e, t)| (e, t, net.node(net.edge(e).from).label.clone()))
        .collect();
    let return_forward_max = (0..net.edges().len())
        .filter(|&e| net.edge(e).role == EdgeRole::ChannelReturn)
        .flat_map(|e| (0..=horizon).map(move |t| (e, t)))
        .map(|(e, t)| pol_norm_sqr(&map.forward(e, t)).sqrt())
        .fold(0.0, f64::max);
    let report = BranchReport {
        switch,
        channel_presence,
        detection_probability: map.detection_probability,
        return_forward_max,
        forward_norm_defect: map.forward_norm_defect(),
        backward_norm_defect: map.backward_norm_defect(),
    };
    Ok((gate, map, report))
}

/// Detector amplitude `(H, V)` of a branch (all paths have equal length, so
/// there is exactly one arrival time).
pub fn branch_output(gate: &GateNetwork, map: &PresenceMap) -> Pol {
    map.detector_arrivals(&gate.network)
        .into_iter()
        .map(|(_, a)| a)
        .next()
        .unwrap_or(super::network::DARK)
}

pub fn certify_gate_counterfactual(
    params: &CfGateParams,
    variant: GateVariant,
) -> Result<CertificationReport, OpticsError> {
    let (_, _, block) = analyze_branch(params, ShutterState::Block, variant)?;
    let (_, _, pass) = analyze_branch(params, ShutterState::Pass, variant)?;
    Ok(CertificationReport {
        params: *params,
        variant,
        block,
        pass,
    })
}

impl fmt::Display for BranchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.switch {
            ShutterState::Block => "block",
            ShutterState::Pass => "pass",
        };
        let verdict = if self.is_counterfactual() { "none" } else { "PRESENT" };
        writeln!(
            f,
            "{name} branch: channel presence {verdict} ({} pairs), detection probability {:.6}",
            self.channel_presence.len(),
            self.detection_probability
        )?;
        for (e, t, label) in self.channel_presence.iter().take(20) {
            writeln!(f, "  edge {e} (from {label}) at t={t}")?;
        }
        if self.channel_presence.len() > 20 {
            writeln!(f, "  ... {} more", self.channel_presence.len() - 20)?;
        }
        Ok(())
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let variant = match self.variant {
            GateVariant::DoubleMirror => "double mirror",
            GateVariant::NoDoubleMirror => "no double mirror",
        };
        writeln!(
            f,
            "gate network M={} N={} ({variant})",
            self.params.m(),
            self.params.n()
        )?;
        write!(f, "{}{}", self.block, self.pass)?;
        writeln!(f, "{}", if self.certified() { "CERTIFIED" } else { "NOT CERTIFIED" })
    }
}
