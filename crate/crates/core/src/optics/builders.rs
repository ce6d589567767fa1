use std::f64::consts::FRAC_PI_4;

use crate::gate_model::CfGateParams;

use super::network::{EdgeRole, ElementKind, NodeId, OpticalNetwork, ShutterState};
use super::OpticsError;

/// Upper limit on `M·N` for unrolled gate networks.
pub const GATE_NETWORK_BUDGET: u64 = 100_000;

/// Two 50/50 beam splitters; the lower arm crosses the channel to Bob and
/// back, optionally through his shutter. `T` is the bright port.
pub fn build_interferometer(with_shutter: bool) -> OpticalNetwork {
    let mut net = OpticalNetwork::new();
    let bs = ElementKind::BeamSplitter { theta: FRAC_PI_4 };
    let l = net.add_node(ElementKind::Source, "L");
    let bs1 = net.add_node(bs, "BS1");
    let sm1 = net.add_node(ElementKind::SingleSidedMirror, "SM1");
    let sm2 = net.add_node(ElementKind::SingleSidedMirror, "SM2");
    let bs2 = net.add_node(bs, "BS2");
    let t = net.add_node(ElementKind::Detector, "T");
    let d = net.add_node(ElementKind::Detector, "D");
    let wire = |net: &mut OpticalNetwork, a: NodeId, ap: usize, b: NodeId, bp: usize, role: EdgeRole| {
        net.connect(a, ap, b, bp, role).expect("fresh ports");
    };
    wire(&mut net, l, 0, bs1, 0, EdgeRole::Internal);
    wire(&mut net, bs1, 0, sm1, 0, EdgeRole::Internal);
    wire(&mut net, sm1, 0, bs2, 0, EdgeRole::Internal);
    if with_shutter {
        let s = net.add_node(ElementKind::Shutter(ShutterState::Block), "S");
        wire(&mut net, bs1, 1, s, 0, EdgeRole::ChannelOut);
        wire(&mut net, s, 0, sm2, 0, EdgeRole::ChannelReturn);
    } else {
        wire(&mut net, bs1, 1, sm2, 0, EdgeRole::ChannelOut);
    }
    wire(&mut net, sm2, 0, bs2, 1, EdgeRole::ChannelReturn);
    wire(&mut net, bs2, 1, t, 0, EdgeRole::Internal);
    wire(&mut net, bs2, 0, d, 0, EdgeRole::Internal);
    net
}

/// Whether each outer cycle's upper arm is two inner chains joined by a
/// double-sided mirror, or a single chain (the intermediate construction
/// that leaks presence into the channel).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateVariant {
    #[default]
    DoubleMirror,
    NoDoubleMirror,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateNetwork {
    pub network: OpticalNetwork,
    pub detector: NodeId,
    pub params: CfGateParams,
    pub switch: ShutterState,
    pub variant: GateVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub nodes: usize,
    pub edges: usize,
    pub channel_edges: usize,
}

/// Closed-form element counts of [`build_cf_gate_network`].
///
/// Each inner chain holds `N` rotators, `N−1` channel visits (split, Bob's
/// shutter, return mirror, two delay mirrors, combine) and a separating PBS:
/// `7N−5` nodes, `8N−6` internal edges. The lower outer arm carries enough
/// delay mirrors to match the upper arm's length.
pub fn census(params: &CfGateParams, variant: GateVariant) -> Census {
    let (m, n) = (params.m() as usize, params.n() as usize);
    let (cycle_nodes, cycle_edges, visits) = match variant {
        GateVariant::DoubleMirror => (24 * n - 12, 26 * n - 13, 2 * (n - 1)),
        GateVariant::NoDoubleMirror => (12 * n - 6, 13 * n - 6, n - 1),
    };
    Census {
        nodes: 2 + m + (m - 1) * cycle_nodes,
        edges: 1 + m + (m - 1) * cycle_edges,
        channel_edges: 2 * (m - 1) * visits,
    }
}

/// One inner Zeno chain starting at `entry`: returns the separating PBS's
/// pass port and the path length in edges up to and including the edge
/// into it.
fn inner_chain(
    net: &mut OpticalNetwork,
    entry: (NodeId, usize),
    params: &CfGateParams,
    switch: ShutterState,
    prefix: &str,
) -> Result<((NodeId, usize), usize), OpticsError> {
    let n = params.n();
    let rotator = ElementKind::Rotator { angle: params.beta2() };
    let mut at = entry;
    let mut length = 0;
    for j in 1..=n {
        let pr = net.add_node(rotator, format!("{prefix}.pr{j}"));
        net.connect(at.0, at.1, pr, 0, EdgeRole::Internal)?;
        length += 1;
        if j == n {
            let sep = net.add_node(ElementKind::Pbs, format!("{prefix}.sep"));
            net.connect(pr, 0, sep, 0, EdgeRole::Internal)?;
            return Ok(((sep, 1), length + 1));
        }
        let split = net.add_node(ElementKind::Pbs, format!("{prefix}.split{j}"));
        net.connect(pr, 0, split, 0, EdgeRole::Internal)?;
        let bob = net.add_node(ElementKind::Shutter(switch), format!("{prefix}.bob{j}"));
        net.connect(split, 0, bob, 0, EdgeRole::ChannelOut)?;
        let mr = net.add_node(ElementKind::SingleSidedMirror, format!("{prefix}.mr{j}"));
        net.connect(bob, 0, mr, 0, EdgeRole::ChannelReturn)?;
        let combine = net.add_node(ElementKind::Pbs, format!("{prefix}.combine{}", j + 1));
        net.connect(mr, 0, combine, 0, EdgeRole::Internal)?;
        let delay = [
            (ElementKind::Mirror, format!("{prefix}.stay{j}a")),
            (ElementKind::Mirror, format!("{prefix}.stay{j}b")),
        ];
        let last = net.chain((split, 1), &delay)?;
        net.connect(last, 0, combine, 1, EdgeRole::Internal)?;
        length += 4;
        at = (combine, 0);
    }
    unreachable!("N ≥ 1 returns inside the loop")
}

/// Unrolled counterfactual CNOT with the quantum switch frozen to one
/// classical branch: `Block` for |g⟩ (Bob absorbs), `Pass` for |e⟩.
///
/// Outer stage k applies a β₁ rotator; between stages the V part takes the
/// upper arm (inner chains) and the H part a delay line, recombined on a
/// PBS. The photon leaves the last rotator into detector `D_out`.
pub fn build_cf_gate_network(
    params: &CfGateParams,
    switch: ShutterState,
    variant: GateVariant,
) -> Result<GateNetwork, OpticsError> {
    let (m, n) = (params.m(), params.n());
    if m < 2 || n < 2 {
        return Err(OpticsError::Degenerate { m, n });
    }
    if u64::from(m) * u64::from(n) > GATE_NETWORK_BUDGET {
        return Err(OpticsError::BudgetExceeded {
            m,
            n,
            budget: GATE_NETWORK_BUDGET,
        });
    }
    let mut net = OpticalNetwork::new();
    let source = net.add_node(ElementKind::Source, "L");
    let outer = ElementKind::Rotator { angle: params.beta1() };
    let mut at = (source, 0);
    for k in 1..=m {
        let pr = net.add_node(outer, format!("outer{k}.pr"));
        net.connect(at.0, at.1, pr, 0, EdgeRole::Internal)?;
        if k == m {
            let detector = net.add_node(ElementKind::Detector, "D_out");
            net.connect(pr, 0, detector, 0, EdgeRole::Internal)?;
            return Ok(GateNetwork {
                network: net,
                detector,
                params: *params,
                switch,
                variant,
            });
        }
        let split = net.add_node(ElementKind::Pbs, format!("outer{k}.split"));
        net.connect(pr, 0, split, 0, EdgeRole::Internal)?;

        let (end, delay_mirrors) = match variant {
            GateVariant::DoubleMirror => {
                let (sep1, len1) = inner_chain(&mut net, (split, 1), params, switch, &format!("outer{k}.asc"))?;
                let dm = net.add_node(ElementKind::DoubleSidedMirror, format!("outer{k}.dm"));
                net.connect(sep1.0, sep1.1, dm, 0, EdgeRole::Internal)?;
                let (sep2, len2) = inner_chain(&mut net, (dm, 0), params, switch, &format!("outer{k}.desc"))?;
                (sep2, len1 + 1 + len2)
            }
            GateVariant::NoDoubleMirror => inner_chain(&mut net, (split, 1), params, switch, &format!("outer{k}"))?,
        };
        let combine = net.add_node(ElementKind::Pbs, format!("outer{}.combine", k + 1));
        net.connect(end.0, end.1, combine, 1, EdgeRole::Internal)?;
        let delay: Vec<(ElementKind, String)> = (1..=delay_mirrors)
            .map(|i| (ElementKind::Mirror, format!("outer{k}.low{i}")))
            .collect();
        let last = net.chain((split, 0), &delay)?;
        net.connect(last, 0, combine, 0, EdgeRole::Internal)?;
        at = (combine, 0);
    }
    unreachable!("M ≥ 2 returns inside the loop")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interferometer_variants() {
        let a = build_interferometer(true);
        let b = build_interferometer(false);
        a.validate().unwrap();
        b.validate().unwrap();
        assert_eq!(a.nodes().len(), b.nodes().len() + 1);
        assert_eq!(a.channel_edges().len(), 3);
        assert_eq!(b.channel_edges().len(), 2);
    }

    #[test]
    fn smallest_network_hand_count() {
        // M = N = 2 with the double mirror:
        //   L, D_out, 2 outer rotators                                   4
        //   split + combine                                              2
        //   2 chains × (2 rotators, split, shutter, mirror, 2 delay
        //   mirrors, combine, sep = 9)                                  18
        //   double mirror                                                1
        //   lower delay line: upper arm is 16 edges → 15 mirrors        15
        //                                                        nodes  40
        // Edges: one per connected input port = 42, four in the channel.
        let p = CfGateParams::new(2, 2).unwrap();
        let g = build_cf_gate_network(&p, ShutterState::Pass, GateVariant::DoubleMirror).unwrap();
        assert_eq!(g.network.nodes().len(), 40);
        assert_eq!(g.network.edges().len(), 42);
        assert_eq!(g.network.channel_edges().len(), 4);
        assert_eq!(
            census(&p, GateVariant::DoubleMirror),
            Census {
                nodes: 40,
                edges: 42,
                channel_edges: 4
            }
        );
    }

    #[test]
    fn census_matches_construction() {
        for (m, n) in [(2, 2), (3, 4), (4, 6), (5, 8), (2, 7)] {
            let p = CfGateParams::new(m, n).unwrap();
            for variant in [GateVariant::DoubleMirror, GateVariant::NoDoubleMirror] {
                let g = build_cf_gate_network(&p, ShutterState::Block, variant).unwrap();
                g.network.validate().unwrap();
                let c = census(&p, variant);
                assert_eq!(g.network.nodes().len(), c.nodes, "{m},{n},{variant:?}");
                assert_eq!(g.network.edges().len(), c.edges, "{m},{n},{variant:?}");
                assert_eq!(g.network.channel_edges().len(), c.channel_edges);
            }
        }
    }

    #[test]
    fn arms_have_equal_length() {
        let p = CfGateParams::new(3, 4).unwrap();
        let g = build_cf_gate_network(&p, ShutterState::Pass, GateVariant::DoubleMirror).unwrap();
        let depths = g.network.depths().unwrap();
        for k in 2..=3 {
            let combine = g.network.find(&format!("outer{k}.combine")).unwrap();
            let node = g.network.node(combine);
            let arrivals: Vec<usize> = node
                .inputs
                .iter()
                .map(|e| depths[g.network.edge(e.unwrap()).from].unwrap())
                .collect();
            assert_eq!(arrivals[0], arrivals[1]);
        }
    }

    #[test]
    fn rejects_degenerate_and_oversized() {
        let one = CfGateParams::new(1, 4).unwrap();
        assert!(matches!(
            build_cf_gate_network(&one, ShutterState::Pass, GateVariant::DoubleMirror),
            Err(OpticsError::Degenerate { m: 1, .. })
        ));
        let big = CfGateParams::new(1000, 101).unwrap();
        assert!(matches!(
            build_cf_gate_network(&big, ShutterState::Pass, GateVariant::DoubleMirror),
            Err(OpticsError::BudgetExceeded { .. })
        ));
    }
}
