use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::network::{pol_norm_sqr, EdgeId, ElementKind, NodeId, OpticalNetwork, Pol, DARK};
use super::OpticsError;

/// Relative threshold separating nonzero amplitudes from rounding noise.
pub const PRESENCE_EPS: f64 = 1e-12;

type Slice = BTreeMap<EdgeId, Pol>;

/// Forward and backward wave functions on every (edge, time) pair, and the
/// pairs where both are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct PresenceMap {
    pub horizon: usize,
    pub detector: NodeId,
    forward: Vec<Slice>,
    backward: Vec<Slice>,
    present: BTreeSet<(EdgeId, usize)>,
    max_forward: f64,
    max_backward: f64,
    /// Σ‖f‖² over edges at each time.
    pub forward_norms: Vec<f64>,
    /// Forward norm² absorbed, detected or lost by each time (cumulative).
    pub forward_sunk: Vec<f64>,
    /// Σ‖b‖² over edges at each time.
    pub backward_norms: Vec<f64>,
    /// Backward norm² injected at times ≥ t.
    pub backward_injected: Vec<f64>,
    /// Backward norm² lost at times ≥ t (absorbers, blocked ports, the source).
    pub backward_sunk: Vec<f64>,
    /// Probability that the photon reaches the chosen detector.
    pub detection_probability: f64,
}

fn apply(s: &DMatrix<Complex64>, v: &[Pol]) -> Vec<Pol> {
    let flat = DVector::from_iterator(2 * v.len(), v.iter().flat_map(|p| p.iter().copied()));
    let out = s * flat;
    (0..out.len() / 2).map(|i| [out[2 * i], out[2 * i + 1]]).collect()
}

fn norm(p: &Pol) -> f64 {
    pol_norm_sqr(p).sqrt()
}

/// Forward amplitudes from a unit |H⟩ photon leaving the source at t = 0;
/// backward amplitudes from the post-selected detector state, evolved with
/// adjoint scattering on the reversed graph.
pub fn propagate(network: &OpticalNetwork, detector: NodeId, horizon: usize) -> Result<PresenceMap, OpticsError> {
    network.validate()?;
    if network.nodes().get(detector).map(|n| n.kind) != Some(ElementKind::Detector) {
        return Err(OpticsError::NotADetector(detector));
    }
    let source = network.source().expect("validated");
    let det_edge = network.node(detector).inputs[0].ok_or(OpticsError::DarkDetector)?;
    let matrices: Vec<DMatrix<Complex64>> = network.nodes().iter().map(|n| n.kind.scattering()).collect();

    let mut forward: Vec<Slice> = vec![Slice::new(); horizon + 1];
    let mut forward_norms = vec![0.0; horizon + 1];
    let mut forward_sunk = vec![0.0; horizon + 1];
    if let Some(e) = network.node(source).outputs[0] {
        forward[0].insert(e, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    } else {
        forward_sunk[0] = 1.0;
    }
    for t in 0..=horizon {
        forward_norms[t] = forward[t].values().map(pol_norm_sqr).sum();
        if t == horizon {
            break;
        }
        let mut sunk = forward_sunk[t];
        let nodes: BTreeSet<NodeId> = forward[t].keys().map(|&e| network.edge(e).to).collect();
        let mut next = Slice::new();
        for n in nodes {
            let node = network.node(n);
            let inputs: Vec<Pol> = node
                .inputs
                .iter()
                .map(|e| e.and_then(|e| forward[t].get(&e).copied()).unwrap_or(DARK))
                .collect();
            let incoming: f64 = inputs.iter().map(pol_norm_sqr).sum();
            let outputs = apply(&matrices[n], &inputs);
            let mut kept = 0.0;
            for (port, amp) in outputs.into_iter().enumerate() {
                if let Some(e) = node.outputs[port] {
                    kept += pol_norm_sqr(&amp);
                    next.insert(e, amp);
                }
            }
            sunk += incoming - kept;
        }
        forward_sunk[t + 1] = sunk;
        forward[t + 1] = next;
    }

    let arrivals: Vec<(usize, Pol)> = (0..=horizon)
        .filter_map(|t| forward[t].get(&det_edge).map(|a| (t, *a)))
        .filter(|(_, a)| pol_norm_sqr(a) > PRESENCE_EPS * PRESENCE_EPS)
        .collect();
    let detection_probability: f64 = arrivals.iter().map(|(_, a)| pol_norm_sqr(a)).sum();
    if detection_probability == 0.0 {
        let depth = network.depths()?[detector];
        return match depth {
            Some(d) if d - 1 > horizon => Err(OpticsError::HorizonTooShort { horizon, needed: d - 1 }),
            _ => Err(OpticsError::DarkDetector),
        };
    }
    let scale = detection_probability.sqrt();

    let mut backward: Vec<Slice> = vec![Slice::new(); horizon + 1];
    let mut backward_norms = vec![0.0; horizon + 1];
    let mut backward_injected = vec![0.0; horizon + 2];
    let mut backward_sunk = vec![0.0; horizon + 2];
    let injections: BTreeMap<usize, Pol> = arrivals
        .iter()
        .map(|&(t, a)| (t, [a[0] / scale, a[1] / scale]))
        .collect();
    let adjoints: Vec<DMatrix<Complex64>> = matrices.iter().map(|m| m.adjoint()).collect();
    for t in (0..=horizon).rev() {
        let mut slice = Slice::new();
        let mut sunk = backward_sunk[t + 1];
        if t < horizon {
            let nodes: BTreeSet<NodeId> = backward[t + 1].keys().map(|&e| network.edge(e).from).collect();
            for n in nodes {
                let node = network.node(n);
                let outputs: Vec<Pol> = node
                    .outputs
                    .iter()
                    .map(|e| e.and_then(|e| backward[t + 1].get(&e).copied()).unwrap_or(DARK))
                    .collect();
                let incoming: f64 = outputs.iter().map(pol_norm_sqr).sum();
                let inputs = apply(&adjoints[n], &outputs);
                let mut kept = 0.0;
                for (port, amp) in inputs.into_iter().enumerate() {
                    if let Some(e) = node.inputs[port] {
                        kept += pol_norm_sqr(&amp);
                        slice.insert(e, amp);
                    }
                }
                sunk += incoming - kept;
            }
        }
        let mut injected = backward_injected[t + 1];
        if let Some(inj) = injections.get(&t) {
            let slot = slice.entry(det_edge).or_insert(DARK);
            slot[0] += inj[0];
            slot[1] += inj[1];
            injected += pol_norm_sqr(inj);
        }
        backward_injected[t] = injected;
        backward_sunk[t] = sunk;
        backward_norms[t] = slice.values().map(pol_norm_sqr).sum();
        backward[t] = slice;
    }
    backward_injected.truncate(horizon + 1);
    backward_sunk.truncate(horizon + 1);

    let max_of = |slices: &[Slice]| slices.iter().flat_map(|s| s.values()).map(norm).fold(0.0, f64::max);
    let max_forward = max_of(&forward);
    let max_backward = max_of(&backward);
    let mut map = PresenceMap {
        horizon,
        detector,
        forward,
        backward,
        present: BTreeSet::new(),
        max_forward,
        max_backward,
        forward_norms,
        forward_sunk,
        backward_norms,
        backward_injected,
        backward_sunk,
        detection_probability,
    };
    map.present = map.present_with_threshold(PRESENCE_EPS);
    Ok(map)
}

/// Horizon just long enough for the longest source-to-detector path.
pub fn minimal_horizon(network: &OpticalNetwork, detector: NodeId) -> Result<usize, OpticsError> {
    network.depths()?[detector]
        .map(|d| d - 1)
        .ok_or(OpticsError::DarkDetector)
}

impl PresenceMap {
    pub fn forward(&self, edge: EdgeId, t: usize) -> Pol {
        self.forward.get(t).and_then(|s| s.get(&edge)).copied().unwrap_or(DARK)
    }

    pub fn backward(&self, edge: EdgeId, t: usize) -> Pol {
        self.backward.get(t).and_then(|s| s.get(&edge)).copied().unwrap_or(DARK)
    }

    pub fn present(&self) -> &BTreeSet<(EdgeId, usize)> {
        &self.present
    }

    pub fn is_present(&self, edge: EdgeId, t: usize) -> bool {
        self.present.contains(&(edge, t))
    }

    /// Pairs whose forward and backward norms both exceed `eps` times the
    /// respective maximum.
    pub fn present_with_threshold(&self, eps: f64) -> BTreeSet<(EdgeId, usize)> {
        let (tf, tb) = (eps * self.max_forward, eps * self.max_backward);
        let mut out = BTreeSet::new();
        for (t, (f, b)) in self.forward.iter().zip(&self.backward).enumerate() {
            for (e, amp) in f {
                if norm(amp) > tf && b.get(e).is_some_and(|bb| norm(bb) > tb) {
                    out.insert((*e, t));
                }
            }
        }
        out
    }

    /// Present pairs on channel edges.
    pub fn channel_presence(&self, network: &OpticalNetwork) -> Vec<(EdgeId, usize)> {
        self.present
            .iter()
            .copied()
            .filter(|&(e, _)| network.edge(e).is_channel())
            .collect()
    }

    /// Whether any edge is nonzero at time `t` in the forward wave.
    pub fn forward_edges_at(&self, t: usize) -> impl Iterator<Item = (&EdgeId, &Pol)> {
        self.forward[t].iter()
    }

    /// Largest deviation from forward norm conservation over all steps.
    pub fn forward_norm_defect(&self) -> f64 {
        self.forward_norms
            .iter()
            .zip(&self.forward_sunk)
            .map(|(a, s)| (a + s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from backward norm conservation over all steps.
    pub fn backward_norm_defect(&self) -> f64 {
        (0..=self.horizon)
            .map(|t| (self.backward_norms[t] + self.backward_sunk[t] - self.backward_injected[t]).abs())
            .fold(0.0, f64::max)
    }

    /// Amplitude arriving at the detector, per time.
    pub fn detector_arrivals(&self, network: &OpticalNetwork) -> Vec<(usize, Pol)> {
        let Some(e) = network.node(self.detector).inputs[0] else {
            return Vec::new();
        };
        (0..=self.horizon)
            .filter_map(|t| self.forward[t].get(&e).map(|a| (t, *a)))
            .collect()
    }

    /// `edge_id,time,|f|,|b|,present` for every pair where either wave is
    /// nonzero, ordered by time then edge.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_id,time,|f|,|b|,present\n");
        for t in 0..=self.horizon {
            let edges: BTreeSet<EdgeId> = self.forward[t].keys().chain(self.backward[t].keys()).copied().collect();
            for e in edges {
                let _ = writeln!(
                    out,
                    "{e},{t},{:.17e},{:.17e},{}",
                    norm(&self.forward(e, t)),
                    norm(&self.backward(e, t)),
                    self.is_present(e, t)
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::build_interferometer;
    use crate::optics::network::EdgeRole;

    #[test]
    fn single_wire_is_present() {
        let mut net = OpticalNetwork::new();
        let l = net.add_node(ElementKind::Source, "L");
        let t = net.add_node(ElementKind::Detector, "T");
        let e = net.connect(l, 0, t, 0, EdgeRole::Internal).unwrap();
        let map = propagate(&net, t, 0).unwrap();
        assert!(map.is_present(e, 0));
        assert_eq!(map.detection_probability, 1.0);
    }

    #[test]
    fn shutter_blocks_channel_presence() {
        let net = build_interferometer(true);
        let t = net.find("T").unwrap();
        let map = propagate(&net, t, minimal_horizon(&net, t).unwrap()).unwrap();
        assert!(map.channel_presence(&net).is_empty());
        assert!((map.detection_probability - 0.25).abs() < 1e-15);
        assert!(map.forward_norm_defect() < 1e-12);
        assert!(map.backward_norm_defect() < 1e-12);
    }

    #[test]
    fn open_channel_shows_presence() {
        let net = build_interferometer(false);
        let t = net.find("T").unwrap();
        let map = propagate(&net, t, 5).unwrap();
        assert_eq!(map.channel_presence(&net).len(), 2);
        assert!((map.detection_probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dark_port_and_short_horizon() {
        let net = build_interferometer(false);
        let d = net.find("D").unwrap();
        assert!(matches!(propagate(&net, d, 5), Err(OpticsError::DarkDetector)));
        let t = net.find("T").unwrap();
        assert!(matches!(
            propagate(&net, t, 1),
            Err(OpticsError::HorizonTooShort { needed: 3, .. })
        ));
        assert!(matches!(propagate(&net, 1, 5), Err(OpticsError::NotADetector(1))));
    }

    #[test]
    fn csv_header_and_rows() {
        let net = build_interferometer(true);
        let t = net.find("T").unwrap();
        let map = propagate(&net, t, 3).unwrap();
        let csv = map.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("edge_id,time,|f|,|b|,present"));
        assert!(lines.all(|l| l.split(',').count() == 5));
    }
}
