//! Physics of the counterfactual special CNOT gate.
//!
//! The gate is a chained quantum-Zeno interferometer: an outer chain of `M`
//! polarization rotations by β₁ = π/2M, each outer cycle's vertical arm
//! passing two inner chains of `N` rotations by β₂ = π/2N separated by a
//! double-sided mirror. The atom acts as a quantum switch: |g⟩ blocks the
//! channel, |e⟩ lets the photon return.
//!
//! Amplitudes here are conditional (unnormalized); the missing probability
//! `1 − E` is the photon absorbed by the atom, routed out of the cycles, or
//! lost in the channel.
//!
//! Rotation convention: one stage maps `(X, Y) ↦ (cos β·X − sin β·Y,
//! sin β·X + cos β·Y)` for the state `X|H⟩ + Y|V⟩`, so that |H⟩ rotates
//! toward +|V⟩ and the ideal gate output is `C_g|g⟩|V⟩ + C_e|e⟩|H⟩`.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::quantum::{QuantumError, StateVector};

const INPUT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GateModelError {
    #[error("cycle counts must be positive (M={m}, N={n})")]
    InvalidCycles { m: u32, n: u32 },
    #[error("{name} = {value} is outside [0, 1]")]
    NoiseOutOfRange { name: &'static str, value: f64 },
    #[error("atom input is not normalized (|c_g|²+|c_e|² = {0})")]
    NotNormalized(f64),
    #[error("channel presence needs M ≥ 2, got {0}")]
    TooFewCycles(u32),
    #[error("the unbounded-inner-cycle limit is only defined without noise")]
    UnboundedWithNoise,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Outer/inner cycle counts. The rotation angles are derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CfGateParams {
    m: u32,
    n: u32,
}

impl CfGateParams {
    pub fn new(m: u32, n: u32) -> Result<Self, GateModelError> {
        if m == 0 || n == 0 {
            return Err(GateModelError::InvalidCycles { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// β₁ = π/2M
    pub fn beta1(&self) -> f64 {
        PI / (2.0 * f64::from(self.m))
    }

    /// β₂ = π/2N
    pub fn beta2(&self) -> f64 {
        PI / (2.0 * f64::from(self.n))
    }
}

/// Photon loss per channel pass (γ) and atom-missing probability (η).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseParams {
    gamma: f64,
    eta: f64,
}

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams { gamma: 0.0, eta: 0.0 };

    pub fn new(gamma: f64, eta: f64) -> Result<Self, GateModelError> {
        for (name, value) in [("gamma", gamma), ("eta", eta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GateModelError::NoiseOutOfRange { name, value });
            }
        }
        Ok(Self { gamma, eta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_ideal(&self) -> bool {
        self.gamma == 0.0 && self.eta == 0.0
    }
}

/// Atom state `c_g|g⟩ + c_e|e⟩`; the photon always enters as |H⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPhotonInput {
    c_g: Complex64,
    c_e: Complex64,
}

impl AtomPhotonInput {
    pub fn new(c_g: Complex64, c_e: Complex64) -> Result<Self, GateModelError> {
        let norm = c_g.norm_sqr() + c_e.norm_sqr();
        if (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(GateModelError::NotNormalized(norm));
        }
        Ok(Self { c_g, c_e })
    }

    pub fn ground() -> Self {
        Self {
            c_g: Complex64::new(1.0, 0.0),
            c_e: Complex64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        Self {
            c_g: Complex64::new(0.0, 0.0),
            c_e: Complex64::new(1.0, 0.0),
        }
    }

    /// (|g⟩ + |e⟩)/√2
    pub fn equal_superposition() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c_g: h, c_e: h }
    }

    pub fn c_g(&self) -> Complex64 {
        self.c_g
    }

    pub fn c_e(&self) -> Complex64 {
        self.c_e
    }

    /// Ideal output `C_g|g⟩|V⟩ + C_e|e⟩|H⟩` as a 2-qubit state (atom first).
    pub fn ideal_output(&self) -> StateVector {
        let z = Complex64::new(0.0, 0.0);
        StateVector::from_amplitudes(vec![self.c_e, z, z, self.c_g]).expect("normalized input")
    }

    /// Input `(C_g|g⟩ + C_e|e⟩)|H⟩` as a 2-qubit state (atom first).
    pub fn joint_state(&self) -> StateVector {
        let z = Complex64::new(0.0, 0.0);
        StateVector::from_amplitudes(vec![self.c_e, z, self.c_g, z]).expect("normalized input")
    }
}

/// Conditional output `C₁|H⟩|g⟩ + C₂|V⟩|g⟩ + C₃|H⟩|e⟩ + C₄|V⟩|e⟩` with its
/// efficiency and fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOutcome {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
    pub efficiency: f64,
    pub fidelity: f64,
    /// Set when nothing survives (E = 0); fidelity is then reported as 0.
    pub degenerate: bool,
}

impl GateOutcome {
    /// Computes E = Σ|Cᵢ|² and F = |C_e*·C₃ + C_g*·C₂|²/E.
    pub fn from_amplitudes(input: &AtomPhotonInput, c: [Complex64; 4]) -> Self {
        let [c1, c2, c3, c4] = c;
        let efficiency = c.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let overlap = (input.c_e.conj() * c3 + input.c_g.conj() * c2).norm_sqr();
        let degenerate = efficiency == 0.0;
        let fidelity = if degenerate {
            0.0
        } else {
            (overlap / efficiency).clamp(0.0, 1.0)
        };
        Self {
            c1,
            c2,
            c3,
            c4,
            efficiency,
            fidelity,
            degenerate,
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    /// Output as a 2-qubit state, atom first: |eH⟩, |eV⟩, |gH⟩, |gV⟩.
    pub fn to_state_vector(&self) -> StateVector {
        StateVector::from_amplitudes(vec![self.c3, self.c4, self.c1, self.c2]).expect("sub-normalized output")
    }

    /// Basis-outcome probabilities of the post-selected (normalized) output,
    /// in the order of [`amplitudes`](Self::amplitudes).
    pub fn conditional_distribution(&self) -> [f64; 4] {
        if self.degenerate {
            return [0.0; 4];
        }
        self.amplitudes().map(|a| a.norm_sqr() / self.efficiency)
    }

    /// Total-variation distance between the post-selected output
    /// distributions of two outcomes.
    pub fn total_variation(&self, other: &GateOutcome) -> f64 {
        let p = self.conditional_distribution();
        let q = other.conditional_distribution();
        0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// Running `(X, Y)` pair of one switch branch: the photon state `X|H⟩ + Y|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionState {
    pub x: f64,
    pub y: f64,
}

impl RecursionState {
    pub const INITIAL: RecursionState = RecursionState { x: 1.0, y: 0.0 };

    /// One polarization rotation by `beta`.
    pub fn rotated(self, beta: f64) -> Self {
        let (s, c) = beta.sin_cos();
        Self {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    /// Vertical arm attenuated by `factor` (W² or Z² for one outer cycle).
    pub fn attenuated(self, factor: f64) -> Self {
        Self {
            x: self.x,
            y: factor * self.y,
        }
    }

    /// One outer cycle `diag(1, s²)·R(β₁)` with per-half-cycle survival `s`.
    pub fn outer_step(self, beta1: f64, survival: f64) -> Self {
        self.rotated(beta1).attenuated(survival * survival)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Whether inner chains are simulated with their finite `N` or replaced by
/// their `N → ∞` limit (perfect Zeno blocking, complete pass rotation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerCycles {
    #[default]
    Finite,
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
struct Real2([[f64; 2]; 2]);

impl Real2 {
    const IDENTITY: Real2 = Real2([[1.0, 0.0], [0.0, 1.0]]);

    fn mul(&self, o: &Real2) -> Real2 {
        let a = &self.0;
        let b = &o.0;
        Real2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    fn pow(&self, mut exp: u32) -> Real2 {
        let mut base = *self;
        let mut acc = Real2::IDENTITY;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }
}

/// First entry of `[[cos β₂, sin β₂], [−k sin β₂, k cos β₂]]^N · (1, 0)ᵀ`:
/// the amplitude that stays in the inner chain's input polarization after
/// `N` inner rotations when a fraction `k` of the channel amplitude returns.
pub fn inner_survival(params: &CfGateParams, returning: f64) -> f64 {
    let (s, c) = params.beta2().sin_cos();
    let step = Real2([[c, s], [-returning * s, returning * c]]);
    step.pow(params.n).0[0][0]
}

/// W: per-half-outer-cycle survival of the |e⟩ branch with channel loss γ.
pub fn loss_survival(params: &CfGateParams, gamma: f64) -> f64 {
    inner_survival(params, 1.0 - gamma)
}

/// Z: per-half-outer-cycle survival of the |g⟩ branch when the atom fails
/// to block with probability η. Equals cos^N β₂ at η = 0.
pub fn missing_survival(params: &CfGateParams, eta: f64) -> f64 {
    inner_survival(params, eta)
}

/// `M` outer cycles from |H⟩ with a fixed per-half-cycle survival.
pub fn outer_recursion(params: &CfGateParams, survival: f64) -> RecursionState {
    let beta1 = params.beta1();
    (0..params.m).fold(RecursionState::INITIAL, |st, _| st.outer_step(beta1, survival))
}

/// The ideal-device |g⟩-branch recursion written with its closed-form
/// vertical decay `cos^{2N} β₂` per outer cycle.
pub fn ideal_blocked_recursion(params: &CfGateParams) -> RecursionState {
    let decay = params.beta2().cos().powi(2 * params.n as i32);
    let beta1 = params.beta1();
    (0..params.m).fold(RecursionState::INITIAL, |st, _| st.rotated(beta1).attenuated(decay))
}

/// Survival factors `(W, Z)` for the pass and block branches.
fn survivals(params: &CfGateParams, noise: &NoiseParams, inner: InnerCycles) -> Result<(f64, f64), GateModelError> {
    match inner {
        InnerCycles::Finite => Ok((loss_survival(params, noise.gamma), missing_survival(params, noise.eta))),
        InnerCycles::Unbounded if noise.is_ideal() => Ok((0.0, 1.0)),
        InnerCycles::Unbounded => Err(GateModelError::UnboundedWithNoise),
    }
}

/// Final branch states `(pass, block)` = `((U_M, V_M), (X′_M, Y′_M))`.
pub fn branch_states(
    params: &CfGateParams,
    noise: &NoiseParams,
    inner: InnerCycles,
) -> Result<(RecursionState, RecursionState), GateModelError> {
    let (w, z) = survivals(params, noise, inner)?;
    Ok((outer_recursion(params, w), outer_recursion(params, z)))
}

/// The limiting map 𝒫: `(C_g|g⟩ + C_e|e⟩)|H⟩ → C_g|g⟩|V⟩ + C_e|e⟩|H⟩`.
pub fn ideal_map(input: &AtomPhotonInput) -> GateOutcome {
    let z = Complex64::new(0.0, 0.0);
    GateOutcome::from_amplitudes(input, [z, input.c_g, input.c_e, z])
}

/// Finite-M/N gate with photon loss (|e⟩ branch) and atom missing (|g⟩ branch).
pub fn finite_map(
    input: &AtomPhotonInput,
    params: &CfGateParams,
    noise: &NoiseParams,
) -> Result<GateOutcome, GateModelError> {
    finite_map_with(input, params, noise, InnerCycles::Finite)
}

pub fn finite_map_with(
    input: &AtomPhotonInput,
    params: &CfGateParams,
    noise: &NoiseParams,
    inner: InnerCycles,
) -> Result<GateOutcome, GateModelError> {
    let (pass, block) = branch_states(params, noise, inner)?;
    Ok(GateOutcome::from_amplitudes(
        input,
        [
            input.c_g * block.x,
            input.c_g * block.y,
            input.c_e * pass.x,
            input.c_e * pass.y,
        ],
    ))
}

/// The gate as a linear operator on (atom, photon), atom first, in the basis
/// |eH⟩, |eV⟩, |gH⟩, |gV⟩. A |V⟩ photon is handled by flipping it to |H⟩
/// before the interferometer and back afterwards, which commutes with the
/// ideal CNOT; the ideal limit is exactly CNOT.
pub fn gate_operator(params: &CfGateParams, noise: &NoiseParams) -> Result<Matrix4<Complex64>, GateModelError> {
    let (pass, block) = branch_states(params, noise, InnerCycles::Finite)?;
    Ok(operator_from_branches(pass, block))
}

pub(crate) fn operator_from_branches(pass: RecursionState, block: RecursionState) -> Matrix4<Complex64> {
    let r = |v: f64| Complex64::new(v, 0.0);
    let mut op = Matrix4::zeros();
    op[(0, 0)] = r(pass.x);
    op[(1, 0)] = r(pass.y);
    op[(1, 1)] = r(pass.x);
    op[(0, 1)] = r(pass.y);
    op[(2, 2)] = r(block.x);
    op[(3, 2)] = r(block.y);
    op[(3, 3)] = r(block.x);
    op[(2, 3)] = r(block.y);
    op
}

/// Conditional joint states `|ψ₁⟩, |ψ₁′⟩, |ψ₂⟩, |ψ₂′⟩, …, |ψ_M⟩` of the
/// ideal device (no loss, no missing atom): `|ψ_k⟩` right after the k-th
/// rotation stage, `|ψ_k′⟩` at the end of the k-th outer cycle conditioned on
/// the photon surviving. States are 2-qubit vectors, atom first.
pub fn intermediate_states(
    input: &AtomPhotonInput,
    params: &CfGateParams,
    inner: InnerCycles,
) -> Result<Vec<StateVector>, GateModelError> {
    let (w, z) = survivals(params, &NoiseParams::IDEAL, inner)?;
    let beta1 = params.beta1();
    let joint = |pass: RecursionState, block: RecursionState| -> Result<StateVector, GateModelError> {
        Ok(StateVector::from_amplitudes(vec![
            input.c_e * pass.x,
            input.c_e * pass.y,
            input.c_g * block.x,
            input.c_g * block.y,
        ])?)
    };
    let mut pass = RecursionState::INITIAL;
    let mut block = RecursionState::INITIAL;
    let mut out = Vec::with_capacity(2 * params.m as usize);
    for k in 1..=params.m {
        pass = pass.rotated(beta1);
        block = block.rotated(beta1);
        out.push(joint(pass, block)?);
        if k < params.m {
            pass = pass.attenuated(w * w);
            block = block.attenuated(z * z);
            out.push(joint(pass, block)?);
        }
    }
    Ok(out)
}

/// `cos^{2M}(π/2M)`: probability of reaching D₀ when every cycle is blocked.
pub fn zeno_prob_d0(m: u32) -> f64 {
    assert!(m >= 1, "M must be positive");
    (PI / (2.0 * f64::from(m))).cos().powi(2 * m as i32)
}

/// `sin²((M−1)π/2M)`: channel-detection probability in the last cycle of the
/// single-stage Zeno scheme when nothing blocks.
pub fn zeno_channel_presence_prob(m: u32) -> Result<f64, GateModelError> {
    if m < 2 {
        return Err(GateModelError::TooFewCycles(m));
    }
    let m = f64::from(m);
    Ok(((m - 1.0) * PI / (2.0 * m)).sin().powi(2))
}

/// `E^K`: a circuit of `K` gates yields output only if every gate succeeds.
pub fn compose_efficiency(e_gate: f64, k: u32) -> f64 {
    e_gate.clamp(0.0, 1.0).powi(k as i32)
}

/// Worst-case fidelity `cos²(K·arccos√F)`, all deviations aligned; zero once
/// the accumulated angle passes π/2.
pub fn compose_fidelity_bound(f_gate: f64, k: u32) -> f64 {
    let angle = f64::from(k) * f_gate.clamp(0.0, 1.0).sqrt().acos();
    if angle >= PI / 2.0 {
        0.0
    } else {
        angle.cos().powi(2)
    }
}
