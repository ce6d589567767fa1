use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::QuantumError;

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    U3,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U3,
        GateKind::Cnot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    /// Lowercase mnemonic used by the circuit text format.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U3 => "u3",
            GateKind::Cnot => "cnot",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate from the universal set {one-qubit gates, CNOT} bound to operand
/// indices. For CNOT the operands are `[control, target]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    params: Vec<f64>,
    operands: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, params: Vec<f64>, operands: Vec<usize>) -> Result<Self, QuantumError> {
        if operands.len() != kind.arity() {
            return Err(QuantumError::Arity {
                kind,
                expected: kind.arity(),
                got: operands.len(),
            });
        }
        if params.len() != kind.param_count() {
            return Err(QuantumError::ParamCount {
                kind,
                expected: kind.param_count(),
                got: params.len(),
            });
        }
        if kind == GateKind::Cnot && operands[0] == operands[1] {
            return Err(QuantumError::DuplicateOperand(operands[0]));
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(QuantumError::NonFiniteParam(*p));
        }
        Ok(Self { kind, params, operands })
    }

    fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            params: Vec::new(),
            operands: vec![q],
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rx,
            params: vec![theta],
            operands: vec![q],
        }
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Ry,
            params: vec![theta],
            operands: vec![q],
        }
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::Rz,
            params: vec![theta],
            operands: vec![q],
        }
    }
    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self {
            kind: GateKind::U3,
            params: vec![theta, phi, lambda],
            operands: vec![q],
        }
    }

    /// # Panics
    /// If `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT operands must be distinct");
        Self {
            kind: GateKind::Cnot,
            params: Vec::new(),
            operands: vec![control, target],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn is_cnot(&self) -> bool {
        self.kind == GateKind::Cnot
    }

    /// `(control, target)` for a CNOT.
    pub fn cnot_pair(&self) -> Option<(usize, usize)> {
        self.is_cnot().then(|| (self.operands[0], self.operands[1]))
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.operands.contains(&q)
    }

    /// Same gate with operands renumbered through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            params: self.params.clone(),
            operands: self.operands.iter().map(|&q| map(q)).collect(),
        }
    }

    /// The 2x2 matrix of a one-qubit gate; `None` for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<Mat2> {
        let p = &self.params;
        let m = match self.kind {
            GateKind::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::T => [
                [ONE, ZERO],
                [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            ],
            GateKind::Rx => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                [[c.into(), -I * s], [-I * s, c.into()]]
            }
            GateKind::Ry => {
                let (s, c) = (p[0] / 2.0).sin_cos();
                [[c.into(), (-s).into()], [s.into(), c.into()]]
            }
            GateKind::Rz => [
                [Complex64::from_polar(1.0, -p[0] / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, p[0] / 2.0)],
            ],
            GateKind::U3 => {
                let (theta, phi, lambda) = (p[0], p[1], p[2]);
                let (s, c) = (theta / 2.0).sin_cos();
                [
                    [c.into(), -Complex64::from_polar(s, lambda)],
                    [Complex64::from_polar(s, phi), Complex64::from_polar(c, phi + lambda)],
                ]
            }
            GateKind::Cnot => return None,
        };
        Some(m)
    }

    /// Local matrix on the operand qubits, dimension 2^arity, with the first
    /// operand as the most significant bit.
    pub fn local_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        match self.single_qubit_matrix() {
            Some(m) => nalgebra::DMatrix::from_fn(2, 2, |r, c| m[r][c]),
            None => {
                let mut u = nalgebra::DMatrix::zeros(4, 4);
                u[(0, 0)] = ONE;
                u[(1, 1)] = ONE;
                u[(2, 3)] = ONE;
                u[(3, 2)] = ONE;
                u
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.operands {
            write!(f, " q{q}")?;
        }
        for p in &self.params {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}
