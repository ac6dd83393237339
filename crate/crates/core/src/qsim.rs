//! Dense statevector simulation for small qubit registers.
//!
//! Basis ordering: qubit 0 is the most significant bit of the basis index.
//! For two qubits the amplitudes are ordered `|00⟩, |01⟩, |10⟩, |11⟩` where the
//! left digit is qubit 0, so `CNOT(control 0, target 1)` maps `|10⟩ → |11⟩`.
//!
//! Rotations use the half-angle convention `R_P(θ) = exp(−iθP/2)`. Global
//! phase is carried along untouched; every observable exposed here is
//! phase-invariant.
//!
//! Finite-shot estimates draw a single binomial count of `0` outcomes with
//! success probability `(1 + ⟨Z⟩)/2` instead of looping over shots.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;

pub const MAX_QUBITS: usize = 10;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(invalid(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes. The vector must have power-of-two
    /// length and unit norm within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(invalid(format!("amplitude count {len} is not 2^n")));
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(invalid("amplitudes are not normalized"));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Σ |amplitude|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(invalid(format!(
                "qubit index {q} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn bit_mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Returns a new state with `gate` applied.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_mut(gate)?;
        Ok(out)
    }

    /// In-place variant of [`StateVector::apply`].
    pub fn apply_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let cm = self.bit_mask(control);
                let tm = self.bit_mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
            _ => {
                let target = gate.target();
                let m = gate.matrix().expect("rotation gate has a matrix");
                self.apply_single(target, &m);
            }
        }
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix to one qubit. No unitarity check.
    pub fn apply_matrix(&mut self, target: usize, m: &Matrix2) -> Result<()> {
        self.check_qubit(target)?;
        self.apply_single(target, m);
        Ok(())
    }

    fn apply_single(&mut self, target: usize, m: &Matrix2) {
        let tm = self.bit_mask(target);
        for i in 0..self.amplitudes.len() {
            if i & tm == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | tm];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | tm] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Exact `⟨Z_q⟩`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.bit_mask(qubit);
        let z: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum();
        Ok(z.clamp(-1.0, 1.0))
    }

    /// Finite-shot estimate of `⟨Z_q⟩`: `(n₀ − n₁)/shots`.
    pub fn sample_expectation_z(&self, qubit: usize, shots: u32, rng: &mut SeededRng) -> Result<f64> {
        if shots < 1 {
            return Err(invalid("shots must be >= 1"));
        }
        let z = self.expectation_z(qubit)?;
        Ok(sample_z_from_expectation(z, shots, rng))
    }

    /// Dispatches on [`Shots`]; the rng is untouched in analytic mode.
    pub fn measure_z(&self, spec: &MeasurementSpec, rng: &mut SeededRng) -> Result<f64> {
        match spec.shots {
            Shots::Analytic => self.expectation_z(spec.qubit),
            Shots::Finite(n) => self.sample_expectation_z(spec.qubit, n, rng),
        }
    }
}

/// Draws `shots` Born-rule outcomes for a qubit with exact expectation `z`.
pub fn sample_z_from_expectation(z: f64, shots: u32, rng: &mut SeededRng) -> f64 {
    let p0 = (1.0 + z) / 2.0;
    let n0 = rng.binomial(u64::from(shots), p0) as f64;
    let n = f64::from(shots);
    (2.0 * n0 - n) / n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { target: usize, angle: f64 },
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn target(&self) -> usize {
        match *self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::Cnot { target, .. } => target,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let target = self.target();
        if target >= n_qubits {
            return Err(invalid(format!(
                "target {target} out of range for {n_qubits} qubits"
            )));
        }
        if let Gate::Cnot { control, target } = *self {
            if control >= n_qubits {
                return Err(invalid(format!(
                    "control {control} out of range for {n_qubits} qubits"
                )));
            }
            if control == target {
                return Err(invalid("CNOT control and target must differ"));
            }
        }
        Ok(())
    }

    /// 2×2 matrix of a rotation gate; `None` for CNOT.
    pub fn matrix(&self) -> Option<Matrix2> {
        match *self {
            Gate::Rx { angle, .. } => Some(rx_matrix(angle)),
            Gate::Ry { angle, .. } => Some(ry_matrix(angle)),
            Gate::Rz { angle, .. } => Some(rz_matrix(angle)),
            Gate::Cnot { .. } => None,
        }
    }
}

pub fn rx_matrix(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let mis = Complex64::new(0.0, -s);
    [[c, mis], [mis, c]]
}

pub fn ry_matrix(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn rz_matrix(theta: f64) -> Matrix2 {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

/// max |(U·U†) − I| over entries.
pub fn unitarity_error(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += m[i][k] * m[j][k].conj();
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - expected).norm());
        }
    }
    worst
}

/// Shot budget: exact expectation or a positive number of samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shots {
    Analytic,
    Finite(u32),
}

impl Shots {
    pub fn finite(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("shots must be >= 1"));
        }
        Ok(Shots::Finite(n))
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Shots::Analytic)
    }
}

impl Default for Shots {
    fn default() -> Self {
        Shots::Analytic
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Analytic => f.write_str("analytic"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("analytic") {
            return Ok(Shots::Analytic);
        }
        let n: u32 = s
            .parse()
            .map_err(|_| invalid(format!("shots must be 'analytic' or a positive integer, got '{s}'")))?;
        Shots::finite(n)
    }
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Analytic => serializer.serialize_str("analytic"),
            Shots::Finite(n) => serializer.serialize_u32(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        let shots = match Repr::deserialize(deserializer)? {
            Repr::Int(n) if n >= 1 && n <= i64::from(u32::MAX) => Shots::Finite(n as u32),
            Repr::Int(n) => return Err(serde::de::Error::custom(format!("shots must be >= 1, got {n}"))),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom)?,
        };
        Ok(shots)
    }
}

/// Pauli-Z on one qubit with a shot budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSpec {
    pub qubit: usize,
    pub shots: Shots,
}
