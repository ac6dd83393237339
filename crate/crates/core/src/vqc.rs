//! Two-qubit variational quantum classifier.
//!
//! Circuit for input `x = (x1, x2)`:
//!
//! 1. Angle encoding `RX(π·x1)` on qubit 0 and `RX(π·x2)` on qubit 1.
//! 2. `L` layers; layer `ℓ` applies `RZ(a)·RY(b)·RZ(c)` (operator order, so
//!    `RZ(c)` acts first) to each qubit using parameters
//!    `θ[6ℓ + 3q .. 6ℓ + 3q + 3] = [a, b, c]`, then `CNOT(0 → 1)`.
//! 3. Score `m = ⟨Z₀⟩ ∈ [−1, 1]`, read out as `p(y=1|x) = (1 + m)/2`, so
//!    `m = +1` means class 1.
//!
//! Gradients use the parameter-shift rule, which is exact for the
//! half-angle rotation generators used here.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, Point};
use crate::error::{invalid, Error, Result};
use crate::metrics::{accuracy, bce_term, bce_term_grad, threshold};
use crate::optim::{make_optimizer, Curves, FitSummary, OptimizerKind};
use crate::qsim::{sample_z_from_expectation, Gate, Shots, StateVector};
use crate::rng::SeededRng;

pub use crate::metrics::bce_loss;

pub const N_QUBITS: usize = 2;
pub const OBSERVABLE_QUBIT: usize = 0;
pub const PARAMS_PER_LAYER: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcModel {
    depth: usize,
    params: Vec<f64>,
    pub shots: Shots,
}

impl VqcModel {
    pub fn new(depth: usize, params: Vec<f64>, shots: Shots) -> Result<Self> {
        if depth == 0 {
            return Err(invalid("ansatz depth must be >= 1"));
        }
        if params.len() != PARAMS_PER_LAYER * depth {
            return Err(invalid(format!(
                "depth {depth} needs {} parameters, got {}",
                PARAMS_PER_LAYER * depth,
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid("parameters must be finite"));
        }
        Ok(Self { depth, params, shots })
    }

    pub fn zeros(depth: usize, shots: Shots) -> Result<Self> {
        Self::new(depth, vec![0.0; PARAMS_PER_LAYER * depth], shots)
    }

    /// Angles drawn uniformly from `(−π, π]`.
    pub fn init(depth: usize, shots: Shots, seed: u64) -> Result<Self> {
        let mut rng = SeededRng::new(seed);
        let params = (0..PARAMS_PER_LAYER * depth)
            .map(|_| PI - 2.0 * PI * rng.uniform())
            .collect();
        Self::new(depth, params, shots)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(invalid("parameter length mismatch"));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid("parameters must be finite"));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn with_shots(&self, shots: Shots) -> Self {
        Self {
            shots,
            ..self.clone()
        }
    }
}

/// `RX(π·x2)` on qubit 1 and `RX(π·x1)` on qubit 0, applied to `|00⟩`.
pub fn encode_features(x: &Point) -> Result<StateVector> {
    if !(x[0].is_finite() && x[1].is_finite()) {
        return Err(invalid(format!("non-finite feature vector {x:?}")));
    }
    let mut state = StateVector::zero(N_QUBITS)?;
    state.apply_mut(&Gate::Rx { target: 0, angle: PI * x[0] })?;
    state.apply_mut(&Gate::Rx { target: 1, angle: PI * x[1] })?;
    Ok(state)
}

/// Gate list of the variational circuit for the given angles.
pub fn ansatz_gates(params: &[f64]) -> Result<Vec<Gate>> {
    if params.is_empty() || params.len() % PARAMS_PER_LAYER != 0 {
        return Err(invalid(format!(
            "parameter count {} is not a positive multiple of {PARAMS_PER_LAYER}",
            params.len()
        )));
    }
    let mut gates = Vec::with_capacity(params.len() / PARAMS_PER_LAYER * 7);
    for layer in params.chunks_exact(PARAMS_PER_LAYER) {
        for q in 0..N_QUBITS {
            let [a, b, c] = [layer[3 * q], layer[3 * q + 1], layer[3 * q + 2]];
            gates.push(Gate::Rz { target: q, angle: c });
            gates.push(Gate::Ry { target: q, angle: b });
            gates.push(Gate::Rz { target: q, angle: a });
        }
        gates.push(Gate::Cnot { control: 0, target: 1 });
    }
    Ok(gates)
}

fn run_ansatz(state: &mut StateVector, params: &[f64]) -> Result<()> {
    if state.n_qubits() != N_QUBITS {
        return Err(invalid(format!(
            "ansatz acts on {N_QUBITS} qubits, state has {}",
            state.n_qubits()
        )));
    }
    for gate in ansatz_gates(params)? {
        state.apply_mut(&gate)?;
    }
    Ok(())
}

pub fn apply_ansatz(state: &StateVector, model: &VqcModel) -> Result<StateVector> {
    let mut out = state.clone();
    run_ansatz(&mut out, &model.params)?;
    Ok(out)
}

fn exact_score(encoded: &StateVector, params: &[f64]) -> Result<f64> {
    let mut s = encoded.clone();
    run_ansatz(&mut s, params)?;
    s.expectation_z(OBSERVABLE_QUBIT)
}

fn measured(z: f64, shots: Shots, rng: &mut SeededRng) -> f64 {
    match shots {
        Shots::Analytic => z,
        Shots::Finite(n) => sample_z_from_expectation(z, n, rng),
    }
}

/// `m = f_θ(x) = ⟨Z₀⟩`, exact or sampled according to the model's shots.
pub fn vqc_score(model: &VqcModel, x: &Point, rng: &mut SeededRng) -> Result<f64> {
    let z = exact_score(&encode_features(x)?, &model.params)?;
    Ok(measured(z, model.shots, rng))
}

/// `p = (1 + m)/2`. Overshoot up to 1e-9 past ±1 is clamped.
pub fn vqc_probability(m: f64) -> Result<f64> {
    if !m.is_finite() || m.abs() > 1.0 + 1e-9 {
        return Err(invalid(format!("score {m} outside [-1, 1]")));
    }
    Ok((1.0 + m.clamp(-1.0, 1.0)) / 2.0)
}

/// Per-point score and parameter-shift derivatives `∂m/∂θ_k`.
fn score_and_shift_grad(
    params: &[f64],
    x: &Point,
    shots: Shots,
    rng: &mut SeededRng,
) -> Result<(f64, Vec<f64>)> {
    let encoded = encode_features(x)?;
    let m = measured(exact_score(&encoded, params)?, shots, rng);
    let mut shifted = params.to_vec();
    let mut dm = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        let orig = shifted[k];
        shifted[k] = orig + FRAC_PI_2;
        let plus = measured(exact_score(&encoded, &shifted)?, shots, rng);
        shifted[k] = orig - FRAC_PI_2;
        let minus = measured(exact_score(&encoded, &shifted)?, shots, rng);
        shifted[k] = orig;
        dm.push((plus - minus) / 2.0);
    }
    Ok((m, dm))
}

/// Gradient of mean BCE over `batch`, chained through `p = (1+m)/2` and the
/// parameter-shift derivative. Shot-mode models use sampled expectations
/// for every term.
pub fn vqc_gradient(model: &VqcModel, batch: &LabeledDataset, rng: &mut SeededRng) -> Result<Vec<f64>> {
    vqc_gradient_with(model, batch, model.shots, rng)
}

fn vqc_gradient_with(
    model: &VqcModel,
    batch: &LabeledDataset,
    shots: Shots,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(invalid("gradient batch is empty"));
    }
    let mut grad = vec![0.0; model.n_params()];
    for (x, y) in batch.iter() {
        let (m, dm) = score_and_shift_grad(&model.params, x, shots, rng)?;
        let p = vqc_probability(m)?;
        let dl_dm = bce_term_grad(p, y) * 0.5;
        for (g, d) in grad.iter_mut().zip(&dm) {
            *g += dl_dm * d;
        }
    }
    let n = batch.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok(grad)
}

/// Mean BCE of the model on `data` (sampled when the model has finite shots).
pub fn vqc_loss(model: &VqcModel, data: &LabeledDataset, rng: &mut SeededRng) -> Result<f64> {
    Ok(vqc_evaluate(model, data, rng)?.0)
}

/// (BCE, accuracy) on `data`.
pub fn vqc_evaluate(model: &VqcModel, data: &LabeledDataset, rng: &mut SeededRng) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(invalid("evaluation set is empty"));
    }
    let mut loss = 0.0;
    let mut preds = Vec::with_capacity(data.len());
    for (x, y) in data.iter() {
        let p = vqc_probability(vqc_score(model, x, rng)?)?;
        loss += bce_term(p, y);
        preds.push(threshold(p));
    }
    Ok((loss / data.len() as f64, accuracy(&preds, &data.labels)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcTrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_seed: u64,
    /// Use exact gradients even when the model evaluates with finite shots.
    #[serde(default)]
    pub analytic_gradients: bool,
}

impl VqcTrainConfig {
    pub fn new(init_seed: u64) -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            learning_rate: 0.1,
            epochs: 150,
            init_seed,
            analytic_gradients: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(invalid(format!(
                "learning rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VqcFit {
    pub model: VqcModel,
    pub curves: Curves,
    pub summary: FitSummary,
}

/// Full-batch training. Sampling noise, if any, comes from a stream derived
/// from the init seed, so runs are reproducible.
pub fn train_vqc(
    config: &VqcTrainConfig,
    model0: &VqcModel,
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<VqcFit> {
    config.validate()?;
    if train.is_empty() || test.is_empty() {
        return Err(invalid("train and test sets must be nonempty"));
    }
    let start = Instant::now();
    let mut model = model0.clone();
    let mut params = model.params.clone();
    let mut opt = make_optimizer(config.optimizer, config.learning_rate, params.len());
    let mut rng = SeededRng::derived(config.init_seed, &[0x5407]);
    let grad_shots = if config.analytic_gradients {
        Shots::Analytic
    } else {
        model.shots
    };
    let mut curves = Curves::default();

    for epoch in 0..config.epochs {
        let grad = vqc_gradient_with(&model, train, grad_shots, &mut rng)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingDiverged { epoch });
        }
        opt.step(&mut params, &grad);
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDiverged { epoch });
        }
        model.params.copy_from_slice(&params);
        let tr = vqc_evaluate(&model, train, &mut rng)?;
        let te = vqc_evaluate(&model, test, &mut rng)?;
        if !tr.0.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        curves.push(tr, te);
    }
    let train_time_s = start.elapsed().as_secs_f64();

    let (train_bce, train_acc) = vqc_evaluate(&model, train, &mut rng)?;
    let (test_bce, test_acc) = vqc_evaluate(&model, test, &mut rng)?;
    let summary = FitSummary {
        train_acc,
        test_acc,
        train_bce,
        test_bce,
        n_params: model.n_params(),
        train_time_s,
    };
    Ok(VqcFit {
        model,
        curves,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_dataset_a;

    fn z0(model: &VqcModel, x: &Point) -> f64 {
        vqc_score(model, x, &mut SeededRng::new(0)).unwrap()
    }

    #[test]
    fn encoding_examples() {
        let s = encode_features(&[0.0, 0.0]).unwrap();
        assert_eq!(s, StateVector::zero(2).unwrap());

        let s = encode_features(&[1.0, 0.0]).unwrap();
        assert!((s.expectation_z(0).unwrap() + 1.0).abs() < 1e-12);
        assert!((s.expectation_z(1).unwrap() - 1.0).abs() < 1e-12);

        let s = encode_features(&[0.5, 0.5]).unwrap();
        assert!(s.expectation_z(0).unwrap().abs() < 1e-12);
        assert!(s.expectation_z(1).unwrap().abs() < 1e-12);

        assert!(encode_features(&[f64::NAN, 0.0]).is_err());
        assert!(encode_features(&[0.0, f64::INFINITY]).is_err());
        // out-of-range inputs are fine, the rotation is periodic
        assert!(encode_features(&[3.5, -2.0]).is_ok());
    }

    #[test]
    fn ansatz_examples() {
        let zero = StateVector::zero(2).unwrap();
        let m = VqcModel::zeros(1, Shots::Analytic).unwrap();
        assert_eq!(apply_ansatz(&zero, &m).unwrap(), zero);

        let m = VqcModel::new(1, vec![0.0, PI, 0.0, 0.0, 0.0, 0.0], Shots::Analytic).unwrap();
        let out = apply_ansatz(&zero, &m).unwrap();
        assert!((out.amplitudes()[3].norm() - 1.0).abs() < 1e-12, "expected |11⟩");
        assert!((out.expectation_z(0).unwrap() + 1.0).abs() < 1e-12);

        let m = VqcModel::init(2, Shots::Analytic, 9).unwrap();
        let out = apply_ansatz(&encode_features(&[0.2, 0.8]).unwrap(), &m).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);

        let three = StateVector::zero(3).unwrap();
        assert!(apply_ansatz(&three, &m).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(VqcModel::new(1, vec![0.0; 5], Shots::Analytic).is_err());
        assert!(VqcModel::new(0, vec![], Shots::Analytic).is_err());
        assert!(VqcModel::new(1, vec![f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0], Shots::Analytic).is_err());
        for l in 1..=4 {
            assert_eq!(VqcModel::init(l, Shots::Analytic, 0).unwrap().n_params(), 6 * l);
        }
        let m = VqcModel::init(2, Shots::Analytic, 0).unwrap();
        assert!(m.params().iter().all(|p| *p > -PI && *p <= PI));
    }

    #[test]
    fn score_examples() {
        let m = VqcModel::zeros(1, Shots::Analytic).unwrap();
        assert!((z0(&m, &[0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((z0(&m, &[1.0, 0.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn probability_examples() {
        assert_eq!(vqc_probability(1.0).unwrap(), 1.0);
        assert_eq!(vqc_probability(-1.0).unwrap(), 0.0);
        assert_eq!(vqc_probability(0.0).unwrap(), 0.5);
        assert_eq!(vqc_probability(1.0 + 5e-10).unwrap(), 1.0);
        assert!(vqc_probability(1.01).is_err());
        assert!(vqc_probability(f64::NAN).is_err());
    }

    #[test]
    fn duplicated_batch_has_same_gradient() {
        let m = VqcModel::init(2, Shots::Analytic, 4).unwrap();
        let a = gen_dataset_a();
        let single = a.select(&[1]);
        let double = a.select(&[1, 1]);
        let g1 = vqc_gradient(&m, &single, &mut SeededRng::new(0)).unwrap();
        let g2 = vqc_gradient(&m, &double, &mut SeededRng::new(0)).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_batch_is_rejected() {
        let m = VqcModel::zeros(1, Shots::Analytic).unwrap();
        let empty = gen_dataset_a().select(&[]);
        assert!(vqc_gradient(&m, &empty, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn zero_epochs_returns_initial_model() {
        let a = gen_dataset_a();
        let m0 = VqcModel::init(2, Shots::Analytic, 3).unwrap();
        let cfg = VqcTrainConfig { epochs: 0, ..VqcTrainConfig::new(3) };
        let fit = train_vqc(&cfg, &m0, &a, &a).unwrap();
        assert_eq!(fit.model, m0);
        assert!(fit.curves.is_empty());
    }

    #[test]
    fn learning_rate_is_validated() {
        let a = gen_dataset_a();
        let m0 = VqcModel::init(1, Shots::Analytic, 3).unwrap();
        for lr in [0.0, 1.5, f64::NAN] {
            let cfg = VqcTrainConfig { learning_rate: lr, ..VqcTrainConfig::new(3) };
            assert!(train_vqc(&cfg, &m0, &a, &a).is_err());
        }
    }

    #[test]
    fn shot_training_is_deterministic() {
        let a = gen_dataset_a();
        let m0 = VqcModel::init(2, Shots::Finite(64), 1).unwrap();
        let cfg = VqcTrainConfig { epochs: 5, ..VqcTrainConfig::new(1) };
        let f1 = train_vqc(&cfg, &m0, &a, &a).unwrap();
        let f2 = train_vqc(&cfg, &m0, &a, &a).unwrap();
        assert_eq!(f1.model, f2.model);
        assert_eq!(f1.curves, f2.curves);
    }

    #[test]
    fn clean_xor_is_learned_at_depth_two() {
        let a = gen_dataset_a();
        let m0 = VqcModel::init(2, Shots::Analytic, 0).unwrap();
        let fit = train_vqc(&VqcTrainConfig::new(0), &m0, &a, &a).unwrap();
        assert_eq!(fit.summary.train_acc, 1.0);
    }
}
