//! Logistic regression and a one-hidden-layer sigmoid MLP, trained with
//! gradient descent on binary cross-entropy using exact backprop.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, Point};
use crate::error::{invalid, Error, Result};
use crate::metrics::{accuracy, bce_term, bce_term_grad, threshold};
use crate::optim::{Curves, FitSummary, GradientDescent, Optimizer};
use crate::rng::SeededRng;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// A differentiable binary classifier with a flat parameter vector.
pub trait Classifier {
    fn predict_proba(&self, x: &Point) -> f64;
    fn n_params(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]);
    /// Gradient of one clipped BCE term with respect to `params()`, added into `grad`.
    fn accumulate_grad(&self, x: &Point, y: u8, grad: &mut [f64]);

    fn predict(&self, x: &Point) -> u8 {
        threshold(self.predict_proba(x))
    }

    /// Mean BCE and its gradient over `data`.
    fn loss_and_grad(&self, data: &LabeledDataset) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.n_params()];
        let mut loss = 0.0;
        for (x, y) in data.iter() {
            loss += bce_term(self.predict_proba(x), y);
            self.accumulate_grad(x, y, &mut grad);
        }
        let n = data.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }

    /// (BCE, accuracy) on `data`.
    fn evaluate(&self, data: &LabeledDataset) -> (f64, f64) {
        let probs: Vec<f64> = data.points.iter().map(|x| self.predict_proba(x)).collect();
        let loss = probs.iter().zip(&data.labels).map(|(&p, &y)| bce_term(p, y)).sum::<f64>() / data.len() as f64;
        let preds: Vec<u8> = probs.iter().map(|&p| threshold(p)).collect();
        let acc = accuracy(&preds, &data.labels).unwrap_or(f64::NAN);
        (loss, acc)
    }
}

/// `p = σ(w·x + b)`; three parameters ordered `[w1, w2, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: [f64; 2],
    pub b: f64,
}

impl LinearModel {
    pub fn init(seed: u64) -> Self {
        let mut rng = SeededRng::new(seed);
        let w = [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)];
        let b = rng.uniform_range(-1.0, 1.0);
        Self { w, b }
    }

    pub fn logit(&self, x: &Point) -> f64 {
        self.w[0] * x[0] + self.w[1] * x[1] + self.b
    }
}

impl Classifier for LinearModel {
    fn predict_proba(&self, x: &Point) -> f64 {
        sigmoid(self.logit(x))
    }

    fn n_params(&self) -> usize {
        3
    }

    fn params(&self) -> Vec<f64> {
        vec![self.w[0], self.w[1], self.b]
    }

    fn set_params(&mut self, p: &[f64]) {
        self.w = [p[0], p[1]];
        self.b = p[2];
    }

    fn accumulate_grad(&self, x: &Point, y: u8, grad: &mut [f64]) {
        let p = self.predict_proba(x);
        let dz = bce_term_grad(p, y) * p * (1.0 - p);
        grad[0] += dz * x[0];
        grad[1] += dz * x[1];
        grad[2] += dz;
    }
}

/// `p = σ(w2·σ(W1·x + b1) + b2)` with `h` hidden units.
///
/// Flat parameter layout: `W1` row-major (`2h`), `b1` (`h`), `w2` (`h`), `b2`,
/// for `4h + 1` parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub w1: Vec<[f64; 2]>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpModel {
    pub fn zeros(hidden: usize) -> Result<Self> {
        if hidden == 0 {
            return Err(invalid("hidden units must be >= 1"));
        }
        Ok(Self {
            w1: vec![[0.0; 2]; hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        })
    }

    /// Uniform(−1, 1) weights from `seed`.
    pub fn init(hidden: usize, seed: u64) -> Result<Self> {
        let mut model = Self::zeros(hidden)?;
        let mut rng = SeededRng::new(seed);
        let params: Vec<f64> = (0..model.n_params()).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        model.set_params(&params);
        Ok(model)
    }

    pub fn hidden_units(&self) -> usize {
        self.b1.len()
    }

    fn hidden(&self, x: &Point) -> Vec<f64> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(w, b)| sigmoid(w[0] * x[0] + w[1] * x[1] + b))
            .collect()
    }
}

impl Classifier for MlpModel {
    fn predict_proba(&self, x: &Point) -> f64 {
        let a = self.hidden(x);
        let z: f64 = a.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2;
        sigmoid(z)
    }

    fn n_params(&self) -> usize {
        4 * self.hidden_units() + 1
    }

    fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for w in &self.w1 {
            p.extend_from_slice(w);
        }
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    fn set_params(&mut self, p: &[f64]) {
        let h = self.hidden_units();
        for (j, w) in self.w1.iter_mut().enumerate() {
            *w = [p[2 * j], p[2 * j + 1]];
        }
        self.b1.copy_from_slice(&p[2 * h..3 * h]);
        self.w2.copy_from_slice(&p[3 * h..4 * h]);
        self.b2 = p[4 * h];
    }

    fn accumulate_grad(&self, x: &Point, y: u8, grad: &mut [f64]) {
        let h = self.hidden_units();
        let a = self.hidden(x);
        let z: f64 = a.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2;
        let p = sigmoid(z);
        let dz = bce_term_grad(p, y) * p * (1.0 - p);
        for j in 0..h {
            let da = dz * self.w2[j];
            let dpre = da * a[j] * (1.0 - a[j]);
            grad[2 * j] += dpre * x[0];
            grad[2 * j + 1] += dpre * x[1];
            grad[2 * h + j] += dpre;
            grad[3 * h + j] += dz * a[j];
        }
        grad[4 * h] += dz;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    /// `None` is full-batch; `Some(k)` shuffles each epoch and steps per minibatch.
    pub batch_size: Option<usize>,
}

impl ClassicalTrainConfig {
    pub fn linear_default(seed: u64) -> Self {
        Self {
            lr: 0.1,
            epochs: 4000,
            seed,
            batch_size: None,
        }
    }

    pub fn mlp_default(seed: u64) -> Self {
        Self {
            lr: 0.5,
            epochs: 4000,
            seed,
            batch_size: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalFit<M> {
    pub model: M,
    pub curves: Curves,
    pub summary: FitSummary,
}

/// Gradient descent on mean BCE. Deterministic given the config seed.
pub fn train_classical<M: Classifier + Clone>(
    model0: &M,
    train: &LabeledDataset,
    test: &LabeledDataset,
    config: &ClassicalTrainConfig,
) -> Result<ClassicalFit<M>> {
    if train.is_empty() || test.is_empty() {
        return Err(invalid("train and test sets must be nonempty"));
    }
    if !(config.lr.is_finite() && config.lr > 0.0) {
        return Err(invalid(format!("learning rate must be positive, got {}", config.lr)));
    }
    if config.batch_size == Some(0) {
        return Err(invalid("batch size must be >= 1"));
    }
    let start = Instant::now();
    let mut model = model0.clone();
    let mut params = model.params();
    let mut opt = GradientDescent { lr: config.lr };
    let mut shuffle_rng = SeededRng::derived(config.seed, &[0x5EED]);
    let mut curves = Curves::default();

    for epoch in 0..config.epochs {
        match config.batch_size {
            None => {
                let (loss, grad) = model.loss_and_grad(train);
                if !loss.is_finite() {
                    return Err(Error::TrainingDiverged { epoch });
                }
                opt.step(&mut params, &grad);
                model.set_params(&params);
            }
            Some(k) => {
                let mut order: Vec<usize> = (0..train.len()).collect();
                for i in (1..order.len()).rev() {
                    order.swap(i, shuffle_rng.index(i + 1));
                }
                for chunk in order.chunks(k) {
                    let (loss, grad) = model.loss_and_grad(&train.select(chunk));
                    if !loss.is_finite() {
                        return Err(Error::TrainingDiverged { epoch });
                    }
                    opt.step(&mut params, &grad);
                    model.set_params(&params);
                }
            }
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDiverged { epoch });
        }
        let tr = model.evaluate(train);
        let te = model.evaluate(test);
        if !tr.0.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        curves.push(tr, te);
    }
    let train_time_s = start.elapsed().as_secs_f64();

    let (train_bce, train_acc) = model.evaluate(train);
    let (test_bce, test_acc) = model.evaluate(test);
    let summary = FitSummary {
        train_acc,
        test_acc,
        train_bce,
        test_bce,
        n_params: model.n_params(),
        train_time_s,
    };
    Ok(ClassicalFit {
        model,
        curves,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_dataset_a, gen_dataset_b, split_train_test};

    #[test]
    fn linear_predict_examples() {
        let zero = LinearModel { w: [0.0, 0.0], b: 0.0 };
        assert_eq!(zero.predict_proba(&[3.0, -2.0]), 0.5);
        assert_eq!(zero.predict(&[3.0, -2.0]), 0);

        let m = LinearModel { w: [1.0, 1.0], b: -1.0 };
        let expected = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((m.predict_proba(&[1.0, 1.0]) - expected).abs() < 1e-15);
        assert!((expected - 0.731059).abs() < 1e-6);

        let m = LinearModel { w: [10.0, 10.0], b: -5.0 };
        let expected = 1.0 / (1.0 + 5.0f64.exp());
        assert!((m.predict_proba(&[0.0, 0.0]) - expected).abs() < 1e-15);
        assert!((expected - 0.006693).abs() < 1e-6);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(LinearModel::init(0).n_params(), 3);
        assert_eq!(LinearModel::init(0).params().len(), 3);
        for h in [1, 2, 4, 8] {
            let m = MlpModel::init(h, 0).unwrap();
            assert_eq!(m.n_params(), 4 * h + 1);
            assert_eq!(m.params().len(), 4 * h + 1);
        }
        assert_eq!(MlpModel::init(4, 0).unwrap().n_params(), 17);
        assert!(MlpModel::zeros(0).is_err());
    }

    #[test]
    fn zero_mlp_outputs_half() {
        let m = MlpModel::zeros(4).unwrap();
        assert_eq!(m.predict_proba(&[0.3, 0.9]), 0.5);
    }

    #[test]
    fn hand_built_xor_network() {
        // hidden 0 fires for x1 AND NOT x2, hidden 1 for x2 AND NOT x1;
        // output is their OR
        let m = MlpModel {
            w1: vec![[20.0, -20.0], [-20.0, 20.0]],
            b1: vec![-10.0, -10.0],
            w2: vec![20.0, 20.0],
            b2: -10.0,
        };
        let a = gen_dataset_a();
        for (x, y) in a.iter() {
            assert_eq!(m.predict(x), y, "at {x:?}");
        }
    }

    #[test]
    fn outputs_strictly_inside_unit_interval() {
        for seed in 0..20 {
            let m = MlpModel::init(4, seed).unwrap();
            for x in [[0.0, 0.0], [5.0, -5.0], [-3.0, 8.0]] {
                let p = m.predict_proba(&x);
                assert!(p > 0.0 && p < 1.0);
            }
        }
    }

    #[test]
    fn params_roundtrip() {
        let m = MlpModel::init(3, 5).unwrap();
        let mut z = MlpModel::zeros(3).unwrap();
        z.set_params(&m.params());
        assert_eq!(z, m);
    }

    #[test]
    fn zero_epochs_leaves_model_unchanged() {
        let a = gen_dataset_a();
        let m0 = MlpModel::init(4, 1).unwrap();
        let cfg = ClassicalTrainConfig { epochs: 0, ..ClassicalTrainConfig::mlp_default(1) };
        let fit = train_classical(&m0, &a, &a, &cfg).unwrap();
        assert_eq!(fit.model, m0);
        assert!(fit.curves.is_empty());

        let l0 = LinearModel::init(2);
        let fit = train_classical(&l0, &a, &a, &ClassicalTrainConfig { epochs: 0, ..ClassicalTrainConfig::linear_default(2) }).unwrap();
        assert_eq!(fit.model, l0);
    }

    #[test]
    fn training_is_deterministic_and_reduces_loss() {
        let b = gen_dataset_b(0.1, 25, 42).unwrap();
        let (train, test) = split_train_test(&b, 0.8, 42, false).unwrap();
        let cfg = ClassicalTrainConfig { epochs: 300, ..ClassicalTrainConfig::mlp_default(3) };
        let m0 = MlpModel::init(4, 3).unwrap();
        let f1 = train_classical(&m0, &train, &test, &cfg).unwrap();
        let f2 = train_classical(&m0, &train, &test, &cfg).unwrap();
        assert_eq!(f1.model, f2.model);
        assert_eq!(f1.curves, f2.curves);
        assert_eq!(f1.curves.len(), 300);
        assert!(f1.curves.train_bce[299] < m0.evaluate(&train).0);
    }

    #[test]
    fn minibatch_mode_runs() {
        let b = gen_dataset_b(0.1, 25, 42).unwrap();
        let cfg = ClassicalTrainConfig { epochs: 5, batch_size: Some(16), ..ClassicalTrainConfig::mlp_default(3) };
        let fit = train_classical(&MlpModel::init(2, 0).unwrap(), &b, &b, &cfg).unwrap();
        assert_eq!(fit.curves.len(), 5);
        let bad = ClassicalTrainConfig { batch_size: Some(0), ..cfg };
        assert!(train_classical(&MlpModel::init(2, 0).unwrap(), &b, &b, &bad).is_err());
    }

    #[test]
    fn divergence_is_reported_with_epoch() {
        let a = gen_dataset_a();
        let m0 = LinearModel { w: [f64::NAN, 0.0], b: 0.0 };
        let err = train_classical(&m0, &a, &a, &ClassicalTrainConfig::linear_default(0)).unwrap_err();
        assert!(matches!(err, Error::TrainingDiverged { epoch: 0 }));
    }

    #[test]
    fn linear_boundary_depends_only_on_projection() {
        let m = LinearModel { w: [1.3, -0.4], b: 0.2 };
        let orth = [0.4, 1.3];
        for x in [[0.1, 0.2], [2.0, -1.0]] {
            for t in [-3.0, 0.5, 10.0] {
                let shifted = [x[0] + t * orth[0], x[1] + t * orth[1]];
                assert!((m.predict_proba(&x) - m.predict_proba(&shifted)).abs() < 1e-12);
            }
        }
    }
}
