//! Full-batch optimizers and per-epoch learning curves.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam,
    Gd,
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Gd => "gd",
        })
    }
}

pub trait Optimizer {
    fn step(&mut self, params: &mut [f64], grad: &[f64]);
}

/// Plain gradient descent: `θ ← θ − lr·g`.
#[derive(Debug, Clone)]
pub struct GradientDescent {
    pub lr: f64,
}

impl Optimizer for GradientDescent {
    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        for (p, g) in params.iter_mut().zip(grad) {
            *p -= self.lr * g;
        }
    }
}

/// Adam with bias-corrected moments.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(lr: f64, n_params: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }
}

impl Optimizer for Adam {
    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

pub fn make_optimizer(kind: OptimizerKind, lr: f64, n_params: usize) -> Box<dyn Optimizer + Send> {
    match kind {
        OptimizerKind::Adam => Box::new(Adam::new(lr, n_params)),
        OptimizerKind::Gd => Box::new(GradientDescent { lr }),
    }
}

/// One entry per completed epoch, measured after that epoch's update.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    pub train_bce: Vec<f64>,
    pub test_bce: Vec<f64>,
    pub train_acc: Vec<f64>,
    pub test_acc: Vec<f64>,
}

impl Curves {
    pub fn len(&self) -> usize {
        self.train_bce.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_bce.is_empty()
    }

    pub fn push(&mut self, train: (f64, f64), test: (f64, f64)) {
        self.train_bce.push(train.0);
        self.train_acc.push(train.1);
        self.test_bce.push(test.0);
        self.test_acc.push(test.1);
    }
}

/// Final metrics of a training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub train_acc: f64,
    pub test_acc: f64,
    pub train_bce: f64,
    pub test_bce: f64,
    pub n_params: usize,
    pub train_time_s: f64,
}
