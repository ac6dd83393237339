//! Fast self-check suite behind `xorbench verify`.
//!
//! Each check is deterministic, so two runs print identical reports.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::bench::check_linear_separability;
use crate::classical::{Classifier, LinearModel, MlpModel};
use crate::data::{gen_dataset_a, gen_dataset_b, gen_dataset_c, split_train_test, LabeledDataset, Point, CORNERS};
use crate::error::Result;
use crate::qsim::{unitarity_error, Gate, Matrix2, Shots, StateVector};
use crate::rng::SeededRng;
use crate::vqc::{vqc_gradient, vqc_loss, vqc_score, VqcModel};

const FD_STEP: f64 = 1e-5;

/// Test hooks for exercising the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    /// Scales one entry of every rotation matrix before the unitarity check.
    pub corrupt_unitarity: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.failed();
        if failed.is_empty() {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{} of {} checks failed: {}", failed.len(), self.checks.len(), failed.join(", "))
        }
    }
}

pub fn run_verify(faults: FaultInjection) -> VerifyReport {
    type Check = fn(FaultInjection) -> Result<(bool, String)>;
    let checks: [(&'static str, Check); 11] = [
        ("gate-unitarity", check_unitarity),
        ("norm-preservation", |_| check_norm()),
        ("cnot-involution", |_| check_cnot()),
        ("born-shot-scaling", |_| check_born()),
        ("vqc-periodicity", |_| check_periodicity()),
        ("vqc-parameter-shift", |_| check_vqc_gradients()),
        ("lr-backprop", |_| check_classical(false)),
        ("mlp-backprop", |_| check_classical(true)),
        ("xor-inseparable", |_| check_xor_separability()),
        ("separable-labelings", |_| check_random_separable()),
        ("dataset-determinism", |_| check_datasets()),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, f)| match f(faults) {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
        })
        .collect();
    VerifyReport { checks }
}

fn check_unitarity(faults: FaultInjection) -> Result<(bool, String)> {
    let mut rng = SeededRng::new(11);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let angle = rng.uniform_range(-4.0 * PI, 4.0 * PI);
        for gate in [Gate::Rx { target: 0, angle }, Gate::Ry { target: 0, angle }, Gate::Rz { target: 0, angle }] {
            let mut m: Matrix2 = gate.matrix().expect("rotation gate");
            if faults.corrupt_unitarity {
                m[0][0] *= Complex64::new(1.01, 0.0);
            }
            worst = worst.max(unitarity_error(&m));
        }
    }
    Ok((worst < 1e-12, format!("max |UU†-I| = {worst:.3e} over 600 matrices")))
}

fn random_gate(n: usize, rng: &mut SeededRng) -> Gate {
    let target = rng.index(n);
    let angle = rng.uniform_range(-PI, PI);
    match rng.index(if n > 1 { 4 } else { 3 }) {
        0 => Gate::Rx { target, angle },
        1 => Gate::Ry { target, angle },
        2 => Gate::Rz { target, angle },
        _ => Gate::Cnot { control: (target + 1 + rng.index(n - 1)) % n, target },
    }
}

fn check_norm() -> Result<(bool, String)> {
    let mut rng = SeededRng::new(12);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = 1 + trial % 4;
        let mut s = StateVector::zero(n)?;
        for _ in 0..50 {
            s.apply_mut(&random_gate(n, &mut rng))?;
        }
        worst = worst.max((s.norm_sqr() - 1.0).abs());
    }
    Ok((worst < 1e-8, format!("max |norm-1| = {worst:.3e} over 200 circuits of 50 gates")))
}

fn check_cnot() -> Result<(bool, String)> {
    let mut rng = SeededRng::new(13);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut s = StateVector::zero(3)?;
        for _ in 0..10 {
            s.apply_mut(&random_gate(3, &mut rng))?;
        }
        let control = rng.index(3);
        let cnot = Gate::Cnot { control, target: (control + 1 + rng.index(2)) % 3 };
        let back = s.apply(&cnot)?.apply(&cnot)?;
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok((worst < 1e-12, format!("max |CNOT²ψ-ψ| = {worst:.3e} over 50 states")))
}

/// Standard error of the shot estimator on an equal superposition should
/// track `1/√shots`; the ratio must stay within a factor of two.
fn check_born() -> Result<(bool, String)> {
    let s = StateVector::zero(1)?.apply(&Gate::Rx { target: 0, angle: PI / 2.0 })?;
    let mut worst_ratio: f64 = 1.0;
    for k in 4..=16 {
        let shots = 1u32 << k;
        let samples: Vec<f64> = (0..100)
            .map(|seed| s.sample_expectation_z(0, shots, &mut SeededRng::derived(seed, &[k])))
            .collect::<Result<_>>()?;
        let (_, sd) = crate::metrics::mean_std(&samples);
        let ratio = sd * f64::from(shots).sqrt();
        if (ratio.ln()).abs() > worst_ratio.ln().abs() {
            worst_ratio = ratio;
        }
    }
    let ok = (0.5..=2.0).contains(&worst_ratio);
    Ok((ok, format!("worst sd·√shots = {worst_ratio:.3} (ideal 1) for shots 2^4..2^16")))
}

fn check_periodicity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut rng = SeededRng::new(0);
    for depth in [1, 2] {
        let m = VqcModel::init(depth, Shots::Analytic, 5)?;
        let x: Point = [0.3, 0.7];
        let base = vqc_score(&m, &x, &mut rng)?;
        for k in 0..m.n_params() {
            let mut p = m.params().to_vec();
            p[k] += TAU;
            let shifted = VqcModel::new(depth, p, Shots::Analytic)?;
            worst = worst.max((vqc_score(&shifted, &x, &mut rng)? - base).abs());
        }
    }
    Ok((worst < 1e-10, format!("max |f(θ+2πe_k)-f(θ)| = {worst:.3e}")))
}

fn small_batch(seed: u64) -> Result<LabeledDataset> {
    gen_dataset_b(0.3, 2, seed)
}

fn check_vqc_gradients() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut rng = SeededRng::new(0);
    for depth in [1, 2] {
        for i in 0..20u64 {
            let model = VqcModel::init(depth, Shots::Analytic, 100 + i)?;
            let batch = small_batch(200 + i)?;
            let g = vqc_gradient(&model, &batch, &mut rng)?;
            for (k, gk) in g.iter().enumerate() {
                let at = |d: f64| -> Result<f64> {
                    let mut p = model.params().to_vec();
                    p[k] += d;
                    vqc_loss(&VqcModel::new(depth, p, Shots::Analytic)?, &batch, &mut SeededRng::new(0))
                };
                let fd = (at(FD_STEP)? - at(-FD_STEP)?) / (2.0 * FD_STEP);
                worst = worst.max((gk - fd).abs());
            }
        }
    }
    Ok((worst < 1e-5, format!("max |shift-fd| = {worst:.3e} over 40 models")))
}

fn check_classical(mlp: bool) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let batch = small_batch(300 + i)?;
        let mut model: Box<dyn Classifier> = if mlp {
            Box::new(MlpModel::init(1 + (i as usize % 8), 400 + i)?)
        } else {
            Box::new(LinearModel::init(400 + i))
        };
        let (_, g) = model.loss_and_grad(&batch);
        let p0 = model.params();
        for k in 0..p0.len() {
            let mut at = |d: f64| {
                let mut p = p0.clone();
                p[k] += d;
                model.set_params(&p);
                model.loss_and_grad(&batch).0
            };
            let fd = (at(FD_STEP) - at(-FD_STEP)) / (2.0 * FD_STEP);
            worst = worst.max((g[k] - fd).abs() / g[k].abs().max(1.0));
        }
        model.set_params(&p0);
    }
    Ok((worst < 1e-6, format!("max relative |backprop-fd| = {worst:.3e} over 20 models")))
}

fn check_xor_separability() -> Result<(bool, String)> {
    let points: Vec<Point> = CORNERS.iter().map(|c| c.0).collect();
    let mut wrong = Vec::new();
    for mask in 1u8..15 {
        let labels: Vec<u8> = (0..4).map(|i| (mask >> i) & 1).collect();
        let expect_inseparable = labels == [0, 1, 1, 0] || labels == [1, 0, 0, 1];
        let sep = check_linear_separability(&points, &labels)?;
        if sep.separable == expect_inseparable {
            wrong.push(format!("{labels:?}"));
        }
    }
    let a = gen_dataset_a();
    let a_sep = check_linear_separability(&a.points, &a.labels)?.separable;
    let ok = wrong.is_empty() && !a_sep;
    let detail = if ok {
        "XOR and XNOR inseparable, other 12 labelings separable".to_string()
    } else {
        format!("misclassified labelings: {}", wrong.join(" "))
    };
    Ok((ok, detail))
}

fn check_random_separable() -> Result<(bool, String)> {
    let mut rng = SeededRng::new(14);
    let mut failures = 0;
    let mut done = 0;
    while done < 20 {
        let w = [rng.standard_normal(), rng.standard_normal()];
        let b = rng.uniform_range(-1.0, 1.0);
        let points: Vec<Point> = (0..10).map(|_| [rng.uniform_range(-1.0, 2.0), rng.uniform_range(-1.0, 2.0)]).collect();
        let labels: Vec<u8> = points.iter().map(|p| u8::from(w[0] * p[0] + w[1] * p[1] + b > 0.0)).collect();
        if labels.iter().all(|&l| l == labels[0]) {
            continue;
        }
        done += 1;
        let sep = check_linear_separability(&points, &labels)?;
        let certified = sep.certificate.is_some_and(|(cw, cb)| {
            points.iter().zip(&labels).all(|(p, &l)| (cw[0] * p[0] + cw[1] * p[1] + cb > 0.0) == (l == 1))
        });
        if !(sep.separable && certified) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{failures} of 20 planted linear labelings rejected")))
}

fn check_datasets() -> Result<(bool, String)> {
    let b1 = gen_dataset_b(0.1, 100, 42)?;
    let b2 = gen_dataset_b(0.1, 100, 42)?;
    let c1 = gen_dataset_c(400, 0.5, 7)?;
    let c2 = gen_dataset_c(400, 0.5, 7)?;
    let regen = LabeledDataset::regenerate(&b1.provenance)? == b1 && LabeledDataset::regenerate(&c1.provenance)? == c1;
    let s1 = split_train_test(&b1, 0.8, 42, false)?;
    let s2 = split_train_test(&b1, 0.8, 42, false)?;
    let ok = b1 == b2 && c1 == c2 && regen && s1 == s2;
    Ok((ok, format!("B, C, provenance regeneration and split repeat exactly: {ok}")))
}
