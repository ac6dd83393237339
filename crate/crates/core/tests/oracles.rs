//! Checks against independent oracles: a dense matrix-chain simulator,
//! finite differences, an angular-scan separability test and closed-form
//! statistics.

use std::f64::consts::PI;

use num_complex::Complex64;
use xorbench::bench::{check_linear_separability, decision_grid, grid_deviation, loss_landscape_slice, DatasetSpec, Interval, DEFAULT_REGION};
use xorbench::classical::{sigmoid, train_classical, Classifier, ClassicalTrainConfig, LinearModel, MlpModel};
use xorbench::data::{gen_dataset_a, gen_dataset_b, gen_dataset_c, split_train_test, Point};
use xorbench::metrics::bce_loss;
use xorbench::model::TrainedModel;
use xorbench::qsim::Shots;
use xorbench::rng::SeededRng;
use xorbench::vqc::{train_vqc, vqc_gradient, vqc_loss, vqc_score, VqcModel, VqcTrainConfig};

type M4 = [[Complex64; 4]; 4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> M4 {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

fn matmul(a: &M4, b: &M4) -> M4 {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

// Textbook matrices, written out independently of the library.
fn rx(t: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (t / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

fn ry(t: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (t / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

fn rz(t: f64) -> [[Complex64; 2]; 2] {
    [[Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)]]
}

fn mul2(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn eye() -> [[Complex64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

/// ⟨Z₀⟩ of the full circuit as one product of explicit 4×4 matrices.
/// Basis index = 2·b₀ + b₁ (qubit 0 is the high bit).
fn dense_score(params: &[f64], x: Point) -> f64 {
    let mut cnot = [[c(0.0, 0.0); 4]; 4];
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[i][j] = c(1.0, 0.0);
    }
    let mut u = matmul(&kron(eye(), rx(PI * x[1])), &kron(rx(PI * x[0]), eye()));
    for layer in params.chunks(6) {
        // per qubit: Rz(c) first, then Ry(b), then Rz(a)
        let block = |a: f64, b: f64, cc: f64| mul2(rz(a), mul2(ry(b), rz(cc)));
        let q0 = block(layer[0], layer[1], layer[2]);
        let q1 = block(layer[3], layer[4], layer[5]);
        u = matmul(&kron(q0, q1), &u);
        u = matmul(&cnot, &u);
    }
    // |ψ⟩ = U|00⟩ is the first column of U
    let z0 = [1.0, 1.0, -1.0, -1.0];
    (0..4).map(|i| z0[i] * u[i][0].norm_sqr()).sum()
}

#[test]
fn vqc_score_matches_dense_matrix_chain() {
    let model = VqcModel::init(2, Shots::Analytic, 0).unwrap();
    let x = [0.3, 0.7];
    let m = vqc_score(&model, &x, &mut SeededRng::new(0)).unwrap();
    assert!((m - dense_score(model.params(), x)).abs() < 1e-10);

    let mut rng = SeededRng::new(31);
    for depth in 1..=4 {
        for _ in 0..25 {
            let params: Vec<f64> = (0..6 * depth).map(|_| rng.uniform_range(-PI, PI)).collect();
            let x = [rng.uniform_range(-0.5, 1.5), rng.uniform_range(-0.5, 1.5)];
            let model = VqcModel::new(depth, params.clone(), Shots::Analytic).unwrap();
            let m = vqc_score(&model, &x, &mut rng).unwrap();
            assert!((m - dense_score(&params, x)).abs() < 1e-10, "depth {depth}");
        }
    }
}

fn fd_vqc(model: &VqcModel, data: &xorbench::data::LabeledDataset, k: usize, h: f64) -> f64 {
    let at = |d: f64| {
        let mut p = model.params().to_vec();
        p[k] += d;
        vqc_loss(&VqcModel::new(model.depth(), p, Shots::Analytic).unwrap(), data, &mut SeededRng::new(0)).unwrap()
    };
    (at(h) - at(-h)) / (2.0 * h)
}

#[test]
fn zero_model_gradient_matches_finite_differences() {
    let model = VqcModel::zeros(1, Shots::Analytic).unwrap();
    let a = gen_dataset_a();
    let origin = a.select(&[0]);
    let g = vqc_gradient(&model, &origin, &mut SeededRng::new(0)).unwrap();
    for (k, gk) in g.iter().enumerate() {
        assert!(gk.is_finite());
        assert!((gk - fd_vqc(&model, &origin, k, 1e-5)).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn seed_zero_model_is_not_stationary_on_dataset_a() {
    let model = VqcModel::init(2, Shots::Analytic, 0).unwrap();
    let a = gen_dataset_a();
    let g = vqc_gradient(&model, &a, &mut SeededRng::new(0)).unwrap();
    let fd: Vec<f64> = (0..g.len()).map(|k| fd_vqc(&model, &a, k, 1e-5)).collect();
    let norm = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm > 1e-3, "finite-difference gradient norm {norm}");
    for (x, y) in g.iter().zip(&fd) {
        assert!((x - y).abs() < 1e-6);
    }
}

#[test]
fn arithmetic_examples() {
    let lr = LinearModel { w: [1.0, 1.0], b: -1.0 };
    assert!((lr.predict_proba(&[1.0, 1.0]) - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-12);
    assert!((lr.predict_proba(&[1.0, 1.0]) - 0.731059).abs() < 1e-6);
    let steep = LinearModel { w: [10.0, 10.0], b: -5.0 };
    assert!((steep.predict_proba(&[0.0, 0.0]) - 0.006693).abs() < 1e-6);
    assert!((sigmoid(-5.0) - 1.0 / (1.0 + 5.0f64.exp())).abs() < 1e-15);
    let expected = (-(0.9f64.ln()) - 0.8f64.ln()) / 2.0;
    assert!((bce_loss(&[0.9, 0.2], &[1, 0]).unwrap() - expected).abs() < 1e-12);
    assert!((expected - 0.164252).abs() < 1e-6);
}

#[test]
fn dataset_b_statistics_match_generating_distribution() {
    let b = gen_dataset_b(0.10, 100, 42).unwrap();
    for (corner, _) in xorbench::data::CORNERS {
        let pts: Vec<Point> = b
            .points
            .iter()
            .copied()
            .filter(|p| (p[0] - corner[0]).abs() < 0.5 && (p[1] - corner[1]).abs() < 0.5)
            .collect();
        assert_eq!(pts.len(), 100);
        for d in 0..2 {
            let mean = pts.iter().map(|p| p[d]).sum::<f64>() / 100.0;
            let sd = (pts.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
            assert!((mean - corner[d]).abs() < 0.03, "mean {mean}");
            assert!((0.08..=0.12).contains(&sd), "sd {sd}");
        }
    }
}

#[test]
fn dataset_c_class_fraction_matches_area() {
    // P(exactly one coordinate > t) = 2t(1−t) for independent uniforms
    let t = 0.5;
    let c = gen_dataset_c(10_000, t, 7).unwrap();
    let frac = c.labels.iter().filter(|&&y| y == 1).count() as f64 / 10_000.0;
    assert!((frac - 2.0 * t * (1.0 - t)).abs() < 0.02, "{frac}");
    let (train, test) = split_train_test(&gen_dataset_b(0.1, 100, 42).unwrap(), 0.8, 42, false).unwrap();
    assert_eq!((train.len(), test.len()), (320, 80));
}

/// Separable iff some direction `u` puts all of one class strictly below
/// all of the other when projected.
fn angular_scan(points: &[Point], labels: &[u8], directions: usize) -> bool {
    (0..directions).any(|k| {
        let a = 2.0 * PI * k as f64 / directions as f64;
        let (ux, uy) = (a.cos(), a.sin());
        let proj = |p: &Point| p[0] * ux + p[1] * uy;
        let max0 = points.iter().zip(labels).filter(|(_, &y)| y == 0).map(|(p, _)| proj(p)).fold(f64::NEG_INFINITY, f64::max);
        let min1 = points.iter().zip(labels).filter(|(_, &y)| y == 1).map(|(p, _)| proj(p)).fold(f64::INFINITY, f64::min);
        max0 < min1
    })
}

#[test]
fn separability_agrees_with_angular_scan() {
    let mut rng = SeededRng::new(77);
    let mut separable = 0;
    let mut done = 0;
    while done < 100 {
        let points: Vec<Point> = (0..8).map(|_| [rng.uniform(), rng.uniform()]).collect();
        let labels: Vec<u8> = (0..8).map(|_| rng.index(2) as u8).collect();
        if labels.iter().all(|&y| y == labels[0]) {
            continue;
        }
        done += 1;
        let exact = check_linear_separability(&points, &labels).unwrap();
        assert_eq!(exact.separable, angular_scan(&points, &labels, 10_000), "{points:?} {labels:?}");
        if let Some((w, b)) = exact.certificate {
            separable += 1;
            for (p, &y) in points.iter().zip(&labels) {
                assert_eq!(w[0] * p[0] + w[1] * p[1] + b > 0.0, y == 1);
            }
        }
    }
    assert!(separable > 0 && separable < 100, "both outcomes should occur, got {separable}");
}

#[test]
fn planted_linear_labelings_are_separable() {
    let mut rng = SeededRng::new(5);
    let mut n = 0;
    while n < 20 {
        let (w, b) = ([rng.standard_normal(), rng.standard_normal()], rng.standard_normal() * 0.5);
        let points: Vec<Point> = (0..12).map(|_| [rng.uniform_range(-1.0, 2.0), rng.uniform_range(-1.0, 2.0)]).collect();
        let labels: Vec<u8> = points.iter().map(|p| u8::from(w[0] * p[0] + w[1] * p[1] + b > 0.0)).collect();
        if labels.iter().all(|&y| y == labels[0]) {
            continue;
        }
        n += 1;
        assert!(check_linear_separability(&points, &labels).unwrap().separable);
    }
}

#[test]
fn trained_mlp_sign_pattern_on_dataset_a() {
    let a = gen_dataset_a();
    let corners = (Interval::new(-0.5, 1.5), Interval::new(-0.5, 1.5));
    let mut perfect = 0;
    for seed in 0..5 {
        let fit = train_classical(&MlpModel::init(4, seed).unwrap(), &a, &a, &ClassicalTrainConfig::mlp_default(seed)).unwrap();
        if fit.summary.train_acc < 1.0 {
            continue;
        }
        perfect += 1;
        // a 2×2 lattice on [−0.5, 1.5]² has its cell centres exactly on the corners
        let g = decision_grid(&TrainedModel::Mlp(fit.model), corners, (2, 2), None, &mut SeededRng::new(0)).unwrap();
        let signs: Vec<bool> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(ix, iy)| g.score(ix, iy) > 0.0).collect();
        assert_eq!(signs, vec![false, true, true, false], "seed {seed}");
    }
    assert!(perfect >= 1);
}

#[test]
fn lr_never_fits_all_four_xor_points() {
    let a = gen_dataset_a();
    for seed in 0..5 {
        for lr in [0.05, 0.5, 2.0] {
            let cfg = ClassicalTrainConfig { lr, epochs: 2000, seed, batch_size: None };
            let fit = train_classical(&LinearModel::init(seed), &a, &a, &cfg).unwrap();
            assert!(fit.summary.train_acc <= 0.75);
        }
    }
}

fn trained_l2(seed: u64) -> (VqcModel, xorbench::data::LabeledDataset) {
    let (train, test) = DatasetSpec::default().build().unwrap();
    let fit = train_vqc(
        &VqcTrainConfig::new(seed),
        &VqcModel::init(2, Shots::Analytic, seed).unwrap(),
        &train,
        &test,
    )
    .unwrap();
    (fit.model, train)
}

#[test]
fn analytic_and_4096_shot_grids_are_close() {
    let (model, _) = trained_l2(0);
    let m = TrainedModel::Vqc(model);
    let a = decision_grid(&m, DEFAULT_REGION, (25, 25), None, &mut SeededRng::new(0)).unwrap();
    let s = decision_grid(&m, DEFAULT_REGION, (25, 25), Some(Shots::Finite(4096)), &mut SeededRng::new(1)).unwrap();
    let d = grid_deviation(&a, &s).unwrap();
    // E|m̂ − m| ≤ sd = sqrt(1 − m²)/√4096 ≤ 1/64
    assert!(d.mad < 0.05 && d.mad <= 1.0 / 64.0 + 0.005, "mad {}", d.mad);
}

#[test]
fn trained_l2_sits_at_a_local_minimum() {
    let mut minima = 0;
    for seed in 0..5 {
        let (model, train) = trained_l2(seed);
        let slice = loss_landscape_slice(&model, &train, 0, 1, 0.2, 9).unwrap();
        let center = slice.values[4][4];
        let final_bce = vqc_loss(&model, &train, &mut SeededRng::new(0)).unwrap();
        assert!((center - final_bce).abs() < 1e-12);
        if slice.values.iter().flatten().all(|&v| center <= v) {
            minima += 1;
        }
    }
    assert!(minima >= 4, "{minima} of 5 seeds at a local minimum");
}
