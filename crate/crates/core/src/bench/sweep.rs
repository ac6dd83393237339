//! Robustness sweeps: one training cell per (value, model, seed), aggregated
//! to mean ± sample std per (value, model).

use serde::{Deserialize, Serialize};

use super::runner::{run_cells, Cell, CellOutcome, DatasetSpec, TrainSettings};
use crate::data::Variant;
use crate::error::{invalid, Result};
use crate::metrics::mean_std;
use crate::model::ModelSpec;
use crate::qsim::Shots;

pub const DEFAULT_SIGMAS: [f64; 5] = [0.0, 0.05, 0.10, 0.20, 0.30];
pub const DEFAULT_SIZES: [usize; 5] = [25, 50, 100, 250, 500];
pub const DEFAULT_SHOTS: [Shots; 3] = [Shots::Analytic, Shots::Finite(128), Shots::Finite(1024)];
pub const DEFAULT_WIDTHS: [usize; 4] = [1, 2, 4, 8];
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

pub fn default_thresholds() -> Vec<f64> {
    (1..=9).map(|k| f64::from(k) / 10.0).collect()
}

pub fn extended_seeds() -> Vec<u64> {
    (0..20).collect()
}

/// LR, MLP(h=4), VQC(L=1) and VQC(L=2), all analytic.
pub fn comparison_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Lr,
        ModelSpec::Mlp { hidden: 4 },
        ModelSpec::Vqc { depth: 1, shots: Shots::Analytic },
        ModelSpec::Vqc { depth: 2, shots: Shots::Analytic },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample std; `None` with fewer than two finished seeds.
    pub std: Option<f64>,
}

impl Aggregate {
    fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        Self {
            mean,
            std: (values.len() >= 2).then_some(std),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: String,
    pub model: String,
    pub n_seeds: usize,
    pub n_failed: usize,
    pub train_acc: Aggregate,
    pub test_acc: Aggregate,
    pub test_bce: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub swept_variable: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, value: &str, model: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.value == value && r.model == model)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "variable,value,model,n_seeds,n_failed,mean_train_acc,std_train_acc,mean_test_acc,std_test_acc,mean_test_bce,std_test_bce\n",
        );
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                self.swept_variable,
                r.value,
                r.model,
                r.n_seeds,
                r.n_failed,
                r.train_acc.mean,
                opt(r.train_acc.std),
                r.test_acc.mean,
                opt(r.test_acc.std),
                r.test_bce.mean,
                opt(r.test_bce.std),
            ));
        }
        out
    }
}

/// One x-axis value of a sweep and the cells trained for it.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub result: SweepResult,
    pub outcomes: Vec<CellOutcome>,
}

/// Trains every cell and aggregates per (value, model label), keeping the
/// order in which values and models first appear.
pub fn run_sweep(
    variable: &str,
    points: Vec<SweepPoint>,
    settings: &TrainSettings,
    jobs: usize,
    timed: bool,
) -> Result<SweepOutput> {
    if points.is_empty() || points.iter().any(|p| p.cells.is_empty()) {
        return Err(invalid(format!("sweep over '{variable}' has no cells")));
    }
    let cells: Vec<Cell> = points.iter().flat_map(|p| p.cells.iter().cloned()).collect();
    let outcomes = run_cells(&cells, settings, jobs, timed)?;

    let mut rows = Vec::new();
    let mut offset = 0;
    for point in &points {
        let slice = &outcomes[offset..offset + point.cells.len()];
        offset += point.cells.len();
        let mut labels: Vec<String> = Vec::new();
        for c in &point.cells {
            let l = c.model.label();
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
        for label in labels {
            let group: Vec<&CellOutcome> = slice.iter().filter(|o| o.record.model.label() == label).collect();
            let done: Vec<_> = group.iter().filter_map(|o| o.record.summary).collect();
            rows.push(SweepRow {
                value: point.value.clone(),
                model: label,
                n_seeds: group.len(),
                n_failed: group.len() - done.len(),
                train_acc: Aggregate::of(&done.iter().map(|s| s.train_acc).collect::<Vec<_>>()),
                test_acc: Aggregate::of(&done.iter().map(|s| s.test_acc).collect::<Vec<_>>()),
                test_bce: Aggregate::of(&done.iter().map(|s| s.test_bce).collect::<Vec<_>>()),
            });
        }
    }
    Ok(SweepOutput {
        result: SweepResult {
            swept_variable: variable.to_string(),
            rows,
        },
        outcomes,
    })
}

fn check_lists<T>(name: &str, values: &[T], seeds: &[u64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(format!("{name} list is empty")));
    }
    if seeds.is_empty() {
        return Err(invalid("seed list is empty"));
    }
    Ok(())
}

fn cells_for(models: &[ModelSpec], data: &DatasetSpec, seeds: &[u64]) -> Vec<Cell> {
    models
        .iter()
        .flat_map(|&model| {
            seeds.iter().map(move |&seed| Cell {
                model,
                data: data.clone(),
                seed,
            })
        })
        .collect()
}

pub fn sweep_noise(base: &DatasetSpec, sigmas: &[f64], models: &[ModelSpec], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("sigma", sigmas, seeds)?;
    Ok(sigmas
        .iter()
        .map(|&sigma| {
            let data = DatasetSpec { variant: Variant::B, sigma, ..base.clone() };
            SweepPoint { value: sigma.to_string(), cells: cells_for(models, &data, seeds) }
        })
        .collect())
}

pub fn sweep_size(base: &DatasetSpec, sizes: &[usize], models: &[ModelSpec], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("size", sizes, seeds)?;
    Ok(sizes
        .iter()
        .map(|&n| {
            let data = DatasetSpec { variant: Variant::B, n_per_cluster: n, ..base.clone() };
            SweepPoint { value: n.to_string(), cells: cells_for(models, &data, seeds) }
        })
        .collect())
}

pub fn sweep_shots(base: &DatasetSpec, depths: &[usize], shots: &[Shots], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("shots", shots, seeds)?;
    check_lists("depth", depths, seeds)?;
    Ok(shots
        .iter()
        .map(|&s| {
            let models: Vec<ModelSpec> = depths.iter().map(|&depth| ModelSpec::Vqc { depth, shots: s }).collect();
            SweepPoint { value: s.to_string(), cells: cells_for(&models, base, seeds) }
        })
        .collect())
}

/// One point per seed plus nothing else; the per-seed rows report no std.
pub fn sweep_seeds(base: &DatasetSpec, models: &[ModelSpec], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("model", models, seeds)?;
    Ok(seeds
        .iter()
        .map(|&seed| SweepPoint { value: seed.to_string(), cells: cells_for(models, base, &[seed]) })
        .collect())
}

pub fn sweep_width(base: &DatasetSpec, widths: &[usize], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("width", widths, seeds)?;
    Ok(widths
        .iter()
        .map(|&hidden| SweepPoint {
            value: hidden.to_string(),
            cells: cells_for(&[ModelSpec::Mlp { hidden }], base, seeds),
        })
        .collect())
}

pub fn sweep_threshold(base: &DatasetSpec, thresholds: &[f64], models: &[ModelSpec], seeds: &[u64]) -> Result<Vec<SweepPoint>> {
    check_lists("threshold", thresholds, seeds)?;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let data = DatasetSpec { variant: Variant::C, threshold_t: t, ..base.clone() };
            SweepPoint { value: t.to_string(), cells: cells_for(models, &data, seeds) }
        })
        .collect())
}
