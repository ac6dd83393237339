//! Independent training cells and the worker pool that executes them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::RunRecord;
use crate::classical::{train_classical, ClassicalTrainConfig, LinearModel, MlpModel};
use crate::data::{
    gen_dataset_a, gen_dataset_b, gen_dataset_c, split_train_test, LabeledDataset, Variant, DEFAULT_C_POINTS,
    DEFAULT_DATA_SEED, DEFAULT_THRESHOLD,
};
use crate::error::{invalid, Error, Result};
use crate::model::{ModelSpec, TrainedModel};
use crate::optim::{Curves, FitSummary, OptimizerKind};
use crate::vqc::{train_vqc, VqcModel, VqcTrainConfig};

/// How to build the train/test data of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub variant: Variant,
    pub sigma: f64,
    pub n_per_cluster: usize,
    pub threshold_t: f64,
    pub n_total: usize,
    pub data_seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
}

impl Default for DatasetSpec {
    /// Dataset B at σ = 0.10, 100 points per corner, data seed 42, 80/20.
    fn default() -> Self {
        Self {
            variant: Variant::B,
            sigma: 0.10,
            n_per_cluster: 100,
            threshold_t: DEFAULT_THRESHOLD,
            n_total: DEFAULT_C_POINTS,
            data_seed: DEFAULT_DATA_SEED,
            train_fraction: 0.8,
            stratified: false,
        }
    }
}

impl DatasetSpec {
    pub fn generate(&self) -> Result<LabeledDataset> {
        match self.variant {
            Variant::A => Ok(gen_dataset_a()),
            Variant::B => gen_dataset_b(self.sigma, self.n_per_cluster, self.data_seed),
            Variant::C => gen_dataset_c(self.n_total, self.threshold_t, self.data_seed),
        }
    }

    /// Train/test pair. Dataset A is too small to split and is used for both.
    pub fn build(&self) -> Result<(LabeledDataset, LabeledDataset)> {
        let ds = self.generate()?;
        if self.variant == Variant::A {
            return Ok((ds.clone(), ds));
        }
        split_train_test(&ds, self.train_fraction, self.data_seed, self.stratified)
    }

    fn id(&self) -> String {
        match self.variant {
            Variant::A => "A".to_string(),
            Variant::B => format!("B-sigma{}-n{}", self.sigma, self.n_per_cluster),
            Variant::C => format!("C-t{}-N{}", self.threshold_t, self.n_total),
        }
    }
}

/// Optimizer settings shared by every cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub lr_learning_rate: f64,
    pub mlp_learning_rate: f64,
    pub classical_epochs: usize,
    pub batch_size: Option<usize>,
    pub vqc_optimizer: OptimizerKind,
    pub vqc_learning_rate: f64,
    pub vqc_epochs: usize,
    pub analytic_gradients: bool,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            lr_learning_rate: 0.1,
            mlp_learning_rate: 0.5,
            classical_epochs: 4000,
            batch_size: None,
            vqc_optimizer: OptimizerKind::Adam,
            vqc_learning_rate: 0.1,
            vqc_epochs: 150,
            analytic_gradients: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub model: ModelSpec,
    pub data: DatasetSpec,
    pub seed: u64,
}

impl Cell {
    pub fn run_id(&self) -> String {
        format!("{}-{}-seed{}", self.model.slug(), self.data.id(), self.seed)
    }
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub record: RunRecord,
    pub model: Option<TrainedModel>,
    pub curves: Option<Curves>,
}

/// Trains one cell. Training failures are captured in the record; only
/// invalid cell definitions are returned as errors.
pub fn run_cell(cell: &Cell, settings: &TrainSettings, timed: bool) -> Result<CellOutcome> {
    cell.model.validate()?;
    let (train, test) = cell.data.build()?;
    let (lr, epochs) = match cell.model {
        ModelSpec::Lr => (settings.lr_learning_rate, settings.classical_epochs),
        ModelSpec::Mlp { .. } => (settings.mlp_learning_rate, settings.classical_epochs),
        ModelSpec::Vqc { .. } => (settings.vqc_learning_rate, settings.vqc_epochs),
    };
    let classical_cfg = ClassicalTrainConfig {
        lr,
        epochs,
        seed: cell.seed,
        batch_size: settings.batch_size,
    };
    let result = match cell.model {
        ModelSpec::Lr => train_classical(&LinearModel::init(cell.seed), &train, &test, &classical_cfg)
            .map(|f| (TrainedModel::Linear(f.model), f.curves, f.summary)),
        ModelSpec::Mlp { hidden } => train_classical(&MlpModel::init(hidden, cell.seed)?, &train, &test, &classical_cfg)
            .map(|f| (TrainedModel::Mlp(f.model), f.curves, f.summary)),
        ModelSpec::Vqc { depth, shots } => {
            let cfg = VqcTrainConfig {
                optimizer: settings.vqc_optimizer,
                learning_rate: lr,
                epochs,
                init_seed: cell.seed,
                analytic_gradients: settings.analytic_gradients,
            };
            train_vqc(&cfg, &VqcModel::init(depth, shots, cell.seed)?, &train, &test)
                .map(|f| (TrainedModel::Vqc(f.model), f.curves, f.summary))
        }
    };
    let record = RunRecord {
        run_id: cell.run_id(),
        model: cell.model,
        provenance: test.provenance.clone(),
        seed: cell.seed,
        lr,
        epochs,
        n_params: cell.model.n_params(),
        summary: None,
        test_class_counts: test.class_counts(),
        timed,
        error: None,
    };
    finish(record, result)
}

fn finish(mut record: RunRecord, result: Result<(TrainedModel, Curves, FitSummary)>) -> Result<CellOutcome> {
    match result {
        Ok((model, curves, summary)) => {
            record.summary = Some(summary);
            Ok(CellOutcome {
                record,
                model: Some(model),
                curves: Some(curves),
            })
        }
        Err(e @ Error::TrainingDiverged { .. }) => {
            record.summary = None;
            record.error = Some(e.to_string());
            Ok(CellOutcome {
                record,
                model: None,
                curves: None,
            })
        }
        Err(e) => Err(e),
    }
}

/// Runs all cells on at most `jobs` threads. Output order matches input
/// order, so results do not depend on `jobs`.
pub fn run_cells(cells: &[Cell], settings: &TrainSettings, jobs: usize, timed: bool) -> Result<Vec<CellOutcome>> {
    if jobs == 0 {
        return Err(invalid("jobs must be >= 1"));
    }
    if jobs == 1 {
        return cells.iter().map(|c| run_cell(c, settings, timed)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| cells.par_iter().map(|c| run_cell(c, settings, timed)).collect())
}
