//! Experiment configuration files.
//!
//! A config is a TOML document. Only `experiment` is required; every other
//! key defaults to the benchmark protocol (Dataset B, σ = 0.10, 100 points per
//! corner, data seed 42, 80/20 split, model seeds 0–4).
//!
//! ```toml
//! experiment = "noise-sweep"
//! seeds = [0, 1, 2, 3, 4]
//! shots = 1024            # optional VQC shot override
//! record_timing = false
//!
//! [dataset]
//! sigma = 0.10
//! n_per_cluster = 100
//!
//! [training]
//! vqc_epochs = 150
//!
//! [sweep]
//! sigmas = [0.0, 0.05, 0.10, 0.20, 0.30]
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench::sweep::{default_thresholds, extended_seeds, DEFAULT_SEEDS, DEFAULT_SHOTS, DEFAULT_SIGMAS, DEFAULT_SIZES, DEFAULT_WIDTHS};
use crate::bench::{DatasetSpec, TrainSettings};
use crate::data::Variant;
use crate::error::{Error, Result};
use crate::qsim::Shots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Benchmark,
    NoiseSweep,
    SizeSweep,
    ShotsSweep,
    SeedSweep,
    WidthAblation,
    DepthCompare,
    Landscape,
    Boundary,
    Deviation,
    DatasetC,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Benchmark,
        Experiment::NoiseSweep,
        Experiment::SizeSweep,
        Experiment::ShotsSweep,
        Experiment::SeedSweep,
        Experiment::WidthAblation,
        Experiment::DepthCompare,
        Experiment::Landscape,
        Experiment::Boundary,
        Experiment::Deviation,
        Experiment::DatasetC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Benchmark => "benchmark",
            Experiment::NoiseSweep => "noise-sweep",
            Experiment::SizeSweep => "size-sweep",
            Experiment::ShotsSweep => "shots-sweep",
            Experiment::SeedSweep => "seed-sweep",
            Experiment::WidthAblation => "width-ablation",
            Experiment::DepthCompare => "depth-compare",
            Experiment::Landscape => "landscape",
            Experiment::Boundary => "boundary",
            Experiment::Deviation => "deviation",
            Experiment::DatasetC => "dataset-c",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub sigmas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub shots: Vec<Shots>,
    pub depths: Vec<usize>,
    pub widths: Vec<usize>,
    pub thresholds: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigmas: DEFAULT_SIGMAS.to_vec(),
            sizes: DEFAULT_SIZES.to_vec(),
            shots: DEFAULT_SHOTS.to_vec(),
            depths: vec![1, 2],
            widths: DEFAULT_WIDTHS.to_vec(),
            thresholds: default_thresholds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: [usize; 2],
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    /// Shot budget for finite-shot grids.
    pub shots: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            resolution: [25, 25],
            x_range: [-0.5, 1.5],
            y_range: [-0.5, 1.5],
            shots: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeConfig {
    pub depth: usize,
    pub axis_i: usize,
    pub axis_j: usize,
    pub span: f64,
    pub resolution: usize,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        Self {
            depth: 2,
            axis_i: 0,
            axis_j: 1,
            span: std::f64::consts::PI,
            resolution: 41,
        }
    }
}

/// Parameters of the synthetic degradation compared against the ideal grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviationConfig {
    pub depth: usize,
    pub contraction: f64,
    pub bias: f64,
    pub noise_shots: Option<u32>,
}

impl Default for DeviationConfig {
    fn default() -> Self {
        Self {
            depth: 2,
            contraction: 0.7,
            bias: 0.0,
            noise_shots: Some(1024),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `None` means seeds 0–4 (0–19 for the seed sweep).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Shot budget for every VQC model outside the fixed benchmark rows;
    /// replaces the list in a shots sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<Shots>,
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default = "default_dataset")]
    pub dataset: DatasetSpecConfig,
    #[serde(default)]
    pub training: TrainSettingsConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub landscape: LandscapeConfig,
    #[serde(default)]
    pub deviation: DeviationConfig,
}

fn default_dataset() -> DatasetSpecConfig {
    DatasetSpecConfig::default()
}

/// File-level mirror of [`DatasetSpec`] with per-key defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpecConfig {
    pub variant: Variant,
    pub sigma: f64,
    pub n_per_cluster: usize,
    pub threshold_t: f64,
    pub n_total: usize,
    pub data_seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
}

impl Default for DatasetSpecConfig {
    fn default() -> Self {
        let d = DatasetSpec::default();
        Self {
            variant: d.variant,
            sigma: d.sigma,
            n_per_cluster: d.n_per_cluster,
            threshold_t: d.threshold_t,
            n_total: d.n_total,
            data_seed: d.data_seed,
            train_fraction: d.train_fraction,
            stratified: d.stratified,
        }
    }
}

impl From<&DatasetSpecConfig> for DatasetSpec {
    fn from(c: &DatasetSpecConfig) -> Self {
        DatasetSpec {
            variant: c.variant,
            sigma: c.sigma,
            n_per_cluster: c.n_per_cluster,
            threshold_t: c.threshold_t,
            n_total: c.n_total,
            data_seed: c.data_seed,
            train_fraction: c.train_fraction,
            stratified: c.stratified,
        }
    }
}

/// File-level mirror of [`TrainSettings`] with per-key defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettingsConfig {
    pub lr_learning_rate: f64,
    pub mlp_learning_rate: f64,
    pub classical_epochs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    pub vqc_optimizer: crate::optim::OptimizerKind,
    pub vqc_learning_rate: f64,
    pub vqc_epochs: usize,
    pub analytic_gradients: bool,
}

impl Default for TrainSettingsConfig {
    fn default() -> Self {
        let t = TrainSettings::default();
        Self {
            lr_learning_rate: t.lr_learning_rate,
            mlp_learning_rate: t.mlp_learning_rate,
            classical_epochs: t.classical_epochs,
            batch_size: t.batch_size,
            vqc_optimizer: t.vqc_optimizer,
            vqc_learning_rate: t.vqc_learning_rate,
            vqc_epochs: t.vqc_epochs,
            analytic_gradients: t.analytic_gradients,
        }
    }
}

impl From<&TrainSettingsConfig> for TrainSettings {
    fn from(c: &TrainSettingsConfig) -> Self {
        TrainSettings {
            lr_learning_rate: c.lr_learning_rate,
            mlp_learning_rate: c.mlp_learning_rate,
            classical_epochs: c.classical_epochs,
            batch_size: c.batch_size,
            vqc_optimizer: c.vqc_optimizer,
            vqc_learning_rate: c.vqc_learning_rate,
            vqc_epochs: c.vqc_epochs,
            analytic_gradients: c.analytic_gradients,
        }
    }
}

impl ExperimentConfig {
    /// Config for `experiment` with every other value at its default.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seeds: None,
            shots: None,
            record_timing: false,
            dataset: DatasetSpecConfig::default(),
            training: TrainSettingsConfig::default(),
            sweep: SweepConfig::default(),
            grid: GridConfig::default(),
            landscape: LandscapeConfig::default(),
            deviation: DeviationConfig::default(),
        }
    }

    /// Parses TOML, or a run manifest (JSON with an embedded `config`).
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let cfg: Self = if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
            let inner = v.get("config").cloned().unwrap_or(v);
            serde_json::from_value(inner).map_err(|e| Error::Config(format!("manifest config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None if self.experiment == Experiment::SeedSweep => extended_seeds(),
            None => DEFAULT_SEEDS.to_vec(),
        }
    }

    pub fn dataset_spec(&self) -> DatasetSpec {
        (&self.dataset).into()
    }

    pub fn train_settings(&self) -> TrainSettings {
        (&self.training).into()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("field `{field}`: {msg}")));
        if let Some(s) = &self.seeds {
            if s.is_empty() {
                return bad("seeds", "must not be empty".into());
            }
        }
        let d = &self.dataset;
        if !(0.0..=1.0).contains(&d.sigma) {
            return bad("dataset.sigma", format!("{} is outside [0, 1]", d.sigma));
        }
        if d.n_per_cluster == 0 {
            return bad("dataset.n_per_cluster", "must be >= 1".into());
        }
        if !(d.threshold_t > 0.0 && d.threshold_t < 1.0) {
            return bad("dataset.threshold_t", format!("{} is outside (0, 1)", d.threshold_t));
        }
        if d.n_total < 4 {
            return bad("dataset.n_total", "must be >= 4".into());
        }
        if !(d.train_fraction > 0.0 && d.train_fraction < 1.0) {
            return bad("dataset.train_fraction", format!("{} is outside (0, 1)", d.train_fraction));
        }
        let t = &self.training;
        for (name, lr) in [
            ("training.lr_learning_rate", t.lr_learning_rate),
            ("training.mlp_learning_rate", t.mlp_learning_rate),
        ] {
            if !(lr.is_finite() && lr > 0.0) {
                return bad(name, format!("{lr} must be positive"));
            }
        }
        if !(t.vqc_learning_rate > 0.0 && t.vqc_learning_rate <= 1.0) {
            return bad("training.vqc_learning_rate", format!("{} is outside (0, 1]", t.vqc_learning_rate));
        }
        if t.batch_size == Some(0) {
            return bad("training.batch_size", "must be >= 1".into());
        }
        let s = &self.sweep;
        for (name, empty) in [
            ("sweep.sigmas", s.sigmas.is_empty()),
            ("sweep.sizes", s.sizes.is_empty()),
            ("sweep.shots", s.shots.is_empty()),
            ("sweep.depths", s.depths.is_empty()),
            ("sweep.widths", s.widths.is_empty()),
            ("sweep.thresholds", s.thresholds.is_empty()),
        ] {
            if empty {
                return bad(name, "must not be empty".into());
            }
        }
        if s.sigmas.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return bad("sweep.sigmas", "values must lie in [0, 1]".into());
        }
        if s.sizes.iter().any(|&n| n == 0) {
            return bad("sweep.sizes", "values must be >= 1".into());
        }
        if s.depths.iter().any(|&n| n == 0) {
            return bad("sweep.depths", "values must be >= 1".into());
        }
        if s.widths.iter().any(|&n| n == 0) {
            return bad("sweep.widths", "values must be >= 1".into());
        }
        if s.thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return bad("sweep.thresholds", "values must lie in (0, 1)".into());
        }
        let g = &self.grid;
        if g.resolution[0] < 2 || g.resolution[1] < 2 {
            return bad("grid.resolution", "needs >= 2 points per axis".into());
        }
        if !(g.x_range[0] < g.x_range[1] && g.y_range[0] < g.y_range[1]) {
            return bad("grid.x_range/y_range", "lo must be below hi".into());
        }
        if g.shots == 0 {
            return bad("grid.shots", "must be >= 1".into());
        }
        let l = &self.landscape;
        if l.depth == 0 || l.axis_i >= 6 * l.depth || l.axis_j >= 6 * l.depth || l.axis_i == l.axis_j {
            return bad("landscape", "axes must be distinct parameter indices below 6*depth".into());
        }
        if l.resolution < 2 || !(l.span > 0.0 && l.span.is_finite()) {
            return bad("landscape", "resolution must be >= 2 and span positive".into());
        }
        let dv = &self.deviation;
        if dv.depth == 0 || !(dv.contraction.is_finite() && dv.bias.is_finite()) || dv.noise_shots == Some(0) {
            return bad("deviation", "depth >= 1, finite contraction/bias, noise_shots >= 1".into());
        }
        Ok(())
    }

    /// Canonical JSON used for hashing and for the manifest.
    pub fn canonical_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.canonical_json()).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_experiment_gets_protocol_defaults() {
        let cfg = ExperimentConfig::parse("experiment = \"benchmark\"\n").unwrap();
        assert_eq!(cfg.seeds(), vec![0, 1, 2, 3, 4]);
        let d = cfg.dataset_spec();
        assert_eq!((d.sigma, d.n_per_cluster, d.data_seed, d.train_fraction), (0.10, 100, 42, 0.8));
        assert_eq!(cfg.sweep.sigmas, vec![0.0, 0.05, 0.10, 0.20, 0.30]);
        assert_eq!(cfg.sweep.shots, vec![Shots::Analytic, Shots::Finite(128), Shots::Finite(1024)]);
        let seed_sweep = ExperimentConfig::parse("experiment = \"seed-sweep\"").unwrap();
        assert_eq!(seed_sweep.seeds().len(), 20);
    }

    #[test]
    fn empty_seeds_rejected_with_field_name() {
        let err = ExperimentConfig::parse("experiment = \"benchmark\"\nseeds = []\n").unwrap_err();
        assert!(err.to_string().contains("seeds"), "{err}");
    }

    #[test]
    fn unknown_keys_and_experiments_report_location() {
        let err = ExperimentConfig::parse("experiment = \"benchmark\"\n[dataset]\nsigmaa = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sigmaa") && msg.contains("line 3"), "{msg}");
        assert!(ExperimentConfig::parse("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::parse("seeds = [1]").is_err());
    }

    #[test]
    fn shots_lists_parse_mixed() {
        let cfg = ExperimentConfig::parse("experiment = \"shots-sweep\"\n[sweep]\nshots = [\"analytic\", 1024]\n").unwrap();
        assert_eq!(cfg.sweep.shots, vec![Shots::Analytic, Shots::Finite(1024)]);
        assert!(ExperimentConfig::parse("experiment = \"shots-sweep\"\n[sweep]\nshots = [0]\n").is_err());
    }

    #[test]
    fn manifest_json_roundtrip() {
        let mut cfg = ExperimentConfig::new(Experiment::NoiseSweep);
        cfg.seeds = Some(vec![3, 4]);
        let manifest = serde_json::json!({ "experiment": "noise-sweep", "config": cfg.canonical_json() });
        let back = ExperimentConfig::parse(&manifest.to_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn experiment_names_roundtrip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
