//! Runs a configured experiment end to end and writes its artifacts.
//!
//! Every experiment writes `runs.csv` (one row per trained cell), a
//! checkpoint per trained model, experiment-specific tables and grids, the
//! SVG figures produced by [`crate::render::render`], and `manifest.json`
//! listing every file with its SHA-256. Nothing time-dependent is written
//! unless `record_timing` is set, so identical configs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bench::deviation::Histogram;
use crate::bench::sweep::{comparison_models, sweep_noise, sweep_seeds, sweep_shots, sweep_size, sweep_threshold, sweep_width};
use crate::bench::{
    decision_grid, grid_deviation, landscape_value, loss_landscape_slice, run_cells, run_sweep, runs_csv, synthetic_degradation,
    Cell, CellOutcome, DecisionGrid, Interval, SweepPoint, SweepResult,
};
use crate::config::{Experiment, ExperimentConfig};
use crate::data::{write_dataset, Variant};
use crate::error::{Error, Result};
use crate::model::{Checkpoint, ModelSpec, TrainedModel};
use crate::qsim::Shots;
use crate::rng::SeededRng;

pub const MANIFEST_FILE: &str = "manifest.json";

const GRID_SHOTS_TAG: u64 = 0x6721;
const SYNTHETIC_TAG: u64 = 0x5e17;

/// The seven model rows of the benchmark table.
pub fn benchmark_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Lr,
        ModelSpec::Mlp { hidden: 4 },
        ModelSpec::Vqc { depth: 1, shots: Shots::Analytic },
        ModelSpec::Vqc { depth: 1, shots: Shots::Finite(1024) },
        ModelSpec::Vqc { depth: 1, shots: Shots::Finite(128) },
        ModelSpec::Vqc { depth: 2, shots: Shots::Analytic },
        ModelSpec::Vqc { depth: 2, shots: Shots::Finite(1024) },
    ]
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub outcomes: Vec<CellOutcome>,
    pub sweep: Option<SweepResult>,
    /// Paths relative to the output directory, sorted.
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'static str,
    config_hash: String,
    seeds: Vec<u64>,
    jobs_independent: bool,
    config: serde_json::Value,
    files: Vec<ManifestFile>,
}

#[derive(Serialize)]
struct ManifestFile {
    path: String,
    sha256: String,
}

/// Collects written files so the manifest lists exactly this run's outputs.
struct Writer<'a> {
    root: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(root: &'a Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root, files: Vec::new() })
    }

    fn write(&mut self, rel: impl AsRef<Path>, contents: &str) -> Result<()> {
        let rel = rel.as_ref();
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.files.push(rel.to_path_buf());
        Ok(())
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut w = Writer::new(out_dir)?;
    let seeds = cfg.seeds();
    let base = cfg.dataset_spec();
    let settings = cfg.train_settings();
    let timed = cfg.record_timing;
    let vqc_shots = cfg.shots.unwrap_or(Shots::Analytic);
    let with_shots = |models: Vec<ModelSpec>| -> Vec<ModelSpec> {
        models
            .into_iter()
            .map(|m| match m {
                ModelSpec::Vqc { depth, .. } => ModelSpec::Vqc { depth, shots: vqc_shots },
                other => other,
            })
            .collect()
    };

    let sweep_points: Option<(&str, Vec<SweepPoint>)> = match cfg.experiment {
        Experiment::Benchmark => Some(("config", vec![point("benchmark", &benchmark_models(), &base, &seeds)])),
        Experiment::NoiseSweep => Some(("sigma", sweep_noise(&base, &cfg.sweep.sigmas, &with_shots(comparison_models()), &seeds)?)),
        Experiment::SizeSweep => Some(("n_per_cluster", sweep_size(&base, &cfg.sweep.sizes, &with_shots(comparison_models()), &seeds)?)),
        Experiment::ShotsSweep => {
            let shots = cfg.shots.map_or_else(|| cfg.sweep.shots.clone(), |s| vec![s]);
            Some(("shots", sweep_shots(&base, &cfg.sweep.depths, &shots, &seeds)?))
        }
        Experiment::SeedSweep => Some(("seed", sweep_seeds(&base, &with_shots(comparison_models()), &seeds)?)),
        Experiment::WidthAblation => Some(("h", sweep_width(&base, &cfg.sweep.widths, &seeds)?)),
        Experiment::DepthCompare => {
            let points = cfg
                .sweep
                .depths
                .iter()
                .map(|&depth| point(&depth.to_string(), &[ModelSpec::Vqc { depth, shots: vqc_shots }], &base, &seeds))
                .collect();
            Some(("L", points))
        }
        Experiment::DatasetC => {
            let base_c = crate::bench::DatasetSpec { variant: Variant::C, ..base.clone() };
            Some(("threshold_t", sweep_threshold(&base_c, &cfg.sweep.thresholds, &with_shots(comparison_models()), &seeds)?))
        }
        Experiment::Landscape | Experiment::Boundary | Experiment::Deviation => None,
    };

    let (outcomes, sweep) = if let Some((variable, points)) = sweep_points {
        let out = run_sweep(variable, points, &settings, jobs, timed)?;
        let name = if cfg.experiment == Experiment::Benchmark { "summary.csv" } else { "sweep.csv" };
        w.write(name, &out.result.to_csv())?;
        (out.outcomes, Some(out.result))
    } else {
        let models = match cfg.experiment {
            Experiment::Boundary => with_shots(comparison_models()),
            Experiment::Landscape => vec![ModelSpec::Vqc { depth: cfg.landscape.depth, shots: Shots::Analytic }],
            _ => vec![ModelSpec::Vqc { depth: cfg.deviation.depth, shots: Shots::Analytic }],
        };
        let cells = point("-", &models, &base, &seeds).cells;
        (run_cells(&cells, &settings, jobs, timed)?, None)
    };

    let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
    w.write("runs.csv", &runs_csv(&records))?;
    for o in &outcomes {
        if let Some(m) = &o.model {
            let ck = Checkpoint::from_model(m, o.record.seed);
            w.write(format!("checkpoints/{}.json", o.record.run_id), &ck.to_json())?;
        }
    }
    if matches!(cfg.experiment, Experiment::Benchmark | Experiment::DepthCompare | Experiment::Boundary) {
        w.write("curves.csv", &curves_csv(&outcomes))?;
    }

    let region = (
        Interval::new(cfg.grid.x_range[0], cfg.grid.x_range[1]),
        Interval::new(cfg.grid.y_range[0], cfg.grid.y_range[1]),
    );
    let resolution = (cfg.grid.resolution[0], cfg.grid.resolution[1]);
    match cfg.experiment {
        Experiment::Boundary => {
            let (train, _) = base.build()?;
            write_dataset(&train, &out_dir.join("data_train.csv"))?;
            w.files.push("data_train.csv".into());
            w.files.push("data_train.json".into());
            for o in &outcomes {
                if let Some(m) = &o.model {
                    let mut rng = SeededRng::derived(o.record.seed, &[GRID_SHOTS_TAG]);
                    let g = decision_grid(m, region, resolution, None, &mut rng)?;
                    w.write(format!("grid_{}_seed{}.csv", o.record.model.slug(), o.record.seed), &g.to_csv())?;
                }
            }
        }
        Experiment::Deviation => {
            let mut table = String::from("seed,pair,mad,mse,synthetic\n");
            for o in &outcomes {
                let Some(m) = &o.model else { continue };
                let seed = o.record.seed;
                let analytic = decision_grid(m, region, resolution, Some(Shots::Analytic), &mut SeededRng::new(seed))?;
                let shots = Shots::Finite(cfg.grid.shots);
                let sampled = decision_grid(m, region, resolution, Some(shots), &mut SeededRng::derived(seed, &[GRID_SHOTS_TAG]))?;
                let dv = &cfg.deviation;
                let synthetic = synthetic_degradation(
                    &analytic,
                    dv.contraction,
                    dv.bias,
                    dv.noise_shots,
                    &mut SeededRng::derived(seed, &[SYNTHETIC_TAG]),
                )?;
                let shots_name = format!("shots{}", cfg.grid.shots);
                w.write(format!("grid_analytic_seed{seed}.csv"), &analytic.to_csv())?;
                w.write(format!("grid_{shots_name}_seed{seed}.csv"), &sampled.to_csv())?;
                w.write(format!("grid_synthetic_seed{seed}.csv"), &synthetic.to_csv())?;
                let pairs = [
                    ("analytic_vs_analytic".to_string(), &analytic, false),
                    (format!("analytic_vs_{shots_name}"), &sampled, false),
                    ("analytic_vs_synthetic".to_string(), &synthetic, true),
                ];
                for (pair, other, is_synthetic) in pairs {
                    let d = grid_deviation(&analytic, other)?;
                    table.push_str(&format!("{seed},{pair},{},{},{is_synthetic}\n", d.mad, d.mse));
                    if pair == "analytic_vs_analytic" {
                        continue;
                    }
                    let absdiff = DecisionGrid::new(analytic.x_range, analytic.y_range, analytic.nx, analytic.ny, d.absdiff)?;
                    w.write(format!("absdiff_{pair}_seed{seed}.csv"), &absdiff.to_csv())?;
                    w.write(format!("hist_{pair}_seed{seed}.csv"), &histogram_csv(&d.hist_a, &d.hist_b))?;
                }
            }
            w.write("deviation.csv", &table)?;
        }
        Experiment::Landscape => {
            let (train, _) = base.build()?;
            let l = &cfg.landscape;
            let mut table = String::from("seed,axis_i,axis_j,center_bce,final_train_bce,local_min_0.2\n");
            for o in &outcomes {
                let Some(TrainedModel::Vqc(m)) = &o.model else { continue };
                let seed = o.record.seed;
                let slice = loss_landscape_slice(m, &train, l.axis_i, l.axis_j, l.span, l.resolution)?;
                w.write(format!("landscape_seed{seed}.csv"), &slice.to_csv())?;
                let center = landscape_value(m, &train, l.axis_i, l.axis_j, 0.0, 0.0)?;
                let local_min = slice
                    .offsets
                    .iter()
                    .enumerate()
                    .flat_map(|(a, di)| slice.offsets.iter().enumerate().map(move |(b, dj)| (a, b, *di, *dj)))
                    .filter(|&(_, _, di, dj)| di.abs() <= 0.2 && dj.abs() <= 0.2)
                    .all(|(a, b, _, _)| center <= slice.values[a][b] + 1e-12);
                let final_bce = o.record.summary.map_or(f64::NAN, |s| s.train_bce);
                table.push_str(&format!("{seed},{},{},{center},{final_bce},{local_min}\n", l.axis_i, l.axis_j));
            }
            w.write("landscape.csv", &table)?;
        }
        _ => {}
    }

    for svg in crate::render::render(out_dir)? {
        if !w.files.contains(&svg) {
            w.files.push(svg);
        }
    }
    w.files.sort();
    w.files.dedup();

    let mut listed = Vec::with_capacity(w.files.len());
    for rel in &w.files {
        let bytes = fs::read(out_dir.join(rel))?;
        listed.push(ManifestFile {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
    }
    let manifest = Manifest {
        experiment: cfg.experiment.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash(),
        seeds,
        jobs_independent: true,
        config: cfg.canonical_json(),
        files: listed,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(out_dir.join(MANIFEST_FILE), text + "\n")?;

    Ok(ExperimentOutput { outcomes, sweep, files: w.files })
}

fn point(value: &str, models: &[ModelSpec], data: &crate::bench::DatasetSpec, seeds: &[u64]) -> SweepPoint {
    let cells = models
        .iter()
        .flat_map(|&model| seeds.iter().map(move |&seed| Cell { model, data: data.clone(), seed }))
        .collect();
    SweepPoint { value: value.to_string(), cells }
}

fn curves_csv(outcomes: &[CellOutcome]) -> String {
    let mut out = String::from("run_id,model,seed,epoch,train_bce,test_bce,train_acc,test_acc\n");
    for o in outcomes {
        let Some(c) = &o.curves else { continue };
        let label = o.record.model.label();
        for e in 0..c.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                o.record.run_id, label, o.record.seed, e, c.train_bce[e], c.test_bce[e], c.train_acc[e], c.test_acc[e]
            ));
        }
    }
    out
}

fn histogram_csv(a: &Histogram, b: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count_a,count_b\n");
    for i in 0..a.counts.len() {
        out.push_str(&format!("{},{},{},{}\n", a.edges[i], a.edges[i + 1], a.counts[i], b.counts[i]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TrainSettingsConfig;

    fn quick(exp: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(exp);
        cfg.seeds = Some(vec![0, 1]);
        cfg.dataset.n_per_cluster = 5;
        cfg.training = TrainSettingsConfig { classical_epochs: 30, vqc_epochs: 3, ..TrainSettingsConfig::default() };
        cfg.grid.resolution = [6, 5];
        cfg.landscape.resolution = 5;
        cfg
    }

    #[test]
    fn benchmark_has_seven_rows_per_seed() {
        assert_eq!(benchmark_models().len(), 7);
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&quick(Experiment::Benchmark), dir.path(), 1).unwrap();
        assert_eq!(out.outcomes.len(), 14);
        let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
        assert_eq!(runs.lines().count(), 15);
        assert!(dir.path().join("summary.csv").exists());
        assert!(dir.path().join(MANIFEST_FILE).exists());
    }

    #[test]
    fn deviation_writes_grids_and_table() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = quick(Experiment::Deviation);
        cfg.seeds = Some(vec![3]);
        run_experiment(&cfg, dir.path(), 1).unwrap();
        let table = fs::read_to_string(dir.path().join("deviation.csv")).unwrap();
        assert!(table.contains("3,analytic_vs_analytic,0,0,false"), "{table}");
        for f in ["grid_analytic_seed3.csv", "grid_shots1024_seed3.csv", "absdiff_analytic_vs_synthetic_seed3.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn manifest_lists_hashes_of_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&quick(Experiment::Landscape), dir.path(), 1).unwrap();
        let text = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let files = v["files"].as_array().unwrap();
        assert_eq!(files.len(), out.files.len());
        let runs = files.iter().find(|f| f["path"] == "runs.csv").unwrap();
        let bytes = fs::read(dir.path().join("runs.csv")).unwrap();
        assert_eq!(runs["sha256"], hex::encode(Sha256::digest(&bytes)));
        let again = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(again.hash(), quick(Experiment::Landscape).hash());
    }

    #[test]
    fn shots_override_replaces_sweep_list() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = quick(Experiment::ShotsSweep);
        cfg.shots = Some(Shots::Finite(64));
        cfg.sweep.depths = vec![1];
        let out = run_experiment(&cfg, dir.path(), 1).unwrap();
        let sweep = out.sweep.unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.rows[0].value, "64");
    }
}
