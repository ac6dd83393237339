use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use xorbench::config::{Experiment, ExperimentConfig};
use xorbench::data::{gen_dataset_a, gen_dataset_b, gen_dataset_c, split_train_test, write_dataset, LabeledDataset};
use xorbench::experiment::run_experiment;
use xorbench::qsim::Shots;
use xorbench::render::render;
use xorbench::verify::{run_verify, FaultInjection};
use xorbench::Error;

#[derive(Parser)]
#[command(name = "xorbench", version, about = "Quantum vs classical classifiers on XOR benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSVs, SVGs and a manifest.
    Run(RunArgs),
    /// Regenerate SVG figures from the CSVs in a run directory.
    Render {
        /// Run output directory.
        dir: PathBuf,
    },
    /// Run the fast property checks and print a pass/fail report.
    Verify {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Generate a dataset as CSV plus provenance JSON.
    GenData(GenDataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    Unitarity,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment name; runs with all defaults when no config is given.
    #[arg(value_parser = parse_experiment, required_unless_present = "config")]
    experiment: Option<Experiment>,
    /// TOML config file, or a manifest.json from an earlier run.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory [default: <output root>/<experiment>].
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Root for default output directories.
    #[arg(long, env = "XORBENCH_OUTPUT_ROOT", default_value = "xorbench-runs", hide_env_values = true)]
    output_root: PathBuf,
    /// Worker threads for training cells; results do not depend on it.
    #[arg(long, short, default_value_t = default_jobs())]
    jobs: usize,
    /// Comma-separated model seeds, overriding the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// VQC shot budget ("analytic" or a positive integer).
    #[arg(long, value_parser = parse_shots)]
    shots: Option<Shots>,
    /// Use a class-stratified train/test split.
    #[arg(long)]
    stratified: bool,
    /// Record wall-clock training time in runs.csv (breaks byte-identity).
    #[arg(long)]
    timing: bool,
}

#[derive(clap::Args)]
struct GenDataArgs {
    #[arg(long, value_enum, default_value = "b")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0.10)]
    sigma: f64,
    /// Points per corner (variant B).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Total points (variant C).
    #[arg(long, default_value_t = 400)]
    n_total: usize,
    /// Label threshold (variant C).
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write `<stem>_train.csv` and `<stem>_test.csv` with this train fraction.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    stratified: bool,
    /// Output CSV path.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    A,
    B,
    C,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_shots(s: &str) -> Result<Shots, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::TrainingDiverged { .. } => 1,
        Error::Config(_) | Error::InvalidArgument(_) | Error::Parse(_) | Error::MissingInput(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Render { dir } => render(&dir).map(|files| {
            for f in files {
                println!("{}", dir.join(f).display());
            }
            ExitCode::SUCCESS
        }),
        Command::Verify { inject_fault } => {
            let faults = FaultInjection { corrupt_unitarity: matches!(inject_fault, Some(Fault::Unitarity)) };
            let report = run_verify(faults);
            print!("{report}");
            Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::GenData(args) => cmd_gen_data(args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}

fn load_config(path: &Path) -> xorbench::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(format!("config file {} not found", path.display())),
        _ => Error::Io(e),
    })?;
    ExperimentConfig::parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn cmd_run(args: RunArgs) -> xorbench::Result<ExitCode> {
    let mut cfg = match (&args.config, args.experiment) {
        (Some(path), exp) => {
            let cfg = load_config(path)?;
            if let Some(e) = exp {
                if e != cfg.experiment {
                    return Err(Error::Config(format!("experiment '{e}' does not match config's '{}'", cfg.experiment)));
                }
            }
            cfg
        }
        (None, Some(exp)) => ExperimentConfig::new(exp),
        (None, None) => unreachable!("clap requires an experiment or a config"),
    };
    if let Some(seeds) = args.seeds {
        cfg.seeds = Some(seeds);
    }
    if let Some(shots) = args.shots {
        cfg.shots = Some(shots);
    }
    if args.stratified {
        cfg.dataset.stratified = true;
    }
    if args.timing {
        cfg.record_timing = true;
    }
    cfg.validate()?;
    let out = args.out.unwrap_or_else(|| args.output_root.join(cfg.experiment.name()));
    let result = run_experiment(&cfg, &out, args.jobs)?;
    let failed = result.outcomes.iter().filter(|o| o.record.error.is_some()).count();
    println!(
        "{}: {} runs ({} diverged), {} files in {}",
        cfg.experiment,
        result.outcomes.len(),
        failed,
        result.files.len() + 1,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_data(args: GenDataArgs) -> xorbench::Result<ExitCode> {
    let ds: LabeledDataset = match args.variant {
        VariantArg::A => gen_dataset_a(),
        VariantArg::B => gen_dataset_b(args.sigma, args.n, args.seed)?,
        VariantArg::C => gen_dataset_c(args.n_total, args.threshold, args.seed)?,
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_dataset(&ds, &args.out)?;
    println!("{} ({} points)", args.out.display(), ds.len());
    if let Some(f) = args.split {
        let (train, test) = split_train_test(&ds, f, args.seed, args.stratified)?;
        let stem = args.out.with_extension("");
        for (suffix, part) in [("train", &train), ("test", &test)] {
            let path = PathBuf::from(format!("{}_{suffix}.csv", stem.display()));
            write_dataset(part, &path)?;
            println!("{} ({} points)", path.display(), part.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}
