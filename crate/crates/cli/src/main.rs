use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use beta4_ucs::data::{load_csv, CsvOptions, Dataset, Normalizer};
use beta4_ucs::engine::{train, EngineConfig, Population};
use beta4_ucs::experiment::{export_rules, run_experiment, trace_csv, DataSource, ExperimentConfig};
use beta4_ucs::metrics::{accuracy, confusion_matrix, decision_grid, kurtosis_landscape, macro_f1};
use beta4_ucs::{ModelSnapshot, ProblemSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Fuzzy-UCS with four-parameter beta membership functions.
#[derive(Parser)]
#[command(name = "beta4", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark problem as CSV.
    Generate(GenerateArgs),
    /// Train one model on a whole CSV file.
    Train(TrainArgs),
    /// Classify a labeled CSV file with a saved model.
    Predict(PredictArgs),
    /// Repeated split/train/evaluate runs with aggregate statistics.
    Experiment(ExperimentArgs),
    /// Kurtosis or class-assignment grid of a two-attribute model.
    Landscape(LandscapeArgs),
}

#[derive(Args)]
struct CsvArgs {
    /// The first row of the file is a header.
    #[arg(long)]
    header: bool,
    /// Zero-based label column (default: last).
    #[arg(long)]
    label_col: Option<usize>,
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            has_header: self.header,
            label_col: self.label_col,
        }
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Engine configuration JSON; replaces the engine section of --config.
    #[arg(long)]
    engine: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Override any engine key, e.g. `--set theta_GA=25 --set representation=triangular`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load_engine(p: &Path) -> Result<EngineConfig> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
}

fn apply_overrides(cfg: &mut EngineConfig, args: &EngineArgs) -> Result<()> {
    let mut v = serde_json::to_value(&*cfg)?;
    for kv in &args.overrides {
        let (k, raw) = kv.split_once('=').with_context(|| format!("expected KEY=VALUE, got {kv:?}"))?;
        if v.get(k).is_none() {
            bail!("unknown engine key {k:?}");
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
        v[k] = value;
    }
    *cfg = serde_json::from_value(v).context("invalid engine override")?;
    if let Some(e) = args.epochs {
        cfg.epochs = e;
    }
    cfg.validate()?;
    Ok(())
}

#[derive(Args)]
struct GenerateArgs {
    /// Problem, e.g. mux:20, chk:3x5, cmx:3x3, maj:11, car:12, rcb.
    #[arg(long)]
    problem: ProblemSpec,
    #[arg(long, default_value_t = 6000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Write a header row.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the trained model.
    #[arg(long)]
    model: PathBuf,
    /// Also write the rule set in readable form.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Also write the per-epoch trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    /// Write one predicted class name per line.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use a synthetic problem instead of the configured data.
    #[arg(long, conflicts_with = "data")]
    problem: Option<ProblemSpec>,
    /// Use a CSV file instead of the configured data.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    out: PathBuf,
    /// Run repetitions one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LandscapeKind {
    Kurtosis,
    Class,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long, value_enum, default_value = "kurtosis")]
    kind: LandscapeKind,
    #[arg(long)]
    out: PathBuf,
}

fn write(path: &Path, body: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn dataset_csv(d: &Dataset, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str(&d.attribute_names.join(","));
        out.push_str(",class\n");
    }
    for (row, &l) in d.features.iter().zip(&d.labels) {
        for v in row {
            match v {
                Some(v) => out.push_str(&v.to_string()),
                None => out.push('?'),
            }
            out.push(',');
        }
        out.push_str(&d.class_names[l]);
        out.push('\n');
    }
    out
}

fn generate(a: GenerateArgs) -> Result<()> {
    let d = a.problem.generate(a.samples, a.seed)?;
    write(&a.out, dataset_csv(&d, a.header))?;
    eprintln!("wrote {} instances of {} to {}", d.len(), a.problem, a.out.display());
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let raw = load_csv(&a.data, &a.csv.options())?;
    let mut cfg = match &a.engine.engine {
        Some(p) => load_engine(p)?,
        None => EngineConfig::default(),
    };
    apply_overrides(&mut cfg, &a.engine)?;

    let normalizer = Normalizer::fit(&raw);
    let data = normalizer.transform(&raw);
    let mut pop = Population::new(cfg.max_population, data.dims(), data.num_classes());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let trace = train(&mut pop, &data, &cfg, &mut rng)?;
    let snap = ModelSnapshot::new(pop, normalizer, data.attribute_names.clone(), data.class_names.clone(), cfg);
    snap.save(&a.model)?;
    if let Some(p) = &a.rules {
        write(p, export_rules(&snap, true))?;
    }
    if let Some(p) = &a.trace {
        write(p, trace_csv(&trace))?;
    }
    let last = trace.last().expect("at least one epoch");
    eprintln!(
        "trained {} epochs: online accuracy {:.4}, {} macro-rules, crisp fraction {:.3}",
        last.epoch, last.train_acc, last.macro_rules, last.crisp_fraction
    );
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let snap = ModelSnapshot::load(&a.model)?;
    let data = load_csv(&a.data, &a.csv.options())?;
    if data.dims() != snap.dims() {
        bail!("data has {} attributes, model expects {}", data.dims(), snap.dims());
    }
    let data = data.align_classes(&snap.class_names)?;
    let predicted: Vec<usize> = data.features.iter().map(|x| snap.predict(x)).collect();
    if let Some(p) = &a.out {
        let lines: String = predicted.iter().map(|&c| format!("{}\n", snap.class_names[c])).collect();
        write(p, lines)?;
    }
    let confusion = confusion_matrix(&data.labels, &predicted, snap.class_names.len());
    println!("accuracy {:.4}", accuracy(&confusion)?);
    println!("macro_f1 {:.4}", macro_f1(&confusion));
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<bool> {
    let mut cfg = match (&a.config, &a.problem, &a.data) {
        (Some(p), _, _) => ExperimentConfig::load(p)?,
        (None, Some(problem), _) => ExperimentConfig::new(DataSource::Problem {
            problem: *problem,
            samples: 6000,
        }),
        (None, None, Some(path)) => ExperimentConfig::new(DataSource::File {
            path: path.clone(),
            csv: a.csv.options(),
        }),
        (None, None, None) => bail!("give --config, --problem or --data"),
    };
    if let Some(problem) = a.problem {
        cfg.data = DataSource::Problem {
            problem,
            samples: 6000,
        };
    } else if let Some(path) = &a.data {
        cfg.data = DataSource::File {
            path: path.clone(),
            csv: a.csv.options(),
        };
    }
    if let (Some(n), DataSource::Problem { samples, .. }) = (a.samples, &mut cfg.data) {
        *samples = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(p) = &a.engine.engine {
        cfg.engine = load_engine(p)?;
    }
    apply_overrides(&mut cfg.engine, &a.engine)?;
    cfg.validate()?;

    let outcome = run_experiment(&cfg, !a.sequential)?;
    outcome.write(&a.out)?;
    let report = outcome.aggregate();
    if let Some(acc) = &report.test_accuracy {
        println!(
            "{} of {} runs: test accuracy {:.2} ± {:.2}%",
            report.runs_completed,
            report.runs_requested,
            100.0 * acc.mean,
            100.0 * acc.ci95
        );
    }
    for f in &report.failures {
        eprintln!("run {} failed: {}", f.run, f.error);
    }
    Ok(report.failures.is_empty())
}

fn landscape(a: LandscapeArgs) -> Result<()> {
    let snap = ModelSnapshot::load(&a.model)?;
    let theta = snap.engine.theta_exp;
    let csv = match a.kind {
        LandscapeKind::Kurtosis => kurtosis_landscape(&snap.population, a.resolution, theta)?.to_csv(),
        LandscapeKind::Class => decision_grid(&snap.population, a.resolution, theta)?.to_csv(),
    };
    write(&a.out, csv)
}

fn main() -> ExitCode {
    // usage errors exit with 1; 2 is reserved for failed runs
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Train(a) => train_cmd(a).map(|_| true),
        Command::Predict(a) => predict(a).map(|_| true),
        Command::Experiment(a) => experiment(a),
        Command::Landscape(a) => landscape(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
