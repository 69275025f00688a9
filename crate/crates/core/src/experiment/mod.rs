//! Multi-run experiments: data preparation, seeding, training, evaluation
//! and the files written for each run.

mod snapshot;

pub use snapshot::{config_hash, export_rules, ModelSnapshot};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::{load_csv, split, CsvOptions, Dataset, Fold, Normalizer, SplitProtocol};
use crate::engine::{infer, train, EngineConfig, EpochStats, Population, Representation};
use crate::error::{Error, Result};
use crate::metrics::{confusion_matrix, kurtosis_landscape, EvalReport};
use crate::synth::ProblemSpec;

/// Where the instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSource {
    Problem {
        /// Either the short form (`"mux:20"`) or the tagged object.
        #[serde(deserialize_with = "problem_field")]
        problem: ProblemSpec,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    File {
        path: PathBuf,
        #[serde(default, flatten)]
        csv: CsvOptions,
    },
}

fn default_samples() -> usize {
    6000
}

fn problem_field<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ProblemSpec, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Field {
        Short(String),
        Full(ProblemSpec),
    }
    match Field::deserialize(d)? {
        Field::Short(s) => s.parse().map_err(serde::de::Error::custom),
        Field::Full(p) => p.validate().map(|_| p).map_err(serde::de::Error::custom),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub split: SplitProtocol,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Grid size of `landscape.csv` for two-attribute data.
    #[serde(default = "default_resolution")]
    pub landscape_resolution: usize,
}

fn default_runs() -> usize {
    30
}

fn default_resolution() -> usize {
    101
}

impl ExperimentConfig {
    pub fn new(data: DataSource) -> Self {
        ExperimentConfig {
            data,
            engine: EngineConfig::default(),
            split: SplitProtocol::default(),
            runs: default_runs(),
            seed: 0,
            landscape_resolution: default_resolution(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        if self.landscape_resolution < 2 {
            return Err(Error::Config("landscape_resolution must be >= 2".into()));
        }
        if let DataSource::Problem { problem, samples } = &self.data {
            problem.validate()?;
            if *samples == 0 && !matches!(problem, ProblemSpec::RotatedCheckerboard { .. }) {
                return Err(Error::Config("samples must be >= 1".into()));
            }
        }
        self.engine.validate()
    }

    /// Loads or generates the full dataset, before splitting.
    pub fn load_data(&self) -> Result<Dataset> {
        match &self.data {
            DataSource::Problem { problem, samples } => problem.generate(*samples, data_seed(self.seed)),
            DataSource::File { path, csv } => load_csv(path, csv),
        }
    }
}

/// Output `index` of a SplitMix64 generator started at `state`.
pub fn splitmix64(state: u64, index: u64) -> u64 {
    let mut z = state.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `r`: the `r`-th SplitMix64 output from the master seed, so
/// adding runs never changes earlier ones.
pub fn run_seed(master: u64, r: usize) -> u64 {
    splitmix64(master, r as u64)
}

/// Seed for generating synthetic data; shared by all runs.
pub fn data_seed(master: u64) -> u64 {
    splitmix64(!master, 0)
}

/// Seed of the k-fold partition; shared by all runs.
pub fn partition_seed(master: u64) -> u64 {
    splitmix64(!master, 1)
}

/// Everything produced by one train/evaluate cycle.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// Accuracy of the final population on its own training split.
    pub train_accuracy: f64,
    pub test: EvalReport,
    pub trace: Vec<EpochStats>,
    pub model: ModelSnapshot,
}

/// Per-run record written to `run_<r>.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub train_accuracy: f64,
    pub test: EvalReport,
    pub config_hash: String,
}

impl RunResult {
    pub fn record(&self) -> RunRecord {
        RunRecord {
            run: self.run,
            seed: self.seed,
            train_size: self.train_size,
            test_size: self.test_size,
            train_accuracy: self.train_accuracy,
            test: self.test.clone(),
            config_hash: self.model.config_hash.clone(),
        }
    }
}

fn accuracy_on(pop: &Population, data: &Dataset, theta_exp: f64) -> f64 {
    let hits = data
        .features
        .iter()
        .zip(&data.labels)
        .filter(|(x, &l)| infer(pop, x, theta_exp) == l)
        .count();
    hits as f64 / data.len() as f64
}

/// Trains on `train` (already in raw units) and evaluates on `test`.
/// Normalization is fitted on `train`.
pub fn train_and_evaluate(
    engine: &EngineConfig,
    train_raw: &Dataset,
    test_raw: &Dataset,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<(RunResult, Dataset)> {
    let (normalizer, train_set, test_set) = Normalizer::fit_transform(train_raw, test_raw);
    let mut pop = Population::new(engine.max_population, train_set.dims(), train_set.num_classes());
    let start = Instant::now();
    let trace = train(&mut pop, &train_set, engine, rng)?;
    let wall = start.elapsed().as_secs_f64();

    let predicted: Vec<usize> = test_set.features.iter().map(|x| infer(&pop, x, engine.theta_exp)).collect();
    let confusion = confusion_matrix(&test_set.labels, &predicted, test_set.num_classes());
    let test = EvalReport::new(confusion, &pop, wall)?;
    let train_accuracy = accuracy_on(&pop, &train_set, engine.theta_exp);
    let model = ModelSnapshot::new(
        pop,
        normalizer,
        train_set.attribute_names.clone(),
        train_set.class_names.clone(),
        engine.clone(),
    );
    Ok((
        RunResult {
            run: 0,
            seed,
            train_size: train_set.len(),
            test_size: test_set.len(),
            train_accuracy,
            test,
            trace,
            model,
        },
        train_set,
    ))
}

/// Run `r` of an experiment on `data`. `folds` holds the shared k-fold
/// partition when the protocol is k-fold; run `r` then tests on fold
/// `r mod k`.
pub fn execute_run(cfg: &ExperimentConfig, data: &Dataset, folds: Option<&[Fold]>, r: usize) -> Result<RunResult> {
    let seed = run_seed(cfg.seed, r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fold = match folds {
        Some(f) => f[r % f.len()].clone(),
        None => split(&data.labels, cfg.split, rng.gen())?.remove(0),
    };
    let (mut result, _) = train_and_evaluate(
        &cfg.engine,
        &data.subset(&fold.train),
        &data.subset(&fold.test),
        seed,
        &mut rng,
    )?;
    result.run = r;
    Ok(result)
}

pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub data_size: usize,
    pub runs: Vec<std::result::Result<RunResult, String>>,
}

impl ExperimentOutcome {
    pub fn completed(&self) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn failures(&self) -> Vec<(usize, &str)> {
        self.runs
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e.as_str())))
            .collect()
    }
}

/// Runs every repetition, in parallel when `parallel` is set. Results are
/// identical either way because each run depends only on its own seed.
pub fn run_experiment(cfg: &ExperimentConfig, parallel: bool) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let data = cfg.load_data()?;
    let folds = match cfg.split {
        SplitProtocol::KFold { .. } => Some(split(&data.labels, cfg.split, partition_seed(cfg.seed))?),
        _ => None,
    };
    let one = |r: usize| execute_run(cfg, &data, folds.as_deref(), r).map_err(|e| e.to_string());
    let runs = if parallel {
        (0..cfg.runs).into_par_iter().map(one).collect()
    } else {
        (0..cfg.runs).map(one).collect()
    };
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        data_size: data.len(),
        runs,
    })
}

/// Mean with a two-sided 95% Student-t confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let (std, ci95) = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df > 0").inverse_cdf(0.975);
            (var.sqrt(), t * var.sqrt() / (n as f64).sqrt())
        } else {
            (0.0, 0.0)
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Summary { mean, std, ci95, min, max })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub error: String,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub data_size: usize,
    pub runs_requested: usize,
    pub runs_completed: usize,
    pub failures: Vec<RunFailure>,
    pub test_accuracy: Option<Summary>,
    pub test_macro_f1: Option<Summary>,
    pub train_accuracy: Option<Summary>,
    pub macro_rules: Option<Summary>,
    pub micro_rules: Option<Summary>,
    pub crisp_fraction: Option<Summary>,
}

impl ExperimentOutcome {
    pub fn aggregate(&self) -> AggregateReport {
        let done: Vec<&RunResult> = self.completed().collect();
        let field = |f: &dyn Fn(&RunResult) -> f64| Summary::of(&done.iter().map(|r| f(r)).collect::<Vec<_>>());
        AggregateReport {
            config: self.config.clone(),
            config_hash: config_hash(&self.config.engine),
            data_size: self.data_size,
            runs_requested: self.config.runs,
            runs_completed: done.len(),
            failures: self
                .failures()
                .into_iter()
                .map(|(run, e)| RunFailure {
                    run,
                    error: e.to_owned(),
                })
                .collect(),
            test_accuracy: field(&|r| r.test.accuracy),
            test_macro_f1: field(&|r| r.test.macro_f1),
            train_accuracy: field(&|r| r.train_accuracy),
            macro_rules: field(&|r| r.test.macro_rules as f64),
            micro_rules: field(&|r| r.test.micro_rules as f64),
            crisp_fraction: field(&|r| r.test.crisp_fraction),
        }
    }

    /// Writes `report.json`, and per completed run `run_<r>.json`,
    /// `model_<r>.json`, `trace_<r>.csv` and `rules_<r>.txt`. Two-attribute
    /// beta-rule experiments also get `landscape.csv` from the first completed
    /// run. Training times go to `timing.json`, the only output that is not
    /// reproducible.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: String, body: String| {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };
        put("report.json".into(), serde_json::to_string_pretty(&self.aggregate())? + "\n")?;
        let mut timing = Vec::new();
        for r in self.completed() {
            put(format!("run_{}.json", r.run), serde_json::to_string_pretty(&r.record())? + "\n")?;
            put(format!("model_{}.json", r.run), r.model.to_json() + "\n")?;
            put(format!("trace_{}.csv", r.run), trace_csv(&r.trace))?;
            put(format!("rules_{}.txt", r.run), export_rules(&r.model, true))?;
            timing.push(serde_json::json!({ "run": r.run, "wall_time_s": r.test.wall_time }));
        }
        if let Some(first) = self.completed().next() {
            let beta = self.config.engine.representation != Representation::Triangular;
            if first.model.dims() == 2 && beta {
                let grid = kurtosis_landscape(
                    &first.model.population,
                    self.config.landscape_resolution,
                    self.config.engine.theta_exp,
                )?;
                put("landscape.csv".into(), grid.to_csv())?;
            }
        }
        put("timing.json".into(), serde_json::to_string_pretty(&timing)? + "\n")
    }
}

pub fn trace_csv(trace: &[EpochStats]) -> String {
    let mut out = String::from("epoch,train_acc,macro_rules,micro_rules,crisp_fraction\n");
    for e in trace {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.epoch, e.train_acc, e.macro_rules, e.micro_rules, e.crisp_fraction
        )
        .unwrap();
    }
    out
}
