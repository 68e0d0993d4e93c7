//! Declarative pipeline configuration, one table per stage.
//!
//! Unknown keys are rejected and every value is checked before a stage
//! starts; errors carry the dotted path of the offending field. Relative
//! paths resolve against the output directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use codiff::denoiser::TrainConfig;
use codiff::diffusion::SamplerConfig;
use codiff::graph::Distribution;
use codiff::search::SearchConfig;

use crate::error::{config_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Tsp,
    Mis,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub gen: GenConfig,
    pub label: LabelConfig,
    pub train: TrainStage,
    pub solve: SolveConfig,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub count: usize,
    /// k-NN sparsification degree (TSP).
    pub k: usize,
    /// `uniform`, `normal` or `cluster` (TSP).
    pub distribution: String,
    /// Edge probability of the Erdős–Rényi generator (MIS).
    pub p: f64,
    pub output: PathBuf,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            problem: ProblemKind::Tsp,
            n: 12,
            count: 100,
            k: 11,
            distribution: "uniform".into(),
            p: 0.15,
            output: "dataset.txt".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelConfig {
    pub input: PathBuf,
    /// Dataset with label rows attached.
    pub output: PathBuf,
    /// Label solutions in the solutions format, for use as an eval
    /// baseline.
    pub solutions: PathBuf,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            input: "dataset.txt".into(),
            output: "labeled.txt".into(),
            solutions: "labels.txt".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainStage {
    pub dataset: PathBuf,
    pub layers: usize,
    pub width: usize,
    pub checkpoint: PathBuf,
    pub loss_trace: PathBuf,
    pub optim: TrainConfig,
}

impl Default for TrainStage {
    fn default() -> Self {
        TrainStage {
            dataset: "labeled.txt".into(),
            layers: 4,
            width: 64,
            checkpoint: "model.ckpt".into(),
            loss_trace: "loss.csv".into(),
            optim: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One diffusion sample, greedy decode.
    Greedy,
    /// Best of `samples` diffusion samples.
    Sampling,
    /// Decomposed multi-modal search (TSP).
    Search,
    /// Farthest insertion, no model (TSP).
    FarthestInsertion,
    /// Ascending-degree greedy, no model (MIS).
    GreedyDegree,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Sampling => "sampling",
            Method::Search => "search",
            Method::FarthestInsertion => "farthest_insertion",
            Method::GreedyDegree => "greedy_degree",
        }
    }

    pub fn needs_model(self) -> bool {
        matches!(self, Method::Greedy | Method::Sampling | Method::Search)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub dataset: PathBuf,
    pub checkpoint: PathBuf,
    pub method: Method,
    pub samples: usize,
    /// 2-opt passes after greedy decoding; 0 disables it.
    pub two_opt_passes: usize,
    pub sampler: SamplerConfig,
    pub search: SearchConfig,
    /// Defaults to `solutions_<method>.txt`.
    pub output: Option<PathBuf>,
    /// Defaults to `timing_<method>.csv`.
    pub timing: Option<PathBuf>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            dataset: "labeled.txt".into(),
            checkpoint: "model.ckpt".into(),
            method: Method::Greedy,
            samples: 4,
            two_opt_passes: 0,
            sampler: SamplerConfig::default(),
            search: SearchConfig::default(),
            output: None,
            timing: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodFiles {
    pub method: String,
    pub solutions: PathBuf,
    pub timing: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub dataset: PathBuf,
    /// Reference solutions defining the baseline cost.
    pub baseline: PathBuf,
    pub methods: Vec<MethodFiles>,
    pub csv: PathBuf,
    pub json: PathBuf,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            dataset: "labeled.txt".into(),
            baseline: "labels.txt".into(),
            methods: Vec::new(),
            csv: "results.csv".into(),
            json: "results.json".into(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| config_err("<root>", e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(path, e.into_inner().message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Config::parse(&text)
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<Distribution> {
        if self.count == 0 {
            return Err(config_err("gen.count", "must be at least 1"));
        }
        match self.problem {
            ProblemKind::Tsp => {
                if self.n < 4 {
                    return Err(config_err("gen.n", "TSP instances need at least 4 nodes"));
                }
                if self.k == 0 || self.k >= self.n {
                    return Err(config_err("gen.k", format!("must lie in 1..{}", self.n)));
                }
            }
            ProblemKind::Mis => {
                if !(0.0..=1.0).contains(&self.p) {
                    return Err(config_err("gen.p", "edge probability must lie in [0, 1]"));
                }
            }
        }
        self.distribution.parse().map_err(|e: codiff::Error| config_err("gen.distribution", e.to_string()))
    }
}

impl TrainStage {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(config_err("train.width", "must be at least 1"));
        }
        let o = &self.optim;
        if !(o.lr > 0.0 && o.lr.is_finite()) {
            return Err(config_err("train.optim.lr", "must be positive and finite"));
        }
        if o.epochs == 0 {
            return Err(config_err("train.optim.epochs", "must be at least 1"));
        }
        if o.batch_size == 0 {
            return Err(config_err("train.optim.batch_size", "must be at least 1"));
        }
        Ok(())
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sampler.steps == 0 {
            return Err(config_err("solve.sampler.steps", "must be at least 1"));
        }
        if self.method == Method::Sampling && self.samples == 0 {
            return Err(config_err("solve.samples", "must be at least 1"));
        }
        if self.method == Method::Search {
            let s = &self.search;
            if s.q == 0 || s.trials == 0 || s.omega == 0 {
                return Err(config_err("solve.search", "q, trials and omega must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn output(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| format!("solutions_{}.txt", self.method.name()).into())
    }

    pub fn timing(&self) -> PathBuf {
        self.timing.clone().unwrap_or_else(|| format!("timing_{}.csv", self.method.name()).into())
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(config_err("eval.methods", "list at least one method"));
        }
        Ok(())
    }
}
