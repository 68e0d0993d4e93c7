use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gnn::{loss_gradient, GnnDims, GnnParams, GraphInput};
use crate::diffusion::{forward_decoupled, residue, ResiduePair};
use crate::error::{invalid, Error, Result};
use crate::graph::{Instance, SolutionVector};
use crate::rng::{seeded, split_seed};

/// One supervised item: an instance, its label and its degraded solution.
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub instance: Instance,
    pub x0: SolutionVector,
    pub x_d: SolutionVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Optimizer {
    Sgd { momentum: f64 },
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    Constant,
    /// Cosine decay to zero over the whole run.
    Cosine,
}

/// Training hyper-parameters. Each step draws `t = 1 - U[0, 1)`, i.e.
/// uniform on `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
    pub schedule: LrSchedule,
    /// Global gradient-norm clip.
    pub clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 1e-3,
            epochs: 1,
            batch_size: 16,
            seed: 0,
            optimizer: Optimizer::Sgd { momentum: 0.0 },
            schedule: LrSchedule::Constant,
            clip: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub params: GnnParams,
    /// Mean batch loss at every step.
    pub losses: Vec<f64>,
}

enum State {
    Sgd { velocity: Vec<f64> },
    Adam { m: Vec<f64>, v: Vec<f64>, step: i32 },
}

/// Trains a freshly initialized network of the given shape.
pub fn train(data: &[TrainExample], dims: GnnDims, cfg: &TrainConfig) -> Result<TrainReport> {
    let params = GnnParams::init(dims, split_seed(cfg.seed, 0));
    train_from(params, data, cfg, |_, _| {})
}

/// Continues training from `params`; `on_step(step, loss)` observes
/// progress.
pub fn train_from(
    mut params: GnnParams,
    data: &[TrainExample],
    cfg: &TrainConfig,
    mut on_step: impl FnMut(usize, f64),
) -> Result<TrainReport> {
    if data.is_empty() {
        return Err(invalid("training set is empty"));
    }
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) {
        return Err(invalid(format!("learning rate {} must be finite and non-negative", cfg.lr)));
    }
    if cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(invalid("epochs and batch size must be at least 1"));
    }
    let residues: Vec<Vec<f64>> = data.iter().map(|ex| residue(&ex.x0, &ex.x_d)).collect();
    let mut rng = seeded(split_seed(cfg.seed, 1));
    let np = params.len();
    let mut state = match cfg.optimizer {
        Optimizer::Sgd { .. } => State::Sgd { velocity: vec![0.0; np] },
        Optimizer::Adam { .. } => State::Adam { m: vec![0.0; np], v: vec![0.0; np], step: 0 },
    };
    let per_epoch = data.len().div_ceil(cfg.batch_size);
    let total = per_epoch * cfg.epochs;
    let mut losses = Vec::with_capacity(total);
    let mut grad = vec![0.0; np];
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let step = losses.len();
            grad.fill(0.0);
            let mut sum = 0.0;
            for &i in batch {
                let ex = &data[i];
                let t = 1.0 - rng.random::<f64>();
                let (st, eps) = forward_decoupled(&ex.x0, &residues[i], t, &mut rng)?;
                let input = GraphInput::build(params.dims(), ex.instance.as_problem(), &ex.x_d, &st)?;
                let truth = ResiduePair { x_res: residues[i].clone(), eps };
                sum += loss_gradient(&params, input, &truth, &mut grad)?;
            }
            let scale = 1.0 / batch.len() as f64;
            let loss = sum * scale;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { step, loss });
            }
            grad.iter_mut().for_each(|g| *g *= scale);
            if let Some(c) = cfg.clip {
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > c {
                    grad.iter_mut().for_each(|g| *g *= c / norm);
                }
            }
            let lr = match cfg.schedule {
                LrSchedule::Constant => cfg.lr,
                LrSchedule::Cosine => {
                    0.5 * cfg.lr * (1.0 + (std::f64::consts::PI * step as f64 / total as f64).cos())
                }
            };
            apply(&mut state, &cfg.optimizer, params.as_mut_slice(), &grad, lr);
            losses.push(loss);
            on_step(step, loss);
        }
    }
    Ok(TrainReport { params, losses })
}

fn apply(state: &mut State, opt: &Optimizer, p: &mut [f64], g: &[f64], lr: f64) {
    match (state, *opt) {
        (State::Sgd { velocity }, Optimizer::Sgd { momentum }) => {
            for ((w, v), gi) in p.iter_mut().zip(velocity.iter_mut()).zip(g) {
                *v = momentum * *v + gi;
                *w -= lr * *v;
            }
        }
        (State::Adam { m, v, step }, Optimizer::Adam { beta1, beta2, eps }) => {
            *step += 1;
            let c1 = 1.0 - beta1.powi(*step);
            let c2 = 1.0 - beta2.powi(*step);
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
            }
        }
        _ => unreachable!("optimizer state matches its configuration"),
    }
}
