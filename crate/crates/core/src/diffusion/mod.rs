//! Residue-anchored diffusion over the solution variable space.
//!
//! Two processes share the same endpoints: the clean label `x0` at `t = 0`
//! and the degraded solution plus unit noise at `t = 1`.
//!
//! * the *residual* chain, `x_t = x0 + (1 - alpha_t) x_res + beta_t eps`,
//!   stepped on a discrete grid;
//! * the *decoupled* process, `x_t = x0 + t x_res + sqrt(t) eps`, whose
//!   reverse transition is analytic for any step size — one step from
//!   `t = 1` recovers `x0` exactly when the residue and noise are known.

mod process;
mod sampler;
mod schedule;

pub use process::{
    decoupled_marginal, forward_decoupled, forward_residual, residual_coefficients,
    reverse_decoupled_step, reverse_residual_posterior_step, reverse_residual_step,
};
pub use sampler::{initial_state, run_reverse, sample_heatmap};
pub use schedule::{time_points, LinearSchedule, Schedule};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Problem, SolutionVector};

/// A point on a diffusion trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionState {
    pub x: Vec<f64>,
    pub t: f64,
}

/// Residue `X_d - x0` and noise, either ground truth or predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct ResiduePair {
    pub x_res: Vec<f64>,
    pub eps: Vec<f64>,
}

impl ResiduePair {
    /// Ground-truth pair for a label, its degraded solution and a noise draw.
    pub fn truth(x0: &SolutionVector, x_d: &SolutionVector, eps: Vec<f64>) -> Self {
        ResiduePair { x_res: residue(x0, x_d), eps }
    }

    pub fn zeros(len: usize) -> Self {
        ResiduePair { x_res: vec![0.0; len], eps: vec![0.0; len] }
    }
}

/// `X_d - x0`, entrywise.
pub fn residue(x0: &SolutionVector, x_d: &SolutionVector) -> Vec<f64> {
    x_d.values().iter().zip(x0.values()).map(|(d, a)| d - a).collect()
}

/// Predictor of the residue and noise at a state.
pub trait Denoiser: Sync {
    fn predict(
        &self,
        problem: Problem<'_>,
        x_d: &SolutionVector,
        state: &DiffusionState,
    ) -> Result<ResiduePair>;
}

impl<D: Denoiser + ?Sized> Denoiser for &D {
    fn predict(
        &self,
        problem: Problem<'_>,
        x_d: &SolutionVector,
        state: &DiffusionState,
    ) -> Result<ResiduePair> {
        (**self).predict(problem, x_d, state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    /// Analytic decoupled transition with step `1/K`.
    Decoupled,
    /// Discrete residual chain with the transition coefficients taken
    /// verbatim from the residual process definition.
    ResidualDdpm,
    /// Discrete residual chain using the exact Gaussian posterior of the
    /// residual forward marginal.
    ResidualPosterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    /// Reverse step count `K`.
    pub steps: usize,
    pub process: Process,
    pub seed: u64,
    /// Grid size of the residual chains.
    pub grid: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { steps: 1, process: Process::Decoupled, seed: 0, grid: 1000 }
    }
}

impl SamplerConfig {
    pub fn decoupled(steps: usize) -> Self {
        SamplerConfig { steps, ..Self::default() }
    }

    pub fn residual(steps: usize) -> Self {
        SamplerConfig { steps, process: Process::ResidualDdpm, ..Self::default() }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SamplerConfig { seed, ..self }
    }

    pub fn schedule(&self) -> LinearSchedule {
        LinearSchedule { grid: self.grid }
    }
}
