use rand::Rng;

use super::{
    reverse_decoupled_step, reverse_residual_posterior_step, reverse_residual_step, time_points,
    Denoiser, DiffusionState, Process, SamplerConfig,
};
use crate::error::{invalid, shape, Result};
use crate::graph::{Problem, SolutionVector};
use crate::heatmap::Heatmap;
use crate::rng::standard_normal;

/// `x_1 = X_d + eps` with unit Gaussian noise.
pub fn initial_state<R: Rng + ?Sized>(x_d: &SolutionVector, rng: &mut R) -> DiffusionState {
    let eps = standard_normal(rng, x_d.len());
    DiffusionState { x: x_d.values().iter().zip(&eps).map(|(d, e)| d + e).collect(), t: 1.0 }
}

/// Runs `cfg.steps` reverse transitions from `init` (which must sit at
/// `t = 1`), querying the denoiser once per step. Visited states, starting
/// with `init`, are pushed onto `trace` when given.
pub fn run_reverse<D: Denoiser + ?Sized, R: Rng + ?Sized>(
    denoiser: &D,
    problem: Problem<'_>,
    x_d: &SolutionVector,
    init: DiffusionState,
    cfg: &SamplerConfig,
    rng: &mut R,
    mut trace: Option<&mut Vec<DiffusionState>>,
) -> Result<DiffusionState> {
    if cfg.steps == 0 {
        return Err(invalid("sampler needs at least one step"));
    }
    if init.t != 1.0 {
        return Err(invalid(format!("reverse chains start at t = 1, got {}", init.t)));
    }
    let n = problem.variable_count();
    if init.x.len() != n || x_d.len() != n {
        return Err(shape(format!(
            "state has {} entries and X_d {}, instance has {n} variables",
            init.x.len(),
            x_d.len()
        )));
    }
    let sched = cfg.schedule();
    let grid = match cfg.process {
        Process::Decoupled => None,
        _ => Some(cfg.grid),
    };
    let ts = time_points(cfg.steps, grid);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(init.clone());
    }
    let mut state = init;
    for &t_prev in &ts[1..] {
        let pred = denoiser.predict(problem, x_d, &state)?;
        if pred.x_res.len() != n || pred.eps.len() != n {
            return Err(shape(format!(
                "denoiser returned ({}, {}) entries for {n} variables",
                pred.x_res.len(),
                pred.eps.len()
            )));
        }
        state = match cfg.process {
            Process::Decoupled => reverse_decoupled_step(&state, &pred, state.t - t_prev, rng)?,
            Process::ResidualDdpm => reverse_residual_step(&state, &pred, t_prev, &sched, rng)?,
            Process::ResidualPosterior => {
                reverse_residual_posterior_step(&state, &pred, t_prev, &sched, rng)?
            }
        };
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(state.clone());
        }
    }
    Ok(state)
}

/// Draws `x_1 = X_d + eps`, denoises it to `t = 0` and normalizes the
/// result into a heatmap.
pub fn sample_heatmap<D: Denoiser + ?Sized, R: Rng + ?Sized>(
    denoiser: &D,
    problem: Problem<'_>,
    x_d: &SolutionVector,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Heatmap> {
    if x_d.len() != problem.variable_count() {
        return Err(shape(format!(
            "X_d has {} entries, instance has {} variables",
            x_d.len(),
            problem.variable_count()
        )));
    }
    let init = initial_state(x_d, rng);
    let fin = run_reverse(denoiser, problem, x_d, init, cfg, rng, None)?;
    Ok(Heatmap::from_signed(&fin.x))
}
