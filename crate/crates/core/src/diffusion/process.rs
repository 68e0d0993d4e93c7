//! Forward marginals and single reverse transitions of both processes.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DiffusionState, ResiduePair, Schedule};
use crate::error::{shape, Error, Result};
use crate::graph::SolutionVector;
use crate::rng::standard_normal;

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("time {t} outside [0, 1]")));
    }
    Ok(())
}

fn check_len(x0: &SolutionVector, x_res: &[f64]) -> Result<()> {
    if x0.len() != x_res.len() {
        return Err(shape(format!("x0 has {} entries, residue has {}", x0.len(), x_res.len())));
    }
    Ok(())
}

/// Residual forward draw `x_t = x0 + (1 - alpha_t) x_res + beta_t eps`.
/// Returns the state together with the drawn noise.
pub fn forward_residual<R: Rng + ?Sized>(
    x0: &SolutionVector,
    x_res: &[f64],
    t: f64,
    sched: &dyn Schedule,
    rng: &mut R,
) -> Result<(DiffusionState, Vec<f64>)> {
    check_time(t)?;
    check_len(x0, x_res)?;
    let eps = standard_normal(rng, x0.len());
    let (drift, noise) = (1.0 - sched.alpha(t), sched.beta(t));
    let x = x0
        .values()
        .iter()
        .zip(x_res)
        .zip(&eps)
        .map(|((a, r), e)| a + drift * r + noise * e)
        .collect();
    Ok((DiffusionState { x, t }, eps))
}

/// Decoupled forward draw `x_t = x0 + t x_res + sqrt(t) eps`.
pub fn forward_decoupled<R: Rng + ?Sized>(
    x0: &SolutionVector,
    x_res: &[f64],
    t: f64,
    rng: &mut R,
) -> Result<(DiffusionState, Vec<f64>)> {
    check_time(t)?;
    check_len(x0, x_res)?;
    let eps = standard_normal(rng, x0.len());
    let x = decoupled_marginal(x0.values(), x_res, &eps, t);
    Ok((DiffusionState { x, t }, eps))
}

/// The decoupled forward map for a given noise vector.
pub fn decoupled_marginal(x0: &[f64], x_res: &[f64], eps: &[f64], t: f64) -> Vec<f64> {
    let s = t.sqrt();
    x0.iter()
        .zip(x_res)
        .zip(eps)
        .map(|((a, r), e)| a + t * r + s * e)
        .collect()
}

fn check_pred(state: &DiffusionState, pred: &ResiduePair) -> Result<()> {
    if pred.x_res.len() != state.x.len() || pred.eps.len() != state.x.len() {
        return Err(shape(format!(
            "prediction lengths ({}, {}) do not match state length {}",
            pred.x_res.len(),
            pred.eps.len(),
            state.x.len()
        )));
    }
    Ok(())
}

fn gaussian_step<R: Rng + ?Sized>(
    state: &DiffusionState,
    pred: &ResiduePair,
    coef: [f64; 3],
    var: f64,
    t_prev: f64,
    rng: &mut R,
) -> DiffusionState {
    let sd = var.max(0.0).sqrt();
    let x = state
        .x
        .iter()
        .zip(&pred.x_res)
        .zip(&pred.eps)
        .map(|((x, r), e)| {
            let mean = coef[0] * x + coef[1] * r + coef[2] * e;
            if sd > 0.0 {
                mean + sd * rng.sample::<f64, _>(StandardNormal)
            } else {
                mean
            }
        })
        .collect();
    DiffusionState { x, t: t_prev }
}

/// Coefficients `[c_x, c_res, c_eps]` and variance of the residual
/// transition from `t` to `t_prev`, exactly as the residual process defines
/// them:
///
/// ```text
/// u   = (a' a b'^2 + a'^2 - a^2) / (a' b^2) x_t
///     + (a^2 - a'^2)(1 - a) / (a' b^2) x_res
///     + (a^2 - a'^2) / (a' b) eps
/// s^2 = (a'^2 - a^2) b'^2 / (a'^2 b^2)
/// ```
///
/// with `a = alpha_t`, `a' = alpha_{t_prev}`, `b = beta_t`, `b' = beta_{t_prev}`.
pub fn residual_coefficients(t: f64, t_prev: f64, sched: &dyn Schedule) -> Result<([f64; 3], f64)> {
    let (a, ap, b, bp) = (sched.alpha(t), sched.alpha(t_prev), sched.beta(t), sched.beta(t_prev));
    let den = ap * b * b;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateSchedule(format!(
            "alpha({t_prev}) * beta({t})^2 = {den}"
        )));
    }
    let c_x = (ap * a * bp * bp + ap * ap - a * a) / den;
    let c_res = (a * a - ap * ap) * (1.0 - a) / den;
    let c_eps = (a * a - ap * ap) / (ap * b);
    let var = (ap * ap - a * a) * bp * bp / (ap * ap * b * b);
    Ok(([c_x, c_res, c_eps], var))
}

/// Residual reverse transition `t -> t_prev` with `pred` substituted for the
/// true residue and noise.
pub fn reverse_residual_step<R: Rng + ?Sized>(
    state: &DiffusionState,
    pred: &ResiduePair,
    t_prev: f64,
    sched: &dyn Schedule,
    rng: &mut R,
) -> Result<DiffusionState> {
    if state.t <= 0.0 {
        return Err(Error::AlreadyTerminal);
    }
    if !(0.0..state.t).contains(&t_prev) {
        return Err(Error::InvalidArgument(format!(
            "t_prev = {t_prev} must lie in [0, {})",
            state.t
        )));
    }
    check_pred(state, pred)?;
    let (coef, var) = residual_coefficients(state.t, t_prev, sched)?;
    Ok(gaussian_step(state, pred, coef, var, t_prev, rng))
}

/// Gaussian posterior of the residual forward marginal, `t -> t_prev`:
/// `u = x_t - (a' - a) x_res - ((b^2 - b'^2) / b) eps`,
/// `s^2 = b'^2 (b^2 - b'^2) / b^2`.
///
/// Unlike [`reverse_residual_step`] this keeps every intermediate state on
/// the forward marginal; under the linear schedule it equals the decoupled
/// transition.
pub fn reverse_residual_posterior_step<R: Rng + ?Sized>(
    state: &DiffusionState,
    pred: &ResiduePair,
    t_prev: f64,
    sched: &dyn Schedule,
    rng: &mut R,
) -> Result<DiffusionState> {
    if state.t <= 0.0 {
        return Err(Error::AlreadyTerminal);
    }
    if !(0.0..state.t).contains(&t_prev) {
        return Err(Error::InvalidArgument(format!(
            "t_prev = {t_prev} must lie in [0, {})",
            state.t
        )));
    }
    check_pred(state, pred)?;
    let (a, ap, b, bp) = (
        sched.alpha(state.t),
        sched.alpha(t_prev),
        sched.beta(state.t),
        sched.beta(t_prev),
    );
    if b == 0.0 {
        return Err(Error::DegenerateSchedule(format!("beta({}) = 0", state.t)));
    }
    let gap = b * b - bp * bp;
    let coef = [1.0, -(ap - a), -gap / b];
    let var = bp * bp * gap / (b * b);
    Ok(gaussian_step(state, pred, coef, var, t_prev, rng))
}

/// Decoupled reverse transition over a step `dt`:
/// `u = x_t - dt x_res - dt eps / sqrt(t)`, `s^2 = dt (t - dt) / t`.
/// A full step (`dt = t`) is deterministic and consumes no randomness.
pub fn reverse_decoupled_step<R: Rng + ?Sized>(
    state: &DiffusionState,
    pred: &ResiduePair,
    dt: f64,
    rng: &mut R,
) -> Result<DiffusionState> {
    let t = state.t;
    if t <= 0.0 {
        return Err(Error::AlreadyTerminal);
    }
    if !(dt > 0.0 && dt <= t) {
        return Err(Error::InvalidArgument(format!("step {dt} must lie in (0, {t}]")));
    }
    check_pred(state, pred)?;
    let full = dt == t;
    let t_prev = if full { 0.0 } else { t - dt };
    let var = if full { 0.0 } else { dt * (t - dt) / t };
    Ok(gaussian_step(state, pred, [1.0, -dt, -dt / t.sqrt()], var, t_prev, rng))
}
