use std::sync::atomic::{AtomicUsize, Ordering};

use crate::diffusion::{residue, Denoiser, DiffusionState, ResiduePair};
use crate::error::{shape, Result};
use crate::graph::{Problem, SolutionVector};

/// Returns the true residue and noise for a known label.
///
/// With `eps = Some(..)` every query returns that fixed noise (the draw that
/// produced the chain's start). With `None` the noise is recovered from the
/// queried state through the decoupled marginal,
/// `eps = (x_t - x0 - t x_res) / sqrt(t)`.
#[derive(Debug, Clone)]
pub struct OracleDenoiser {
    x0: SolutionVector,
    x_res: Vec<f64>,
    eps: Option<Vec<f64>>,
}

impl OracleDenoiser {
    pub fn new(x0: SolutionVector, x_d: SolutionVector, eps: Option<Vec<f64>>) -> Self {
        let x_res = residue(&x0, &x_d);
        OracleDenoiser { x0, x_res, eps }
    }
}

impl Denoiser for OracleDenoiser {
    fn predict(&self, _: Problem<'_>, _: &SolutionVector, state: &DiffusionState) -> Result<ResiduePair> {
        if state.x.len() != self.x_res.len() {
            return Err(shape(format!(
                "oracle holds {} variables, state has {}",
                self.x_res.len(),
                state.x.len()
            )));
        }
        let eps = match &self.eps {
            Some(e) => e.clone(),
            None => {
                let s = state.t.sqrt();
                state
                    .x
                    .iter()
                    .zip(self.x0.values())
                    .zip(&self.x_res)
                    .map(|((x, a), r)| if s > 0.0 { (x - a - state.t * r) / s } else { 0.0 })
                    .collect()
            }
        };
        Ok(ResiduePair { x_res: self.x_res.clone(), eps })
    }
}

/// Wraps a denoiser and counts its invocations.
#[derive(Debug)]
pub struct CountingDenoiser<D> {
    inner: D,
    calls: AtomicUsize,
}

impl<D> CountingDenoiser<D> {
    pub fn new(inner: D) -> Self {
        CountingDenoiser { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<D: Denoiser> Denoiser for CountingDenoiser<D> {
    fn predict(&self, p: Problem<'_>, x_d: &SolutionVector, s: &DiffusionState) -> Result<ResiduePair> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.predict(p, x_d, s)
    }
}
