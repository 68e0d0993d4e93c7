//! Central finite-difference verification of the analytic gradient.

use rand::seq::index::sample;

use super::gnn::{forward, loss_gradient, GnnParams, GraphInput};
use super::loss;
use crate::diffusion::{DiffusionState, ResiduePair};
use crate::error::Result;
use crate::graph::{Instance, SolutionVector};
use crate::rng::seeded;

/// A fixed network input together with its regression target.
#[derive(Debug, Clone)]
pub struct GradExample {
    pub instance: Instance,
    pub x_d: SolutionVector,
    pub state: DiffusionState,
    pub truth: ResiduePair,
}

impl GradExample {
    fn input(&self, params: &GnnParams) -> Result<GraphInput> {
        GraphInput::build(params.dims(), self.instance.as_problem(), &self.x_d, &self.state)
    }

    pub fn loss(&self, params: &GnnParams) -> Result<f64> {
        let (pred, _) = forward(params, self.input(params)?);
        loss(&pred, &self.truth)
    }

    pub fn gradient(&self, params: &GnnParams) -> Result<Vec<f64>> {
        let mut grad = vec![0.0; params.len()];
        loss_gradient(params, self.input(params)?, &self.truth, &mut grad)?;
        Ok(grad)
    }
}

/// Network outputs at the given parameters.
fn outputs(params: &GnnParams, example: &GradExample) -> Result<ResiduePair> {
    Ok(forward(params, example.input(params)?).0)
}

/// Central differences `(L(p + h e_i) - L(p - h e_i)) / 2h` at `indices`.
///
/// The numerator is evaluated as `sum (y+ - y-)(y+ + y- - 2 y)` over the
/// outputs, which equals the difference of the two squared-error losses
/// without cancelling two large sums against each other.
pub fn finite_difference(
    params: &GnnParams,
    example: &GradExample,
    indices: &[usize],
    h: f64,
) -> Result<Vec<f64>> {
    let mut p = params.clone();
    let truth = &example.truth;
    indices
        .iter()
        .map(|&i| {
            let orig = p.as_slice()[i];
            p.as_mut_slice()[i] = orig + h;
            let up = outputs(&p, example)?;
            p.as_mut_slice()[i] = orig - h;
            let down = outputs(&p, example)?;
            p.as_mut_slice()[i] = orig;
            // validates lengths
            loss(&up, truth)?;
            let diff = |a: &[f64], b: &[f64], y: &[f64]| {
                a.iter().zip(b).zip(y).map(|((u, d), y)| (u - d) * (u + d - 2.0 * y)).sum::<f64>()
            };
            let num = diff(&up.x_res, &down.x_res, &truth.x_res) + diff(&up.eps, &down.eps, &truth.eps);
            Ok(num / (2.0 * h))
        })
        .collect()
}

/// `|a - f| / max(|a|, |f|, 1e-8)`.
pub fn relative_error(a: f64, f: f64) -> f64 {
    (a - f).abs() / a.abs().max(f.abs()).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// Parameter index attaining the maximum.
    pub worst: usize,
    pub checked: usize,
}

/// Largest relative error between `analytic` and the finite differences at
/// `indices` (which `numeric` is aligned with).
pub fn compare(analytic: &[f64], numeric: &[f64], indices: &[usize]) -> GradCheck {
    let mut out = GradCheck { max_rel_error: 0.0, worst: 0, checked: indices.len() };
    for (&i, &f) in indices.iter().zip(numeric) {
        let e = relative_error(analytic[i], f);
        if e > out.max_rel_error || e.is_nan() {
            out.max_rel_error = e;
            out.worst = i;
        }
    }
    out
}

/// Parameter indices to probe: every entry of tensors with at most
/// `per_tensor` entries, otherwise `per_tensor` distinct entries drawn at
/// random. `None` selects every parameter.
pub fn probe_indices(params: &GnnParams, per_tensor: Option<usize>, seed: u64) -> Vec<usize> {
    let mut rng = seeded(seed);
    let mut out = Vec::new();
    for (_, slot) in params.tensors() {
        match per_tensor {
            Some(k) if slot.len() > k => {
                let mut picked: Vec<usize> = sample(&mut rng, slot.len(), k).into_vec();
                picked.sort_unstable();
                out.extend(picked.into_iter().map(|i| slot.offset + i));
            }
            _ => out.extend(slot.range()),
        }
    }
    out
}

/// Compares the analytic gradient with central differences of step `h`.
pub fn grad_check(
    params: &GnnParams,
    example: &GradExample,
    h: f64,
    per_tensor: Option<usize>,
    seed: u64,
) -> Result<GradCheck> {
    let indices = probe_indices(params, per_tensor, seed);
    let analytic = example.gradient(params)?;
    let numeric = finite_difference(params, example, &indices, h)?;
    Ok(compare(&analytic, &numeric, &indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoiser::gnn::{GnnDims, ProblemKind};
    use crate::graph::{degraded_mis, degraded_tsp, generate_er, generate_tsp};
    use crate::rng::standard_normal;

    fn tsp_example(n: usize, seed: u64) -> GradExample {
        let inst = generate_tsp(n, &Default::default(), seed, 4).unwrap();
        let x_d = degraded_tsp(&inst);
        let m = inst.edge_count();
        let mut rng = seeded(seed);
        let state = DiffusionState { x: standard_normal(&mut rng, m), t: 0.6 };
        let truth = ResiduePair { x_res: standard_normal(&mut rng, m), eps: standard_normal(&mut rng, m) };
        GradExample { instance: Instance::Tsp(inst), x_d, state, truth }
    }

    #[test]
    fn linear_toy_is_exact() {
        let ex = tsp_example(6, 1);
        let p = GnnParams::init(GnnDims::new(ProblemKind::Tsp, 0, 4), 2);
        let r = grad_check(&p, &ex, 1e-5, None, 0).unwrap();
        assert!(r.max_rel_error <= 1e-7, "{r:?}");
        assert_eq!(r.checked, p.len());
    }

    #[test]
    fn small_network_full_check() {
        let ex = tsp_example(8, 3);
        let p = GnnParams::init(GnnDims::new(ProblemKind::Tsp, 2, 6), 4);
        let r = grad_check(&p, &ex, 1e-5, None, 0).unwrap();
        assert!(r.max_rel_error <= 1e-4, "{r:?}");
    }

    #[test]
    fn mis_network_full_check() {
        let g = generate_er(12, 0.3, 2).unwrap();
        let x_d = degraded_mis(&g, 1);
        let mut rng = seeded(8);
        let ex = GradExample {
            state: DiffusionState { x: standard_normal(&mut rng, 12), t: 0.2 },
            truth: ResiduePair { x_res: standard_normal(&mut rng, 12), eps: standard_normal(&mut rng, 12) },
            instance: Instance::Mis(g),
            x_d,
        };
        let p = GnnParams::init(GnnDims::new(ProblemKind::Mis, 2, 6), 5);
        // MIS edge inputs are constant, so the first edge projection only
        // shifts every row equally and the edge norm removes it: its true
        // gradient is zero and differences see only rounding noise.
        let frozen = p.tensors().iter().find(|(n, _)| n == "layer0.edge.p").unwrap().1;
        let (live, dead): (Vec<usize>, Vec<usize>) =
            probe_indices(&p, None, 0).into_iter().partition(|i| !frozen.range().contains(i));
        let analytic = ex.gradient(&p).unwrap();
        let r = compare(&analytic, &finite_difference(&p, &ex, &live, 1e-5).unwrap(), &live);
        assert!(r.max_rel_error <= 1e-4, "{r:?}");
        for (i, f) in dead.iter().zip(finite_difference(&p, &ex, &dead, 1e-5).unwrap()) {
            assert!(analytic[*i].abs() < 1e-12 && f.abs() < 1e-8);
        }
    }

    #[test]
    fn corrupted_gradient_is_caught() {
        let ex = tsp_example(8, 5);
        let p = GnnParams::init(GnnDims::new(ProblemKind::Tsp, 2, 6), 6);
        let indices = probe_indices(&p, None, 0);
        let mut analytic = ex.gradient(&p).unwrap();
        let numeric = finite_difference(&p, &ex, &indices, 1e-5).unwrap();
        let target = (0..analytic.len()).max_by(|&a, &b| analytic[a].abs().total_cmp(&analytic[b].abs())).unwrap();
        analytic[target] *= 2.0;
        let r = compare(&analytic, &numeric, &indices);
        assert!(r.max_rel_error > 1e-4);
        assert_eq!(r.worst, target);
    }
}
