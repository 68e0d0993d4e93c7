//! Turning heatmaps into feasible solutions: greedy construction, 2-opt
//! refinement and best-of-m sampling.

mod greedy;
mod two_opt;

pub use crate::heatmap::Heatmap;
pub use greedy::{greedy_decode_mis, greedy_decode_tsp};
pub use two_opt::{two_opt, two_opt_traced, DEFAULT_TWO_OPT_PASSES};

use crate::diffusion::{sample_heatmap, Denoiser, SamplerConfig};
use crate::error::{invalid, Result};
use crate::graph::{tour_length, Problem, Solution, SolutionVector};
use crate::rng::stream;

/// A decoded solution with its cost: tour length (TSP) or set size (MIS).
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub solution: Solution,
    pub cost: f64,
}

/// Greedy decode, followed for TSP by `two_opt_passes` of 2-opt (0 skips it).
pub fn decode(problem: Problem<'_>, h: &Heatmap, two_opt_passes: usize) -> Decoded {
    match problem {
        Problem::Tsp(inst) => {
            let mut tour = greedy_decode_tsp(inst, h);
            if two_opt_passes > 0 {
                tour = two_opt(inst, tour, two_opt_passes);
            }
            let cost = tour_length(inst, &tour).expect("decoded tour matches instance");
            Decoded { solution: Solution::Tour(tour), cost }
        }
        Problem::Mis(inst) => {
            let set = greedy_decode_mis(inst, h);
            Decoded { cost: set.len() as f64, solution: Solution::Set(set) }
        }
    }
}

fn better(problem: Problem<'_>, a: f64, b: f64) -> bool {
    match problem {
        Problem::Tsp(_) => a < b,
        Problem::Mis(_) => a > b,
    }
}

/// Draws `m` heatmaps (draw `i` uses stream `i` of `cfg.seed`), decodes
/// each and keeps the best; the earliest draw wins ties. Draw prefixes are
/// shared across `m`, so the best cost is monotone in `m`.
pub fn sample_decode<D: Denoiser + ?Sized>(
    denoiser: &D,
    problem: Problem<'_>,
    x_d: &SolutionVector,
    cfg: &SamplerConfig,
    m: usize,
    two_opt_passes: usize,
) -> Result<Decoded> {
    if m == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let mut best: Option<Decoded> = None;
    for i in 0..m {
        let h = sample_heatmap(denoiser, problem, x_d, cfg, &mut stream(cfg.seed, i as u64))?;
        let d = decode(problem, &h, two_opt_passes);
        if best.as_ref().is_none_or(|b| better(problem, d.cost, b.cost)) {
            best = Some(d);
        }
    }
    Ok(best.expect("m >= 1"))
}
