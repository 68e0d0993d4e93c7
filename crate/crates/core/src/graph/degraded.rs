//! Cheap feasible solutions that anchor the diffusion endpoint.

use rand::Rng;

use super::{MisInstance, Problem, SolutionVector, TspInstance};
use crate::rng::seeded;

/// Sequential cycle `0-1-..-(n-1)-0` over the instance's edge list.
///
/// Every instance built through [`TspInstance::knn`] already contains these
/// edges; legs missing from a hand-built edge list are skipped.
pub fn degraded_tsp(inst: &TspInstance) -> SolutionVector {
    let n = inst.n();
    let selected = (0..n).filter_map(|i| inst.edge_id(i, (i + 1) % n));
    SolutionVector::from_selected(inst.edge_count(), selected)
}

/// Each node kept with probability 1/2, then conflicts repaired by dropping
/// the lower-indexed endpoint of every violated edge.
pub fn degraded_mis(inst: &MisInstance, seed: u64) -> SolutionVector {
    let mut rng = seeded(seed);
    let mut keep: Vec<bool> = (0..inst.n()).map(|_| rng.random::<bool>()).collect();
    for (u, v) in inst.edges() {
        if keep[u] && keep[v] {
            keep[u.min(v)] = false;
        }
    }
    SolutionVector::from_selected(inst.n(), (0..inst.n()).filter(|&v| keep[v]))
}

pub fn degraded_solution(problem: Problem<'_>, seed: u64) -> SolutionVector {
    match problem {
        Problem::Tsp(t) => degraded_tsp(t),
        Problem::Mis(m) => degraded_mis(m, seed),
    }
}
