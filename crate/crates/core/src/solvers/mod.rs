//! Exact and heuristic reference solvers used for labels and ground truth.

mod held_karp;
mod insertion;
mod mis;

pub use held_karp::{held_karp, HELD_KARP_MAX_NODES};
pub use insertion::farthest_insertion;
pub use mis::{augment_mis, exact_mis, greedy_mis, EXACT_MIS_MAX_NODES};

use crate::decoding::two_opt;
use crate::graph::{MisInstance, Tour, TspInstance};

/// Largest TSP size labelled by the exact dynamic program.
pub const EXACT_TSP_LABEL_LIMIT: usize = 12;

/// Default pass cap for 2-opt refinement of insertion labels.
pub const LABEL_TWO_OPT_PASSES: usize = 1000;

/// Reference tour for training labels: exact up to
/// [`EXACT_TSP_LABEL_LIMIT`] nodes, otherwise farthest insertion refined by 2-opt.
pub fn label_tsp(inst: &TspInstance) -> Tour {
    if inst.n() <= EXACT_TSP_LABEL_LIMIT {
        held_karp(inst).expect("size checked").0
    } else {
        two_opt(inst, farthest_insertion(inst), LABEL_TWO_OPT_PASSES)
    }
}

/// Reference independent set: exact up to [`EXACT_MIS_MAX_NODES`] nodes,
/// otherwise greedy with augmentation passes.
pub fn label_mis(inst: &MisInstance) -> Vec<usize> {
    if inst.n() <= EXACT_MIS_MAX_NODES {
        exact_mis(inst).expect("size checked")
    } else {
        augment_mis(inst, greedy_mis(inst))
    }
}
