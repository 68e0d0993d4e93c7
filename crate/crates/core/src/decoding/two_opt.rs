use crate::graph::{tour_length, Tour, TspInstance};

/// Only swaps improving the length by more than this are accepted.
const MIN_GAIN: f64 = 1e-9;

pub const DEFAULT_TWO_OPT_PASSES: usize = 50;

/// First-improvement 2-opt over the complete Euclidean graph, for at most
/// `max_passes` sweeps.
pub fn two_opt(inst: &TspInstance, tour: Tour, max_passes: usize) -> Tour {
    run(inst, tour, max_passes, None)
}

/// As [`two_opt`], also returning the tour length before the first and
/// after every accepted swap.
pub fn two_opt_traced(inst: &TspInstance, tour: Tour, max_passes: usize) -> (Tour, Vec<f64>) {
    let mut trace = vec![tour_length(inst, &tour).expect("tour matches instance")];
    let out = run(inst, tour, max_passes, Some(&mut trace));
    (out, trace)
}

fn run(inst: &TspInstance, tour: Tour, max_passes: usize, mut trace: Option<&mut Vec<f64>>) -> Tour {
    let mut t = tour.into_inner();
    let n = t.len();
    if n < 4 {
        return Tour::new(t).expect("input was a tour");
    }
    for _ in 0..max_passes {
        let mut improved = false;
        for i in 0..n - 2 {
            // with i = 0 the last leg shares node t[0]
            let j_end = if i == 0 { n - 1 } else { n };
            let mut j = i + 2;
            while j < j_end {
                let (a, b) = (t[i], t[i + 1]);
                let (c, d) = (t[j], t[(j + 1) % n]);
                let delta = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
                if delta < -MIN_GAIN {
                    t[i + 1..=j].reverse();
                    improved = true;
                    if let Some(tr) = trace.as_deref_mut() {
                        let tour = Tour::new(t.clone()).expect("reversal keeps a permutation");
                        tr.push(tour_length(inst, &tour).expect("tour matches instance"));
                    }
                }
                j += 1;
            }
        }
        if !improved {
            break;
        }
    }
    Tour::new(t).expect("reversal keeps a permutation")
}
