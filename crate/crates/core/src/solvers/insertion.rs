use crate::graph::{Tour, TspInstance};

/// Farthest insertion over the complete graph.
///
/// Starts from node 0 and the node farthest from it, then repeatedly takes
/// the unvisited node whose distance to the partial tour is largest and
/// inserts it where it lengthens the tour least. Ties resolve to the lowest
/// node index and the earliest insertion position.
pub fn farthest_insertion(inst: &TspInstance) -> Tour {
    let n = inst.n();
    let mut in_tour = vec![false; n];
    let mut tour = vec![0];
    in_tour[0] = true;
    let mut gap: Vec<f64> = (0..n).map(|v| inst.dist(0, v)).collect();
    while tour.len() < n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if !in_tour[v] && (pick == usize::MAX || gap[v] > gap[pick]) {
                pick = v;
            }
        }
        let len = tour.len();
        let (mut best_pos, mut best_delta) = (0, f64::INFINITY);
        for i in 0..len {
            let (a, b) = (tour[i], tour[(i + 1) % len]);
            let delta = inst.dist(a, pick) + inst.dist(pick, b) - inst.dist(a, b);
            if delta < best_delta {
                best_delta = delta;
                best_pos = i;
            }
        }
        tour.insert(best_pos + 1, pick);
        in_tour[pick] = true;
        for v in 0..n {
            if !in_tour[v] {
                gap[v] = gap[v].min(inst.dist(pick, v));
            }
        }
    }
    Tour::new(tour).expect("insertion builds a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_tsp, tour_length, Distribution};
    use crate::solvers::held_karp;

    #[test]
    fn unit_square() {
        let inst = TspInstance::knn(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 3).unwrap();
        let tour = farthest_insertion(&inst);
        assert!((tour_length(&inst, &tour).unwrap() - 4.0).abs() < 1e-12);
    }

    /// Independent restatement: grow the tour from scratch by recomputing
    /// every node's distance to the tour on each round.
    fn resimulate(inst: &TspInstance) -> Vec<usize> {
        let n = inst.n();
        let mut tour = vec![0usize];
        while tour.len() < n {
            let gap = |v: usize| tour.iter().map(|&u| inst.dist(u, v)).fold(f64::INFINITY, f64::min);
            let mut pick = None;
            for v in (0..n).filter(|v| !tour.contains(v)) {
                match pick {
                    None => pick = Some(v),
                    Some(p) if gap(v) > gap(p) => pick = Some(v),
                    _ => {}
                }
            }
            let pick = pick.unwrap();
            let deltas: Vec<f64> = (0..tour.len())
                .map(|i| {
                    let (a, b) = (tour[i], tour[(i + 1) % tour.len()]);
                    inst.dist(a, pick) + inst.dist(pick, b) - inst.dist(a, b)
                })
                .collect();
            let pos = (0..deltas.len()).fold(0, |best, i| if deltas[i] < deltas[best] { i } else { best });
            tour.insert(pos + 1, pick);
        }
        tour
    }

    #[test]
    fn ten_nodes_bounded_by_optimum_and_matches_resimulation() {
        let inst = generate_tsp(10, &Distribution::Uniform, 2, 9).unwrap();
        let tour = farthest_insertion(&inst);
        let len = tour_length(&inst, &tour).unwrap();
        assert!(len >= held_karp(&inst).unwrap().1 - 1e-12);
        assert_eq!(tour.order(), &resimulate(&inst)[..]);
    }

    #[test]
    fn deterministic() {
        let inst = generate_tsp(60, &Distribution::cluster(), 8, 6).unwrap();
        assert_eq!(farthest_insertion(&inst), farthest_insertion(&inst));
    }
}
