use crate::error::{Error, Result};
use crate::graph::{Tour, TspInstance};

pub const HELD_KARP_MAX_NODES: usize = 16;

/// Optimal tour over the complete Euclidean graph by dynamic programming
/// over subsets. The sparsified edge list is ignored.
pub fn held_karp(inst: &TspInstance) -> Result<(Tour, f64)> {
    let n = inst.n();
    if n > HELD_KARP_MAX_NODES {
        return Err(Error::TooLarge(format!("Held-Karp supports n <= {HELD_KARP_MAX_NODES}, got {n}")));
    }
    if n <= 3 {
        let tour = Tour::new((0..n).collect())?;
        let len = tour.legs().map(|(a, b)| inst.dist(a, b)).sum();
        return Ok((tour, len));
    }
    // node 0 is the fixed start; bit i of a mask stands for node i + 1
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = inst.dist(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if !here.is_finite() {
                continue;
            }
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let nxt = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let idx = (mask | (1 << nxt)) * m + nxt;
                let cand = here + inst.dist(j + 1, nxt + 1);
                if cand < cost[idx] {
                    cost[idx] = cand;
                    parent[idx] = j as u8;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut best, mut last) = (f64::INFINITY, 0);
    for j in 0..m {
        let c = cost[last_mask * m + j] + inst.dist(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (last_mask, last);
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    Ok((Tour::new(order)?, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_tsp, tour_length, Distribution};
    use rand::seq::SliceRandom;

    fn brute_force(inst: &TspInstance) -> f64 {
        fn rec(inst: &TspInstance, path: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut f64) {
            let n = inst.n();
            if path.len() == n {
                *best = best.min(acc + inst.dist(*path.last().unwrap(), 0));
                return;
            }
            for v in 1..n {
                if !used[v] {
                    used[v] = true;
                    let d = inst.dist(*path.last().unwrap(), v);
                    path.push(v);
                    rec(inst, path, used, acc + d, best);
                    path.pop();
                    used[v] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        let mut used = vec![false; inst.n()];
        used[0] = true;
        rec(inst, &mut vec![0], &mut used, 0.0, &mut best);
        best
    }

    #[test]
    fn unit_square() {
        let inst = TspInstance::knn(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], 3).unwrap();
        let (tour, len) = held_karp(&inst).unwrap();
        assert!((len - 4.0).abs() < 1e-12);
        assert!((tour_length(&inst, &tour).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points() {
        let inst = TspInstance::knn(vec![[0.1, 0.5], [0.9, 0.5], [0.4, 0.5]], 2).unwrap();
        let (_, len) = held_karp(&inst).unwrap();
        assert!((len - 1.6).abs() < 1e-12);
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        for seed in 0..6 {
            let n = 5 + seed as usize % 4;
            let inst = generate_tsp(n, &Distribution::Uniform, seed, n - 1).unwrap();
            let (tour, len) = held_karp(&inst).unwrap();
            assert!((len - brute_force(&inst)).abs() < 1e-9);
            assert!((tour_length(&inst, &tour).unwrap() - len).abs() < 1e-9);
        }
        // ten nodes: 9!/2 tours, still cheap to enumerate
        let inst = generate_tsp(10, &Distribution::Uniform, 77, 9).unwrap();
        assert!((held_karp(&inst).unwrap().1 - brute_force(&inst)).abs() < 1e-9);
    }

    #[test]
    fn no_random_tour_beats_it() {
        let mut rng = crate::rng::seeded(5);
        for seed in 0..3 {
            let inst = generate_tsp(12, &Distribution::Uniform, 100 + seed, 5).unwrap();
            let (_, best) = held_karp(&inst).unwrap();
            let mut order: Vec<usize> = (0..12).collect();
            for _ in 0..1000 {
                order.shuffle(&mut rng);
                let len = tour_length(&inst, &Tour::new(order.clone()).unwrap()).unwrap();
                assert!(best <= len + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_large_instances() {
        let inst = generate_tsp(17, &Distribution::Uniform, 1, 4).unwrap();
        assert!(matches!(held_karp(&inst), Err(Error::TooLarge(_))));
    }
}
