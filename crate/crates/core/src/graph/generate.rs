use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::{MisInstance, Point, TspInstance};
use crate::error::{invalid, Error, Result};
use crate::rng::seeded;

/// Coordinate distribution for random TSP instances.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum Distribution {
    #[default]
    Uniform,
    /// Isotropic Gaussian, clamped into the unit square.
    Normal { mean: f64, variance: f64 },
    /// Gaussian blobs around centers drawn uniformly from `[0.2, 0.8]²`.
    Cluster { centers: usize, std_dev: f64 },
}

impl Distribution {
    pub fn normal() -> Self {
        Distribution::Normal { mean: 0.5, variance: 0.1 }
    }

    pub fn cluster() -> Self {
        Distribution::Cluster { centers: 3, std_dev: 0.05 }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "normal" => Ok(Distribution::normal()),
            "cluster" => Ok(Distribution::cluster()),
            other => Err(invalid(format!("unknown distribution {other:?}"))),
        }
    }
}

fn clamp_unit(p: Point) -> Point {
    [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)]
}

/// Draws `n` points and, for the cluster distribution, each point's center
/// index (zero otherwise).
pub fn sample_points<R: Rng + ?Sized>(
    n: usize,
    dist: &Distribution,
    rng: &mut R,
) -> Result<(Vec<Point>, Vec<usize>)> {
    match *dist {
        Distribution::Uniform => {
            let pts = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
            Ok((pts, vec![0; n]))
        }
        Distribution::Normal { mean, variance } => {
            let normal = Normal::new(mean, variance.sqrt())
                .map_err(|e| invalid(format!("normal distribution: {e}")))?;
            let pts = (0..n)
                .map(|_| clamp_unit([normal.sample(rng), normal.sample(rng)]))
                .collect();
            Ok((pts, vec![0; n]))
        }
        Distribution::Cluster { centers, std_dev } => {
            if centers == 0 {
                return Err(invalid("cluster distribution needs at least one center"));
            }
            let noise = Normal::new(0.0, std_dev)
                .map_err(|e| invalid(format!("cluster spread: {e}")))?;
            let mids: Vec<Point> = (0..centers)
                .map(|_| [rng.random_range(0.2..=0.8), rng.random_range(0.2..=0.8)])
                .collect();
            let mut pts = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                let c = rng.random_range(0..centers);
                let m = mids[c];
                pts.push(clamp_unit([m[0] + noise.sample(rng), m[1] + noise.sample(rng)]));
                labels.push(c);
            }
            Ok((pts, labels))
        }
    }
}

/// Random TSP instance with a k-NN sparsified edge list.
pub fn generate_tsp(n: usize, dist: &Distribution, seed: u64, k: usize) -> Result<TspInstance> {
    if n < 4 {
        return Err(invalid(format!("TSP generation needs n >= 4, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(invalid(format!("sparsification degree k={k} must lie in 1..{n}")));
    }
    let mut rng = seeded(seed);
    let (coords, _) = sample_points(n, dist, &mut rng)?;
    TspInstance::knn(coords, k)
}

/// Erdős–Rényi graph: every unordered pair is an edge with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<MisInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    MisInstance::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::euclidean;

    #[test]
    fn four_nodes_with_k3_is_complete() {
        let inst = generate_tsp(4, &Distribution::Uniform, 7, 3).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.edge_count(), 6);
        for p in inst.coords() {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
    }

    #[test]
    fn normal_instance_is_clamped_and_sparsified() {
        let inst = generate_tsp(100, &Distribution::normal(), 1, 10).unwrap();
        for p in inst.coords() {
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
        for v in 0..100 {
            assert!(inst.incident(v).len() >= 10, "node {v} has too few edges");
        }
    }

    #[test]
    fn knn_edges_contain_each_nodes_own_nearest() {
        let inst = generate_tsp(60, &Distribution::Uniform, 5, 6).unwrap();
        for i in 0..60 {
            let mut others: Vec<(f64, usize)> = (0..60)
                .filter(|&j| j != i)
                .map(|j| (inst.dist(i, j), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0));
            for &(_, j) in others.iter().take(6) {
                let id = inst.edge_id(i, j).expect("nearest neighbour edge present");
                assert_eq!(inst.edge_id(j, i), Some(id));
            }
        }
    }

    #[test]
    fn cluster_points_are_concentrated() {
        let mut rng = seeded(3);
        let (pts, labels) = sample_points(50, &Distribution::cluster(), &mut rng).unwrap();
        let (mut intra, mut intra_n, mut all, mut all_n) = (0.0, 0usize, 0.0, 0usize);
        for i in 0..50 {
            for j in (i + 1)..50 {
                let d = euclidean(pts[i], pts[j]);
                all += d;
                all_n += 1;
                if labels[i] == labels[j] {
                    intra += d;
                    intra_n += 1;
                }
            }
        }
        assert!(intra / intra_n as f64 <= all / all_n as f64);
        // generate_tsp draws from the same stream
        let inst = generate_tsp(50, &Distribution::cluster(), 3, 10).unwrap();
        assert_eq!(inst.coords(), &pts[..]);
    }

    #[test]
    fn invalid_arguments() {
        assert!(generate_tsp(3, &Distribution::Uniform, 0, 2).is_err());
        assert!(generate_tsp(10, &Distribution::Uniform, 0, 10).is_err());
        assert!(generate_er(10, 1.5, 0).is_err());
        assert!(generate_er(10, -0.1, 0).is_err());
    }

    #[test]
    fn er_extremes() {
        assert_eq!(generate_er(10, 0.0, 0).unwrap().edge_count(), 0);
        assert_eq!(generate_er(10, 1.0, 0).unwrap().edge_count(), 45);
    }

    #[test]
    fn er_edge_count_is_binomial() {
        let g = generate_er(1000, 0.1, 5).unwrap();
        let pairs = 1000.0 * 999.0 / 2.0;
        let mean = 0.1 * pairs;
        let sd = (pairs * 0.1 * 0.9f64).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() <= 4.0 * sd);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_tsp(30, &Distribution::normal(), 42, 5).unwrap();
        let b = generate_tsp(30, &Distribution::normal(), 42, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(generate_er(40, 0.2, 9).unwrap(), generate_er(40, 0.2, 9).unwrap());
    }
}
