use crate::graph::{MisInstance, Tour, TspInstance};
use crate::heatmap::Heatmap;

/// Indices by descending score, ties to the lower index.
pub(crate) fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

struct Fragments {
    parent: Vec<usize>,
    degree: Vec<u8>,
    adj: Vec<[usize; 2]>,
    accepted: usize,
}

impl Fragments {
    fn new(n: usize) -> Self {
        Fragments { parent: (0..n).collect(), degree: vec![0; n], adj: vec![[usize::MAX; 2]; n], accepted: 0 }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Accepts `(u, v)` if both endpoints are free and it closes no cycle
    /// shorter than the full tour.
    fn try_add(&mut self, u: usize, v: usize) -> bool {
        let n = self.parent.len();
        if self.degree[u] >= 2 || self.degree[v] >= 2 {
            return false;
        }
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv && self.accepted + 1 != n {
            return false;
        }
        self.parent[ru] = rv;
        self.adj[u][self.degree[u] as usize] = v;
        self.adj[v][self.degree[v] as usize] = u;
        self.degree[u] += 1;
        self.degree[v] += 1;
        self.accepted += 1;
        true
    }

    fn complete(&self) -> bool {
        self.accepted == self.parent.len()
    }
}

/// Builds a tour from edges in descending heatmap order. If the sparse
/// edge list cannot complete a cycle, the remaining fragment endpoints are
/// joined nearest-first over the complete graph.
pub fn greedy_decode_tsp(inst: &TspInstance, h: &Heatmap) -> Tour {
    assert_eq!(h.len(), inst.edge_count(), "heatmap must cover the edge list");
    let n = inst.n();
    let mut fr = Fragments::new(n);
    for k in ranked(h.scores()) {
        let (u, v) = inst.edges()[k];
        fr.try_add(u, v);
        if fr.complete() {
            break;
        }
    }
    if !fr.complete() {
        let open: Vec<usize> = (0..n).filter(|&v| fr.degree[v] < 2).collect();
        let mut pairs = Vec::with_capacity(open.len() * open.len() / 2);
        for (i, &a) in open.iter().enumerate() {
            for &b in &open[i + 1..] {
                pairs.push((inst.dist(a, b), a, b));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
        // A fragment's own endpoints are rejected until they close the full
        // tour, which may require a second sweep.
        'join: for _ in 0..2 {
            for &(_, a, b) in &pairs {
                fr.try_add(a, b);
                if fr.complete() {
                    break 'join;
                }
            }
        }
    }
    debug_assert!(fr.complete());
    let mut order = Vec::with_capacity(n);
    let (mut prev, mut cur) = (usize::MAX, 0);
    for _ in 0..n {
        order.push(cur);
        let [a, b] = fr.adj[cur];
        let next = if a != prev { a } else { b };
        prev = cur;
        cur = next;
    }
    Tour::new(order).expect("greedy construction yields a Hamiltonian cycle")
}

/// Nodes in descending score order, each accepted when no neighbour is.
/// The result is a maximal independent set, sorted ascending.
pub fn greedy_decode_mis(inst: &MisInstance, h: &Heatmap) -> Vec<usize> {
    assert_eq!(h.len(), inst.n(), "heatmap must cover the node list");
    let mut taken = vec![false; inst.n()];
    let mut blocked = vec![false; inst.n()];
    for v in ranked(h.scores()) {
        if !blocked[v] {
            taken[v] = true;
            blocked[v] = true;
            for &w in inst.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    (0..inst.n()).filter(|&v| taken[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{encode_tour, generate_er, generate_tsp};
    use crate::rng::seeded;
    use crate::solvers::{exact_mis, held_karp};
    use rand::Rng;

    fn corners() -> TspInstance {
        TspInstance::knn(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 3).unwrap()
    }

    #[test]
    fn indicator_heatmap_returns_that_tour() {
        let inst = generate_tsp(10, &Default::default(), 3, 9).unwrap();
        let (tour, _) = held_karp(&inst).unwrap();
        let (sol, missing) = encode_tour(&inst, &tour);
        assert_eq!(missing, 0);
        let h = Heatmap::from_signed(sol.values());
        let out = greedy_decode_tsp(&inst, &h);
        let (back, _) = encode_tour(&inst, &out);
        assert_eq!(back, sol);
    }

    #[test]
    fn uniform_heatmap_follows_index_order() {
        let inst = corners();
        let h = Heatmap::new(vec![0.5; 6]).unwrap();
        // re-simulation: edges in index order (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        // accept (0,1), (0,2); (0,3) blocked by degree of 0; (1,2) would close
        // a 3-cycle; accept (1,3); (2,3) closes the tour.
        assert_eq!(inst.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let t = greedy_decode_tsp(&inst, &h);
        assert_eq!(t.order(), &[0, 1, 3, 2]);
    }

    #[test]
    fn random_heatmaps_give_tours() {
        let mut rng = seeded(4);
        let inst = generate_tsp(10, &Default::default(), 8, 2).unwrap();
        for _ in 0..1000 {
            let h = Heatmap::new((0..inst.edge_count()).map(|_| rng.random()).collect()).unwrap();
            let t = greedy_decode_tsp(&inst, &h);
            assert_eq!(t.len(), 10);
        }
    }

    #[test]
    fn all_zero_heatmap_completes_via_fallback() {
        // sparse list with only a few edges: completion must use the full graph
        let coords = vec![[0.0, 0.0], [0.1, 0.0], [0.5, 0.5], [1.0, 1.0], [0.9, 1.0], [0.2, 0.8]];
        let inst = TspInstance::with_edges(coords, vec![(0, 1), (3, 4)], 1).unwrap();
        let t = greedy_decode_tsp(&inst, &Heatmap::new(vec![1.0, 1.0]).unwrap());
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn mis_decoding() {
        let tri = MisInstance::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(greedy_decode_mis(&tri, &Heatmap::new(vec![0.5; 3]).unwrap()), vec![0]);
        let g = generate_er(30, 0.2, 6).unwrap();
        let best = exact_mis(&g).unwrap();
        let ind = crate::graph::SolutionVector::from_selected(30, best.iter().copied());
        assert_eq!(greedy_decode_mis(&g, &Heatmap::from_signed(ind.values())).len(), best.len());
        let mut rng = seeded(1);
        for _ in 0..1000 {
            let h = Heatmap::new((0..30).map(|_| rng.random()).collect()).unwrap();
            assert!(g.is_maximal_independent(&greedy_decode_mis(&g, &h)));
        }
    }
}
