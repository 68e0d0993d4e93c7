//! Divide-and-conquer search for instances larger than the training scale.
//!
//! The instance is covered by overlapping k-NN subgraphs until every node is
//! covered `omega` times. Each subgraph is rescaled into the unit square and
//! sampled `q` times; every trial picks one heatmap per subgraph, averages
//! overlapping edge scores by their occurrence count, decodes, and the best
//! trial wins.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decoding::{decode, DEFAULT_TWO_OPT_PASSES};
use crate::diffusion::{sample_heatmap, Denoiser, SamplerConfig};
use crate::error::{invalid, shape, Error, Result};
use crate::graph::{degraded_tsp, euclidean, ordered, Point, Tour, TspInstance};
use crate::heatmap::Heatmap;
use crate::rng::{split_seed, stream};

/// A normalized local instance and its embedding into the global one.
#[derive(Debug, Clone)]
pub struct Subgraph {
    /// Local node id to global node id.
    pub node_map: Vec<usize>,
    pub instance: TspInstance,
    /// Local edge index to global edge index.
    pub edge_map: Vec<usize>,
}

/// Coverage counts of nodes and edges by subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub node: Vec<usize>,
    pub edge: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub subgraph_size: usize,
    pub omega: usize,
    /// Heatmaps per subgraph.
    pub q: usize,
    pub trials: usize,
    /// Sparsification degree inside each subgraph.
    pub k: usize,
    pub two_opt_passes: usize,
    pub sampler: SamplerConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            subgraph_size: 50,
            omega: 1,
            q: 2,
            trials: 50,
            k: 10,
            two_opt_passes: DEFAULT_TWO_OPT_PASSES,
            sampler: SamplerConfig::default(),
        }
    }
}

/// Subgraphs over a global instance whose edge list has been extended with
/// every local edge absent from the original sparsification.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub global: TspInstance,
    pub subgraphs: Vec<Subgraph>,
    pub occurrence: Occurrence,
}

/// Uniformly rescales points so their bounding box fits the unit square.
pub fn normalize(points: &[Point]) -> Vec<Point> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let side = if side > 0.0 { side } else { 1.0 };
    points
        .iter()
        .map(|p| [((p[0] - lo[0]) / side).clamp(0.0, 1.0), ((p[1] - lo[1]) / side).clamp(0.0, 1.0)])
        .collect()
}

pub fn decompose(g: &TspInstance, cfg: &SearchConfig) -> Result<Decomposition> {
    let n = g.n();
    let s = cfg.subgraph_size;
    if s < 4 || s > n {
        return Err(invalid(format!("subgraph size {s} must lie in 4..={n}")));
    }
    if cfg.omega == 0 {
        return Err(invalid("coverage threshold omega must be at least 1"));
    }
    let k = cfg.k.clamp(1, s - 1);
    let mut edges = g.edges().to_vec();
    let mut index: std::collections::HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut node_occ = vec![0usize; n];
    let mut subgraphs = Vec::new();
    loop {
        let (center, &min) = node_occ
            .iter()
            .enumerate()
            .min_by_key(|&(i, &o)| (o, i))
            .expect("n >= 4");
        if min >= cfg.omega {
            break;
        }
        let c = g.coords()[center];
        let mut others: Vec<usize> = (0..n).filter(|&v| v != center).collect();
        others.sort_by(|&a, &b| {
            euclidean(c, g.coords()[a]).total_cmp(&euclidean(c, g.coords()[b])).then(a.cmp(&b))
        });
        let mut nodes: Vec<usize> = std::iter::once(center).chain(others.into_iter().take(s - 1)).collect();
        nodes.sort_unstable();
        for &v in &nodes {
            node_occ[v] += 1;
        }
        let pts: Vec<Point> = nodes.iter().map(|&v| g.coords()[v]).collect();
        let local = TspInstance::knn(normalize(&pts), k)?;
        let edge_map = local
            .edges()
            .iter()
            .map(|&(a, b)| {
                let key = ordered(nodes[a], nodes[b]);
                *index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                })
            })
            .collect();
        subgraphs.push(Subgraph { node_map: nodes, instance: local, edge_map });
    }
    let mut edge_occ = vec![0usize; edges.len()];
    for sg in &subgraphs {
        for &e in &sg.edge_map {
            edge_occ[e] += 1;
        }
    }
    let global = TspInstance::with_edges(g.coords().to_vec(), edges, g.k())?.with_scale(g.scale());
    Ok(Decomposition { global, subgraphs, occurrence: Occurrence { node: node_occ, edge: edge_occ } })
}

/// Averages local scores onto the global edge list: `H_e = (1/o_e) sum_l
/// h_l(e)` over subgraphs containing `e`; uncovered edges score 0.
pub fn merge_heatmaps(heatmaps: &[&Heatmap], subgraphs: &[Subgraph], occ: &Occurrence) -> Result<Heatmap> {
    if heatmaps.len() != subgraphs.len() {
        return Err(shape(format!("{} heatmaps for {} subgraphs", heatmaps.len(), subgraphs.len())));
    }
    let m = occ.edge.len();
    let mut sum = vec![0.0; m];
    let mut count = vec![0usize; m];
    for (h, sg) in heatmaps.iter().zip(subgraphs) {
        if h.len() != sg.edge_map.len() {
            return Err(shape(format!("heatmap has {} entries, subgraph has {} edges", h.len(), sg.edge_map.len())));
        }
        for (&score, &e) in h.scores().iter().zip(&sg.edge_map) {
            if e >= m {
                return Err(Error::Consistency(format!("edge {e} beyond {m} global edges")));
            }
            sum[e] += score;
            count[e] += 1;
        }
    }
    if count != occ.edge {
        return Err(Error::Consistency("edge counts differ from subgraph edge maps".into()));
    }
    Heatmap::new(
        sum.iter()
            .zip(&count)
            .map(|(&s, &c)| if c > 0 { (s / c as f64).min(1.0) } else { 0.0 })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub cost: f64,
    pub running_min: f64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub tour: Tour,
    pub cost: f64,
    pub trace: Vec<TrialRecord>,
    pub subgraph_count: usize,
}

/// Samples `q` heatmaps per subgraph, then runs `trials` merge-and-decode
/// trials, each picking one heatmap per subgraph uniformly at random.
pub fn multi_modal_search<D: Denoiser + ?Sized>(
    g: &TspInstance,
    denoiser: &D,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchResult> {
    if cfg.q == 0 || cfg.trials == 0 {
        return Err(invalid("q and trial count must be at least 1"));
    }
    let dec = decompose(g, cfg)?;
    let sample_seed = split_seed(seed, 1);
    let mut pool: Vec<Vec<Heatmap>> = Vec::with_capacity(dec.subgraphs.len());
    for (l, sg) in dec.subgraphs.iter().enumerate() {
        let x_d = degraded_tsp(&sg.instance);
        let hs = (0..cfg.q)
            .map(|r| {
                let mut rng = stream(sample_seed, (l * cfg.q + r) as u64);
                sample_heatmap(denoiser, (&sg.instance).into(), &x_d, &cfg.sampler, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        pool.push(hs);
    }
    let mut pick = stream(split_seed(seed, 2), 0);
    let mut trace = Vec::with_capacity(cfg.trials);
    let mut best: Option<(Tour, f64)> = None;
    for trial in 0..cfg.trials {
        let chosen: Vec<&Heatmap> = pool.iter().map(|hs| &hs[pick.random_range(0..hs.len())]).collect();
        let h = merge_heatmaps(&chosen, &dec.subgraphs, &dec.occurrence)?;
        let d = decode((&dec.global).into(), &h, cfg.two_opt_passes);
        let tour = match d.solution {
            crate::graph::Solution::Tour(t) => t,
            crate::graph::Solution::Set(_) => unreachable!("TSP decode yields a tour"),
        };
        if best.as_ref().is_none_or(|(_, c)| d.cost < *c) {
            best = Some((tour, d.cost));
        }
        let running_min = best.as_ref().map(|b| b.1).expect("set above");
        trace.push(TrialRecord { trial, cost: d.cost, running_min });
    }
    let (tour, cost) = best.expect("trials >= 1");
    Ok(SearchResult { tour, cost, trace, subgraph_count: dec.subgraphs.len() })
}
