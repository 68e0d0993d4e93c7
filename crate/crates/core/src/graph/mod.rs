//! Problem instances and their shared variable space.
//!
//! A TSP instance exposes its sparsified edge list as the variable space: a
//! solution vector, a heatmap and a diffusion state hold one entry per edge,
//! in edge-list order. An MIS instance uses its node list directly.

mod dataset;
mod degraded;
mod generate;
mod tsplib;

pub use dataset::{
    parse_dataset, parse_solutions, write_dataset, write_solutions, write_trajectory, Record,
    Solution,
};
pub use degraded::{degraded_mis, degraded_solution, degraded_tsp};
pub use generate::{generate_er, generate_tsp, sample_points, Distribution};
pub use tsplib::parse_tsplib;

use crate::error::{invalid, Result};

pub type Point = [f64; 2];

pub fn euclidean(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Euclidean TSP instance on normalized coordinates with a sparsified edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    coords: Vec<Point>,
    edges: Vec<(usize, usize)>,
    k: usize,
    scale: f64,
    incident: Vec<Vec<(usize, usize)>>,
}

impl TspInstance {
    /// Builds the k-nearest-neighbour edge list (symmetrized) and closes it
    /// under the sequential cycle `0-1-..-(n-1)-0`, so the degraded solution
    /// is always representable. Edges are sorted lexicographically.
    pub fn knn(coords: Vec<Point>, k: usize) -> Result<Self> {
        let n = coords.len();
        if n < 3 {
            return Err(invalid(format!("a tour needs at least 3 nodes, got {n}")));
        }
        if k == 0 || k >= n {
            return Err(invalid(format!("sparsification degree k={k} must lie in 1..{n}")));
        }
        let mut edges = knn_edges(&coords, k);
        edges.extend((0..n).map(|i| ordered(i, (i + 1) % n)));
        edges.sort_unstable();
        edges.dedup();
        Self::with_edges(coords, edges, k)
    }

    /// Uses an explicit edge list as the variable space (order preserved).
    pub fn with_edges(coords: Vec<Point>, edges: Vec<(usize, usize)>, k: usize) -> Result<Self> {
        let n = coords.len();
        for (i, p) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]) {
                return Err(invalid(format!("coordinate {i} = {p:?} outside the unit square")));
            }
        }
        let mut incident = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a},{b}) references a node outside 0..{n}")));
            }
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            let (u, v) = ordered(a, b);
            if incident[u].iter().any(|&(w, _)| w == v) {
                return Err(invalid(format!("duplicate edge ({u},{v})")));
            }
            incident[u].push((v, idx));
            incident[v].push((u, idx));
            normalized.push((u, v));
        }
        Ok(Self { coords, edges: normalized, k, scale: 1.0, incident })
    }

    /// Records the factor mapping normalized lengths back to original units.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `(neighbour, edge index)` pairs incident to `node`.
    pub fn incident(&self, node: usize) -> &[(usize, usize)] {
        &self.incident[node]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.incident
            .get(a)?
            .iter()
            .find_map(|&(w, idx)| (w == b).then_some(idx))
    }

    pub fn dist(&self, a: usize, b: usize) -> f64 {
        euclidean(self.coords[a], self.coords[b])
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let (u, v) = self.edges[edge];
        self.dist(u, v)
    }
}

pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Symmetrized, deduplicated k-NN edges; neighbour ties broken by index.
pub(crate) fn knn_edges(coords: &[Point], k: usize) -> Vec<(usize, usize)> {
    let n = coords.len();
    let mut edges = Vec::with_capacity(n * k);
    let mut others: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        others.clear();
        others.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (euclidean(coords[i], coords[j]), j)),
        );
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        edges.extend(others.iter().take(k).map(|&(_, j)| ordered(i, j)));
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Undirected graph for maximal independent set; the variable space is the node list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisInstance {
    adj: Vec<Vec<usize>>,
}

impl MisInstance {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a},{b}) references a node outside 0..{n}")));
            }
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.n()];
        for &v in set {
            if v >= self.n() || member[v] {
                return false;
            }
            member[v] = true;
        }
        set.iter().all(|&v| self.adj[v].iter().all(|&w| !member[w]))
    }

    /// Independent and no further node can be added.
    pub fn is_maximal_independent(&self, set: &[usize]) -> bool {
        if !self.is_independent(set) {
            return false;
        }
        let mut blocked = vec![false; self.n()];
        for &v in set {
            blocked[v] = true;
            for &w in &self.adj[v] {
                blocked[w] = true;
            }
        }
        blocked.into_iter().all(|b| b)
    }
}

/// A closed tour as a permutation of node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || seen[v] {
                return Err(invalid(format!("tour {order:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Self(order))
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Consecutive node pairs, including the closing edge.
    pub fn legs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |i| (self.0[i], self.0[(i + 1) % n]))
    }
}

/// Sum of Euclidean leg lengths along the closed cycle.
pub fn tour_length(inst: &TspInstance, tour: &Tour) -> Result<f64> {
    if tour.len() != inst.n() {
        return Err(invalid(format!(
            "tour visits {} nodes but the instance has {}",
            tour.len(),
            inst.n()
        )));
    }
    Ok(tour.legs().map(|(a, b)| inst.dist(a, b)).sum())
}

/// Signed solution encoding: `+1` selects a variable, `-1` leaves it out.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector(Vec<f64>);

impl SolutionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(invalid(format!("solution entries must be exactly +1 or -1, found {bad}")));
        }
        Ok(Self(values))
    }

    pub fn from_selected(len: usize, selected: impl IntoIterator<Item = usize>) -> Self {
        let mut values = vec![-1.0; len];
        for i in selected {
            values[i] = 1.0;
        }
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }
}

/// Encodes a tour over the instance's edge list. Legs missing from the
/// sparsified list cannot be represented; their count is returned.
pub fn encode_tour(inst: &TspInstance, tour: &Tour) -> (SolutionVector, usize) {
    let mut missing = 0;
    let mut selected = Vec::with_capacity(tour.len());
    for (a, b) in tour.legs() {
        match inst.edge_id(a, b) {
            Some(idx) => selected.push(idx),
            None => missing += 1,
        }
    }
    (SolutionVector::from_selected(inst.edge_count(), selected), missing)
}

/// Decodes a `±1` edge vector that forms a Hamiltonian cycle.
pub fn decode_tour(inst: &TspInstance, sol: &SolutionVector) -> Result<Tour> {
    if sol.len() != inst.edge_count() {
        return Err(crate::error::shape(format!(
            "solution has {} entries, instance has {} edges",
            sol.len(),
            inst.edge_count()
        )));
    }
    let n = inst.n();
    let mut adj = vec![Vec::with_capacity(2); n];
    for idx in sol.selected() {
        let (u, v) = inst.edges()[idx];
        adj[u].push(v);
        adj[v].push(u);
    }
    if adj.iter().any(|a| a.len() != 2) {
        return Err(invalid("selected edges do not give every node degree 2"));
    }
    let mut order = Vec::with_capacity(n);
    let (mut prev, mut cur) = (usize::MAX, 0);
    for _ in 0..n {
        order.push(cur);
        let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
        prev = cur;
        cur = next;
    }
    if cur != 0 {
        return Err(invalid("selected edges form more than one cycle"));
    }
    Tour::new(order)
}

/// Borrowed view over either problem kind.
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    Tsp(&'a TspInstance),
    Mis(&'a MisInstance),
}

impl Problem<'_> {
    pub fn variable_count(&self) -> usize {
        match self {
            Problem::Tsp(t) => t.edge_count(),
            Problem::Mis(m) => m.n(),
        }
    }
}

impl<'a> From<&'a TspInstance> for Problem<'a> {
    fn from(inst: &'a TspInstance) -> Self {
        Problem::Tsp(inst)
    }
}

impl<'a> From<&'a MisInstance> for Problem<'a> {
    fn from(inst: &'a MisInstance) -> Self {
        Problem::Mis(inst)
    }
}

/// Owned instance of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Tsp(TspInstance),
    Mis(MisInstance),
}

impl Instance {
    pub fn as_problem(&self) -> Problem<'_> {
        match self {
            Instance::Tsp(t) => Problem::Tsp(t),
            Instance::Mis(m) => Problem::Mis(m),
        }
    }

    pub fn variable_count(&self) -> usize {
        self.as_problem().variable_count()
    }
}
