//! Anisotropic graph network with hand-derived reverse-mode gradients.
//!
//! Node embeddings `h` and edge embeddings `e` are updated jointly. Per layer:
//!
//! ```text
//! e^  = e + (M t_emb + c)
//! a   = e^ P' + (h Q')[u] + (h Q')[v]
//! e'  = e^ + silu(norm_e(a))
//! agg = sum over incident edges of sigmoid(e') * (h V')[other end]
//! h'  = h + silu(norm_n(h U' + agg))
//! ```
//!
//! `norm` standardizes each channel over the rows of the graph (edges or
//! nodes) and applies a learnable scale and shift. Two linear heads read the
//! residue and noise from the edge stream (TSP) or node stream (MIS).

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::diffusion::{Denoiser, DiffusionState, ResiduePair};
use crate::error::{shape, Result};
use crate::graph::{Problem, SolutionVector};
use crate::rng::seeded;

const NORM_EPS: f64 = 1e-5;
/// Timestamps are scaled by this factor before the sinusoidal embedding.
const TIME_SCALE: f64 = 1000.0;
pub const DEFAULT_TIME_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Tsp,
    Mis,
}

impl ProblemKind {
    pub fn of(problem: Problem<'_>) -> Self {
        match problem {
            Problem::Tsp(_) => ProblemKind::Tsp,
            Problem::Mis(_) => ProblemKind::Mis,
        }
    }

    pub fn node_features(self) -> usize {
        match self {
            ProblemKind::Tsp => 2,
            ProblemKind::Mis => 3,
        }
    }

    pub fn edge_features(self) -> usize {
        match self {
            ProblemKind::Tsp => 3,
            ProblemKind::Mis => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnnDims {
    pub kind: ProblemKind,
    pub layers: usize,
    pub width: usize,
    pub time_dim: usize,
}

impl GnnDims {
    pub fn new(kind: ProblemKind, layers: usize, width: usize) -> Self {
        GnnDims { kind, layers, width, time_dim: DEFAULT_TIME_DIM }
    }
}

/// Location of one tensor inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Slot {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Debug, Clone)]
struct LayerSlots {
    time_w: Slot,
    time_b: Slot,
    p: Slot,
    q: Slot,
    edge_gamma: Slot,
    edge_beta: Slot,
    u: Slot,
    v: Slot,
    node_gamma: Slot,
    node_beta: Slot,
}

#[derive(Debug, Clone)]
struct Layout {
    node_w: Slot,
    node_b: Slot,
    edge_w: Slot,
    edge_b: Slot,
    layers: Vec<LayerSlots>,
    res_w: Slot,
    res_b: Slot,
    eps_w: Slot,
    eps_b: Slot,
    names: Vec<(String, Slot)>,
    total: usize,
}

impl Layout {
    fn new(d: &GnnDims) -> Self {
        let mut names = Vec::new();
        let mut off = 0;
        let mut slot = |name: String, rows: usize, cols: usize| {
            let s = Slot { offset: off, rows, cols };
            off += rows * cols;
            names.push((name, s));
            s
        };
        let w = d.width;
        let node_w = slot("node_in.weight".into(), w, d.kind.node_features());
        let node_b = slot("node_in.bias".into(), 1, w);
        let edge_w = slot("edge_in.weight".into(), w, d.kind.edge_features());
        let edge_b = slot("edge_in.bias".into(), 1, w);
        let layers = (0..d.layers)
            .map(|l| LayerSlots {
                time_w: slot(format!("layer{l}.time.weight"), w, d.time_dim),
                time_b: slot(format!("layer{l}.time.bias"), 1, w),
                p: slot(format!("layer{l}.edge.p"), w, w),
                q: slot(format!("layer{l}.edge.q"), w, w),
                edge_gamma: slot(format!("layer{l}.edge_norm.gamma"), 1, w),
                edge_beta: slot(format!("layer{l}.edge_norm.beta"), 1, w),
                u: slot(format!("layer{l}.node.u"), w, w),
                v: slot(format!("layer{l}.node.v"), w, w),
                node_gamma: slot(format!("layer{l}.node_norm.gamma"), 1, w),
                node_beta: slot(format!("layer{l}.node_norm.beta"), 1, w),
            })
            .collect();
        let res_w = slot("head_res.weight".into(), 1, w);
        let res_b = slot("head_res.bias".into(), 1, 1);
        let eps_w = slot("head_eps.weight".into(), 1, w);
        let eps_b = slot("head_eps.bias".into(), 1, 1);
        Layout { node_w, node_b, edge_w, edge_b, layers, res_w, res_b, eps_w, eps_b, names, total: off }
    }
}

/// Network weights stored as one flat vector in declaration order.
#[derive(Debug, Clone)]
pub struct GnnParams {
    dims: GnnDims,
    layout: Layout,
    data: Vec<f64>,
}

impl PartialEq for GnnParams {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.data == other.data
    }
}

impl GnnParams {
    /// All-zero parameters.
    pub fn zeros(dims: GnnDims) -> Self {
        let layout = Layout::new(&dims);
        let data = vec![0.0; layout.total];
        GnnParams { dims, layout, data }
    }

    /// Weights Gaussian with standard deviation `1/sqrt(fan_in)`, norm scales
    /// one, biases and shifts zero.
    pub fn init(dims: GnnDims, seed: u64) -> Self {
        let mut p = Self::zeros(dims);
        let mut rng = seeded(seed);
        for (name, s) in p.layout.names.clone() {
            let fill = if name.ends_with("gamma") {
                Some(1.0)
            } else if name.ends_with("bias") || name.ends_with("beta") {
                Some(0.0)
            } else {
                None
            };
            let std = 1.0 / (s.cols as f64).sqrt();
            for v in &mut p.data[s.range()] {
                *v = fill.unwrap_or_else(|| std * rng.sample::<f64, _>(StandardNormal));
            }
        }
        p
    }

    pub fn from_vec(dims: GnnDims, data: Vec<f64>) -> Result<Self> {
        let layout = Layout::new(&dims);
        if data.len() != layout.total {
            return Err(shape(format!("expected {} parameters, got {}", layout.total, data.len())));
        }
        Ok(GnnParams { dims, layout, data })
    }

    pub fn dims(&self) -> &GnnDims {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Named tensors in declaration order.
    pub fn tensors(&self) -> &[(String, Slot)] {
        &self.layout.names
    }

    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        self.slot(name).map(|s| &self.data[s.range()])
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let s = self.slot(name)?;
        Some(&mut self.data[s.range()])
    }

    fn slot(&self, name: &str) -> Option<Slot> {
        self.layout.names.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn mat(&self, s: Slot) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((s.rows, s.cols), &self.data[s.range()]).expect("slot shape")
    }

    fn row(&self, s: Slot) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.data[s.range()])
    }
}

/// Sinusoidal embedding of `t` (scaled by 1000) into `dim` channels.
pub fn time_embedding(t: f64, dim: usize) -> Vec<f64> {
    let half = dim / 2;
    let s = t * TIME_SCALE;
    let mut out = vec![0.0; dim];
    for i in 0..half {
        let freq = (-(10_000f64).ln() * i as f64 / half as f64).exp();
        out[i] = (s * freq).sin();
        out[i + half] = (s * freq).cos();
    }
    out
}

/// Network input assembled from an instance and a diffusion state.
#[derive(Debug, Clone)]
pub struct GraphInput {
    node: Array2<f64>,
    edge: Array2<f64>,
    src: Vec<usize>,
    dst: Vec<usize>,
    on_edges: bool,
    temb: Array1<f64>,
}

impl GraphInput {
    pub fn build(
        dims: &GnnDims,
        problem: Problem<'_>,
        x_d: &SolutionVector,
        state: &DiffusionState,
    ) -> Result<Self> {
        let kind = ProblemKind::of(problem);
        if kind != dims.kind {
            return Err(shape(format!("network built for {:?}, got a {kind:?} instance", dims.kind)));
        }
        let nvar = problem.variable_count();
        if state.x.len() != nvar || x_d.len() != nvar {
            return Err(shape(format!(
                "state has {} and X_d {} entries, instance has {nvar} variables",
                state.x.len(),
                x_d.len()
            )));
        }
        let temb = Array1::from(time_embedding(state.t, dims.time_dim));
        let xd = x_d.values();
        Ok(match problem {
            Problem::Tsp(inst) => {
                let node = Array2::from_shape_fn((inst.n(), 2), |(i, c)| inst.coords()[i][c]);
                let edge = Array2::from_shape_fn((nvar, 3), |(k, c)| match c {
                    0 => inst.edge_length(k),
                    1 => state.x[k],
                    _ => xd[k],
                });
                let (src, dst) = inst.edges().iter().copied().unzip();
                GraphInput { node, edge, src, dst, on_edges: true, temb }
            }
            Problem::Mis(inst) => {
                let maxdeg = (0..inst.n()).map(|v| inst.degree(v)).max().unwrap_or(0).max(1) as f64;
                let node = Array2::from_shape_fn((inst.n(), 3), |(i, c)| match c {
                    0 => inst.degree(i) as f64 / maxdeg,
                    1 => state.x[i],
                    _ => xd[i],
                });
                let edges = inst.edges();
                let edge = Array2::ones((edges.len(), 1));
                let (src, dst) = edges.into_iter().unzip();
                GraphInput { node, edge, src, dst, on_edges: false, temb }
            }
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

struct Norm {
    out: Array2<f64>,
    xhat: Array2<f64>,
    rstd: Array1<f64>,
    /// `sigmoid(out)`, shared by the activation and its derivative.
    sig: Array2<f64>,
}

impl Norm {
    fn activated(&self) -> Array2<f64> {
        &self.out * &self.sig
    }

    fn activation_grad(&self, dy: &Array2<f64>) -> Array2<f64> {
        let mut d = dy.clone();
        ndarray::Zip::from(&mut d).and(&self.out).and(&self.sig).for_each(|d, &z, &s| {
            *d *= s * (1.0 + z * (1.0 - s));
        });
        d
    }
}

fn norm_forward(x: &Array2<f64>, gamma: ArrayView1<f64>, beta: ArrayView1<f64>) -> Norm {
    let m = x.nrows();
    if m == 0 {
        return Norm { out: x.clone(), xhat: x.clone(), rstd: Array1::zeros(x.ncols()), sig: x.clone() };
    }
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = x - &mean;
    let var = centered.mapv(|v| v * v).mean_axis(Axis(0)).expect("non-empty");
    let rstd = var.mapv(|v| 1.0 / (v + NORM_EPS).sqrt());
    let xhat = &centered * &rstd;
    let out = &xhat * &gamma + beta;
    let sig = out.mapv(sigmoid);
    Norm { out, xhat, rstd, sig }
}

/// Returns the input gradient; accumulates scale and shift gradients.
fn norm_backward(
    dy: &Array2<f64>,
    xhat: &Array2<f64>,
    rstd: &Array1<f64>,
    gamma: ArrayView1<f64>,
    dgamma: &mut [f64],
    dbeta: &mut [f64],
) -> Array2<f64> {
    let m = dy.nrows();
    if m == 0 {
        return dy.clone();
    }
    let sum_dy = dy.sum_axis(Axis(0));
    let sum_dy_xhat = (dy * xhat).sum_axis(Axis(0));
    for c in 0..dy.ncols() {
        dbeta[c] += sum_dy[c];
        dgamma[c] += sum_dy_xhat[c];
    }
    let dxhat = dy * &gamma;
    let s1 = dxhat.sum_axis(Axis(0));
    let s2 = (&dxhat * xhat).sum_axis(Axis(0));
    let mf = m as f64;
    let mut dx = dxhat * mf - &s1 - &(xhat * &s2);
    dx *= &(rstd / mf);
    dx
}

fn standard(m: &Array2<f64>) -> ndarray::CowArray<'_, f64, ndarray::Ix2> {
    m.as_standard_layout()
}

fn rows_mut(m: &mut Array2<f64>) -> &mut [f64] {
    if !m.is_standard_layout() {
        *m = m.as_standard_layout().into_owned();
    }
    m.as_slice_mut().expect("standard layout")
}

/// `a[k] += x[src[k]] + x[dst[k]]`.
fn gather_pairs(a: &mut Array2<f64>, x: &Array2<f64>, src: &[usize], dst: &[usize]) {
    let w = a.ncols();
    let x = standard(x);
    let xs = x.as_slice().expect("standard layout");
    let out = rows_mut(a);
    for (k, row) in out.chunks_exact_mut(w).enumerate() {
        let (u, v) = (&xs[src[k] * w..][..w], &xs[dst[k] * w..][..w]);
        for c in 0..w {
            row[c] += u[c] + v[c];
        }
    }
}

/// Adjoint of [`gather_pairs`]: `out[src[k]] += d[k]`, `out[dst[k]] += d[k]`.
fn scatter_pairs(d: &Array2<f64>, n: usize, src: &[usize], dst: &[usize]) -> Array2<f64> {
    let w = d.ncols();
    let mut out = Array2::zeros((n, w));
    let o = rows_mut(&mut out);
    let d = standard(d);
    for (k, row) in d.as_slice().expect("standard layout").chunks_exact(w).enumerate() {
        for node in [src[k], dst[k]] {
            let t = &mut o[node * w..][..w];
            for c in 0..w {
                t[c] += row[c];
            }
        }
    }
    out
}

/// `b[u] += g[k] * hv[v]` and `b[v] += g[k] * hv[u]` for every edge `k = (u, v)`.
fn aggregate(b: &mut Array2<f64>, g: &Array2<f64>, hv: &Array2<f64>, src: &[usize], dst: &[usize]) {
    let w = b.ncols();
    let (g, hv) = (standard(g), standard(hv));
    let (gs, hs) = (g.as_slice().expect("standard layout"), hv.as_slice().expect("standard layout"));
    let out = rows_mut(b);
    for k in 0..src.len() {
        let gk = &gs[k * w..][..w];
        for (to, from) in [(src[k], dst[k]), (dst[k], src[k])] {
            let hf = &hs[from * w..][..w];
            let t = &mut out[to * w..][..w];
            for c in 0..w {
                t[c] += gk[c] * hf[c];
            }
        }
    }
}

/// Gradients of [`aggregate`] with respect to the gates and `hv`.
fn aggregate_backward(
    db: &Array2<f64>,
    g: &Array2<f64>,
    hv: &Array2<f64>,
    src: &[usize],
    dst: &[usize],
) -> (Array2<f64>, Array2<f64>) {
    let w = db.ncols();
    let mut dg = Array2::zeros(g.raw_dim());
    let mut dhv = Array2::zeros(hv.raw_dim());
    let (db, g, hv) = (standard(db), standard(g), standard(hv));
    let dbs = db.as_slice().expect("standard layout");
    let (gs, hs) = (g.as_slice().expect("standard layout"), hv.as_slice().expect("standard layout"));
    let (dgs, dhs) = (rows_mut(&mut dg), rows_mut(&mut dhv));
    for k in 0..src.len() {
        let gk = &gs[k * w..][..w];
        let dgk = &mut dgs[k * w..][..w];
        for (to, from) in [(src[k], dst[k]), (dst[k], src[k])] {
            let (dt, hf) = (&dbs[to * w..][..w], &hs[from * w..][..w]);
            let dh = &mut dhs[from * w..][..w];
            for c in 0..w {
                dgk[c] += dt[c] * hf[c];
                dh[c] += dt[c] * gk[c];
            }
        }
    }
    (dg, dhv)
}

struct LayerCache {
    h: Array2<f64>,
    e_hat: Array2<f64>,
    a: Norm,
    g: Array2<f64>,
    hv: Array2<f64>,
    b: Norm,
}

/// Intermediate activations retained for the backward pass.
pub struct Cache {
    input: GraphInput,
    layers: Vec<LayerCache>,
    h_out: Array2<f64>,
    e_out: Array2<f64>,
}

fn linear(x: &Array2<f64>, w: ArrayView2<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    x.dot(&w.t()) + b
}

fn add_mat(grad: &mut [f64], s: Slot, m: &Array2<f64>) {
    let mut view = ArrayViewMut2::from_shape((s.rows, s.cols), &mut grad[s.range()]).expect("slot shape");
    view += m;
}

fn add_row(grad: &mut [f64], s: Slot, v: &Array1<f64>) {
    for (g, x) in grad[s.range()].iter_mut().zip(v) {
        *g += x;
    }
}

/// Runs the network, keeping the activations needed by [`backward`].
pub fn forward(params: &GnnParams, input: GraphInput) -> (ResiduePair, Cache) {
    let ly = &params.layout;
    let mut h = linear(&input.node, params.mat(ly.node_w), params.row(ly.node_b));
    let mut e = linear(&input.edge, params.mat(ly.edge_w), params.row(ly.edge_b));
    let mut caches = Vec::with_capacity(ly.layers.len());
    for sl in &ly.layers {
        let tau = params.mat(sl.time_w).dot(&input.temb) + params.row(sl.time_b);
        let e_hat = &e + &tau;
        let hq = h.dot(&params.mat(sl.q).t());
        let mut a = e_hat.dot(&params.mat(sl.p).t());
        gather_pairs(&mut a, &hq, &input.src, &input.dst);
        let an = norm_forward(&a, params.row(sl.edge_gamma), params.row(sl.edge_beta));
        let e_new = &e_hat + &an.activated();
        let g = e_new.mapv(sigmoid);
        let hv = h.dot(&params.mat(sl.v).t());
        let mut b = h.dot(&params.mat(sl.u).t());
        aggregate(&mut b, &g, &hv, &input.src, &input.dst);
        let bn = norm_forward(&b, params.row(sl.node_gamma), params.row(sl.node_beta));
        let h_new = &h + &bn.activated();
        caches.push(LayerCache { h, e_hat, a: an, g, hv, b: bn });
        h = h_new;
        e = e_new;
    }
    let feat = if input.on_edges { &e } else { &h };
    let res = feat.dot(&params.row(ly.res_w)) + params.data[ly.res_b.offset];
    let eps = feat.dot(&params.row(ly.eps_w)) + params.data[ly.eps_b.offset];
    let out = ResiduePair { x_res: res.to_vec(), eps: eps.to_vec() };
    (out, Cache { input, layers: caches, h_out: h, e_out: e })
}

/// Accumulates into `grad` the gradient of a scalar whose derivative with
/// respect to the outputs is `d_out`.
pub fn backward(params: &GnnParams, cache: &Cache, d_out: &ResiduePair, grad: &mut [f64]) {
    let ly = &params.layout;
    let input = &cache.input;
    let d_res = Array1::from(d_out.x_res.clone());
    let d_eps = Array1::from(d_out.eps.clone());
    let feat = if input.on_edges { &cache.e_out } else { &cache.h_out };
    add_row(grad, ly.res_w, &feat.t().dot(&d_res));
    add_row(grad, ly.eps_w, &feat.t().dot(&d_eps));
    grad[ly.res_b.offset] += d_res.sum();
    grad[ly.eps_b.offset] += d_eps.sum();
    let d_feat = outer(&d_res, params.row(ly.res_w)) + outer(&d_eps, params.row(ly.eps_w));
    let (mut dh, mut de) = if input.on_edges {
        (Array2::zeros(cache.h_out.raw_dim()), d_feat)
    } else {
        (d_feat, Array2::zeros(cache.e_out.raw_dim()))
    };
    for (sl, c) in ly.layers.iter().zip(&cache.layers).rev() {
        // node update
        let d_bnorm = c.b.activation_grad(&dh);
        let (gam, bet) = split_pair(grad, sl.node_gamma, sl.node_beta);
        let db = norm_backward(&d_bnorm, &c.b.xhat, &c.b.rstd, params.row(sl.node_gamma), gam, bet);
        add_mat(grad, sl.u, &db.t().dot(&c.h));
        dh = dh + db.dot(&params.mat(sl.u));
        let (dg, dhv) = aggregate_backward(&db, &c.g, &c.hv, &input.src, &input.dst);
        add_mat(grad, sl.v, &dhv.t().dot(&c.h));
        dh = dh + dhv.dot(&params.mat(sl.v));
        // edge update
        de = de + &dg * &c.g.mapv(|s| s * (1.0 - s));
        let d_anorm = c.a.activation_grad(&de);
        let (gam, bet) = split_pair(grad, sl.edge_gamma, sl.edge_beta);
        let da = norm_backward(&d_anorm, &c.a.xhat, &c.a.rstd, params.row(sl.edge_gamma), gam, bet);
        add_mat(grad, sl.p, &da.t().dot(&c.e_hat));
        de = de + da.dot(&params.mat(sl.p));
        let dhq = scatter_pairs(&da, dh.nrows(), &input.src, &input.dst);
        add_mat(grad, sl.q, &dhq.t().dot(&c.h));
        dh = dh + dhq.dot(&params.mat(sl.q));
        // time injection
        let dtau = de.sum_axis(Axis(0));
        add_mat(grad, sl.time_w, &outer(&dtau, input.temb.view()));
        add_row(grad, sl.time_b, &dtau);
    }
    add_mat(grad, ly.node_w, &dh.t().dot(&input.node));
    add_row(grad, ly.node_b, &dh.sum_axis(Axis(0)));
    add_mat(grad, ly.edge_w, &de.t().dot(&input.edge));
    add_row(grad, ly.edge_b, &de.sum_axis(Axis(0)));
}

fn outer(a: &Array1<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j])
}

/// Disjoint mutable views of two adjacent slots (scale then shift).
fn split_pair(grad: &mut [f64], first: Slot, second: Slot) -> (&mut [f64], &mut [f64]) {
    debug_assert_eq!(first.offset + first.len(), second.offset);
    let (a, b) = grad[first.offset..second.offset + second.len()].split_at_mut(first.len());
    (a, b)
}

/// Loss value and its parameter gradient for one example.
pub fn loss_gradient(
    params: &GnnParams,
    input: GraphInput,
    truth: &ResiduePair,
    grad: &mut [f64],
) -> Result<f64> {
    let (pred, cache) = forward(params, input);
    let (value, d_out) = super::loss_and_grad(&pred, truth)?;
    backward(params, &cache, &d_out, grad);
    Ok(value)
}

/// Trained network used as a denoiser.
#[derive(Debug, Clone)]
pub struct GnnDenoiser {
    pub params: GnnParams,
}

impl GnnDenoiser {
    pub fn new(params: GnnParams) -> Self {
        GnnDenoiser { params }
    }
}

impl Denoiser for GnnDenoiser {
    fn predict(&self, p: Problem<'_>, x_d: &SolutionVector, s: &DiffusionState) -> Result<ResiduePair> {
        let input = GraphInput::build(&self.params.dims, p, x_d, s)?;
        Ok(forward(&self.params, input).0)
    }
}

impl GnnParams {
    /// Embeds these weights into a network of width `width >= self.width`,
    /// zero-padding every extra channel. Outputs are unchanged.
    pub fn widen(&self, width: usize) -> Result<GnnParams> {
        if width < self.dims.width {
            return Err(shape(format!("cannot narrow width {} to {width}", self.dims.width)));
        }
        let dims = GnnDims { width, ..self.dims };
        let mut out = GnnParams::zeros(dims);
        for ((name, small), (_, big)) in self.layout.names.iter().zip(out.layout.names.clone()) {
            let src = self.mat(*small);
            let mut dst = ArrayViewMut2::from_shape((big.rows, big.cols), &mut out.data[big.range()])
                .expect("slot shape");
            dst.slice_mut(s![..small.rows, ..small.cols]).assign(&src);
            if name.ends_with("gamma") {
                dst.slice_mut(s![.., small.cols..]).fill(1.0);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degraded_mis, degraded_tsp, generate_er, generate_tsp, TspInstance};
    use crate::rng::standard_normal;

    fn tsp_case(seed: u64) -> (TspInstance, SolutionVector, DiffusionState) {
        let inst = generate_tsp(10, &Default::default(), seed, 4).unwrap();
        let xd = degraded_tsp(&inst);
        let x = standard_normal(&mut seeded(seed + 100), inst.edge_count());
        (inst, xd, DiffusionState { x, t: 0.37 })
    }

    #[test]
    fn zero_heads_give_zero_outputs() {
        let (inst, xd, st) = tsp_case(1);
        let mut p = GnnParams::init(GnnDims::new(ProblemKind::Tsp, 2, 8), 3);
        for name in ["head_res.weight", "head_res.bias", "head_eps.weight", "head_eps.bias"] {
            p.tensor_mut(name).unwrap().fill(0.0);
        }
        let out = GnnDenoiser::new(p).predict((&inst).into(), &xd, &st).unwrap();
        assert!(out.x_res.iter().chain(&out.eps).all(|&v| v == 0.0));
    }

    #[test]
    fn node_relabeling_permutes_outputs() {
        let (inst, xd, st) = tsp_case(2);
        let den = GnnDenoiser::new(GnnParams::init(GnnDims::new(ProblemKind::Tsp, 3, 16), 4));
        let base = den.predict((&inst).into(), &xd, &st).unwrap();
        let n = inst.n();
        let mut rng = seeded(77);
        for _ in 0..20 {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let mut coords = vec![[0.0; 2]; n];
            for i in 0..n {
                coords[perm[i]] = inst.coords()[i];
            }
            let edges = inst
                .edges()
                .iter()
                .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
                .collect();
            let relabeled = TspInstance::with_edges(coords, edges, inst.k()).unwrap();
            let out = den.predict((&relabeled).into(), &xd, &st).unwrap();
            for k in 0..inst.edge_count() {
                assert!((out.x_res[k] - base.x_res[k]).abs() < 1e-10);
                assert!((out.eps[k] - base.eps[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn widened_network_is_identical() {
        let (inst, xd, st) = tsp_case(3);
        let small = GnnParams::init(GnnDims::new(ProblemKind::Tsp, 2, 8), 5);
        let big = small.widen(16).unwrap();
        let a = GnnDenoiser::new(small).predict((&inst).into(), &xd, &st).unwrap();
        let b = GnnDenoiser::new(big).predict((&inst).into(), &xd, &st).unwrap();
        for k in 0..a.x_res.len() {
            assert!((a.x_res[k] - b.x_res[k]).abs() < 1e-12);
            assert!((a.eps[k] - b.eps[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn mis_inputs_and_kind_check() {
        let g = generate_er(20, 0.2, 1).unwrap();
        let xd = degraded_mis(&g, 3);
        let st = DiffusionState { x: xd.values().to_vec(), t: 0.5 };
        let den = GnnDenoiser::new(GnnParams::init(GnnDims::new(ProblemKind::Mis, 2, 8), 1));
        let out = den.predict((&g).into(), &xd, &st).unwrap();
        assert_eq!(out.x_res.len(), 20);
        let (inst, txd, tst) = tsp_case(1);
        assert!(den.predict((&inst).into(), &txd, &tst).is_err());
        let empty = crate::graph::MisInstance::from_edges(4, &[]).unwrap();
        let xd = SolutionVector::from_selected(4, [0]);
        let st = DiffusionState { x: vec![0.1; 4], t: 0.9 };
        assert_eq!(den.predict((&empty).into(), &xd, &st).unwrap().eps.len(), 4);
    }

    #[test]
    fn time_embedding_shape() {
        let e = time_embedding(0.0, 16);
        assert_eq!(&e[..8], &[0.0; 8]);
        assert_eq!(&e[8..], &[1.0; 8]);
    }
}
