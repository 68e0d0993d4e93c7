//! The five pipeline stages. Each reads its inputs, fans per-instance work
//! out over the rayon pool, and writes outputs in instance order.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use codiff::decoding::sample_decode;
use codiff::denoiser::{self, read_checkpoint, write_checkpoint, GnnDenoiser, GnnDims, TrainExample};
use codiff::eval::{compute_gap, mean, EvalRecord, Sense};
use codiff::graph::{
    degraded_solution, encode_tour, generate_er, generate_tsp, parse_dataset, parse_solutions, tour_length,
    write_dataset, write_solutions, Instance, Record, Solution, SolutionVector, Tour,
};
use codiff::rng::split_seed;
use codiff::search::multi_modal_search;
use codiff::solvers::{farthest_insertion, greedy_mis, label_mis, label_tsp};

use crate::config::{Config, Method, ProblemKind};
use crate::error::{config_err, CliError, Result};

/// Stage indices for [`split_seed`].
const GEN: u64 = 0;
const TRAIN: u64 = 2;
const SOLVE: u64 = 3;
/// Sub-stream for degraded MIS solutions, shared by train and solve.
const DEGRADED: u64 = 4;

pub struct Context {
    pub config: Config,
    pub out: PathBuf,
}

impl Context {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out.join(p)
        }
    }

    fn read(&self, p: &Path) -> Result<(PathBuf, String)> {
        let path = self.path(p);
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok((path, text))
    }

    fn write(&self, p: &Path, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.path(p);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    fn dataset(&self, p: &Path) -> Result<Vec<Record>> {
        let (path, text) = self.read(p)?;
        parse_dataset(&text).map_err(|source| CliError::Input { path, source })
    }

    fn solutions(&self, p: &Path) -> Result<Vec<Vec<usize>>> {
        let (path, text) = self.read(p)?;
        parse_solutions(&text).map_err(|source| CliError::Input { path, source })
    }

    fn degraded(&self, i: usize, inst: &Instance) -> SolutionVector {
        degraded_solution(inst.as_problem(), split_seed(split_seed(self.config.seed, DEGRADED), i as u64))
    }
}

pub fn gen(ctx: &Context) -> Result<()> {
    let g = &ctx.config.gen;
    let dist = g.validate()?;
    let seed = split_seed(ctx.config.seed, GEN);
    let records = (0..g.count)
        .into_par_iter()
        .map(|i| {
            let s = split_seed(seed, i as u64);
            let instance = match g.problem {
                ProblemKind::Tsp => Instance::Tsp(generate_tsp(g.n, &dist, s, g.k)?),
                ProblemKind::Mis => Instance::Mis(generate_er(g.n, g.p, s)?),
            };
            Ok(Record { instance, label: None })
        })
        .collect::<codiff::Result<Vec<_>>>()?;
    let path = ctx.write(&g.output, write_dataset(&records))?;
    println!("wrote {} instances to {}", records.len(), path.display());
    Ok(())
}

fn reference(inst: &Instance) -> Solution {
    match inst {
        Instance::Tsp(t) => Solution::Tour(label_tsp(t)),
        Instance::Mis(m) => Solution::Set(label_mis(m)),
    }
}

fn encode(inst: &Instance, sol: &Solution) -> SolutionVector {
    match (inst, sol) {
        (Instance::Tsp(t), Solution::Tour(tour)) => encode_tour(t, tour).0,
        (Instance::Mis(m), Solution::Set(s)) => SolutionVector::from_selected(m.n(), s.iter().copied()),
        _ => unreachable!("reference solutions match their instance kind"),
    }
}

pub fn label(ctx: &Context) -> Result<()> {
    let l = &ctx.config.label;
    let mut records = ctx.dataset(&l.input)?;
    let solutions: Vec<Solution> = records.par_iter().map(|r| reference(&r.instance)).collect();
    for (r, s) in records.iter_mut().zip(&solutions) {
        r.label = Some(encode(&r.instance, s));
    }
    let data = ctx.write(&l.output, write_dataset(&records))?;
    let sols = ctx.write(&l.solutions, write_solutions(&solutions))?;
    println!("labelled {} instances: {}, {}", records.len(), data.display(), sols.display());
    Ok(())
}

pub fn train(ctx: &Context) -> Result<()> {
    let t = &ctx.config.train;
    t.validate()?;
    let records = ctx.dataset(&t.dataset)?;
    let first = records.first().ok_or_else(|| config_err("train.dataset", "dataset is empty"))?;
    let kind = denoiser::ProblemKind::of(first.instance.as_problem());
    let mut data = Vec::with_capacity(records.len());
    for (i, r) in records.into_iter().enumerate() {
        if denoiser::ProblemKind::of(r.instance.as_problem()) != kind {
            return Err(config_err("train.dataset", "dataset mixes TSP and MIS instances"));
        }
        let x0 = r.label.ok_or_else(|| config_err("train.dataset", format!("instance {i} has no label row")))?;
        let x_d = ctx.degraded(i, &r.instance);
        data.push(TrainExample { instance: r.instance, x0, x_d });
    }
    let dims = GnnDims::new(kind, t.layers, t.width);
    let cfg = denoiser::TrainConfig { seed: split_seed(ctx.config.seed, TRAIN), ..t.optim };
    let start = Instant::now();
    let report = denoiser::train(&data, dims, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let ckpt = ctx.write(&t.checkpoint, write_checkpoint(&report.params))?;
    let mut w = csv::Writer::from_path(ctx.path(&t.loss_trace))?;
    w.write_record(["step", "loss"])?;
    for (step, loss) in report.losses.iter().enumerate() {
        w.write_record([step.to_string(), loss.to_string()])?;
    }
    w.flush().map_err(|source| CliError::Io { path: ctx.path(&t.loss_trace), source })?;
    let tail = report.losses.len().saturating_sub(10);
    println!(
        "trained {} steps in {elapsed:.1}s, final loss {:.4}; checkpoint {}",
        report.losses.len(),
        mean(report.losses[tail..].iter().copied()),
        ckpt.display()
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct Timing {
    instance: usize,
    time_s: f64,
}

pub fn solve(ctx: &Context) -> Result<()> {
    let s = &ctx.config.solve;
    s.validate()?;
    let records = ctx.dataset(&s.dataset)?;
    let model = if s.method.needs_model() {
        let path = ctx.path(&s.checkpoint);
        let bytes = std::fs::read(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let params = read_checkpoint(&bytes).map_err(|source| CliError::Input { path, source })?;
        Some(GnnDenoiser::new(params))
    } else {
        None
    };
    let seed = split_seed(ctx.config.seed, SOLVE);
    let results = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let x_d = ctx.degraded(i, &r.instance);
            let problem = r.instance.as_problem();
            let sampler = s.sampler.with_seed(split_seed(seed, i as u64));
            let start = Instant::now();
            let solution = match (s.method, &r.instance) {
                (Method::Greedy, _) => {
                    let m = model.as_ref().expect("loaded above");
                    sample_decode(m, problem, &x_d, &sampler, 1, s.two_opt_passes)?.solution
                }
                (Method::Sampling, _) => {
                    let m = model.as_ref().expect("loaded above");
                    sample_decode(m, problem, &x_d, &sampler, s.samples, s.two_opt_passes)?.solution
                }
                (Method::Search, Instance::Tsp(t)) => {
                    let m = model.as_ref().expect("loaded above");
                    let cfg = codiff::search::SearchConfig { sampler: s.sampler, ..s.search };
                    Solution::Tour(multi_modal_search(t, m, &cfg, split_seed(seed, i as u64))?.tour)
                }
                (Method::FarthestInsertion, Instance::Tsp(t)) => {
                    let tour = farthest_insertion(t);
                    if s.two_opt_passes > 0 {
                        Solution::Tour(codiff::decoding::two_opt(t, tour, s.two_opt_passes))
                    } else {
                        Solution::Tour(tour)
                    }
                }
                (Method::GreedyDegree, Instance::Mis(m)) => Solution::Set(greedy_mis(m)),
                (method, _) => {
                    return Err(CliError::Config {
                        path: "solve.method".into(),
                        message: format!("{} does not apply to instance {i}", method.name()),
                    })
                }
            };
            let time_s = start.elapsed().as_secs_f64();
            Ok((solution, Timing { instance: i, time_s }))
        })
        .collect::<Result<Vec<_>>>()?;
    let (solutions, timings): (Vec<Solution>, Vec<Timing>) = results.into_iter().unzip();
    let out = ctx.write(&s.output(), write_solutions(&solutions))?;
    let mut w = csv::Writer::from_path(ctx.path(&s.timing()))?;
    for t in &timings {
        w.serialize(t)?;
    }
    w.flush().map_err(|source| CliError::Io { path: ctx.path(&s.timing()), source })?;
    let total: f64 = timings.iter().map(|t| t.time_s).sum();
    println!("solved {} instances with {} in {total:.2}s: {}", solutions.len(), s.method.name(), out.display());
    Ok(())
}

/// Cost of raw solution nodes, after checking feasibility.
fn cost(inst: &Instance, nodes: &[usize]) -> codiff::Result<(f64, Sense)> {
    match inst {
        Instance::Tsp(t) => Ok((tour_length(t, &Tour::new(nodes.to_vec())?)?, Sense::Min)),
        Instance::Mis(m) => {
            if !m.is_independent(nodes) {
                return Err(codiff::Error::InvalidArgument("solution is not an independent set".into()));
            }
            Ok((nodes.len() as f64, Sense::Max))
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    method: String,
    instances: usize,
    cost: f64,
    baseline: f64,
    gap: f64,
    time_s: f64,
}

pub fn eval(ctx: &Context) -> Result<()> {
    let e = &ctx.config.eval;
    e.validate()?;
    let records = ctx.dataset(&e.dataset)?;
    let baseline = ctx.solutions(&e.baseline)?;
    if baseline.len() != records.len() {
        return Err(config_err("eval.baseline", format!("{} solutions for {} instances", baseline.len(), records.len())));
    }
    let base_cost = records
        .iter()
        .zip(&baseline)
        .map(|(r, b)| cost(&r.instance, b).map(|c| c.0))
        .collect::<codiff::Result<Vec<_>>>()
        .map_err(|source| CliError::Input { path: ctx.path(&e.baseline), source })?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for m in &e.methods {
        let sols = ctx.solutions(&m.solutions)?;
        if sols.len() != records.len() {
            return Err(config_err("eval.methods", format!("{}: {} solutions for {} instances", m.method, sols.len(), records.len())));
        }
        let times: Vec<f64> = match &m.timing {
            Some(p) => {
                let mut r = csv::Reader::from_path(ctx.path(p))?;
                let t = r.deserialize::<Timing>().map(|t| t.map(|t| t.time_s)).collect::<Result<Vec<_>, _>>()?;
                if t.len() != records.len() {
                    return Err(config_err("eval.methods", format!("{}: {} timings for {} instances", m.method, t.len(), records.len())));
                }
                t
            }
            None => vec![0.0; records.len()],
        };
        let first = rows.len();
        for (i, r) in records.iter().enumerate() {
            let (c, sense) =
                cost(&r.instance, &sols[i]).map_err(|source| CliError::Input { path: ctx.path(&m.solutions), source })?;
            let gap = compute_gap(c, base_cost[i], sense)?;
            rows.push(EvalRecord { instance: i, method: m.method.clone(), cost: c, baseline: base_cost[i], gap, time_s: times[i] });
        }
        let mine = &rows[first..];
        summary.push(Summary {
            method: m.method.clone(),
            instances: mine.len(),
            cost: mean(mine.iter().map(|r| r.cost)),
            baseline: mean(mine.iter().map(|r| r.baseline)),
            gap: mean(mine.iter().map(|r| r.gap)),
            time_s: mine.iter().map(|r| r.time_s).sum(),
        });
    }
    let mut w = csv::Writer::from_path(ctx.path(&e.csv))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| CliError::Io { path: ctx.path(&e.csv), source })?;
    ctx.write(&e.json, serde_json::to_string_pretty(&rows)?)?;
    let mut w = csv::Writer::from_path(ctx.out.join("summary.csv"))?;
    for s in &summary {
        w.serialize(s)?;
    }
    w.flush().map_err(|source| CliError::Io { path: ctx.out.join("summary.csv"), source })?;
    println!("{:<20} {:>10} {:>10} {:>8} {:>10}", "method", "cost", "baseline", "gap %", "time s");
    for s in &summary {
        println!("{:<20} {:>10.4} {:>10.4} {:>8.2} {:>10.2}", s.method, s.cost, s.baseline, 100.0 * s.gap, s.time_s);
    }
    Ok(())
}
