use proptest::prelude::*;

use codiff::decoding::{greedy_decode_mis, greedy_decode_tsp, two_opt_traced};
use codiff::denoiser::{loss_and_grad, read_checkpoint, write_checkpoint, GnnDims, GnnParams, OracleDenoiser, ProblemKind};
use codiff::diffusion::{
    decoupled_marginal, residue, reverse_decoupled_step, run_reverse, DiffusionState, ResiduePair, SamplerConfig,
};
use codiff::eval::{compute_gap, Sense};
use codiff::graph::{
    degraded_mis, degraded_tsp, generate_er, generate_tsp, parse_dataset, tour_length, write_dataset,
    Distribution, Instance, Record, SolutionVector,
};
use codiff::rng::seeded;
use codiff::search::{decompose, merge_heatmaps, SearchConfig};
use codiff::Heatmap;

fn signs(bits: &[bool]) -> SolutionVector {
    SolutionVector::new(bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_tour_is_hamiltonian(n in 6usize..40, k in 2usize..8, seed in any::<u64>(), raw in prop::collection::vec(0.0f64..=1.0, 400)) {
        let inst = generate_tsp(n, &Distribution::Uniform, seed, k.min(n - 1)).unwrap();
        let h = Heatmap::new(raw.iter().cycle().take(inst.edge_count()).copied().collect()).unwrap();
        let tour = greedy_decode_tsp(&inst, &h);
        let mut order = tour.order().to_vec();
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
        let (_, trace) = two_opt_traced(&inst, tour, 20);
        prop_assert!(trace.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn greedy_set_is_maximal(n in 1usize..50, p in 0.0f64..0.7, seed in any::<u64>(), raw in prop::collection::vec(0.0f64..=1.0, 50)) {
        let g = generate_er(n, p, seed).unwrap();
        let h = Heatmap::new(raw[..n].to_vec()).unwrap();
        prop_assert!(g.is_maximal_independent(&greedy_decode_mis(&g, &h)));
    }

    #[test]
    fn one_step_recovers_any_label(bits in prop::collection::vec(any::<bool>(), 1..80), n_seed in any::<u64>()) {
        let m = bits.len();
        let x0 = signs(&bits);
        let x_d = signs(&bits.iter().rev().copied().collect::<Vec<_>>());
        let g = codiff::graph::MisInstance::from_edges(m, &[]).unwrap();
        let oracle = OracleDenoiser::new(x0.clone(), x_d.clone(), None);
        let mut rng = seeded(n_seed);
        let eps = codiff::rng::standard_normal(&mut rng, m);
        let init = DiffusionState { x: x_d.values().iter().zip(&eps).map(|(a, b)| a + b).collect(), t: 1.0 };
        let fin = run_reverse(&oracle, (&g).into(), &x_d, init, &SamplerConfig::decoupled(1), &mut rng, None).unwrap();
        for (a, b) in fin.x.iter().zip(x0.values()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn full_decoupled_step_lands_on_label(bits in prop::collection::vec(any::<bool>(), 1..30), t in 0.05f64..1.0, frac in 0.0f64..=1.0) {
        // with dt = t the step is deterministic and lands on x0
        let x0 = signs(&bits);
        let x_d = signs(&bits.iter().map(|b| !b).collect::<Vec<_>>());
        let x_res = residue(&x0, &x_d);
        let eps = vec![0.3; bits.len()];
        let x = decoupled_marginal(x0.values(), &x_res, &eps, t);
        let pred = ResiduePair { x_res: x_res.clone(), eps: eps.clone() };
        let state = DiffusionState { x, t };
        let out = reverse_decoupled_step(&state, &pred, t, &mut seeded(0)).unwrap();
        prop_assert_eq!(out.t, 0.0);
        for (a, b) in out.x.iter().zip(x0.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let dt = (frac * t).max(1e-6);
        let partial = reverse_decoupled_step(&state, &pred, dt, &mut seeded(1)).unwrap();
        prop_assert!((partial.t - (t - dt)).abs() <= 1e-15);
    }

    #[test]
    fn loss_is_nonnegative_and_zero_at_truth(p in prop::collection::vec(-5.0f64..5.0, 1..40), q in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let n = p.len().min(q.len());
        let a = ResiduePair { x_res: p[..n].to_vec(), eps: q[..n].to_vec() };
        let b = ResiduePair { x_res: q[..n].to_vec(), eps: p[..n].to_vec() };
        let (l, _) = loss_and_grad(&a, &b).unwrap();
        prop_assert!(l >= 0.0);
        let (z, g) = loss_and_grad(&a, &a).unwrap();
        prop_assert_eq!(z, 0.0);
        prop_assert!(g.x_res.iter().chain(&g.eps).all(|&v| v == 0.0));
    }

    #[test]
    fn heatmap_from_signed_is_bounded(x in prop::collection::vec(prop::num::f64::ANY, 0..50)) {
        let h = Heatmap::from_signed(&x);
        prop_assert!(h.scores().iter().all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn merge_conserves_local_mass(n in 20usize..90, s in 8usize..30, omega in 1usize..3, seed in any::<u64>(), raw in prop::collection::vec(0.0f64..=1.0, 64)) {
        let g = generate_tsp(n, &Distribution::Uniform, seed, 5).unwrap();
        let cfg = SearchConfig { subgraph_size: s.min(n), omega, k: 4, ..Default::default() };
        let dec = decompose(&g, &cfg).unwrap();
        let locals: Vec<Heatmap> = dec.subgraphs.iter().enumerate()
            .map(|(l, sg)| Heatmap::new((0..sg.instance.edge_count()).map(|j| raw[(j + 7 * l) % raw.len()]).collect()).unwrap())
            .collect();
        let refs: Vec<&Heatmap> = locals.iter().collect();
        let merged = merge_heatmaps(&refs, &dec.subgraphs, &dec.occurrence).unwrap();
        let total: f64 = locals.iter().flat_map(|h| h.scores()).sum();
        let weighted: f64 = merged.scores().iter().zip(&dec.occurrence.edge).map(|(h, &o)| h * o as f64).sum();
        prop_assert!((total - weighted).abs() <= 1e-9 * total.max(1.0));
        prop_assert!(dec.occurrence.node.iter().all(|&o| o >= omega));
    }

    #[test]
    fn gap_sign_convention(cost in 0.1f64..100.0, base in 0.1f64..100.0) {
        prop_assert_eq!(compute_gap(base, base, Sense::Min).unwrap(), 0.0);
        let min = compute_gap(cost, base, Sense::Min).unwrap();
        let max = compute_gap(cost, base, Sense::Max).unwrap();
        prop_assert!((min + max).abs() <= 1e-12);
        prop_assert_eq!(min > 0.0, cost > base);
    }

    #[test]
    fn dataset_round_trip(n in 4usize..20, seed in any::<u64>(), mis in any::<bool>()) {
        let instance = if mis {
            Instance::Mis(generate_er(n, 0.3, seed).unwrap())
        } else {
            Instance::Tsp(generate_tsp(n, &Distribution::cluster(), seed, 3).unwrap())
        };
        let label = Some(match &instance {
            Instance::Tsp(t) => degraded_tsp(t),
            Instance::Mis(m) => degraded_mis(m, seed),
        });
        let recs = vec![Record { instance, label }];
        prop_assert_eq!(parse_dataset(&write_dataset(&recs)).unwrap(), recs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn checkpoint_round_trip(layers in 0usize..3, width in 1usize..12, seed in any::<u64>(), mis in any::<bool>()) {
        let kind = if mis { ProblemKind::Mis } else { ProblemKind::Tsp };
        let p = GnnParams::init(GnnDims::new(kind, layers, width), seed);
        prop_assert_eq!(read_checkpoint(&write_checkpoint(&p)).unwrap(), p);
    }

    #[test]
    fn degraded_tour_is_a_cycle(n in 4usize..60, k in 1usize..6, seed in any::<u64>()) {
        let inst = generate_tsp(n, &Distribution::Uniform, seed, k.min(n - 1)).unwrap();
        let tour = codiff::graph::decode_tour(&inst, &degraded_tsp(&inst)).unwrap();
        prop_assert!(tour_length(&inst, &tour).unwrap() > 0.0);
    }
}
