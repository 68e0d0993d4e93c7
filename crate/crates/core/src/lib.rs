//! Diffusion-based heatmap solver for the Euclidean travelling salesman and
//! maximal independent set problems.
//!
//! A solution is a `±1` vector over the instance's variables (sparse edges
//! for TSP, nodes for MIS). Diffusion starts from a cheap feasible
//! *degraded* solution plus noise and denoises towards a high-quality
//! solution; the result is normalized into a [`Heatmap`] and decoded into a
//! feasible tour or independent set.
//!
//! ```no_run
//! use codiff::decoding::sample_decode;
//! use codiff::denoiser::{read_checkpoint, GnnDenoiser};
//! use codiff::diffusion::SamplerConfig;
//! use codiff::graph::{degraded_tsp, generate_tsp, Distribution};
//!
//! let inst = generate_tsp(50, &Distribution::Uniform, 1, 10)?;
//! let params = read_checkpoint(&std::fs::read("tsp50.ckpt")?)?;
//! let model = GnnDenoiser::new(params);
//! let best = sample_decode(&model, (&inst).into(), &degraded_tsp(&inst), &SamplerConfig::decoupled(1), 4, 50)?;
//! println!("length {}", best.cost);
//! # Ok::<(), codiff::Error>(())
//! ```

pub mod decoding;
pub mod denoiser;
pub mod diffusion;
mod error;
pub mod eval;
pub mod graph;
mod heatmap;
pub mod rng;
pub mod search;
pub mod solvers;

pub use error::{Error, Result};
pub use heatmap::Heatmap;
