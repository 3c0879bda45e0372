//! Perfect graphs sampled through the generalised-split process, with
//! arrangement-aware analyzers, exact oracles and a seeded experiment harness.
//!
//! ```
//! use perfgen::{trial_rng, Generator};
//! use perfgen::structure::alpha_omega_fast;
//!
//! let (g, arr) = Generator::new(100).gen(&mut trial_rng(7, 0));
//! let inv = alpha_omega_fast(&g, &arr).unwrap();
//! assert!(inv.alpha + inv.omega <= g.n() + 1);
//! ```

pub mod error;
pub mod exactalgs;
pub mod generator;
pub mod graphon;
pub mod graph;
pub mod harness;
pub mod lndist;
pub mod numerics;
pub mod partitions;
pub mod structure;

pub use error::{Error, Result};
pub use graph::{Graph, GraphJson, VertexSet};
pub use generator::{trial_rng, Arrangement, Generator, Sign, SignMode};
pub use harness::{run, run_with_threads, ExperimentName, ExperimentReport, ExperimentSpec};
pub use lndist::LDistribution;
pub use partitions::SetPartition;
