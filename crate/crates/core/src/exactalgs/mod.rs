//! Exact algorithms used as oracles and by the analyzers.

mod cliques;
mod edge_colour;
mod flow;

pub use cliques::{
    alpha_exact, classify_gs, contains_induced, max_clique, maximal_cliques, maximal_cliques_capped,
    omega_exact, GSClass, GSTag, ALPHA_EXACT_MAX_N, CLASSIFY_GS_MAX, CONTAINS_INDUCED_MAX,
    DEFAULT_CLIQUE_CAP,
};
pub use edge_colour::{
    chromatic_index, is_bipartite, unique_max_degree_vertex, vizing_colour, ChromaticIndex, EdgeColouring,
    IndexMethod, EXHAUSTIVE_MAX_EDGES,
};
pub use flow::{connectivity, local_connectivity, max_bipartite_matching, max_matching_rows, Matching};

use serde::Serialize;

use crate::error::Result;
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphInvariants {
    pub alpha: usize,
    pub omega: usize,
    pub h: usize,
    pub big_h: usize,
    pub kappa: usize,
    pub delta: usize,
    pub cap_delta: usize,
    pub chi_prime: usize,
    /// `chi_prime` is certainly optimal.
    pub chi_prime_proven: bool,
}

/// All invariants by the exact routines; `n <= 64`.
pub fn invariants(g: &Graph) -> Result<GraphInvariants> {
    let alpha = alpha_exact(g)?;
    let omega = omega_exact(g)?;
    let ci = chromatic_index(g);
    Ok(GraphInvariants {
        alpha,
        omega,
        h: alpha.min(omega),
        big_h: alpha.max(omega),
        kappa: connectivity(g),
        delta: g.min_degree(),
        cap_delta: g.max_degree(),
        chi_prime: ci.value,
        chi_prime_proven: ci.proven,
    })
}
