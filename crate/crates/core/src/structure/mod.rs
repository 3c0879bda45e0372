//! Arrangement-driven algorithms: recognition by degree split, fast `α`/`ω`,
//! 2-clique-colouring and Hamilton cycles with certificates.

mod alpha_omega;
mod colouring;
mod hamilton;
mod rotation;
mod split;

pub use alpha_omega::{alpha_omega_fast, alpha_omega_fast_with, extension_vertex, Certainty, FastInvariants, FastOptions};
pub use colouring::{
    clique_colour_2, verify_clique_colouring, verify_clique_colouring_structured, ColourCheck,
    STRUCTURED_SUBSET_MAX, TRANSVERSAL_NODE_BUDGET,
};
pub use hamilton::{
    hamilton, verify_cycle, verify_obstruction, FailureReason, HamiltonOutcome, ROTATION_RESTARTS, SPLIT_RETRIES,
};
pub use rotation::{bipartite_hamilton_rotation, flip, rotation_cycle, FlipEnd, RotationState};
pub use split::{degree_split, recover_arrangement, CaseTag, SplitGuess};
