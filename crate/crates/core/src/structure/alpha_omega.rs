use serde::Serialize;

use crate::error::Result;
use crate::exactalgs::max_matching_rows;
use crate::generator::{Arrangement, Sign};
use crate::graph::Graph;

/// How the clique number was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certainty {
    /// Every side part was resolved by the sorted-degree bound.
    DegreeBound,
    /// Some side part needed a bipartite matching; still exact.
    Matching,
    /// Matching was disabled and some side part stayed unresolved, so
    /// `omega` is only a lower bound.
    Unverified,
}

impl Certainty {
    pub fn is_certain(self) -> bool {
        self != Certainty::Unverified
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FastOptions {
    pub use_matching: bool,
}

impl Default for FastOptions {
    fn default() -> Self {
        FastOptions { use_matching: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FastInvariants {
    pub alpha: usize,
    pub omega: usize,
    pub certainty: Certainty,
    /// `alpha - |σ|` in the unipolar view (the complement for sign `-`).
    pub extension_bit: bool,
    pub matchings_run: usize,
}

/// `α` and `ω` from the arrangement in `O(n²/64)` word operations plus the
/// matchings the degree bound cannot rule out.
pub fn alpha_omega_fast(g: &Graph, arr: &Arrangement) -> Result<FastInvariants> {
    alpha_omega_fast_with(g, arr, FastOptions::default())
}

pub fn alpha_omega_fast_with(g: &Graph, arr: &Arrangement, opts: FastOptions) -> Result<FastInvariants> {
    arr.validate(g)?;
    Ok(match arr.sign {
        Sign::Plus => unipolar(g, arr, opts),
        Sign::Minus => {
            let r = unipolar(&g.complement(), &arr.dual(), opts);
            FastInvariants {
                alpha: r.omega,
                omega: r.alpha,
                ..r
            }
        }
    })
}

fn unipolar(g: &Graph, arr: &Arrangement, opts: FastOptions) -> FastInvariants {
    let c = &arr.central;
    let k = c.len();
    let extension_bit = extension_vertex(g, arr).is_some();
    let alpha = arr.side_parts.len() + extension_bit as usize;

    let mut omega = k;
    let mut certainty = Certainty::DegreeBound;
    let mut matchings_run = 0;
    for q in &arr.side_parts {
        let mut d: Vec<usize> = q.iter().map(|v| c.count_in(g.row(v))).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        let (mut best_s, mut ub) = (0, k);
        for (i, &di) in d.iter().enumerate() {
            if i + 1 + di > ub {
                ub = i + 1 + di;
                best_s = i + 1;
            }
        }
        if ub <= omega {
            continue;
        }
        if best_s == 1 {
            // A top-degree vertex with its central neighbours attains the bound.
            omega = ub;
            continue;
        }
        if !opts.use_matching {
            omega = omega.max(1 + d[0]);
            certainty = Certainty::Unverified;
            continue;
        }
        matchings_run += 1;
        if certainty == Certainty::DegreeBound {
            certainty = Certainty::Matching;
        }
        // Largest clique in C ∪ Q is |C| + |Q| minus a minimum vertex cover of
        // the non-adjacency bipartite graph, which König equates to a maximum matching.
        let qv = q.to_vec();
        let rows: Vec<Vec<u64>> = c
            .iter()
            .map(|u| {
                let row = g.row(u);
                let mut bits = vec![0u64; qv.len().div_ceil(64)];
                for (j, &x) in qv.iter().enumerate() {
                    if row[x >> 6] >> (x & 63) & 1 == 0 {
                        bits[j >> 6] |= 1 << (j & 63);
                    }
                }
                bits
            })
            .collect();
        let nu = max_matching_rows(&rows, qv.len()).iter().flatten().count();
        omega = omega.max(k + qv.len() - nu);
    }
    FastInvariants {
        alpha,
        omega,
        certainty,
        extension_bit,
        matchings_run,
    }
}

/// A central vertex missing some vertex of every side clique, read in the
/// unipolar view of `arr` regardless of its sign.
pub fn extension_vertex(g: &Graph, arr: &Arrangement) -> Option<usize> {
    arr.central.iter().find(|&v| {
        let nb = g.neighborhood(v);
        arr.side_parts.iter().all(|q| !q.is_subset(&nb))
    })
}
