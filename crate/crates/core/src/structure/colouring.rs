use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalgs::maximal_cliques;
use crate::generator::{Arrangement, Sign};
use crate::graph::{Graph, VertexSet};

/// Largest single-colour part of a side clique whose subsets the structured
/// verifier enumerates.
pub const STRUCTURED_SUBSET_MAX: usize = 20;
/// Search-node budget for the transversal check in the co-unipolar verifier.
pub const TRANSVERSAL_NODE_BUDGET: usize = 1_000_000;

/// A 2-clique-colouring from the arrangement, with colours `1` and `2`.
///
/// Maximal cliques with a single vertex are ignored. Returns `None` when the
/// sufficient condition behind the construction fails.
pub fn clique_colour_2(g: &Graph, arr: &Arrangement) -> Result<Option<Vec<u8>>> {
    arr.validate(g)?;
    let n = g.n();
    if g.edge_count() == 0 {
        return Ok(Some(vec![1; n]));
    }
    Ok(match arr.sign {
        Sign::Plus => unipolar_colouring(g, arr),
        Sign::Minus => co_unipolar_colouring(g, arr),
    })
}

fn unipolar_colouring(g: &Graph, arr: &Arrangement) -> Option<Vec<u8>> {
    let n = g.n();
    let mut colours = vec![1u8; n];
    if arr.central.is_empty() {
        for q in arr.side_parts.iter().filter(|q| q.len() >= 2) {
            colours[q.first().expect("nonempty")] = 2;
        }
        return Some(colours);
    }
    let nbs: Vec<(usize, VertexSet)> = arr.central.iter().map(|v| (v, g.neighborhood(v))).collect();
    let maximal: Vec<&VertexSet> = arr
        .side_parts
        .iter()
        .filter(|q| nbs.iter().all(|(_, nb)| !q.is_subset(nb)))
        .collect();
    let (x, nx) = nbs
        .iter()
        .find(|(_, nb)| maximal.iter().all(|q| !q.is_disjoint(nb)))?;
    for v in arr.central.iter() {
        if v != *x {
            colours[v] = 2;
        }
    }
    for q in &arr.side_parts {
        if let Some(y) = nx.intersect(q).first() {
            colours[y] = 2;
        }
    }
    Some(colours)
}

fn co_unipolar_colouring(g: &Graph, arr: &Arrangement) -> Option<Vec<u8>> {
    let n = g.n();
    let mut colours = vec![2u8; n];
    let first = arr.side_parts.first()?;
    for v in first.iter() {
        colours[v] = 1;
    }
    if arr.central.is_empty() {
        return Some(colours);
    }
    for c in arr.central.iter() {
        let nb = g.neighborhood(c);
        arr.side_parts.iter().filter(|p| !p.is_disjoint(&nb)).nth(1)?;
        colours[c] = 1;
    }
    Some(colours)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColourCheck {
    Valid,
    /// A maximal clique with at least two vertices and one colour.
    Monochromatic(Vec<usize>),
    /// The structured search exceeded its limits.
    Unverified,
}

impl ColourCheck {
    pub fn is_valid(&self) -> bool {
        *self == ColourCheck::Valid
    }
}

fn check_colours(g: &Graph, colours: &[u8]) -> Result<()> {
    if colours.len() != g.n() {
        return Err(Error::invalid(format!(
            "colouring has {} entries for {} vertices",
            colours.len(),
            g.n()
        )));
    }
    if colours.iter().any(|&c| c != 1 && c != 2) {
        return Err(Error::invalid("colours must be 1 or 2"));
    }
    Ok(())
}

fn colour_class(colours: &[u8], col: u8) -> VertexSet {
    let n = colours.len();
    VertexSet::from_iter(n, (0..n).filter(|&v| colours[v] == col))
}

/// Checks every maximal clique by Bron–Kerbosch enumeration.
pub fn verify_clique_colouring(g: &Graph, colours: &[u8]) -> Result<ColourCheck> {
    check_colours(g, colours)?;
    for m in maximal_cliques(g)? {
        if m.len() >= 2 {
            let mut it = m.iter().map(|v| colours[v]);
            let c0 = it.next().expect("nonempty");
            if it.all(|c| c == c0) {
                return Ok(ColourCheck::Monochromatic(m.to_vec()));
            }
        }
    }
    Ok(ColourCheck::Valid)
}

/// Checks a colouring against the maximal-clique structure the arrangement implies.
pub fn verify_clique_colouring_structured(g: &Graph, arr: &Arrangement, colours: &[u8]) -> Result<ColourCheck> {
    arr.validate(g)?;
    check_colours(g, colours)?;
    let mut unverified = false;
    for col in [1u8, 2] {
        let x = colour_class(colours, col);
        let found = match arr.sign {
            Sign::Plus => unipolar_mono(g, arr, &x, &mut unverified),
            Sign::Minus => co_unipolar_mono(g, arr, &x, &mut unverified),
        };
        if let Some(m) = found {
            return Ok(ColourCheck::Monochromatic(m.to_vec()));
        }
    }
    Ok(if unverified {
        ColourCheck::Unverified
    } else {
        ColourCheck::Valid
    })
}

/// Maximal cliques of a unipolar graph are `C` when no side vertex extends it,
/// and `S ∪ (C ∩ N(S))` for nonempty `S` in one side clique that contains
/// every side vertex dominating `C ∩ N(S)`.
fn unipolar_mono(g: &Graph, arr: &Arrangement, x: &VertexSet, unverified: &mut bool) -> Option<VertexSet> {
    let c = &arr.central;
    if c.len() >= 2 && c.is_subset(x) && arr.noncentral().iter().all(|v| !c.is_subset(&g.neighborhood(v))) {
        return Some(c.clone());
    }
    for q in &arr.side_parts {
        let qx = q.intersect(x).to_vec();
        if qx.len() > STRUCTURED_SUBSET_MAX {
            *unverified = true;
            continue;
        }
        let dominators: Vec<VertexSet> = q.iter().map(|v| g.neighborhood(v).intersect(c)).collect();
        let qv = q.to_vec();
        for mask in 1u32..1 << qx.len() {
            let mut d = c.clone();
            let mut s = VertexSet::new(g.n());
            for (i, &v) in qx.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.insert(v);
                    d = d.intersect(&g.neighborhood(v));
                }
            }
            if !d.is_subset(x) || s.len() + d.len() < 2 {
                continue;
            }
            let closed = qv
                .iter()
                .zip(&dominators)
                .all(|(&v, dv)| s.contains(v) || !d.is_subset(dv));
            if closed {
                return Some(s.union(&d));
            }
        }
    }
    None
}

/// In a co-unipolar graph a maximal clique holds at most one central vertex
/// `c`, then one vertex from each side part meeting `N(c)`; without a central
/// vertex it is a transversal of the side parts that no central vertex dominates.
fn co_unipolar_mono(g: &Graph, arr: &Arrangement, x: &VertexSet, unverified: &mut bool) -> Option<VertexSet> {
    let n = g.n();
    let parts = &arr.side_parts;
    for c in arr.central.intersect(x).iter() {
        let nb = g.neighborhood(c);
        if nb.is_empty() {
            continue;
        }
        let mut m = VertexSet::from_iter(n, [c]);
        let mut ok = true;
        for p in parts {
            let seen = nb.intersect(p);
            if seen.is_empty() {
                continue;
            }
            match seen.intersect(x).first() {
                Some(v) => m.insert(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some(m);
        }
    }
    if parts.len() < 2 {
        return None;
    }
    let mut options: Vec<Vec<usize>> = parts.iter().map(|p| p.intersect(x).to_vec()).collect();
    if options.iter().any(|o| o.is_empty()) {
        return None;
    }
    options.sort_by_key(|o| o.len());
    let mut picks = Vec::with_capacity(options.len());
    let mut budget = TRANSVERSAL_NODE_BUDGET;
    match undominated_transversal(g, &options, arr.central.clone(), &mut picks, &mut budget) {
        Some(true) => {
            for o in &options[picks.len()..] {
                picks.push(o[0]);
            }
            Some(VertexSet::from_iter(n, picks))
        }
        Some(false) => None,
        None => {
            *unverified = true;
            None
        }
    }
}

/// Picks one vertex per option list so that no vertex in `alive` sees all picks.
/// `None` when the budget runs out.
fn undominated_transversal(
    g: &Graph,
    options: &[Vec<usize>],
    alive: VertexSet,
    picks: &mut Vec<usize>,
    budget: &mut usize,
) -> Option<bool> {
    if alive.is_empty() {
        return Some(true);
    }
    let depth = picks.len();
    if depth == options.len() {
        return Some(false);
    }
    for &v in &options[depth] {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        picks.push(v);
        if undominated_transversal(g, options, alive.intersect(&g.neighborhood(v)), picks, budget)? {
            return Some(true);
        }
        picks.pop();
    }
    Some(false)
}
