use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalgs::max_bipartite_matching;
use crate::generator::{Arrangement, Sign};
use crate::graph::{Graph, VertexSet};

use super::rotation::bipartite_hamilton_rotation;

/// Random central splits tried after the first near-half split fails to match.
pub const SPLIT_RETRIES: usize = 8;
pub const ROTATION_RESTARTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// Too few central vertices to host both side-clique matchings.
    CentralTooSmall,
    NoCompleteMatching,
    TooFewSideParts,
    RotationFailed,
    NoInsertionEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonOutcome {
    Cycle(Vec<usize>),
    /// A stable set with more than `n/2` vertices.
    Obstruction(VertexSet),
    Failure(FailureReason),
}

impl HamiltonOutcome {
    /// Whether the outcome carries a certificate that checks out against `g`.
    pub fn verifies(&self, g: &Graph) -> bool {
        match self {
            HamiltonOutcome::Cycle(c) => verify_cycle(g, c),
            HamiltonOutcome::Obstruction(s) => verify_obstruction(g, s),
            HamiltonOutcome::Failure(_) => false,
        }
    }
}

/// `cycle` lists every vertex once and consecutive vertices (cyclically) are adjacent.
pub fn verify_cycle(g: &Graph, cycle: &[usize]) -> bool {
    let n = g.n();
    if n < 3 || cycle.len() != n {
        return false;
    }
    let mut seen = VertexSet::new(n);
    for &v in cycle {
        if v >= n || seen.contains(v) {
            return false;
        }
        seen.insert(v);
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

/// `s` is stable in `g` and holds more than half the vertices.
pub fn verify_obstruction(g: &Graph, s: &VertexSet) -> bool {
    s.universe() == g.n() && 2 * s.len() > g.n() && g.is_stable(s)
}

/// Hamilton cycle, stable-set obstruction, or a tagged failure, driven by the arrangement.
pub fn hamilton<R: Rng + ?Sized>(g: &Graph, arr: &Arrangement, rng: &mut R) -> Result<HamiltonOutcome> {
    if g.n() < 3 {
        return Err(Error::invalid("hamilton needs at least 3 vertices"));
    }
    arr.validate(g)?;
    let out = match arr.sign {
        Sign::Plus => unipolar(g, arr, rng),
        Sign::Minus => co_unipolar(g, arr, rng),
    };
    debug_assert!(matches!(out, HamiltonOutcome::Failure(_)) || out.verifies(g));
    Ok(out)
}

fn unipolar<R: Rng + ?Sized>(g: &Graph, arr: &Arrangement, rng: &mut R) -> HamiltonOutcome {
    let n = g.n();
    let parts = &arr.side_parts;
    let mut central = arr.central.to_vec();
    if parts.is_empty() {
        return HamiltonOutcome::Cycle(central);
    }
    if central.is_empty() && parts.len() == 1 {
        return HamiltonOutcome::Cycle(parts[0].to_vec());
    }
    let s = parts.len();
    if central.len() < 2 * s {
        return HamiltonOutcome::Failure(FailureReason::CentralTooSmall);
    }
    // T1 takes the lowest vertex of each side clique, T2 the second lowest
    // (the same vertex for a singleton clique).
    let t1: Vec<usize> = parts.iter().map(|p| p.first().expect("nonempty")).collect();
    let t2: Vec<usize> = parts.iter().map(|p| p.iter().nth(1).unwrap_or(p.first().expect("nonempty"))).collect();
    let t1_set = VertexSet::from_iter(n, t1.iter().copied());
    let t2_set = VertexSet::from_iter(n, t2.iter().copied());
    for attempt in 0..=SPLIT_RETRIES {
        if attempt > 0 {
            central.shuffle(rng);
        }
        let half = central.len().div_ceil(2);
        let a1 = VertexSet::from_iter(n, central[..half].iter().copied());
        let a2 = VertexSet::from_iter(n, central[half..].iter().copied());
        let m1 = max_bipartite_matching(&t1_set, &a1, g);
        if !m1.complete {
            continue;
        }
        let m2 = max_bipartite_matching(&t2_set, &a2, g);
        if !m2.complete {
            continue;
        }
        let mate = |pairs: &[(usize, usize)], t: usize| pairs.iter().find(|p| p.0 == t).expect("matched").1;
        let mut cycle = Vec::with_capacity(n);
        let mut used = VertexSet::new(n);
        for (j, p) in parts.iter().enumerate() {
            let (a, b) = (mate(&m1.pairs, t1[j]), mate(&m2.pairs, t2[j]));
            cycle.push(a);
            cycle.push(t1[j]);
            cycle.extend(p.iter().filter(|&v| v != t1[j] && v != t2[j]));
            if t2[j] != t1[j] {
                cycle.push(t2[j]);
            }
            cycle.push(b);
            used.insert(a);
            used.insert(b);
        }
        cycle.extend(arr.central.difference(&used).iter());
        return HamiltonOutcome::Cycle(cycle);
    }
    HamiltonOutcome::Failure(FailureReason::NoCompleteMatching)
}

fn co_unipolar<R: Rng + ?Sized>(g: &Graph, arr: &Arrangement, rng: &mut R) -> HamiltonOutcome {
    let n = g.n();
    let k = arr.k();
    if 2 * k > n {
        return HamiltonOutcome::Obstruction(arr.central.clone());
    }
    let need = n - 2 * k;
    let mut by_size: Vec<&VertexSet> = arr.side_parts.iter().collect();
    by_size.sort_by_key(|p| (std::cmp::Reverse(p.len()), p.first()));
    if by_size.len() < need {
        return HamiltonOutcome::Failure(FailureReason::TooFewSideParts);
    }
    // T draws from the largest parts so that Q keeps as many parts as possible.
    let t: Vec<usize> = by_size[..need].iter().map(|p| p.first().expect("nonempty")).collect();
    if k == 0 {
        // Every part is a singleton, so G is complete.
        return HamiltonOutcome::Cycle(t);
    }
    if k < 2 {
        return HamiltonOutcome::Failure(FailureReason::CentralTooSmall);
    }
    let t_set = VertexSet::from_iter(n, t.iter().copied());
    let q = arr.noncentral().difference(&t_set);
    let Some(base) = bipartite_hamilton_rotation(g, &arr.central, &q, rng, ROTATION_RESTARTS) else {
        return HamiltonOutcome::Failure(FailureReason::RotationFailed);
    };
    if t.is_empty() {
        return HamiltonOutcome::Cycle(base);
    }
    let m = base.len();
    for i in 0..m {
        let (x, y) = (base[i], base[(i + 1) % m]);
        let ux = g.neighborhood(x).intersect(&t_set);
        let vy = g.neighborhood(y).intersect(&t_set);
        let ends = if t.len() == 1 {
            ux.intersect(&vy).first().map(|u| (u, u))
        } else {
            ux.iter()
                .find_map(|u| vy.iter().find(|&v| v != u).map(|v| (u, v)))
        };
        if let Some((u, v)) = ends {
            let mut cycle = base[..=i].to_vec();
            cycle.push(u);
            cycle.extend(t.iter().copied().filter(|&w| w != u && w != v));
            if v != u {
                cycle.push(v);
            }
            cycle.extend(&base[i + 1..]);
            return HamiltonOutcome::Cycle(cycle);
        }
    }
    HamiltonOutcome::Failure(FailureReason::NoInsertionEdge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{trial_rng, Generator, GenQuadruple};

    #[test]
    fn complete_graph() {
        let g = Graph::complete(4);
        let arr = Arrangement::from_parts(4, Sign::Plus, &[0, 1, 2, 3], &[]).unwrap();
        let out = hamilton(&g, &arr, &mut trial_rng(0, 0)).unwrap();
        assert_eq!(out, HamiltonOutcome::Cycle(vec![0, 1, 2, 3]));
    }

    #[test]
    fn large_central_stable_set_is_an_obstruction() {
        let gen = Generator::new(30);
        let mut rng = trial_rng(11, 0);
        let mut q: GenQuadruple = gen.quadruple(&mut rng, Some(Sign::Minus));
        while q.k <= 15 {
            q = gen.quadruple(&mut rng, Some(Sign::Minus));
        }
        let (g, arr) = crate::generator::rho(&q);
        match hamilton(&g, &arr, &mut rng).unwrap() {
            HamiltonOutcome::Obstruction(s) => assert!(verify_obstruction(&g, &s)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generated_outcomes_verify() {
        let gen = Generator::new(120);
        let mut failures = 0;
        for t in 0..60 {
            let mut rng = trial_rng(21, t);
            let (g, arr) = gen.gen(&mut rng);
            let out = hamilton(&g, &arr, &mut rng).unwrap();
            match out {
                HamiltonOutcome::Failure(_) => failures += 1,
                ref o => assert!(o.verifies(&g), "t={t}"),
            }
        }
        assert!(failures <= 1, "{failures} failures");
    }

    #[test]
    fn verifiers_reject_bad_certificates() {
        let g = Graph::cycle(5);
        assert!(verify_cycle(&g, &[0, 1, 2, 3, 4]));
        assert!(!verify_cycle(&g, &[0, 2, 1, 3, 4]));
        assert!(!verify_cycle(&g, &[0, 1, 2, 3]));
        assert!(!verify_obstruction(&g, &VertexSet::from_iter(5, [0, 2])));
        let e = Graph::new(4);
        assert!(verify_obstruction(&e, &VertexSet::from_iter(4, [0, 1, 2])));
    }
}
