use serde::Serialize;

use crate::generator::{Arrangement, Sign};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    UnipolarLike,
    CoUnipolarLike,
    Neither,
    Both,
}

/// Degree-threshold split of a graph and which recognition condition holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitGuess {
    /// Vertices of degree at most `n/2`.
    pub low: VertexSet,
    pub high: VertexSet,
    pub case_tag: CaseTag,
}

/// The components of `g[s]` if `g[s]` is a disjoint union of cliques.
pub(crate) fn clique_components(g: &Graph, s: &VertexSet) -> Option<Vec<VertexSet>> {
    let closed = |u: usize| {
        let mut c = g.neighborhood(u).intersect(s);
        c.insert(u);
        c
    };
    let mut left = s.clone();
    let mut out = Vec::new();
    while let Some(v) = left.first() {
        let comp = closed(v);
        if comp.iter().any(|u| closed(u) != comp) {
            return None;
        }
        left = left.difference(&comp);
        out.push(comp);
    }
    Some(out)
}

/// Splits `V` at degree `n/2` and validates whether `high` is a clique and
/// `low` a union of cliques (unipolar-like), and whether `low` is stable and
/// `high` complete multipartite (co-unipolar-like).
pub fn degree_split(g: &Graph) -> SplitGuess {
    let n = g.n();
    let low = VertexSet::from_iter(n, (0..n).filter(|&v| 2 * g.degree(v) <= n));
    let high = low.complement();
    let plus = g.is_clique(&high) && clique_components(g, &low).is_some();
    let minus = g.is_stable(&low) && clique_components(&g.complement(), &high).is_some();
    let case_tag = match (plus, minus) {
        (true, true) => CaseTag::Both,
        (true, false) => CaseTag::UnipolarLike,
        (false, true) => CaseTag::CoUnipolarLike,
        (false, false) => CaseTag::Neither,
    };
    SplitGuess { low, high, case_tag }
}

impl SplitGuess {
    /// The arrangement certified by the split, preferring sign `+` when both hold.
    pub fn arrangement(&self, g: &Graph) -> Option<Arrangement> {
        match self.case_tag {
            CaseTag::UnipolarLike | CaseTag::Both => self.arrangement_for(g, Sign::Plus),
            CaseTag::CoUnipolarLike => self.arrangement_for(g, Sign::Minus),
            CaseTag::Neither => None,
        }
    }

    pub fn arrangement_for(&self, g: &Graph, sign: Sign) -> Option<Arrangement> {
        let (central, parts) = match sign {
            Sign::Plus => {
                if !g.is_clique(&self.high) {
                    return None;
                }
                (self.high.clone(), clique_components(g, &self.low)?)
            }
            Sign::Minus => {
                if !g.is_stable(&self.low) {
                    return None;
                }
                (self.low.clone(), clique_components(&g.complement(), &self.high)?)
            }
        };
        let mut side_parts = parts;
        side_parts.sort_by_key(|p| p.first());
        Some(Arrangement {
            n: g.n(),
            sign,
            central,
            side_parts,
        })
    }
}

/// Recovers an arrangement from the bare graph, or `None` when the split fails.
pub fn recover_arrangement(g: &Graph) -> Option<Arrangement> {
    degree_split(g).arrangement(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{trial_rng, Generator};

    #[test]
    fn small_examples() {
        let s = degree_split(&Graph::complete(5));
        assert!(s.low.is_empty());
        assert_eq!(s.case_tag, CaseTag::Both);
        assert_eq!(degree_split(&Graph::new(4)).case_tag, CaseTag::Both);
        let s = degree_split(&Graph::path(4));
        assert_eq!(s.low.len(), 4);
        assert_eq!(s.case_tag, CaseTag::Neither);
    }

    #[test]
    fn recovered_arrangements_validate() {
        let gen = Generator::new(120);
        let mut hits = 0;
        for t in 0..40 {
            let (g, arr) = gen.gen(&mut trial_rng(5, t));
            let split = degree_split(&g);
            if let Some(rec) = split.arrangement(&g) {
                rec.validate(&g).unwrap();
                hits += 1;
                if split.case_tag != CaseTag::Both {
                    assert_eq!(rec.sign, arr.sign);
                }
            }
        }
        assert!(hits >= 38, "recovered {hits}/40");
    }
}
