use rand::Rng;
use serde::Serialize;

use crate::graph::{Graph, VertexSet};

/// An end reachable from a base path, with the pivots of the flips that reach it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlipEnd {
    pub end: usize,
    pub pivots: Vec<usize>,
}

/// A path with the ends reachable by at most two flips, grouped by the
/// number of flips that first reaches them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationState {
    pub path: Vec<usize>,
    pub end_sets: [Vec<FlipEnd>; 3],
}

/// Flip of `path` around `pivot`, which must neighbour the last vertex:
/// the suffix after `pivot` is reversed, so its old successor becomes the end.
pub fn flip(path: &[usize], pivot: usize) -> Vec<usize> {
    let i = path.iter().position(|&v| v == pivot).expect("pivot on path");
    let mut out = path[..=i].to_vec();
    out.extend(path[i + 1..].iter().rev());
    out
}

impl RotationState {
    pub fn explore(g: &Graph, path: &[usize]) -> RotationState {
        let n = g.n();
        let l = path.len();
        let mut state = RotationState {
            path: path.to_vec(),
            end_sets: [Vec::new(), Vec::new(), Vec::new()],
        };
        if l == 0 {
            return state;
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in path.iter().enumerate() {
            pos[v] = i;
        }
        let mut seen = VertexSet::new(n);
        let e0 = path[l - 1];
        seen.insert(e0);
        state.end_sets[0].push(FlipEnd { end: e0, pivots: vec![] });
        for z in g.neighbors(e0) {
            if pos[z] != usize::MAX && pos[z] + 2 < l {
                let e1 = path[pos[z] + 1];
                if !seen.contains(e1) {
                    seen.insert(e1);
                    state.end_sets[1].push(FlipEnd { end: e1, pivots: vec![z] });
                }
            }
        }
        let mut second = Vec::new();
        for fe in &state.end_sets[1] {
            let i = pos[fe.pivots[0]];
            // Positions in the flipped path without materialising it.
            let at = |j: usize| if j <= i { path[j] } else { path[l + i - j] };
            for z in g.neighbors(fe.end) {
                if pos[z] == usize::MAX {
                    continue;
                }
                let j = if pos[z] <= i { pos[z] } else { l + i - pos[z] };
                if j + 2 < l {
                    let e2 = at(j + 1);
                    if !seen.contains(e2) {
                        seen.insert(e2);
                        second.push(FlipEnd {
                            end: e2,
                            pivots: vec![fe.pivots[0], z],
                        });
                    }
                }
            }
        }
        state.end_sets[2] = second;
        state
    }

    /// Ends reachable by at most `k` flips.
    pub fn w(&self, n: usize, k: usize) -> VertexSet {
        VertexSet::from_iter(n, self.end_sets[..=k.min(2)].iter().flatten().map(|e| e.end))
    }

    pub fn ends(&self) -> impl Iterator<Item = &FlipEnd> {
        self.end_sets.iter().flatten()
    }

    /// The path realising `fe` by replaying its flips.
    pub fn realise(&self, fe: &FlipEnd) -> Vec<usize> {
        fe.pivots.iter().fold(self.path.clone(), |p, &z| flip(&p, z))
    }
}

fn random_member<R: Rng + ?Sized>(s: &VertexSet, rng: &mut R) -> Option<usize> {
    let c = s.len();
    if c == 0 {
        None
    } else {
        s.iter().nth(rng.random_range(0..c))
    }
}

fn fresh_neighbours(g: &Graph, v: usize, on: &VertexSet) -> VertexSet {
    g.neighborhood(v).difference(on)
}

/// Hamilton cycle by greedy path growth with two-flip rotations and restarts.
pub fn rotation_cycle<R: Rng + ?Sized>(g: &Graph, rng: &mut R, restarts: usize) -> Option<Vec<usize>> {
    let n = g.n();
    if n < 3 || g.min_degree() < 2 {
        return None;
    }
    for _ in 0..restarts.max(1) {
        if let Some(c) = attempt(g, rng) {
            return Some(c);
        }
    }
    None
}

fn attempt<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Option<Vec<usize>> {
    let n = g.n();
    let start = rng.random_range(0..n);
    let mut path = vec![start];
    let mut on = VertexSet::from_iter(n, [start]);
    loop {
        let end = *path.last().expect("nonempty");
        if let Some(w) = random_member(&fresh_neighbours(g, end, &on), rng) {
            path.push(w);
            on.insert(w);
            continue;
        }
        if let Some(w) = random_member(&fresh_neighbours(g, path[0], &on), rng) {
            path.reverse();
            path.push(w);
            on.insert(w);
            continue;
        }
        if path.len() == n {
            for reversed in [false, true] {
                if reversed {
                    path.reverse();
                }
                let st = RotationState::explore(g, &path);
                let closing = st.ends().find(|e| g.has_edge(e.end, path[0])).cloned();
                if let Some(fe) = closing {
                    return Some(st.realise(&fe));
                }
            }
            return None;
        }
        if g.has_edge(end, path[0]) {
            // The path closes into a cycle: open it next to an outside neighbour.
            let j = (0..path.len()).find(|&j| !fresh_neighbours(g, path[j], &on).is_empty())?;
            path.rotate_left(j + 1);
            continue;
        }
        let mut moved = false;
        for reversed in [false, true] {
            if reversed {
                path.reverse();
            }
            let st = RotationState::explore(g, &path);
            let target = st
                .ends()
                .find(|e| !fresh_neighbours(g, e.end, &on).is_empty())
                .or_else(|| st.ends().find(|e| g.has_edge(e.end, path[0])));
            if let Some(fe) = target {
                path = st.realise(fe);
                moved = true;
                break;
            }
        }
        if !moved {
            return None;
        }
    }
}

/// Hamilton cycle of the bipartite graph formed by the edges of `g` between
/// `left` and `right`. `None` is a heuristic failure, not a proof.
pub fn bipartite_hamilton_rotation<R: Rng + ?Sized>(
    g: &Graph,
    left: &VertexSet,
    right: &VertexSet,
    rng: &mut R,
    restarts: usize,
) -> Option<Vec<usize>> {
    if left.len() != right.len() || left.len() < 2 || !left.is_disjoint(right) {
        return None;
    }
    let verts: Vec<usize> = left.union(right).to_vec();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let mut h = Graph::new(verts.len());
    for u in left.iter() {
        for v in g.neighborhood(u).intersect(right).iter() {
            h.add_edge(local[u], local[v]);
        }
    }
    rotation_cycle(&h, rng, restarts).map(|c| c.into_iter().map(|i| verts[i]).collect())
}
