use serde::Serialize;

use crate::graph::Graph;

const NONE: u32 = u32::MAX;
const UNCOLOURED: u16 = u16::MAX;

/// Largest edge count handled by the exhaustive class test.
pub const EXHAUSTIVE_MAX_EDGES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeColouring {
    pub n: usize,
    /// `(u, v, colour)` with `u < v`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl EdgeColouring {
    pub fn colours_used(&self) -> usize {
        let mut seen: Vec<usize> = self.edges.iter().map(|e| e.2).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Every edge of `g` coloured exactly once and no two incident edges share a colour.
    pub fn is_proper(&self, g: &Graph) -> bool {
        if self.edges.len() != g.edge_count() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v, c) in &self.edges {
            if u >= v || !g.has_edge(u, v) || !seen.insert((u, c)) || !seen.insert((v, c)) {
                return false;
            }
        }
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.0, e.1)).collect();
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }
}

/// Working state for fan recolouring with a fixed palette.
struct Colourer {
    n: usize,
    palette: usize,
    col: Vec<u16>,
    at: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Colourer {
    fn new(n: usize, palette: usize) -> Self {
        Colourer {
            n,
            palette,
            col: vec![UNCOLOURED; n * n],
            at: vec![NONE; n * palette],
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    #[inline]
    fn colour(&self, u: usize, v: usize) -> Option<usize> {
        let c = self.col[u * self.n + v];
        (c != UNCOLOURED).then_some(c as usize)
    }

    #[inline]
    fn at(&self, x: usize, c: usize) -> Option<usize> {
        let y = self.at[x * self.palette + c];
        (y != NONE).then_some(y as usize)
    }

    #[inline]
    fn is_free(&self, x: usize, c: usize) -> bool {
        self.at[x * self.palette + c] == NONE
    }

    fn first_free(&self, x: usize) -> Option<usize> {
        (0..self.palette).find(|&c| self.is_free(x, c))
    }

    fn set(&mut self, u: usize, v: usize, c: usize) {
        debug_assert!(self.is_free(u, c) && self.is_free(v, c));
        self.col[u * self.n + v] = c as u16;
        self.col[v * self.n + u] = c as u16;
        self.at[u * self.palette + c] = v as u32;
        self.at[v * self.palette + c] = u as u32;
    }

    fn unset(&mut self, u: usize, v: usize) {
        if let Some(c) = self.colour(u, v) {
            self.col[u * self.n + v] = UNCOLOURED;
            self.col[v * self.n + u] = UNCOLOURED;
            self.at[u * self.palette + c] = NONE;
            self.at[v * self.palette + c] = NONE;
        }
    }

    /// Swaps colours `a` and `b` along the alternating path leaving `start` on colour `a`.
    fn invert_path(&mut self, start: usize, a: usize, b: usize) {
        let mut path = vec![start];
        let (mut x, mut c) = (start, a);
        while let Some(y) = self.at(x, c) {
            path.push(y);
            x = y;
            c = if c == a { b } else { a };
            if path.len() > self.n + 1 {
                unreachable!("alternating path cannot revisit a vertex");
            }
        }
        let cols: Vec<usize> = path
            .windows(2)
            .map(|w| self.colour(w[0], w[1]).expect("path edge coloured"))
            .collect();
        for w in path.windows(2) {
            self.unset(w[0], w[1]);
        }
        for (w, c) in path.windows(2).zip(cols) {
            self.set(w[0], w[1], if c == a { b } else { a });
        }
    }

    /// Misra–Gries step for the uncoloured edge `uv` with centre `u`.
    /// Fails only when a needed free colour does not exist.
    fn colour_edge(&mut self, u: usize, v: usize) -> bool {
        self.epoch += 1;
        let epoch = self.epoch;
        let mut fan = vec![v];
        self.stamp[v] = epoch;
        loop {
            let last = *fan.last().expect("nonempty");
            let next = (0..self.palette).find_map(|c| {
                if !self.is_free(last, c) {
                    return None;
                }
                self.at(u, c).filter(|&w| self.stamp[w] != epoch)
            });
            match next {
                Some(w) => {
                    self.stamp[w] = epoch;
                    fan.push(w);
                }
                None => break,
            }
        }
        let Some(c) = self.first_free(u) else {
            return false;
        };
        let Some(d) = self.first_free(*fan.last().expect("nonempty")) else {
            return false;
        };
        if c != d {
            self.invert_path(u, d, c);
        }
        let mut pick = None;
        for (i, &f) in fan.iter().enumerate() {
            if i > 0 {
                let prev = fan[i - 1];
                match self.colour(u, f) {
                    Some(cf) if self.is_free(prev, cf) => {}
                    _ => break,
                }
            }
            if self.is_free(f, d) {
                pick = Some(i);
                break;
            }
        }
        let Some(i) = pick else {
            return false;
        };
        let shifted: Vec<usize> = (0..i)
            .map(|j| self.colour(u, fan[j + 1]).expect("fan edge coloured"))
            .collect();
        for &f in &fan[1..=i] {
            self.unset(u, f);
        }
        for (j, c) in shifted.into_iter().enumerate() {
            self.set(u, fan[j], c);
        }
        if !self.is_free(u, d) {
            return false;
        }
        self.set(u, fan[i], d);
        true
    }

    /// Kempe step for bipartite graphs: colour `uv` within the palette.
    fn colour_bipartite(&mut self, u: usize, v: usize) -> bool {
        let (Some(a), Some(b)) = (self.first_free(u), self.first_free(v)) else {
            return false;
        };
        if !self.is_free(v, a) {
            self.invert_path(v, a, b);
        }
        if !self.is_free(u, a) || !self.is_free(v, a) {
            return false;
        }
        self.set(u, v, a);
        true
    }

    fn finish(&self, g: &Graph) -> EdgeColouring {
        EdgeColouring {
            n: g.n(),
            edges: g
                .edges()
                .map(|(u, v)| (u, v, self.colour(u, v).expect("every edge coloured")))
                .collect(),
        }
    }
}

/// Proper edge colouring with at most `Δ + 1` colours.
pub fn vizing_colour(g: &Graph) -> EdgeColouring {
    let palette = g.max_degree() + 1;
    let mut c = Colourer::new(g.n(), palette);
    for (u, v) in g.edges() {
        let ok = c.colour_edge(u, v);
        assert!(ok, "Misra–Gries always succeeds with Δ+1 colours");
    }
    let out = c.finish(g);
    debug_assert!(out.is_proper(g) && out.colours_used() <= palette);
    out
}

/// 2-colouring of the vertices if `g` is bipartite.
pub fn is_bipartite(g: &Graph) -> Option<Vec<u8>> {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                if side[y] == u8::MAX {
                    side[y] = 1 - side[x];
                    stack.push(y);
                } else if side[y] == side[x] {
                    return None;
                }
            }
        }
    }
    Some(side)
}

fn bipartite_colour(g: &Graph) -> Option<EdgeColouring> {
    is_bipartite(g)?;
    let mut c = Colourer::new(g.n(), g.max_degree());
    for (u, v) in g.edges() {
        if !c.colour_bipartite(u, v) {
            return None;
        }
    }
    Some(c.finish(g))
}

/// Colours `G − v0` and then the edges at `v0` within `Δ` colours.
fn unique_max_colour(g: &Graph, v0: usize) -> Option<EdgeColouring> {
    let mut c = Colourer::new(g.n(), g.max_degree());
    for (u, v) in g.edges().filter(|&(u, v)| u != v0 && v != v0) {
        if !c.colour_edge(u, v) {
            return None;
        }
    }
    for x in g.neighbors(v0) {
        if !c.colour_edge(v0, x) {
            return None;
        }
    }
    Some(c.finish(g))
}

fn greedy_delta_colour(g: &Graph) -> Option<EdgeColouring> {
    let degs = g.degrees();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(u, v)| if degs[u] >= degs[v] { (u, v) } else { (v, u) })
        .collect();
    edges.sort_by_key(|&(u, v)| std::cmp::Reverse(degs[u] + degs[v]));
    let mut c = Colourer::new(g.n(), g.max_degree());
    for (u, v) in edges {
        if !c.colour_edge(u, v) {
            return None;
        }
    }
    Some(c.finish(g))
}

fn exhaustive_colour(g: &Graph, palette: usize) -> Option<EdgeColouring> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut colours = vec![usize::MAX; edges.len()];
    fn rec(i: usize, edges: &[(usize, usize)], colours: &mut [usize], palette: usize, top: usize) -> bool {
        if i == edges.len() {
            return true;
        }
        let (u, v) = edges[i];
        for c in 0..palette.min(top + 1) {
            let clash = (0..i).any(|j| {
                colours[j] == c && {
                    let (a, b) = edges[j];
                    a == u || a == v || b == u || b == v
                }
            });
            if clash {
                continue;
            }
            colours[i] = c;
            if rec(i + 1, edges, colours, palette, top.max(c + 1)) {
                return true;
            }
        }
        colours[i] = usize::MAX;
        false
    }
    rec(0, &edges, &mut colours, palette, 0).then(|| EdgeColouring {
        n: g.n(),
        edges: edges.iter().zip(&colours).map(|(&(u, v), &c)| (u, v, c)).collect(),
    })
}

/// How a chromatic-index value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IndexMethod {
    Edgeless,
    Bipartite,
    UniqueMaxDegree,
    Exhaustive,
    Heuristic,
    Vizing,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChromaticIndex {
    pub value: usize,
    pub colouring: EdgeColouring,
    /// `value` is certainly optimal.
    pub proven: bool,
    pub method: IndexMethod,
}

/// Chromatic index, exact for edgeless, bipartite, unique-maximum-degree and
/// small graphs, and whenever a `Δ`-colouring is found.
pub fn chromatic_index(g: &Graph) -> ChromaticIndex {
    let delta = g.max_degree();
    let done = |colouring: EdgeColouring, method| {
        debug_assert!(colouring.is_proper(g));
        ChromaticIndex {
            value: colouring.colours_used().max(delta),
            colouring,
            proven: true,
            method,
        }
    };
    if delta == 0 {
        return done(
            EdgeColouring {
                n: g.n(),
                edges: Vec::new(),
            },
            IndexMethod::Edgeless,
        );
    }
    if let Some(c) = bipartite_colour(g) {
        return done(c, IndexMethod::Bipartite);
    }
    let degs = g.degrees();
    let maxima: Vec<usize> = (0..g.n()).filter(|&v| degs[v] == delta).collect();
    if maxima.len() == 1 {
        if let Some(c) = unique_max_colour(g, maxima[0]) {
            return done(c, IndexMethod::UniqueMaxDegree);
        }
    }
    if g.edge_count() <= EXHAUSTIVE_MAX_EDGES {
        return match exhaustive_colour(g, delta) {
            Some(c) => done(c, IndexMethod::Exhaustive),
            None => {
                let c = vizing_colour(g);
                ChromaticIndex {
                    value: delta + 1,
                    colouring: c,
                    proven: true,
                    method: IndexMethod::Exhaustive,
                }
            }
        };
    }
    if let Some(c) = greedy_delta_colour(g) {
        return done(c, IndexMethod::Heuristic);
    }
    ChromaticIndex {
        value: delta + 1,
        colouring: vizing_colour(g),
        proven: false,
        method: IndexMethod::Vizing,
    }
}

/// Unique vertex of maximum degree, if there is one.
pub fn unique_max_degree_vertex(g: &Graph) -> Option<usize> {
    let degs = g.degrees();
    let delta = *degs.iter().max()?;
    let mut it = (0..g.n()).filter(|&v| degs[v] == delta);
    let v = it.next()?;
    it.next().is_none().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_examples() {
        let c4 = chromatic_index(&Graph::cycle(4));
        assert_eq!(c4.value, 2);
        assert!(c4.colouring.is_proper(&Graph::cycle(4)));
        let k3 = chromatic_index(&Graph::cycle(3));
        assert_eq!((k3.value, k3.proven), (3, true));
        let star = Graph::complete_bipartite(1, 3);
        let s = chromatic_index(&star);
        assert_eq!((s.value, s.colouring.colours_used()), (3, 3));
        assert_eq!(chromatic_index(&Graph::new(4)).value, 0);
        // Petersen graph is class two.
        let mut p = Graph::new(10);
        for i in 0..5 {
            p.add_edge(i, (i + 1) % 5);
            p.add_edge(i, i + 5);
            p.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        let pc = chromatic_index(&p);
        assert_eq!((pc.value, pc.proven), (4, true));
    }

    #[test]
    fn k4_and_k5() {
        assert_eq!(chromatic_index(&Graph::complete(4)).value, 3);
        assert_eq!(chromatic_index(&Graph::complete(5)).value, 5);
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    #[test]
    fn vizing_is_proper_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for t in 0..60 {
            let g = random_graph(&mut rng, 5 + t, 0.1 + 0.013 * t as f64);
            let c = vizing_colour(&g);
            assert!(c.is_proper(&g));
            assert!(c.colours_used() <= g.max_degree() + 1);
        }
    }

    #[test]
    fn unique_max_gives_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut hits = 0;
        for _ in 0..200 {
            let g = random_graph(&mut rng, 40, 0.5);
            if let Some(v0) = unique_max_degree_vertex(&g) {
                let c = unique_max_colour(&g, v0).expect("Δ colours suffice");
                assert!(c.is_proper(&g));
                assert_eq!(c.colours_used(), g.max_degree());
                hits += 1;
            }
        }
        assert!(hits > 20);
    }

    #[test]
    fn bipartite_is_class_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..40 {
            let mut g = Graph::new(30);
            for u in 0..15 {
                for v in 15..30 {
                    if rng.random::<bool>() {
                        g.add_edge(u, v);
                    }
                }
            }
            let ci = chromatic_index(&g);
            assert_eq!(ci.method, IndexMethod::Bipartite);
            assert_eq!(ci.value, g.max_degree());
            assert!(ci.colouring.is_proper(&g));
        }
    }
}
