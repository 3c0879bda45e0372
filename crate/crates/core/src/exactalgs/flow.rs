use serde::Serialize;

use crate::graph::{words_for, BitIter, Graph, VertexSet};

/// Maximum matching in a bipartite graph given by left rows of right-side bitsets.
///
/// Returns `mate[i]` = matched right index of left vertex `i`.
pub fn max_matching_rows(rows: &[Vec<u64>], n_right: usize) -> Vec<Option<usize>> {
    let mut mate_l: Vec<Option<usize>> = vec![None; rows.len()];
    let mut mate_r: Vec<Option<usize>> = vec![None; n_right];
    let w = words_for(n_right);
    for (i, row) in rows.iter().enumerate() {
        if let Some(j) = BitIter::new(row).find(|&j| mate_r[j].is_none()) {
            mate_l[i] = Some(j);
            mate_r[j] = Some(i);
        }
    }
    for i in 0..rows.len() {
        if mate_l[i].is_some() {
            continue;
        }
        let mut seen = vec![0u64; w];
        augment(rows, i, &mut seen, &mut mate_l, &mut mate_r);
    }
    mate_l
}

fn augment(
    rows: &[Vec<u64>],
    i: usize,
    seen: &mut [u64],
    mate_l: &mut [Option<usize>],
    mate_r: &mut [Option<usize>],
) -> bool {
    for (wi, &word) in rows[i].iter().enumerate() {
        let mut cand = word & !seen[wi];
        while cand != 0 {
            let t = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let j = wi * 64 + t;
            if seen[wi] >> t & 1 == 1 {
                continue;
            }
            seen[wi] |= 1 << t;
            let free = match mate_r[j] {
                None => true,
                Some(i2) => augment(rows, i2, seen, mate_l, mate_r),
            };
            if free {
                mate_l[i] = Some(j);
                mate_r[j] = Some(i);
                return true;
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    /// Every left vertex is matched.
    pub complete: bool,
}

/// Maximum matching between disjoint vertex sets of `g` using the edges between them.
pub fn max_bipartite_matching(left: &VertexSet, right: &VertexSet, g: &Graph) -> Matching {
    assert!(left.is_disjoint(right), "sides must be disjoint");
    let lv = left.to_vec();
    let rows: Vec<Vec<u64>> = lv
        .iter()
        .map(|&u| g.row(u).iter().zip(right.words()).map(|(a, b)| a & b).collect())
        .collect();
    let mate = max_matching_rows(&rows, g.n());
    let pairs: Vec<(usize, usize)> = lv
        .iter()
        .zip(&mate)
        .filter_map(|(&u, m)| m.map(|v| (u, v)))
        .collect();
    Matching {
        complete: pairs.len() == lv.len(),
        pairs,
    }
}

/// Number of internally vertex-disjoint `s–t` paths, stopping early at `limit`.
/// `s` and `t` must be distinct and non-adjacent.
pub fn local_connectivity(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    assert!(s != t && !g.has_edge(s, t));
    let n = g.n();
    let w = g.words();
    // flow[u] holds the w with one unit on the arc u -> w.
    let mut flow = vec![0u64; n * w];
    let mut value = 0;
    let common = g.neighborhood(s).intersect(&g.neighborhood(t));
    for c in common.iter() {
        if value == limit {
            return value;
        }
        flow[s * w + (c >> 6)] |= 1 << (c & 63);
        flow[c * w + (t >> 6)] |= 1 << (t & 63);
        value += 1;
    }
    let mut pred = vec![usize::MAX; n];
    let mut used = vec![false; n];
    loop {
        if value >= limit {
            return value;
        }
        pred.iter_mut().for_each(|p| *p = usize::MAX);
        used.iter_mut().for_each(|u| *u = false);
        for u in 0..n {
            if u == s {
                continue;
            }
            for x in BitIter::new(&flow[u * w..(u + 1) * w]) {
                used[u] = true;
                if x != t {
                    pred[x] = u;
                }
            }
        }
        match augmenting_path(g, s, t, &flow, &pred, &used) {
            None => return value,
            Some(arcs) => {
                for (u, x, forward) in arcs {
                    if forward {
                        flow[u * w + (x >> 6)] |= 1 << (x & 63);
                    } else {
                        flow[u * w + (x >> 6)] &= !(1 << (x & 63));
                    }
                }
                value += 1;
            }
        }
    }
}

/// BFS in the split residual graph from `s_out` to `t_in`. Node `v` is
/// `v_in` and node `n + v` is `v_out`. Returns the graph arcs `(u, x, add)`
/// whose flow changes.
fn augmenting_path(
    g: &Graph,
    s: usize,
    t: usize,
    flow: &[u64],
    pred: &[usize],
    used: &[bool],
) -> Option<Vec<(usize, usize, bool)>> {
    const NONE: usize = usize::MAX;
    let n = g.n();
    let w = g.words();
    let mut parent = vec![NONE; 2 * n];
    let mut seen_in = VertexSet::new(n);
    seen_in.insert(s);
    let mut seen_out = vec![false; n];
    seen_out[s] = true;
    seen_out[t] = true;
    let mut queue = vec![n + s];
    let mut head = 0;
    while head < queue.len() {
        let node = queue[head];
        head += 1;
        if node >= n {
            let u = node - n;
            // Forward arcs u_out -> x_in without flow.
            let mut fresh = Vec::new();
            for wi in 0..w {
                let mut cand = g.row(u)[wi] & !flow[u * w + wi] & !seen_in.words()[wi];
                while cand != 0 {
                    let b = cand.trailing_zeros() as usize;
                    cand &= cand - 1;
                    fresh.push(wi * 64 + b);
                }
            }
            for x in fresh {
                seen_in.insert(x);
                parent[x] = node;
                if x == t {
                    return Some(unwind(n, t, &parent));
                }
                queue.push(x);
            }
            // Reverse internal arc u_out -> u_in.
            if used[u] && u != s && !seen_in.contains(u) {
                seen_in.insert(u);
                parent[u] = node;
                queue.push(u);
            }
        } else {
            let x = node;
            if !used[x] {
                if !seen_out[x] {
                    seen_out[x] = true;
                    parent[n + x] = node;
                    queue.push(n + x);
                }
            } else {
                // Reverse of the flow arc p -> x.
                let p = pred[x];
                if p != NONE && !seen_out[p] {
                    seen_out[p] = true;
                    parent[n + p] = node;
                    queue.push(n + p);
                }
            }
        }
    }
    None
}

fn unwind(n: usize, t: usize, parent: &[usize]) -> Vec<(usize, usize, bool)> {
    let mut arcs = Vec::new();
    let mut node = t;
    while parent[node] != usize::MAX {
        let prev = parent[node];
        match (prev >= n, node >= n) {
            // u_out -> x_in: push flow on u -> x.
            (true, false) if prev - n != node => arcs.push((prev - n, node, true)),
            // x_in -> p_out: cancel flow p -> x.
            (false, true) if node - n != prev => arcs.push((node - n, prev, false)),
            _ => {}
        }
        node = prev;
    }
    arcs
}

/// Vertex connectivity; `n − 1` for complete graphs.
pub fn connectivity(g: &Graph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    if g.is_complete() {
        return n - 1;
    }
    let degs = g.degrees();
    let (v, &delta) = degs
        .iter()
        .enumerate()
        .min_by_key(|&(i, d)| (*d, i))
        .expect("n >= 2");
    let mut best = delta;
    let nv = g.neighborhood(v);
    for u in 0..n {
        if best == 0 {
            return 0;
        }
        if u != v && !nv.contains(u) {
            best = best.min(local_connectivity(g, v, u, best));
        }
    }
    let nbrs = nv.to_vec();
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.has_edge(x, y) {
                best = best.min(local_connectivity(g, x, y, best));
            }
        }
    }
    best
}
