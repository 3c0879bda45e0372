use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::Sign;
use crate::graph::{Graph, VertexSet};

pub const ALPHA_EXACT_MAX_N: usize = 64;
pub const CONTAINS_INDUCED_MAX: usize = 10;
pub const CLASSIFY_GS_MAX: usize = 16;
pub const DEFAULT_CLIQUE_CAP: usize = 1_000_000;

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| g.row(v).first().copied().unwrap_or(0)).collect()
}

fn max_clique_rec(adj: &[u64], r: u64, mut p: u64, best: &mut u64) {
    let mut order = Vec::with_capacity(p.count_ones() as usize);
    let mut uncoloured = p;
    let mut colour = 0u32;
    while uncoloured != 0 {
        colour += 1;
        let mut q = uncoloured;
        while q != 0 {
            let v = q.trailing_zeros() as usize;
            q &= !(1 << v) & !adj[v];
            uncoloured &= !(1 << v);
            order.push((v, colour));
        }
    }
    let size = r.count_ones();
    for &(v, c) in order.iter().rev() {
        if size + c <= best.count_ones() {
            return;
        }
        let nr = r | 1 << v;
        let np = p & adj[v];
        if np == 0 {
            if nr.count_ones() > best.count_ones() {
                *best = nr;
            }
        } else {
            max_clique_rec(adj, nr, np, best);
        }
        p &= !(1 << v);
    }
}

/// A maximum clique of `g` (`n <= 64`) by branch and bound with colouring bounds.
pub fn max_clique(g: &Graph) -> Result<VertexSet> {
    let n = g.n();
    if n > ALPHA_EXACT_MAX_N {
        return Err(Error::scale("exact clique search order", n, ALPHA_EXACT_MAX_N));
    }
    let adj = masks(g);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0u64;
    if n > 0 {
        max_clique_rec(&adj, 0, all, &mut best);
    }
    Ok(VertexSet::from_iter(n, (0..n).filter(|&v| best >> v & 1 == 1)))
}

/// Clique number, exact for `n <= 64`.
pub fn omega_exact(g: &Graph) -> Result<usize> {
    max_clique(g).map(|c| c.len())
}

/// Stability number, exact for `n <= 64`.
pub fn alpha_exact(g: &Graph) -> Result<usize> {
    if g.n() > ALPHA_EXACT_MAX_N {
        return Err(Error::scale("alpha_exact order", g.n(), ALPHA_EXACT_MAX_N));
    }
    omega_exact(&g.complement())
}

/// All inclusion-maximal cliques (Bron–Kerbosch with pivoting).
pub fn maximal_cliques(g: &Graph) -> Result<Vec<VertexSet>> {
    maximal_cliques_capped(g, DEFAULT_CLIQUE_CAP)
}

pub fn maximal_cliques_capped(g: &Graph, cap: usize) -> Result<Vec<VertexSet>> {
    let mut out = Vec::new();
    let n = g.n();
    bk(g, VertexSet::new(n), VertexSet::full(n), VertexSet::new(n), cap, &mut out)?;
    Ok(out)
}

fn bk(
    g: &Graph,
    r: VertexSet,
    mut p: VertexSet,
    mut x: VertexSet,
    cap: usize,
    out: &mut Vec<VertexSet>,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            if out.len() >= cap {
                return Err(Error::scale("maximal clique count", out.len() + 1, cap));
            }
            out.push(r);
        }
        return Ok(());
    }
    let pivot = p
        .union(&x)
        .iter()
        .max_by_key(|&u| g.degree_in(u, &p))
        .expect("p nonempty");
    let branch = p.difference(&g.neighborhood(pivot));
    for v in branch.iter() {
        let nv = g.neighborhood(v);
        let mut r2 = r.clone();
        r2.insert(v);
        bk(g, r2, p.intersect(&nv), x.intersect(&nv), cap, out)?;
        p.remove(v);
        x.insert(v);
    }
    Ok(())
}

/// An induced copy of `h` in `g`, as `embedding[i]` = image of pattern vertex `i`.
pub fn contains_induced(g: &Graph, h: &Graph) -> Result<Option<Vec<usize>>> {
    let k = h.n();
    if k > CONTAINS_INDUCED_MAX {
        return Err(Error::scale("pattern order", k, CONTAINS_INDUCED_MAX));
    }
    if k == 0 {
        return Ok(Some(Vec::new()));
    }
    if k > g.n() {
        return Ok(None);
    }
    // Place pattern vertices so each new one has as many placed neighbours as possible.
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    for _ in 0..k {
        let next = (0..k)
            .filter(|&i| !placed[i])
            .max_by_key(|&i| {
                let back = order.iter().filter(|&&j| h.has_edge(i, j)).count();
                (back, h.degree(i), std::cmp::Reverse(i))
            })
            .expect("unplaced vertex");
        placed[next] = true;
        order.push(next);
    }
    let mut img = vec![usize::MAX; k];
    let mut used = VertexSet::new(g.n());
    if embed(g, h, &order, 0, &mut img, &mut used) {
        Ok(Some(img))
    } else {
        Ok(None)
    }
}

fn embed(g: &Graph, h: &Graph, order: &[usize], depth: usize, img: &mut [usize], used: &mut VertexSet) -> bool {
    if depth == order.len() {
        return true;
    }
    let i = order[depth];
    let mut cand = used.complement();
    for &j in &order[..depth] {
        let row = g.neighborhood(img[j]);
        cand = if h.has_edge(i, j) {
            cand.intersect(&row)
        } else {
            cand.difference(&row)
        };
    }
    for v in cand.iter() {
        img[i] = v;
        used.insert(v);
        if embed(g, h, order, depth + 1, img, used) {
            return true;
        }
        used.remove(v);
    }
    img[i] = usize::MAX;
    false
}

/// Membership of a graph in the unipolar / co-unipolar classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GSTag {
    NotGS,
    UnipolarOnly,
    CoUnipolarOnly,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GSClass {
    pub tag: GSTag,
    /// Central set of a witnessing arrangement; a clique for `+`, a stable set for `-`.
    pub witness_central: Option<VertexSet>,
    pub witness_sign: Option<Sign>,
}

fn small_masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).fold(0u32, |m, u| m | 1 << u))
        .collect()
}

/// Some induced path `a − b − c` inside `rest`, as a vertex mask.
fn induced_p3(adj: &[u32], rest: u32) -> Option<u32> {
    let mut it = rest;
    while it != 0 {
        let b = it.trailing_zeros() as usize;
        it &= it - 1;
        let nb = adj[b] & rest;
        let mut a_it = nb;
        while a_it != 0 {
            let a = a_it.trailing_zeros() as usize;
            a_it &= a_it - 1;
            let missing = nb & !adj[a] & !(1 << a);
            if missing != 0 {
                return Some(1 << a | 1 << b | 1 << missing.trailing_zeros());
            }
        }
    }
    None
}

fn find_central(adj: &[u32], full: u32, c: u32, cand: u32) -> Option<u32> {
    match induced_p3(adj, full & !c) {
        None => return Some(c),
        // Some vertex of the offending path must still be movable into C.
        Some(p3) if p3 & cand == 0 => return None,
        Some(_) => {}
    }
    let mut it = cand;
    while it != 0 {
        let v = it.trailing_zeros() as usize;
        it &= it - 1;
        let higher = !((2u32 << v) - 1);
        if let Some(w) = find_central(adj, full, c | 1 << v, cand & adj[v] & higher) {
            return Some(w);
        }
    }
    None
}

fn unipolar_witness(g: &Graph) -> Option<VertexSet> {
    let n = g.n();
    let adj = small_masks(g);
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    find_central(&adj, full, 0, full).map(|c| VertexSet::from_iter(n, (0..n).filter(|&v| c >> v & 1 == 1)))
}

/// Exact generalised-split classification for `v(h) <= 16`.
pub fn classify_gs(h: &Graph) -> Result<GSClass> {
    if h.n() > CLASSIFY_GS_MAX {
        return Err(Error::scale("classify_gs order", h.n(), CLASSIFY_GS_MAX));
    }
    let plus = unipolar_witness(h);
    let minus = unipolar_witness(&h.complement());
    let (tag, witness_central, witness_sign) = match (plus, minus) {
        (Some(c), Some(_)) => (GSTag::Both, Some(c), Some(Sign::Plus)),
        (Some(c), None) => (GSTag::UnipolarOnly, Some(c), Some(Sign::Plus)),
        (None, Some(c)) => (GSTag::CoUnipolarOnly, Some(c), Some(Sign::Minus)),
        (None, None) => (GSTag::NotGS, None, None),
    };
    Ok(GSClass {
        tag,
        witness_central,
        witness_sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k23() -> Graph {
        Graph::complete_bipartite(2, 3)
    }

    #[test]
    fn alpha_omega_examples() {
        let c5 = Graph::cycle(5);
        assert_eq!((alpha_exact(&c5).unwrap(), omega_exact(&c5).unwrap()), (2, 2));
        assert_eq!((alpha_exact(&k23()).unwrap(), omega_exact(&k23()).unwrap()), (3, 2));
        assert_eq!(alpha_exact(&Graph::path(3)).unwrap(), 2);
        assert_eq!(omega_exact(&Graph::complete(64)).unwrap(), 64);
        assert_eq!(omega_exact(&Graph::new(0)).unwrap(), 0);
        assert!(alpha_exact(&Graph::new(65)).unwrap_err().is_scale());
    }

    #[test]
    fn maximal_clique_examples() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]);
        let mut got: Vec<Vec<usize>> = maximal_cliques(&g).unwrap().iter().map(|c| c.to_vec()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(maximal_cliques(&Graph::new(3)).unwrap().len(), 3);
        assert_eq!(maximal_cliques(&Graph::complete(4)).unwrap().len(), 1);
        assert!(maximal_cliques_capped(&Graph::new(5), 4).unwrap_err().is_scale());
    }

    #[test]
    fn containment_examples() {
        let k1 = Graph::new(1);
        assert!(contains_induced(&Graph::cycle(3), &k1).unwrap().is_some());
        let emb = contains_induced(&Graph::cycle(5), &Graph::path(4)).unwrap().unwrap();
        let c5 = Graph::cycle(5);
        let p4 = Graph::path(4);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(p4.has_edge(i, j), c5.has_edge(emb[i], emb[j]));
                }
            }
        }
        assert!(contains_induced(&Graph::complete(4), &k23()).unwrap().is_none());
        assert!(contains_induced(&Graph::new(20), &Graph::new(11)).unwrap_err().is_scale());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_gs(&k23()).unwrap().tag, GSTag::CoUnipolarOnly);
        assert_eq!(classify_gs(&Graph::path(4)).unwrap().tag, GSTag::Both);
        let mut g = Graph::new(8);
        for u in 0..2 {
            for v in 2..5 {
                g.add_edge(u, v);
            }
        }
        g.add_edge(5, 6);
        g.add_edge(5, 7);
        g.add_edge(6, 7);
        assert_eq!(classify_gs(&g).unwrap().tag, GSTag::NotGS);
        assert!(classify_gs(&Graph::new(17)).unwrap_err().is_scale());
    }

    #[test]
    fn witness_is_valid() {
        let c = classify_gs(&Graph::path(4)).unwrap();
        let w = c.witness_central.unwrap();
        assert!(Graph::path(4).is_clique(&w));
    }
}
