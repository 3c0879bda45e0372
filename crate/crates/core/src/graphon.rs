//! Step graphons with exact rational densities, homomorphism counts and a
//! greedy cut-norm lower bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generator::Arrangement;
use crate::graph::{BitIter, Graph, VertexSet};

pub const T_GRAPHON_MAX_V: usize = 10;
pub const T_COUNTS_MAX_V: usize = 5;

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// A symmetric step function on `[0,1]²` with blocks laid out left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepGraphon {
    masses: Vec<BigRational>,
    weights: Vec<Vec<BigRational>>,
}

impl StepGraphon {
    pub fn new(masses: Vec<BigRational>, weights: Vec<Vec<BigRational>>) -> Result<StepGraphon> {
        let b = masses.len();
        if b == 0 || masses.iter().any(|m| *m <= BigRational::zero() || *m > BigRational::one()) {
            return Err(Error::invalid("block masses must lie in (0, 1]"));
        }
        if masses.iter().sum::<BigRational>() != BigRational::one() {
            return Err(Error::invalid("block masses must sum to 1"));
        }
        if weights.len() != b || weights.iter().any(|r| r.len() != b) {
            return Err(Error::invalid("weight matrix must be square over the blocks"));
        }
        for i in 0..b {
            for j in 0..b {
                let w = &weights[i][j];
                if *w < BigRational::zero() || *w > BigRational::one() || *w != weights[j][i] {
                    return Err(Error::invalid("weights must be symmetric and in [0, 1]"));
                }
            }
        }
        Ok(StepGraphon { masses, weights })
    }

    pub fn blocks(&self) -> usize {
        self.masses.len()
    }

    pub fn mass(&self, i: usize) -> &BigRational {
        &self.masses[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> &BigRational {
        &self.weights[i][j]
    }

    /// `∫W`.
    pub fn integral(&self) -> BigRational {
        let b = self.blocks();
        let mut s = BigRational::zero();
        for i in 0..b {
            for j in 0..b {
                s += &self.masses[i] * &self.masses[j] * &self.weights[i][j];
            }
        }
        s
    }

    /// `1 − W` with the block order reversed.
    pub fn complement_reversed(&self) -> StepGraphon {
        let b = self.blocks();
        StepGraphon {
            masses: self.masses.iter().rev().cloned().collect(),
            weights: (0..b)
                .map(|i| (0..b).map(|j| BigRational::one() - &self.weights[b - 1 - i][b - 1 - j]).collect())
                .collect(),
        }
    }

    /// Left end of each block and its length, as floats.
    fn intervals(&self) -> Vec<(f64, f64)> {
        let mut at = 0.0;
        self.masses
            .iter()
            .map(|m| {
                let len = m.to_f64().unwrap_or(0.0);
                let iv = (at, len);
                at += len;
                iv
            })
            .collect()
    }
}

/// The limit graphon of the generated graphs: a clique half, a stable half,
/// and density 1/2 between them.
pub fn wp() -> StepGraphon {
    let h = ratio(1, 2);
    StepGraphon {
        masses: vec![h.clone(), h.clone()],
        weights: vec![
            vec![BigRational::one(), h.clone()],
            vec![h, BigRational::zero()],
        ],
    }
}

/// `t(F, W)` by summing over block assignments of the vertices of `f`.
pub fn t_graphon(f: &Graph, w: &StepGraphon) -> Result<BigRational> {
    let v = f.n();
    if v > T_GRAPHON_MAX_V {
        return Err(Error::scale("t_graphon pattern order", v, T_GRAPHON_MAX_V));
    }
    let mut assign = Vec::with_capacity(v);
    let mut total = BigRational::zero();
    assign_rec(f, w, &mut assign, BigRational::one(), &mut total);
    Ok(total)
}

fn assign_rec(f: &Graph, w: &StepGraphon, assign: &mut Vec<usize>, acc: BigRational, total: &mut BigRational) {
    let i = assign.len();
    if i == f.n() {
        *total += acc;
        return;
    }
    for b in 0..w.blocks() {
        let mut next = &acc * w.mass(b);
        for (j, &bj) in assign.iter().enumerate() {
            if f.has_edge(i, j) {
                next *= w.weight(b, bj);
            }
        }
        if next.is_zero() {
            continue;
        }
        assign.push(b);
        assign_rec(f, w, assign, next, total);
        assign.pop();
    }
}

/// Homomorphism and injective homomorphism counts of `f` into `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HomCounts {
    pub hom: u128,
    pub hom_inj: u128,
}

/// Pattern vertices in breadth-first order, so that later vertices have
/// earlier neighbours when the pattern is connected.
fn pattern_order(f: &Graph) -> Vec<usize> {
    let v = f.n();
    let mut order = Vec::with_capacity(v);
    let mut seen = vec![false; v];
    for root in 0..v {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        order.push(root);
        let mut head = order.len() - 1;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for x in f.neighbors(u) {
                if !seen[x] {
                    seen[x] = true;
                    order.push(x);
                }
            }
        }
    }
    order
}

pub fn hom_counts(f: &Graph, g: &Graph) -> Result<HomCounts> {
    let v = f.n();
    if v > T_COUNTS_MAX_V {
        return Err(Error::scale("t_counts pattern order", v, T_COUNTS_MAX_V));
    }
    let mut counts = HomCounts { hom: 0, hom_inj: 0 };
    if v == 0 {
        counts = HomCounts { hom: 1, hom_inj: 1 };
        return Ok(counts);
    }
    let order = pattern_order(f);
    // back[i]: positions j < i in `order` adjacent to order[i].
    let back: Vec<Vec<usize>> = (0..v)
        .map(|i| (0..i).filter(|&j| f.has_edge(order[i], order[j])).collect())
        .collect();
    let mut image = Vec::with_capacity(v);
    let mut used = VertexSet::new(g.n());
    hom_rec(g, &back, &mut image, &mut used, true, &mut counts);
    Ok(counts)
}

fn candidates(g: &Graph, back: &[usize], image: &[usize]) -> Vec<u64> {
    let n = g.n();
    match back.split_first() {
        None => VertexSet::full(n).words().to_vec(),
        Some((&j0, rest)) => {
            let mut c = g.row(image[j0]).to_vec();
            for &j in rest {
                for (a, b) in c.iter_mut().zip(g.row(image[j])) {
                    *a &= b;
                }
            }
            c
        }
    }
}

fn hom_rec(
    g: &Graph,
    back: &[Vec<usize>],
    image: &mut Vec<usize>,
    used: &mut VertexSet,
    injective: bool,
    counts: &mut HomCounts,
) {
    let i = image.len();
    let cand = candidates(g, &back[i], image);
    if i + 1 == back.len() {
        counts.hom += cand.iter().map(|w| w.count_ones() as u128).sum::<u128>();
        if injective {
            counts.hom_inj += cand
                .iter()
                .zip(used.words())
                .map(|(a, b)| (a & !b).count_ones() as u128)
                .sum::<u128>();
        }
        return;
    }
    for x in BitIter::new(&cand) {
        let fresh = !used.contains(x);
        image.push(x);
        if fresh {
            used.insert(x);
        }
        hom_rec(g, back, image, used, injective && fresh, counts);
        if fresh {
            used.remove(x);
        }
        image.pop();
    }
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "ser_ratio")]
    pub t_graphon: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub t_inj: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub t_hom: BigRational,
    pub counts: HomCounts,
    /// Reference deviation `C(v,2)/n + e(F)/√n` for `|t_inj − t(F, W)|`.
    pub bound: f64,
}

/// Densities of `f` in `g` against the graphon `w`.
pub fn density_report(f: &Graph, g: &Graph, w: &StepGraphon) -> Result<DensityReport> {
    let v = f.n();
    let n = g.n();
    if n == 0 {
        return Err(Error::invalid("host graph must have at least one vertex"));
    }
    let counts = hom_counts(f, g)?;
    let hom_den = BigInt::from(n).pow(v as u32);
    let t_hom = BigRational::new(BigInt::from(counts.hom), hom_den);
    let t_inj = if v <= n {
        let inj_den: BigInt = (0..v).map(|i| BigInt::from(n - i)).product();
        BigRational::new(BigInt::from(counts.hom_inj), inj_den)
    } else {
        BigRational::zero()
    };
    let bound = (v * v.saturating_sub(1) / 2) as f64 / n as f64 + f.edge_count() as f64 / (n as f64).sqrt();
    Ok(DensityReport {
        t_graphon: t_graphon(f, w)?,
        t_inj,
        t_hom,
        counts,
        bound,
    })
}

/// [`density_report`] against [`wp`].
pub fn t_counts(f: &Graph, g: &Graph) -> Result<DensityReport> {
    density_report(f, g, &wp())
}

/// Vertex order placing the central set first, then the side parts in order.
pub fn alignment_order(arr: &Arrangement) -> Vec<usize> {
    let mut order = arr.central.to_vec();
    for p in &arr.side_parts {
        order.extend(p.iter());
    }
    order
}

/// Discrepancy matrix `D[i][j] = ∫ over cell (i, j) of (W_g − W)` under the alignment.
fn discrepancy(g: &Graph, w: &StepGraphon, order: &[usize]) -> Vec<Vec<f64>> {
    let n = order.len();
    let ivs = w.intervals();
    let inv = 1.0 / n as f64;
    let overlap: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (lo, hi) = (i as f64 * inv, (i + 1) as f64 * inv);
            ivs.iter()
                .map(|&(a, len)| (hi.min(a + len) - lo.max(a)).max(0.0))
                .collect()
        })
        .collect();
    let b = w.blocks();
    let wf: Vec<Vec<f64>> = (0..b)
        .map(|x| (0..b).map(|y| w.weight(x, y).to_f64().unwrap_or(0.0)).collect())
        .collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut wij = 0.0;
            for x in 0..b {
                if overlap[i][x] == 0.0 {
                    continue;
                }
                for y in 0..b {
                    wij += overlap[i][x] * overlap[j][y] * wf[x][y];
                }
            }
            let a = if g.has_edge(order[i], order[j]) { inv * inv } else { 0.0 };
            d[i][j] = a - wij;
        }
    }
    d
}

/// Outcome of one greedy ascent.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSweep {
    pub value: f64,
    /// `|∫_{S×T}|` after each toggle, starting from the seed.
    pub trace: Vec<f64>,
}

/// Toggles single rows and columns while that grows `|∫_{S×T} D|` in the
/// direction of the seed's sign (`prefer` when the seed integral is zero).
fn sweep(d: &[Vec<f64>], mut s: Vec<bool>, mut t: Vec<bool>, prefer: f64) -> CutSweep {
    let n = d.len();
    // rows[i] = Σ_{j∈T} D[i][j], cols[j] = Σ_{i∈S} D[i][j].
    let mut rows: Vec<f64> = (0..n).map(|i| (0..n).filter(|&j| t[j]).map(|j| d[i][j]).sum()).collect();
    let mut cols: Vec<f64> = (0..n).map(|j| (0..n).filter(|&i| s[i]).map(|i| d[i][j]).sum()).collect();
    let mut value: f64 = (0..n).filter(|&i| s[i]).map(|i| rows[i]).sum();
    let sign = if value != 0.0 { value.signum() } else { prefer };
    let mut trace = vec![value.abs()];
    let tol = 1e-15;
    loop {
        let mut changed = false;
        for i in 0..n {
            let gain = if s[i] { -rows[i] } else { rows[i] };
            if sign * gain > tol {
                s[i] = !s[i];
                value += gain;
                let step = if s[i] { 1.0 } else { -1.0 };
                for j in 0..n {
                    cols[j] += step * d[i][j];
                }
                trace.push(value.abs());
                changed = true;
            }
        }
        for j in 0..n {
            let gain = if t[j] { -cols[j] } else { cols[j] };
            if sign * gain > tol {
                t[j] = !t[j];
                value += gain;
                let step = if t[j] { 1.0 } else { -1.0 };
                for i in 0..n {
                    rows[i] += step * d[i][j];
                }
                trace.push(value.abs());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    CutSweep {
        value: value.abs(),
        trace,
    }
}

/// Greedy ascents from a fixed palette of seed rectangles: the full square
/// and the quadrants at the central boundary and at the midpoint.
pub fn cut_norm_sweeps(g: &Graph, w: &StepGraphon, alignment: &Arrangement) -> Result<Vec<CutSweep>> {
    alignment.validate(g)?;
    let order = alignment_order(alignment);
    let n = order.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = discrepancy(g, w, &order);
    let k = alignment.k();
    let half = n.div_ceil(2);
    let full = vec![true; n];
    let split = |cut: usize, first: bool| -> Vec<bool> { (0..n).map(|i| (i < cut) == first).collect() };
    let mut seeds = vec![(full.clone(), full)];
    for cut in [k, half] {
        for a in [true, false] {
            for b in [true, false] {
                seeds.push((split(cut, a), split(cut, b)));
            }
        }
    }
    let mut out = Vec::new();
    for (s, t) in seeds {
        for prefer in [1.0, -1.0] {
            out.push(sweep(&d, s.clone(), t.clone(), prefer));
        }
    }
    Ok(out)
}

/// A certified lower bound on the cut norm of `W_g − W` with `g` laid out by `alignment`.
pub fn cut_norm_lower_greedy(g: &Graph, w: &StepGraphon, alignment: &Arrangement) -> Result<f64> {
    Ok(cut_norm_sweeps(g, w, alignment)?
        .iter()
        .map(|s| s.value)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{trial_rng, Generator, Sign};
    use num_traits::Signed;

    /// Independent oracle: iterate every assignment as a base-`b` number.
    fn t_oracle(f: &Graph, w: &StepGraphon) -> BigRational {
        let (v, b) = (f.n(), w.blocks());
        let mut total = BigRational::zero();
        for code in 0..b.pow(v as u32) {
            let a: Vec<usize> = (0..v).map(|i| code / b.pow(i as u32) % b).collect();
            let mut term: BigRational = a.iter().map(|&x| w.mass(x).clone()).product();
            for (x, y) in f.edges() {
                term *= w.weight(a[x], a[y]);
            }
            total += term;
        }
        total
    }

    #[test]
    fn wp_values() {
        let w = wp();
        assert_eq!(w.integral(), ratio(1, 2));
        assert_eq!(w.complement_reversed(), w);
        assert_eq!(t_graphon(&Graph::new(1), &w).unwrap(), BigRational::one());
        assert_eq!(t_graphon(&Graph::complete(2), &w).unwrap(), ratio(1, 2));
        assert_eq!(t_graphon(&Graph::complete(3), &w).unwrap(), ratio(7, 32));
        for f in [Graph::complete(3), Graph::cycle(4), Graph::path(4), Graph::complete(5), Graph::cycle(7)] {
            assert_eq!(t_graphon(&f, &w).unwrap(), t_oracle(&f, &w));
        }
    }

    #[test]
    fn disjoint_union_multiplies() {
        let w = StepGraphon::new(
            vec![ratio(1, 3), ratio(1, 6), ratio(1, 2)],
            vec![
                vec![ratio(1, 1), ratio(1, 4), ratio(2, 3)],
                vec![ratio(1, 4), ratio(0, 1), ratio(1, 2)],
                vec![ratio(2, 3), ratio(1, 2), ratio(1, 5)],
            ],
        )
        .unwrap();
        let f1 = Graph::path(3);
        let f2 = Graph::cycle(4);
        let mut u = Graph::new(7);
        for (a, b) in f1.edges() {
            u.add_edge(a, b);
        }
        for (a, b) in f2.edges() {
            u.add_edge(a + 3, b + 3);
        }
        assert_eq!(
            t_graphon(&u, &w).unwrap(),
            t_graphon(&f1, &w).unwrap() * t_graphon(&f2, &w).unwrap()
        );
    }

    #[test]
    fn count_examples() {
        let r = t_counts(&Graph::complete(2), &Graph::complete(3)).unwrap();
        assert_eq!(r.t_inj, BigRational::one());
        assert_eq!(t_counts(&Graph::complete(3), &Graph::cycle(4)).unwrap().t_inj, BigRational::zero());
        let r = t_counts(&Graph::complete(3), &Graph::complete(4)).unwrap();
        assert_eq!(r.counts.hom_inj, 24);
        assert_eq!(r.t_inj, BigRational::one());
    }

    /// Brute-force maps `V(f) → V(g)`.
    fn hom_oracle(f: &Graph, g: &Graph) -> (u128, u128) {
        let (v, n) = (f.n(), g.n());
        let (mut hom, mut inj) = (0, 0);
        for code in 0..n.pow(v as u32) {
            let a: Vec<usize> = (0..v).map(|i| code / n.pow(i as u32) % n).collect();
            if f.edges().all(|(x, y)| g.has_edge(a[x], a[y])) {
                hom += 1;
                let mut s = a.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() == v {
                    inj += 1;
                }
            }
        }
        (hom, inj)
    }

    #[test]
    fn counts_match_brute_force() {
        let gen = Generator::new(9);
        let pats = [Graph::complete(2), Graph::path(3), Graph::complete(3), Graph::cycle(4), Graph::path(4), Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)])];
        for t in 0..6 {
            let (g, _) = gen.gen(&mut trial_rng(3, t));
            for f in &pats {
                let c = hom_counts(f, &g).unwrap();
                assert_eq!((c.hom, c.hom_inj), hom_oracle(f, &g));
                let r = t_counts(f, &g).unwrap();
                let gap = (&r.t_hom - &r.t_inj).abs();
                let v = f.n() as i64;
                assert!(gap <= ratio(v * (v - 1) / 2, 9));
            }
        }
    }

    #[test]
    fn cut_norm_examples() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let arr = Arrangement::from_parts(4, Sign::Plus, &[0, 1], &[vec![2, 3]]).unwrap();
        let lb = cut_norm_lower_greedy(&g, &wp(), &arr).unwrap();
        assert!(lb >= 0.125 - 1e-12, "{lb}");

        // A graph whose step function is W itself: complete on the first half only.
        let g = Graph::complete(2);
        let arr = Arrangement::from_parts(2, Sign::Plus, &[0, 1], &[]).unwrap();
        let w = StepGraphon::new(
            vec![ratio(1, 2), ratio(1, 2)],
            vec![vec![ratio(0, 1), ratio(1, 1)], vec![ratio(1, 1), ratio(0, 1)]],
        )
        .unwrap();
        assert!(cut_norm_lower_greedy(&g, &w, &arr).unwrap().abs() < 1e-15);
    }

    #[test]
    fn greedy_is_monotone_and_sandwiched() {
        let gen = Generator::new(120);
        for t in 0..4 {
            let (g, arr) = gen.gen(&mut trial_rng(17, t));
            let sweeps = cut_norm_sweeps(&g, &wp(), &arr).unwrap();
            for s in &sweeps {
                assert!(s.trace.windows(2).all(|p| p[1] >= p[0] - 1e-12));
            }
            let best = sweeps.iter().map(|s| s.value).fold(0.0, f64::max);
            assert!(best <= 1.0);
            // Independent quadrant integrals at the central boundary.
            let order = alignment_order(&arr);
            let n = order.len();
            let k = arr.k();
            let d = discrepancy(&g, &wp(), &order);
            for (a, b) in [(0..k, 0..k), (0..k, k..n), (k..n, k..n)] {
                let q: f64 = a.clone().flat_map(|i| b.clone().map(move |j| (i, j))).map(|(i, j)| d[i][j]).sum();
                assert!(best >= q.abs() - 1e-12);
            }
        }
    }
}
