//! The `Gen(n)` sampler, the assembly map `rho`, and the exact small-n law.
//!
//! Randomness is drawn in a fixed order (sign bit, `k`, `σ`, cross bits, `π`)
//! so forcing the sign leaves the other components untouched. That is what
//! makes `gen_minus` the exact complement of `gen_plus` under a shared stream.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{words_for, Graph, VertexSet};
use crate::lndist::{exact_ell, LDistribution};
use crate::partitions::{SetPartition, UrnSampler};

/// Generator used for every seeded computation in the crate.
pub type TrialRng = ChaCha8Rng;

/// Stream for trial `trial` under `seed`: ChaCha8 keyed by `seed` with stream id `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sign `B` of a generalised split graph: `+` unipolar, `-` co-unipolar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sign> {
        match s {
            "+" | "plus" | "1" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            _ => Err(Error::invalid(format!("unknown sign {s:?}"))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Sign, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which signs a batch of samples uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    Mixed,
}

impl SignMode {
    pub fn forced(self) -> Option<Sign> {
        match self {
            SignMode::Plus => Some(Sign::Plus),
            SignMode::Minus => Some(Sign::Minus),
            SignMode::Mixed => None,
        }
    }
}

impl FromStr for SignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<SignMode> {
        match s {
            "mixed" => Ok(SignMode::Mixed),
            other => Ok(match other.parse::<Sign>()? {
                Sign::Plus => SignMode::Plus,
                Sign::Minus => SignMode::Minus,
            }),
        }
    }
}

/// Sampled `(B, E, (k, σ), π)`. Only the `k × (n−k)` cross entries of `E` are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenQuadruple {
    pub n: usize,
    pub b: Sign,
    pub k: usize,
    /// Partition of `k..n`, stored on `0..n−k` (element `e` is vertex `k + e`).
    pub sigma: SetPartition,
    /// Row `i < k` holds the bits for `W`, `words_for(n − k)` words per row.
    pub cross_bits: Vec<u64>,
    pub pi: Vec<usize>,
}

impl GenQuadruple {
    pub fn cross(&self, i: usize, j: usize) -> bool {
        let w = words_for(self.n - self.k);
        (self.cross_bits[i * w + (j >> 6)] >> (j & 63)) & 1 == 1
    }

    pub fn with_sign(&self, b: Sign) -> GenQuadruple {
        GenQuadruple { b, ..self.clone() }
    }
}

/// Induced (co-)unipolar arrangement of a generated graph.
///
/// For sign `+` the central set is a clique, every side part is a clique, and
/// no edges join distinct side parts. For sign `-` the same holds in the
/// complement. Side parts are listed by smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    pub n: usize,
    pub sign: Sign,
    pub central: VertexSet,
    pub side_parts: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct ArrangementJson {
    n: usize,
    sign: Sign,
    central: Vec<usize>,
    side_parts: Vec<Vec<usize>>,
}

impl Serialize for Arrangement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrangementJson {
            n: self.n,
            sign: self.sign,
            central: self.central.to_vec(),
            side_parts: self.side_parts.iter().map(|p| p.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Arrangement, D::Error> {
        let j = ArrangementJson::deserialize(d)?;
        Arrangement::from_parts(j.n, j.sign, &j.central, &j.side_parts).map_err(serde::de::Error::custom)
    }
}

impl Arrangement {
    /// Builds an arrangement, checking that the parts partition `0..n`.
    pub fn from_parts(
        n: usize,
        sign: Sign,
        central: &[usize],
        side_parts: &[Vec<usize>],
    ) -> Result<Arrangement> {
        let mut seen = VertexSet::new(n);
        let mut take = |v: usize| -> Result<()> {
            if v >= n {
                return Err(Error::ArrangementMismatch(format!("vertex {} out of range", v + 1)));
            }
            if seen.contains(v) {
                return Err(Error::ArrangementMismatch(format!("vertex {} listed twice", v + 1)));
            }
            seen.insert(v);
            Ok(())
        };
        for &v in central {
            take(v)?;
        }
        let mut parts = Vec::new();
        for p in side_parts {
            if p.is_empty() {
                return Err(Error::ArrangementMismatch("empty side part".into()));
            }
            for &v in p {
                take(v)?;
            }
            parts.push(VertexSet::from_iter(n, p.iter().copied()));
        }
        if seen.len() != n {
            return Err(Error::ArrangementMismatch(format!(
                "parts cover {} of {n} vertices",
                seen.len()
            )));
        }
        parts.sort_by_key(|p| p.first());
        Ok(Arrangement {
            n,
            sign,
            central: VertexSet::from_iter(n, central.iter().copied()),
            side_parts: parts,
        })
    }

    pub fn k(&self) -> usize {
        self.central.len()
    }

    pub fn noncentral(&self) -> VertexSet {
        self.central.complement()
    }

    /// Side part index of each vertex; `None` for central vertices.
    pub fn part_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (i, p) in self.side_parts.iter().enumerate() {
            for v in p.iter() {
                out[v] = Some(i);
            }
        }
        out
    }

    /// The same vertex partition with the sign flipped; valid for the complement graph.
    pub fn dual(&self) -> Arrangement {
        Arrangement {
            sign: self.sign.flip(),
            ..self.clone()
        }
    }

    /// Checks the partition and the (co-)unipolar conditions against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mismatch = |m: String| Err(Error::ArrangementMismatch(m));
        if g.n() != self.n {
            return mismatch(format!("graph has {} vertices, arrangement {}", g.n(), self.n));
        }
        let mut cover = self.central.clone();
        for p in &self.side_parts {
            if p.universe() != self.n || p.is_empty() || !cover.is_disjoint(p) {
                return mismatch("side parts must be nonempty and disjoint".into());
            }
            cover = cover.union(p);
        }
        if cover.len() != self.n {
            return mismatch("parts do not cover every vertex".into());
        }
        let plus = self.sign == Sign::Plus;
        let k = self.central.len();
        for v in self.central.iter() {
            let d = g.degree_in(v, &self.central);
            if (plus && d != k - 1) || (!plus && d != 0) {
                return mismatch(format!(
                    "central set is not a {} at vertex {}",
                    if plus { "clique" } else { "stable set" },
                    v + 1
                ));
            }
        }
        let outside = self.noncentral();
        let w = outside.len();
        for p in &self.side_parts {
            let want = if plus { p.len() - 1 } else { w - p.len() };
            for v in p.iter() {
                let nb = g.neighborhood(v).intersect(&outside);
                let ok = nb.len() == want
                    && if plus {
                        nb.is_subset(p)
                    } else {
                        nb.is_disjoint(p)
                    };
                if !ok {
                    return mismatch(format!("side structure violated at vertex {}", v + 1));
                }
            }
        }
        Ok(())
    }
}

/// `Gen(n)` with the `L(n)` table and per-size partition samplers cached.
pub struct Generator {
    n: usize,
    ldist: LDistribution,
    urns: Vec<OnceLock<UrnSampler>>,
}

impl Generator {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gen(n) needs n >= 1");
        Generator {
            n,
            ldist: LDistribution::build(n),
            urns: (0..=n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ldist(&self) -> &LDistribution {
        &self.ldist
    }

    fn urn(&self, m: usize) -> &UrnSampler {
        self.urns[m].get_or_init(|| UrnSampler::new(m))
    }

    pub fn quadruple<R: Rng + ?Sized>(&self, rng: &mut R, forced: Option<Sign>) -> GenQuadruple {
        let n = self.n;
        let coin = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        let b = forced.unwrap_or(coin);
        let k = self.ldist.sample(rng);
        let sigma = self.urn(n - k).sample(rng);
        let w = words_for(n - k);
        let mut cross_bits = vec![0u64; k * w];
        let tail = (n - k) % 64;
        for i in 0..k {
            for j in 0..w {
                let mut word = rng.next_u64();
                if j == w - 1 && tail != 0 {
                    word &= (1u64 << tail) - 1;
                }
                cross_bits[i * w + j] = word;
            }
        }
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(rng);
        GenQuadruple {
            n,
            b,
            k,
            sigma,
            cross_bits,
            pi,
        }
    }

    pub fn gen<R: Rng + ?Sized>(&self, rng: &mut R) -> (Graph, Arrangement) {
        rho(&self.quadruple(rng, None))
    }

    pub fn gen_plus<R: Rng + ?Sized>(&self, rng: &mut R) -> (Graph, Arrangement) {
        rho(&self.quadruple(rng, Some(Sign::Plus)))
    }

    pub fn gen_minus<R: Rng + ?Sized>(&self, rng: &mut R) -> (Graph, Arrangement) {
        rho(&self.quadruple(rng, Some(Sign::Minus)))
    }

    pub fn gen_with<R: Rng + ?Sized>(&self, rng: &mut R, mode: SignMode) -> (Graph, Arrangement) {
        rho(&self.quadruple(rng, mode.forced()))
    }
}

pub fn gen_quadruple<R: Rng + ?Sized>(n: usize, rng: &mut R, forced: Option<Sign>) -> GenQuadruple {
    Generator::new(n).quadruple(rng, forced)
}

pub fn gen<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Graph, Arrangement) {
    Generator::new(n).gen(rng)
}

pub fn gen_plus<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Graph, Arrangement) {
    Generator::new(n).gen_plus(rng)
}

pub fn gen_minus<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Graph, Arrangement) {
    Generator::new(n).gen_minus(rng)
}

/// Assembles the graph of a quadruple and its induced arrangement.
pub fn rho(q: &GenQuadruple) -> (Graph, Arrangement) {
    let (n, k) = (q.n, q.k);
    let mut g = Graph::new(n);
    for i in 0..k {
        for j in i + 1..k {
            g.add_edge(i, j);
        }
    }
    let blocks = q.sigma.blocks();
    for block in &blocks {
        for (a, &x) in block.iter().enumerate() {
            for &y in &block[a + 1..] {
                g.add_edge(k + x, k + y);
            }
        }
    }
    let w = words_for(n - k);
    for i in 0..k {
        for word in 0..w {
            let mut bits = q.cross_bits[i * w + word];
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                g.add_edge(i, k + word * 64 + t);
            }
        }
    }
    if q.b == Sign::Minus {
        g = g.complement();
    }
    let g = g.relabel(&q.pi);
    let central = VertexSet::from_iter(n, (0..k).map(|i| q.pi[i]));
    let mut side_parts: Vec<VertexSet> = blocks
        .iter()
        .map(|b| VertexSet::from_iter(n, b.iter().map(|&x| q.pi[k + x])))
        .collect();
    side_parts.sort_by_key(|p| p.first());
    (
        g,
        Arrangement {
            n,
            sign: q.b,
            central,
            side_parts,
        },
    )
}

/// Largest order accepted by [`exact_gen_law`].
pub const EXACT_LAW_MAX_N: usize = 6;

/// Bitmask of the edges of a graph with at most 11 vertices, pairs in
/// graph6 column order.
pub fn edge_mask(g: &Graph) -> u64 {
    let mut mask = 0u64;
    let mut bit = 0;
    for j in 1..g.n() {
        for i in 0..j {
            if g.has_edge(i, j) {
                mask |= 1 << bit;
            }
            bit += 1;
        }
    }
    mask
}

pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            if (mask >> bit) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    g
}

/// Number of central sets `C` (including `∅`) making `(g, C)` a unipolar arrangement.
pub fn unipolar_central_count(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20, "central-set enumeration is exponential");
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |m, u| m | 1 << u))
        .collect();
    let full = (1u32 << n) - 1;
    (0..=full)
        .filter(|&c| {
            let clique = (0..n)
                .filter(|&v| c >> v & 1 == 1)
                .all(|v| adj[v] & c == c & !(1 << v));
            let rest = full & !c;
            clique
                && (0..n).filter(|&v| rest >> v & 1 == 1).all(|v| {
                    let closed = (adj[v] | 1 << v) & rest;
                    let mut nb = adj[v] & rest;
                    while nb != 0 {
                        let u = nb.trailing_zeros() as usize;
                        nb &= nb - 1;
                        if (adj[u] | 1 << u) & rest != closed {
                            return false;
                        }
                    }
                    true
                })
        })
        .count()
}

/// Exact law of `ρ(Gen(n))` over all labelled graphs on `n <= 6` vertices,
/// keyed by [`edge_mask`].
pub fn exact_gen_law(n: usize) -> Result<BTreeMap<u64, BigRational>> {
    if n > EXACT_LAW_MAX_N {
        return Err(Error::scale("exact_gen_law order", n, EXACT_LAW_MAX_N));
    }
    if n == 0 {
        return Err(Error::invalid("exact_gen_law needs n >= 1"));
    }
    let total: BigUint = exact_ell(n).into_iter().sum();
    let denom = BigInt::from(total) * BigInt::from(2u8);
    let pairs = n * (n - 1) / 2;
    let full = (1u64 << pairs) - 1;
    let r_plus: Vec<usize> = (0..=full)
        .map(|m| unipolar_central_count(&graph_from_mask(n, m)))
        .collect();
    let mut law = BTreeMap::new();
    for m in 0..=full {
        let num = r_plus[m as usize] + r_plus[(full & !m) as usize];
        if num > 0 {
            law.insert(m, BigRational::new(BigInt::from(num), denom.clone()));
        }
    }
    debug_assert!({
        let s: BigRational = law.values().cloned().fold(BigRational::zero(), |a, b| a + b);
        s == BigRational::from_integer(1.into())
    });
    Ok(law)
}
