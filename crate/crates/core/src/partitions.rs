//! Uniform random set partitions via the Dobinski urn construction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{big_ratio, bell_table, solve_r, BellTable, LogFactorials, LogWeight};

/// A partition of `0..m`. Block ids are dense and ordered by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetPartition {
    pub m: usize,
    pub block_of: Vec<usize>,
}

impl SetPartition {
    /// Builds a partition from arbitrary block labels, canonicalizing them.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap: Vec<usize> = Vec::new();
        let mut next = 0;
        let mut block_of = Vec::with_capacity(labels.len());
        for &l in labels {
            if l >= remap.len() {
                remap.resize(l + 1, usize::MAX);
            }
            if remap[l] == usize::MAX {
                remap[l] = next;
                next += 1;
            }
            block_of.push(remap[l]);
        }
        SetPartition {
            m: labels.len(),
            block_of,
        }
    }

    pub fn from_blocks(m: usize, blocks: &[Vec<usize>]) -> Self {
        let mut labels = vec![usize::MAX; m];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                labels[e] = b;
            }
        }
        assert!(labels.iter().all(|&l| l != usize::MAX), "blocks must cover 0..m");
        Self::from_labels(&labels)
    }

    pub fn singletons(m: usize) -> Self {
        SetPartition {
            m,
            block_of: (0..m).collect(),
        }
    }

    pub fn one_block(m: usize) -> Self {
        SetPartition {
            m,
            block_of: vec![0; m],
        }
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |&b| b + 1)
    }

    /// Blocks as sorted element lists, in block-id order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (e, &b) in self.block_of.iter().enumerate() {
            out[b].push(e);
        }
        out
    }

    pub fn is_canonical(&self) -> bool {
        let mut next = 0;
        for &b in &self.block_of {
            if b > next {
                return false;
            }
            if b == next {
                next += 1;
            }
        }
        true
    }

    pub fn stats(&self) -> PartitionStats {
        stats(self)
    }
}

/// Block count, size spectrum (`size_spectrum[t]` = number of blocks of size `t`) and largest block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub block_count: usize,
    pub size_spectrum: Vec<usize>,
    pub max_block: usize,
}

pub fn stats(p: &SetPartition) -> PartitionStats {
    let k = p.block_count();
    let mut sizes = vec![0usize; k];
    for &b in &p.block_of {
        sizes[b] += 1;
    }
    let max_block = sizes.iter().copied().max().unwrap_or(0);
    let mut size_spectrum = vec![0usize; max_block + 1];
    for s in sizes {
        size_spectrum[s] += 1;
    }
    PartitionStats {
        block_count: k,
        size_spectrum,
        max_block,
    }
}

/// Number of urns beyond which the Dobinski series is dropped.
///
/// The terms `K^m/K!` decay faster than geometrically with ratio below
/// `e^{-10}` once `K > m + 40√m`, so the discarded mass is far below
/// `2^-60 · e · B_m`.
pub fn urn_cutoff(m: usize) -> usize {
    m + (40.0 * (m as f64).sqrt()).ceil() as usize + 30
}

/// Precomputed urn-count law for one ground-set size.
#[derive(Clone, Debug)]
pub struct UrnSampler {
    m: usize,
    cdf: Vec<f64>,
}

impl UrnSampler {
    pub fn new(m: usize) -> Self {
        if m == 0 {
            return UrnSampler { m, cdf: Vec::new() };
        }
        let kmax = urn_cutoff(m);
        let lf = LogFactorials::new(kmax);
        let lw = urn_log_weights(m, &lf, kmax);
        let total = LogWeight::sum(lw.iter().copied());
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(kmax);
        for w in &lw {
            acc += w.div(total).to_f64();
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        *cdf.last_mut().expect("m >= 1") = 1.0;
        UrnSampler { m, cdf }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Draws a uniform partition of `0..m`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SetPartition {
        if self.m == 0 {
            return SetPartition {
                m: 0,
                block_of: Vec::new(),
            };
        }
        let u: f64 = rng.random();
        let urns = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1;
        let mut remap = vec![usize::MAX; urns];
        let mut next = 0;
        let block_of = (0..self.m)
            .map(|_| {
                let u = rng.random_range(0..urns);
                if remap[u] == usize::MAX {
                    remap[u] = next;
                    next += 1;
                }
                remap[u]
            })
            .collect();
        SetPartition { m: self.m, block_of }
    }
}

/// `log2(K^m / K!)` for `K = 1..=kmax`.
fn urn_log_weights(m: usize, lf: &LogFactorials, kmax: usize) -> Vec<LogWeight> {
    (1..=kmax)
        .map(|k| LogWeight::from_lg(m as f64 * (k as f64).log2() - lf.lg_factorial(k)))
        .collect()
}

/// Uniform partition of `0..m`.
pub fn sample_uniform<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SetPartition {
    UrnSampler::new(m).sample(rng)
}

/// Exact `E|σ|` and `Var|σ|` for `σ` uniform on partitions of `0..m`.
pub fn harper_moments(m: usize) -> (f64, f64) {
    harper_moments_with(&bell_table(m + 2, m + 2), m)
}

pub fn harper_moments_with(bell: &BellTable, m: usize) -> (f64, f64) {
    assert!(m + 2 <= bell.n_max(), "Bell table too short");
    let (r1, r2) = match (bell.exact(m), bell.exact(m + 1), bell.exact(m + 2)) {
        (Some(b0), Some(b1), Some(b2)) => (big_ratio(b1, b0), big_ratio(b2, b0)),
        _ => (
            bell.log(m + 1).div(bell.log(m)).to_f64(),
            bell.log(m + 2).div(bell.log(m)).to_f64(),
        ),
    };
    (r1 - 1.0, r2 - r1 * r1 - 1.0)
}

/// Caller-chosen thresholds for [`tail_reports`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailParams {
    pub eps: f64,
    pub x: usize,
    pub interval: (usize, usize),
    pub xi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailLine {
    pub empirical: f64,
    pub bound: f64,
    /// Empirical frequency exceeds the bound by more than 3 standard errors.
    pub flagged: bool,
}

impl TailLine {
    fn new(hits: usize, samples: usize, bound: f64) -> Self {
        let p = hits as f64 / samples as f64;
        let se = (bound.clamp(0.0, 1.0) * (1.0 - bound.clamp(0.0, 1.0)) / samples as f64).sqrt();
        TailLine {
            empirical: p,
            bound,
            flagged: p > bound + 3.0 * se.max(1.0 / samples as f64),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub m: usize,
    pub samples: usize,
    pub r: f64,
    pub lambda: f64,
    pub lambda_interval: f64,
    pub block_count: TailLine,
    pub max_block: TailLine,
    pub interval_count: TailLine,
}

/// Empirical block-count, largest-block and interval-count tails next to
/// their reference bounds (constants and `1 + o(1)` factors taken as 1).
pub fn tail_reports<R: Rng + ?Sized>(
    m: usize,
    samples: usize,
    params: &TailParams,
    rng: &mut R,
) -> TailReport {
    assert!(m >= 8, "tail reports need m >= 8");
    let r = solve_r(m as u64).r;
    let mf = m as f64;
    let lambda = mf / r;
    let (a, b) = params.interval;
    let lf = LogFactorials::new(m);
    let lambda_interval: f64 = (a.max(1)..=b.min(m))
        .map(|j| (j as f64 * r.log2() - lf.lg_factorial(j)).exp2())
        .sum();
    let sampler = UrnSampler::new(m);
    let (mut hit_count, mut hit_max, mut hit_int) = (0, 0, 0);
    for _ in 0..samples {
        let s = sampler.sample(rng).stats();
        if (s.block_count as f64 - lambda).abs() >= params.eps * lambda {
            hit_count += 1;
        }
        if s.max_block >= params.x {
            hit_max += 1;
        }
        let y: usize = (a..=b.min(s.max_block))
            .map(|t| s.size_spectrum.get(t).copied().unwrap_or(0))
            .sum();
        if (y as f64 - lambda_interval).abs() >= params.xi {
            hit_int += 1;
        }
    }
    let eps = params.eps;
    let count_bound = mf * (-mf * (eps - (eps + 1.0).ln())).exp();
    let x = params.x as f64;
    let max_bound = (-x * (x.ln() - r.ln() - 2.0) + mf.ln()).exp();
    let xi = params.xi;
    let int_bound = (-(xi * xi / (4.0 * lambda_interval)).min(xi / 2.0)).exp();
    TailReport {
        m,
        samples,
        r,
        lambda,
        lambda_interval,
        block_count: TailLine::new(hit_count, samples, count_bound),
        max_block: TailLine::new(hit_max, samples, max_bound),
        interval_count: TailLine::new(hit_int, samples, int_bound),
    }
}
