//! The central-clique size law `L(n)`.
//!
//! `ℓ_{n,k} = C(n,k) 2^{k(n-k)} B_{n-k}` is kept as base-2 logs. Tails far from
//! the mode fall below the f64 range, so tail queries have log-domain forms.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::numerics::{bell_exact, bell_table, binomial_big, LogFactorials, LogWeight};

/// Exact log-space law of `L(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct LDistribution {
    pub n: usize,
    pub log_ell: Vec<LogWeight>,
    #[serde(rename = "log_L")]
    pub log_total: LogWeight,
    /// `μ(n) = (n − log n + log ln n)/2`, present for `n >= 3`.
    pub mu: Option<f64>,
    #[serde(skip)]
    pub cdf: Vec<f64>,
}

/// `μ(n)`, undefined below 3.
pub fn mu(n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    Some((nf - nf.log2() + nf.ln().log2()) / 2.0)
}

impl LDistribution {
    pub fn build(n: usize) -> Self {
        assert!(n >= 1, "L(n) needs n >= 1");
        let bell = bell_table(n, 0);
        let lf = LogFactorials::new(n);
        let log_ell: Vec<LogWeight> = (0..=n)
            .map(|k| {
                let cross = (k * (n - k)) as f64;
                LogWeight::from_lg(lf.log_binomial(n, k).lg + cross + bell.log(n - k).lg)
            })
            .collect();
        let log_total = LogWeight::sum(log_ell.iter().copied());
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for w in &log_ell {
            acc += w.div(log_total).to_f64();
            cdf.push(acc);
        }
        let last = *cdf.last().expect("n >= 1");
        for c in cdf.iter_mut() {
            *c = (*c / last).min(1.0);
        }
        *cdf.last_mut().expect("n >= 1") = 1.0;
        LDistribution {
            n,
            log_ell,
            log_total,
            mu: mu(n),
            cdf,
        }
    }

    pub fn log_pmf(&self, k: usize) -> LogWeight {
        self.log_ell[k].div(self.log_total)
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.log_pmf(k).to_f64()
    }

    /// Draws `k` by binary search on the cdf.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.n)
    }

    pub fn mean(&self) -> f64 {
        (0..=self.n).map(|k| k as f64 * self.pmf(k)).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        (0..=self.n)
            .map(|k| (k as f64 - m).powi(2) * self.pmf(k))
            .sum()
    }

    /// `log2 P(|X − μ| >= x)`. Requires `n >= 3`.
    pub fn log_tail_ge(&self, x: f64) -> LogWeight {
        let mu = self.mu.expect("μ(n) needs n >= 3");
        LogWeight::sum(
            (0..=self.n)
                .filter(|&k| (k as f64 - mu).abs() >= x)
                .map(|k| self.log_ell[k]),
        )
        .div(self.log_total)
    }

    /// `P(|X − μ| >= x)`.
    pub fn tail_ge(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        self.log_tail_ge(x).to_f64()
    }

    /// `log2 P(X > t)`.
    pub fn log_upper_tail(&self, t: usize) -> LogWeight {
        LogWeight::sum(self.log_ell.iter().skip(t + 1).copied()).div(self.log_total)
    }

    pub fn argmax(&self) -> usize {
        (0..=self.n)
            .max_by(|&a, &b| self.log_ell[a].lg.total_cmp(&self.log_ell[b].lg))
            .expect("n >= 1")
    }
}

/// Exact `ℓ_{n,0..=n}` as big integers.
pub fn exact_ell(n: usize) -> Vec<BigUint> {
    let bell = bell_exact(n);
    (0..=n)
        .map(|k| binomial_big(n, k) * (BigUint::one() << (k * (n - k))) * &bell[n - k])
        .collect()
}

/// One row of a concentration check.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationRow {
    pub x: f64,
    /// `log2` of the exact two-sided tail.
    pub tail_lg: f64,
    /// `log2 (2^{-(x+1)^2-1})`, checked for `x > 1`.
    pub lower_lg: Option<f64>,
    /// `log2 (2^{-(x-2)^2+2} + n^{-n})`, checked for `x > 2`.
    pub upper_lg: Option<f64>,
    pub lower_ok: Option<bool>,
    pub upper_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub mu: f64,
    pub mean: f64,
    pub mean_within_one: bool,
    /// `n < n0`: failures are informational only.
    pub informational: bool,
    pub rows: Vec<ConcentrationRow>,
}

impl ConcentrationReport {
    /// All applicable bounds hold (and the mean is within 1 of μ).
    pub fn passed(&self) -> bool {
        self.mean_within_one
            && self
                .rows
                .iter()
                .all(|r| r.lower_ok != Some(false) && r.upper_ok != Some(false))
    }
}

pub const DEFAULT_CONCENTRATION_N0: usize = 64;
pub const DEFAULT_RATIO_N0: usize = 512;

/// Checks the two-sided tail bounds at each `x` using exact tail sums.
pub fn verify_concentration(n: usize, xs: &[f64], n0: usize) -> ConcentrationReport {
    let d = LDistribution::build(n);
    verify_concentration_with(&d, xs, n0)
}

pub fn verify_concentration_with(d: &LDistribution, xs: &[f64], n0: usize) -> ConcentrationReport {
    let n = d.n;
    let mu = d.mu.expect("concentration needs n >= 3");
    let mean = d.mean();
    let tiny = -(n as f64) * (n as f64).log2();
    let rows = xs
        .iter()
        .map(|&x| {
            let tail_lg = d.log_tail_ge(x).lg;
            let lower_lg = (x > 1.0).then(|| -(x + 1.0).powi(2) - 1.0);
            let upper_lg = (x > 2.0).then(|| {
                (LogWeight::from_lg(-(x - 2.0).powi(2) + 2.0) + LogWeight::from_lg(tiny)).lg
            });
            ConcentrationRow {
                x,
                tail_lg,
                lower_lg,
                upper_lg,
                lower_ok: lower_lg.map(|b| tail_lg >= b),
                upper_ok: upper_lg.map(|b| tail_lg <= b),
            }
        })
        .collect();
    ConcentrationReport {
        n,
        mu,
        mean,
        mean_within_one: (mean - mu).abs() < 1.0,
        informational: n < n0,
        rows,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub x: usize,
    /// `log2 (ℓ_{μ̂+x} / ℓ_{μ̂})`.
    pub up_lg: f64,
    /// `log2 (ℓ_{μ̌−x} / ℓ_{μ̌})`.
    pub down_lg: f64,
    pub lo_lg: f64,
    pub hi_lg: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub n: usize,
    pub mu_hat: usize,
    pub x_max: usize,
    pub informational: bool,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Largest integer `x` with `x^3 <= n^2`.
pub fn two_thirds_floor(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut x = (n as f64).powf(2.0 / 3.0) as u128;
    while (x + 1).pow(3) <= n2 {
        x += 1;
    }
    while x.pow(3) > n2 {
        x -= 1;
    }
    x as usize
}

/// Checks the ratio envelope around `μ̂ = ⌈μ⌉` and `μ̌ = μ̂ − 1`.
pub fn verify_ratio_bounds(n: usize, n0: usize) -> RatioReport {
    let d = LDistribution::build(n);
    let mu_hat = d.mu.expect("ratio bounds need n >= 3").ceil() as usize;
    let mu_check = mu_hat - 1;
    let x_max = two_thirds_floor(n);
    let mut rows = Vec::new();
    for x in 0..=x_max {
        if mu_hat + x > n || x > mu_check {
            break;
        }
        let up_lg = d.log_ell[mu_hat + x].lg - d.log_ell[mu_hat].lg;
        let down_lg = d.log_ell[mu_check - x].lg - d.log_ell[mu_check].lg;
        let xf = x as f64;
        let lo_lg = -xf * xf - 2.0 * xf;
        let hi_lg = -xf * xf + 2.0 * xf;
        let inside = |v: f64| v >= lo_lg && v <= hi_lg;
        rows.push(RatioRow {
            x,
            up_lg,
            down_lg,
            lo_lg,
            hi_lg,
            ok: inside(up_lg) && inside(down_lg),
        });
    }
    RatioReport {
        n,
        mu_hat,
        x_max,
        informational: n < n0,
        rows,
    }
}
