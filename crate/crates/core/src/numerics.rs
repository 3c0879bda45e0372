//! Exact and log-domain combinatorial numerics.
//!
//! Logs are base 2 throughout. Bell logs go through an extended-range float
//! so the result stays within about 1e-13 relative of the exact value for
//! several hundred terms; a plain f64 log-sum-exp drifts by one ulp per level.

use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Default index up to which Bell numbers are also kept as big integers.
pub const DEFAULT_EXACT_CUTOFF: usize = 400;

/// Nonnegative real stored as its base-2 logarithm. Zero is `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogWeight {
    pub lg: f64,
}

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight {
        lg: f64::NEG_INFINITY,
    };
    pub const ONE: LogWeight = LogWeight { lg: 0.0 };

    pub fn from_lg(lg: f64) -> Self {
        LogWeight { lg }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogWeight of negative value {x}");
        LogWeight { lg: x.log2() }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        if x.is_zero() {
            return Self::ZERO;
        }
        let bits = x.bits();
        if bits <= 1000 {
            return LogWeight {
                lg: x.to_f64().expect("fits").log2(),
            };
        }
        let shift = bits - 64;
        let top = (x >> shift).to_f64().expect("64 bits");
        LogWeight {
            lg: top.log2() + shift as f64,
        }
    }

    pub fn is_zero(self) -> bool {
        self.lg == f64::NEG_INFINITY
    }

    pub fn to_f64(self) -> f64 {
        self.lg.exp2()
    }

    /// `self / other`; `other` must be nonzero.
    pub fn div(self, other: LogWeight) -> LogWeight {
        LogWeight {
            lg: self.lg - other.lg,
        }
    }

    pub fn pow(self, e: f64) -> LogWeight {
        if self.is_zero() {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogWeight { lg: self.lg * e }
    }

    /// Stable sum of many weights, pivoting on the largest.
    pub fn sum<I: IntoIterator<Item = LogWeight>>(it: I) -> LogWeight {
        let v: Vec<f64> = it.into_iter().map(|w| w.lg).collect();
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: f64 = v.iter().map(|&x| (x - m).exp2()).sum();
        LogWeight { lg: m + s.log2() }
    }
}

impl Add for LogWeight {
    type Output = LogWeight;

    fn add(self, o: LogWeight) -> LogWeight {
        let (hi, lo) = if self.lg >= o.lg { (self, o) } else { (o, self) };
        if lo.is_zero() {
            return hi;
        }
        LogWeight {
            lg: hi.lg + (lo.lg - hi.lg).exp2().ln_1p() / std::f64::consts::LN_2,
        }
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, o: LogWeight) -> LogWeight {
        if self.is_zero() || o.is_zero() {
            return Self::ZERO;
        }
        LogWeight { lg: self.lg + o.lg }
    }
}

/// Positive real `m * 2^e` with `m` in `[1, 2)`, or zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ExtFloat {
    m: f64,
    e: i64,
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { m: 0.0, e: 0 };

    pub fn from_f64(x: f64) -> Self {
        Self::norm(x, 0)
    }

    fn norm(m: f64, e: i64) -> Self {
        if m == 0.0 {
            return Self::ZERO;
        }
        debug_assert!(m.is_finite() && m > 0.0);
        let bits = m.to_bits();
        let be = ((bits >> 52) & 0x7ff) as i64;
        if be == 0 {
            return Self::norm(m * 2f64.powi(64), e - 64);
        }
        let mant = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        ExtFloat {
            m: mant,
            e: e + be - 1023,
        }
    }

    pub fn mul(self, o: ExtFloat) -> ExtFloat {
        if self.m == 0.0 || o.m == 0.0 {
            return Self::ZERO;
        }
        Self::norm(self.m * o.m, self.e + o.e)
    }

    pub fn mul_f64(self, x: f64) -> ExtFloat {
        self.mul(Self::from_f64(x))
    }

    pub fn add(self, o: ExtFloat) -> ExtFloat {
        if o.m == 0.0 {
            return self;
        }
        if self.m == 0.0 {
            return o;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = hi.e - lo.e;
        if d > 60 {
            return hi;
        }
        Self::norm(hi.m + lo.m * 2f64.powi(-(d as i32)), hi.e)
    }

    pub fn log2(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m.log2() + self.e as f64
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add_f64(self, x: f64) -> Self {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        let lo = self.lo + err;
        let hi = s + lo;
        DoubleDouble {
            hi,
            lo: lo - (hi - s),
        }
    }

    fn sub(self, o: DoubleDouble) -> f64 {
        (self.hi - o.hi) + (self.lo - o.lo)
    }
}

/// Cumulative base-2 log-factorials with compensated summation.
#[derive(Clone, Debug)]
pub struct LogFactorials {
    table: Vec<DoubleDouble>,
}

impl LogFactorials {
    pub fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut acc = DoubleDouble::default();
        table.push(acc);
        for i in 1..=n_max {
            acc = acc.add_f64((i as f64).log2());
            table.push(acc);
        }
        LogFactorials { table }
    }

    pub fn n_max(&self) -> usize {
        self.table.len() - 1
    }

    /// `log2 n!`.
    pub fn lg_factorial(&self, n: usize) -> f64 {
        let d = self.table[n];
        d.hi + d.lo
    }

    /// `log2 (a! / b!)` for `a >= b`, exact up to final rounding.
    pub fn lg_factorial_ratio(&self, a: usize, b: usize) -> f64 {
        self.table[a].sub(self.table[b])
    }

    pub fn log_binomial(&self, n: usize, k: usize) -> LogWeight {
        if k > n {
            return LogWeight::ZERO;
        }
        if n <= 64 {
            return exact_log_binomial(n as u32, k as u32);
        }
        let top = self.table[n];
        let bottom = DoubleDouble::default()
            .add_f64(self.table[k].hi)
            .add_f64(self.table[k].lo)
            .add_f64(self.table[n - k].hi)
            .add_f64(self.table[n - k].lo);
        LogWeight::from_lg(top.sub(bottom))
    }
}

/// `C(n, k)` for `n <= 64` in `u128`.
pub fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

fn exact_log_binomial(n: u32, k: u32) -> LogWeight {
    let c = binomial_u128(n, k);
    LogWeight::from_lg((c as f64).log2())
}

/// `log2 C(n, k)`; out-of-range arguments give the zero weight.
pub fn log_binomial(n: i64, k: i64) -> LogWeight {
    if n < 0 || k < 0 || k > n {
        return LogWeight::ZERO;
    }
    let (n, k) = (n as u64, k as u64);
    if n <= 64 {
        return exact_log_binomial(n as u32, k as u32);
    }
    let k = k.min(n - k);
    let mut acc = DoubleDouble::default();
    for i in 1..=k {
        acc = acc.add_f64(((n - k + i) as f64).log2());
        acc = acc.add_f64(-(i as f64).log2());
    }
    LogWeight::from_lg(acc.hi + acc.lo)
}

/// Exact `C(n, k)` as a big integer.
pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// Bell numbers, exact up to a cutoff and as logs up to `n_max`.
#[derive(Clone, Debug)]
pub struct BellTable {
    n_max: usize,
    exact: Vec<BigUint>,
    logs: Vec<LogWeight>,
}

impl BellTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest index with an exact value.
    pub fn exact_max(&self) -> Option<usize> {
        self.exact.len().checked_sub(1)
    }

    pub fn exact(&self, n: usize) -> Option<&BigUint> {
        self.exact.get(n)
    }

    pub fn log(&self, n: usize) -> LogWeight {
        self.logs[n]
    }

    pub fn logs(&self) -> &[LogWeight] {
        &self.logs
    }
}

/// Builds `B_0..=B_{n_max}`, exact for indices up to `exact_cutoff`.
pub fn bell_table(n_max: usize, exact_cutoff: usize) -> BellTable {
    BellTable {
        n_max,
        exact: bell_exact(n_max.min(exact_cutoff)),
        logs: bell_logs(n_max),
    }
}

/// Exact Bell numbers `B_0..=B_n` via the Bell triangle.
pub fn bell_exact(n: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty").clone());
        for x in &row {
            let v = next.last().expect("nonempty") + x;
            next.push(v);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

fn bell_logs(n_max: usize) -> Vec<LogWeight> {
    let mut b: Vec<ExtFloat> = Vec::with_capacity(n_max + 1);
    b.push(ExtFloat::from_f64(1.0));
    for n in 0..n_max {
        // B_{n+1} = sum_k C(n,k) B_k
        let mut c = ExtFloat::from_f64(1.0);
        let mut acc = ExtFloat::ZERO;
        for (k, bk) in b.iter().enumerate() {
            acc = acc.add(c.mul(*bk));
            c = c.mul_f64((n - k) as f64 / (k + 1) as f64);
        }
        b.push(acc);
    }
    b.into_iter().map(|x| LogWeight::from_lg(x.log2())).collect()
}

/// Root of `r e^r = n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RParam {
    pub n: u64,
    pub r: f64,
}

/// Solves `r e^r = n` by bisection followed by Newton polishing.
pub fn solve_r(n: u64) -> RParam {
    assert!(n >= 1, "solve_r needs n >= 1");
    let target = n as f64;
    let f = |r: f64| r * r.exp() - target;
    let (mut lo, mut hi) = (0.0f64, target.ln().max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..3 {
        let step = f(r) / ((1.0 + r) * r.exp());
        let next = r - step;
        if !(next > 0.0) || f(next).abs() > f(r).abs() {
            break;
        }
        r = next;
    }
    RParam { n, r }
}

/// Value of `2^-40`, the relative tolerance used across this module.
pub const REL_TOL: f64 = 1.0 / (1u64 << 40) as f64;

/// Ratio `a / b` of big integers as f64.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.bits() < 1000 && b.bits() < 1000 {
        return a.to_f64().expect("fits") / b.to_f64().expect("fits");
    }
    // Rescale both to 128 significant bits of the larger before dividing.
    let shift = a.bits().max(b.bits()).saturating_sub(128);
    let (sa, sb) = (a >> shift, b >> shift);
    if sb.is_zero() {
        return LogWeight::from_biguint(a).div(LogWeight::from_biguint(b)).to_f64();
    }
    sa.to_f64().expect("fits") / sb.to_f64().expect("fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn bell_small() {
        let t = bell_table(10, 400);
        let want = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(t.exact(i).unwrap(), &BigUint::from(w));
            assert!(rel(t.log(i).to_f64(), w as f64) < 1e-15);
        }
    }

    #[test]
    fn bell_logs_match_exact_to_2_pow_minus_40() {
        let t = bell_table(200, 400);
        for n in 0..=200 {
            let e = LogWeight::from_biguint(t.exact(n).unwrap());
            let diff = (t.log(n).lg - e.lg) * std::f64::consts::LN_2;
            assert!(diff.abs() <= REL_TOL, "n={n} rel err {diff:e}");
        }
    }

    #[test]
    fn bell_respects_cutoff() {
        let t = bell_table(30, 10);
        assert_eq!(t.exact_max(), Some(10));
        assert!(t.exact(11).is_none());
        assert_eq!(t.logs().len(), 31);
    }

    #[test]
    fn bell_asymptotic_ratio_at_1000() {
        let t = bell_table(1000, 0);
        let r = solve_r(1000).r;
        let n = 1000.0;
        let approx_ln = n * (r - 1.0 + 1.0 / r) - 1.0 - 0.5 * r.ln();
        let ln_b = t.log(1000).lg * std::f64::consts::LN_2;
        assert!((ln_b / approx_ln - 1.0).abs() < 0.05);
    }

    #[test]
    fn solve_r_examples() {
        let r1 = solve_r(1);
        assert!((r1.r - 0.567_143_290_409_783_8).abs() < 1e-12);
        let r3 = solve_r(3);
        assert!((r3.r - 1.0499).abs() < 1e-4);
        assert!((r3.r * r3.r.exp() - 3.0).abs() <= 3.0 * REL_TOL);
        let mut prev = 0.0;
        for n in 1..=10_000u64 {
            let p = solve_r(n);
            assert!(p.r > prev, "not increasing at {n}");
            assert!((p.r * p.r.exp() - n as f64).abs() <= n as f64 * REL_TOL);
            prev = p.r;
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(log_binomial(4, 2).to_f64().round(), 6.0);
        assert_eq!(log_binomial(17, 0), LogWeight::ONE);
        assert!(log_binomial(3, 4).is_zero());
        assert!(log_binomial(3, -1).is_zero());
        let exact = binomial_big(50, 25);
        let want = LogWeight::from_biguint(&exact);
        assert!((log_binomial(50, 25).lg - want.lg).abs() * std::f64::consts::LN_2 <= REL_TOL);
        for (n, k) in [(100usize, 37usize), (500, 250), (3000, 1)] {
            let want = LogWeight::from_biguint(&binomial_big(n, k));
            let got = log_binomial(n as i64, k as i64);
            assert!((got.lg - want.lg).abs() < 1e-10 * want.lg.max(1.0), "C({n},{k})");
            let lf = LogFactorials::new(n);
            assert!((lf.log_binomial(n, k).lg - want.lg).abs() < 1e-10 * want.lg.max(1.0));
        }
    }

    #[test]
    fn log_weight_arithmetic() {
        let a = LogWeight::from_f64(3.0);
        let b = LogWeight::from_f64(5.0);
        assert!(rel((a + b).to_f64(), 8.0) < 1e-15);
        assert!(rel((a * b).to_f64(), 15.0) < 1e-15);
        assert_eq!(a + LogWeight::ZERO, a);
        assert!((a * LogWeight::ZERO).is_zero());
        let s = LogWeight::sum([a, b, LogWeight::ZERO]);
        assert!(rel(s.to_f64(), 8.0) < 1e-15);
        assert!(LogWeight::sum([]).is_zero());
    }

    #[test]
    fn ext_float_basics() {
        let a = ExtFloat::from_f64(3.0);
        assert_eq!(a.add(ExtFloat::from_f64(5.0)).log2(), 3.0);
        let big = (0..2000).fold(ExtFloat::from_f64(1.0), |x, _| x.mul_f64(2.0));
        assert_eq!(big.log2(), 2000.0);
        assert_eq!(ExtFloat::ZERO.log2(), f64::NEG_INFINITY);
    }

    #[test]
    fn big_ratio_large() {
        let b = bell_exact(300);
        let r = big_ratio(&b[300], &b[299]);
        let want = (LogWeight::from_biguint(&b[300]).lg - LogWeight::from_biguint(&b[299]).lg).exp2();
        assert!(rel(r, want) < 1e-12);
    }
}
