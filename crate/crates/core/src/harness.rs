//! Seeded Monte Carlo experiments over generated graphs, with JSON and CSV reports.
//!
//! Trial `t` always uses `trial_rng(seed, t)`, and results are collected in
//! trial order, so a report does not depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exactalgs::{
    alpha_exact, chromatic_index, classify_gs, connectivity, contains_induced, omega_exact, unique_max_degree_vertex,
    GSTag, IndexMethod, ALPHA_EXACT_MAX_N,
};
use crate::generator::{trial_rng, Arrangement, Generator, Sign, SignMode};
use crate::graph::{graph6_decode, Graph};
use crate::graphon::{t_counts, t_graphon, wp};
use crate::lndist::LDistribution;
use crate::numerics::bell_table;
use crate::structure::{
    alpha_omega_fast, clique_colour_2, hamilton, verify_clique_colouring, verify_clique_colouring_structured,
    ColourCheck, HamiltonOutcome,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PERFGEN_THREADS";
/// Largest order at which clique colourings are also checked by full enumeration.
pub const BK_VERIFY_MAX_N: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    Invariants,
    Hamilton,
    CliqueColour,
    Trichotomy,
    Connectivity,
    ClassOne,
    Densities,
    HNormality,
    BigHVsLn,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 9] = [
        ExperimentName::Invariants,
        ExperimentName::Hamilton,
        ExperimentName::CliqueColour,
        ExperimentName::Trichotomy,
        ExperimentName::Connectivity,
        ExperimentName::ClassOne,
        ExperimentName::Densities,
        ExperimentName::HNormality,
        ExperimentName::BigHVsLn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Invariants => "invariants",
            ExperimentName::Hamilton => "hamilton",
            ExperimentName::CliqueColour => "clique_colour",
            ExperimentName::Trichotomy => "trichotomy",
            ExperimentName::Connectivity => "connectivity",
            ExperimentName::ClassOne => "class_one",
            ExperimentName::Densities => "densities",
            ExperimentName::HNormality => "h_normality",
            ExperimentName::BigHVsLn => "big_h_vs_ln",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub sign: SignMode,
    /// graph6 pattern; required for `trichotomy`, optional for `densities`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, n: usize, trials: usize, seed: u64) -> Self {
        ExperimentSpec {
            name,
            n,
            trials,
            seed,
            sign: SignMode::Mixed,
            pattern: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let min_n = match self.name {
            ExperimentName::HNormality | ExperimentName::BigHVsLn => 50,
            ExperimentName::Hamilton => 3,
            _ => 1,
        };
        if self.n < min_n {
            return Err(Error::invalid(format!("{} needs n >= {min_n}", self.name)));
        }
        match (self.name, &self.pattern) {
            (ExperimentName::Trichotomy, None) => Err(Error::invalid("trichotomy needs a pattern")),
            (ExperimentName::Trichotomy | ExperimentName::Densities, Some(_)) => Ok(()),
            (_, Some(_)) => Err(Error::invalid(format!("{} takes no pattern", self.name))),
            _ => Ok(()),
        }
    }

    fn pattern_graph(&self) -> Result<Option<Graph>> {
        self.pattern
            .as_deref()
            .map(|p| graph6_decode(p.as_bytes()))
            .transpose()
    }
}

/// One trial: the sampled sign and `k`, the measured fields, or an error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub sign: Sign,
    pub k: usize,
    pub fields: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn get_f64(&self, key: &str) -> Option<f64> {
        self.fields.get(key).and_then(|v| match v {
            Value::Bool(b) => Some(*b as u8 as f64),
            other => other.as_f64(),
        })
    }
}

/// A summary statistic with its reference value and 3σ band where one is computable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub metric: String,
    /// `null` in JSON when undefined (e.g. a variance from one trial).
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SummaryRow {
    fn plain(metric: &str, value: f64) -> Self {
        SummaryRow {
            metric: metric.into(),
            value,
            reference: None,
            std_error: None,
            interval: None,
            within: None,
            note: None,
        }
    }

    fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }

    /// Attaches `reference ± 3·se` and whether `value` falls inside.
    fn banded(mut self, reference: f64, se: f64) -> Self {
        let iv = [reference - 3.0 * se, reference + 3.0 * se];
        self.reference = Some(reference);
        self.std_error = Some(se);
        self.interval = Some(iv);
        self.within = Some(self.value >= iv[0] && self.value <= iv[1]);
        self
    }

    fn noted(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub version: String,
    pub spec: ExperimentSpec,
    pub summary: Vec<SummaryRow>,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn summary_row(&self, metric: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.metric == metric)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat per-trial projection: fixed columns, then every field key in sorted order.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<&String> = self.records.iter().flat_map(|r| r.fields.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut out = String::from("trial,sign,k,error");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!("{},{},{},{}", r.trial, r.sign, r.k, csv_cell(r.error.as_deref().unwrap_or(""))));
            for k in &keys {
                out.push(',');
                match r.fields.get(*k) {
                    Some(Value::String(s)) => out.push_str(&csv_cell(s)),
                    Some(v) => out.push_str(&v.to_string()),
                    None => {}
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Thread count from [`THREADS_ENV`], or `None` for the rayon default.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse().ok()).filter(|&t| t > 0)
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_with_threads(spec, threads_from_env())
}

pub fn run_with_threads(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentReport> {
    spec.validate()?;
    let ctx = Context::new(spec)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| (0..spec.trials).into_par_iter().map(|t| ctx.trial(t)).collect());
    let summary = ctx.summarize(&records);
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        summary,
        records,
    })
}

struct Context<'a> {
    spec: &'a ExperimentSpec,
    gen: Generator,
    pattern: Option<Graph>,
}

impl<'a> Context<'a> {
    fn new(spec: &'a ExperimentSpec) -> Result<Self> {
        Ok(Context {
            spec,
            gen: Generator::new(spec.n),
            pattern: spec.pattern_graph()?,
        })
    }

    fn trial(&self, t: usize) -> TrialRecord {
        let mut rng = trial_rng(self.spec.seed, t as u64);
        let (g, arr) = self.gen.gen_with(&mut rng, self.spec.sign);
        let mut fields = BTreeMap::new();
        fields.insert("parts".to_string(), json!(arr.side_parts.len()));
        let error = self.measure(&g, &arr, &mut rng, &mut fields).err().map(|e| e.to_string());
        TrialRecord {
            trial: t,
            sign: arr.sign,
            k: arr.k(),
            fields,
            error,
        }
    }

    fn measure(
        &self,
        g: &Graph,
        arr: &Arrangement,
        rng: &mut crate::generator::TrialRng,
        f: &mut BTreeMap<String, Value>,
    ) -> Result<()> {
        let mut put = |k: &str, v: Value| {
            f.insert(k.to_string(), v);
        };
        let n = g.n();
        match self.spec.name {
            ExperimentName::Invariants => {
                let fast = alpha_omega_fast(g, arr)?;
                put("alpha", json!(fast.alpha));
                put("omega", json!(fast.omega));
                put("certain", json!(fast.certainty.is_certain()));
                // α − |σ| in the unipolar view: α for sign +, ω for sign −.
                let unipolar_alpha = if arr.sign == Sign::Plus { fast.alpha } else { fast.omega };
                let gap = unipolar_alpha as i64 - arr.side_parts.len() as i64;
                put("dichotomy_ok", json!(gap == 0 || gap == 1));
                if n <= ALPHA_EXACT_MAX_N {
                    let (a, w) = (alpha_exact(g)?, omega_exact(g)?);
                    put("alpha_exact", json!(a));
                    put("omega_exact", json!(w));
                    put("alpha_ok", json!(a == fast.alpha));
                    if fast.certainty.is_certain() {
                        put("omega_ok", json!(w == fast.omega));
                    }
                }
            }
            ExperimentName::Hamilton => {
                let out = hamilton(g, arr, rng)?;
                let (kind, reason) = match &out {
                    HamiltonOutcome::Cycle(_) => ("cycle", None),
                    HamiltonOutcome::Obstruction(_) => ("obstruction", None),
                    HamiltonOutcome::Failure(r) => ("failure", Some(*r)),
                };
                put("outcome", json!(kind));
                if let Some(r) = reason {
                    put("reason", serde_json::to_value(r).expect("reason serializes"));
                }
                put("verified", json!(out.verifies(g)));
            }
            ExperimentName::CliqueColour => {
                let col = clique_colour_2(g, arr)?;
                put("coloured", json!(col.is_some()));
                if let Some(c) = col {
                    let check = verify_clique_colouring_structured(g, arr, &c)?;
                    put("structured", json!(check_tag(&check)));
                    let mut ok = check.is_valid();
                    if n <= BK_VERIFY_MAX_N {
                        let full = verify_clique_colouring(g, &c)?;
                        put("enumerated", json!(check_tag(&full)));
                        ok &= full.is_valid();
                    }
                    put("verified", json!(ok));
                }
            }
            ExperimentName::Trichotomy => {
                let h = self.pattern.as_ref().expect("validated");
                put("contains", json!(contains_induced(g, h)?.is_some()));
            }
            ExperimentName::Connectivity => {
                let (kappa, delta) = (connectivity(g), g.min_degree());
                put("kappa", json!(kappa));
                put("delta", json!(delta));
                put("kappa_eq_delta", json!(kappa == delta));
            }
            ExperimentName::ClassOne => {
                let delta = g.max_degree();
                let unique = unique_max_degree_vertex(g).is_some();
                put("max_degree", json!(delta));
                put("unique_max", json!(unique));
                if unique {
                    let ci = chromatic_index(g);
                    let ok = ci.method == IndexMethod::UniqueMaxDegree
                        && ci.colouring.is_proper(g)
                        && ci.colouring.colours_used() == delta;
                    put("delta_colouring_ok", json!(ok));
                }
            }
            ExperimentName::Densities => {
                let edges = g.edge_count();
                let k2 = t_counts(&Graph::complete(2), g)?;
                let t_inj = ratio_f64(&k2.t_inj);
                let band = 2.0 * (1.0 / n as f64 + 1.0 / (n as f64).sqrt());
                put("edges", json!(edges));
                put("t_inj_k2", json!(t_inj));
                put("k2_within", json!((t_inj - 0.5).abs() <= band));
                if let Some(h) = &self.pattern {
                    let r = t_counts(h, g)?;
                    put("t_inj_pattern", json!(ratio_f64(&r.t_inj)));
                }
            }
            ExperimentName::HNormality | ExperimentName::BigHVsLn => {
                let fast = alpha_omega_fast(g, arr)?;
                put("alpha", json!(fast.alpha));
                put("omega", json!(fast.omega));
                put("h", json!(fast.alpha.min(fast.omega)));
                put("big_h", json!(fast.alpha.max(fast.omega)));
            }
        }
        Ok(())
    }

    fn summarize(&self, records: &[TrialRecord]) -> Vec<SummaryRow> {
        let spec = self.spec;
        let n = spec.n;
        let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.error.is_none()).collect();
        let mut rows = vec![SummaryRow::plain("trials", records.len() as f64), SummaryRow::plain(
            "trial_errors",
            (records.len() - ok.len()) as f64,
        )];
        let freq = |key: &str| frequency(ok.iter().filter_map(|r| r.get_f64(key)));
        let values = |key: &str| -> Vec<f64> { ok.iter().filter_map(|r| r.get_f64(key)).collect() };
        match spec.name {
            ExperimentName::Invariants => {
                rows.push(SummaryRow::plain("alpha_agreement", freq("alpha_ok")));
                rows.push(SummaryRow::plain("omega_agreement_when_certain", freq("omega_ok")));
                rows.push(SummaryRow::plain("certain_rate", freq("certain")));
                rows.push(SummaryRow::plain("dichotomy_rate", freq("dichotomy_ok")));
            }
            ExperimentName::Hamilton => {
                let kinds: Vec<&str> = ok
                    .iter()
                    .filter_map(|r| r.fields.get("outcome").and_then(Value::as_str))
                    .collect();
                let share = |k: &str| kinds.iter().filter(|&&x| x == k).count() as f64 / kinds.len().max(1) as f64;
                let tail = self.gen.ldist().log_upper_tail(n / 2).to_f64();
                let p_ref = match spec.sign {
                    SignMode::Mixed => 0.5 * tail,
                    SignMode::Minus => tail,
                    SignMode::Plus => 0.0,
                };
                let t = kinds.len().max(1) as f64;
                let se = (p_ref * (1.0 - p_ref) / t).sqrt();
                rows.push(
                    SummaryRow::plain("obstruction_rate", share("obstruction"))
                        .banded(p_ref, se)
                        .noted("reference: exact share of samples with a central stable set above n/2"),
                );
                rows.push(SummaryRow::plain("cycle_rate", share("cycle")));
                rows.push(SummaryRow::plain("failure_rate", share("failure")));
                let certified: Vec<f64> = ok
                    .iter()
                    .filter(|r| r.fields.get("outcome").and_then(Value::as_str) != Some("failure"))
                    .filter_map(|r| r.get_f64("verified"))
                    .collect();
                rows.push(SummaryRow::plain("certificates_verified", frequency(certified.into_iter())));
            }
            ExperimentName::CliqueColour => {
                rows.push(SummaryRow::plain("success_rate", freq("coloured")));
                rows.push(SummaryRow::plain("verified_rate", freq("verified")));
            }
            ExperimentName::Trichotomy => {
                let p = freq("contains");
                let h = self.pattern.as_ref().expect("validated");
                let mut row = SummaryRow::plain("containment_rate", p);
                if let Ok(class) = classify_gs(h) {
                    let reference = match class.tag {
                        GSTag::Both => 1.0,
                        GSTag::UnipolarOnly | GSTag::CoUnipolarOnly => 0.5,
                        GSTag::NotGS => 0.0,
                    };
                    let se = (reference * (1.0 - reference) / ok.len().max(1) as f64).sqrt();
                    row = row.banded(reference, se).noted(&format!("pattern class {:?}", class.tag));
                }
                rows.push(row);
            }
            ExperimentName::Connectivity => {
                rows.push(SummaryRow::plain("kappa_eq_delta_rate", freq("kappa_eq_delta")));
            }
            ExperimentName::ClassOne => {
                rows.push(SummaryRow::plain("unique_max_degree_rate", freq("unique_max")));
                rows.push(SummaryRow::plain("delta_colouring_ok_rate", freq("delta_colouring_ok")));
            }
            ExperimentName::Densities => {
                let e = values("edges");
                let m = Moments::of(&e);
                let half = 0.25 * n as f64 * (n as f64 - 1.0);
                rows.push(
                    SummaryRow::plain("mean_edges", m.mean)
                        .banded(half, (m.variance / e.len() as f64).sqrt())
                        .noted("reference: half of C(n,2), exact by sign symmetry"),
                );
                rows.push(SummaryRow::plain("k2_within_band_rate", freq("k2_within")));
                if let Some(h) = &self.pattern {
                    let m = Moments::of(&values("t_inj_pattern"));
                    let mut row = SummaryRow::plain("mean_t_inj_pattern", m.mean);
                    if let Ok(t) = t_graphon(h, &wp()) {
                        row = row.with_reference(ratio_f64(&t));
                    }
                    rows.push(row);
                }
            }
            ExperimentName::HNormality => {
                let s = HNormality::from_samples(n, &values("h"));
                rows.extend(s.rows());
            }
            ExperimentName::BigHVsLn => {
                let hs: Vec<usize> = values("big_h").into_iter().map(|x| x as usize).collect();
                let tv = TvEstimate::from_samples(self.gen.ldist(), &hs);
                rows.push(SummaryRow::plain("tv_plugin", tv.tv));
                rows.push(SummaryRow::plain("tv_noise_floor", tv.noise_floor));
                rows.push(SummaryRow::plain("tv_support", tv.support as f64));
            }
        }
        rows
    }
}

fn check_tag(c: &ColourCheck) -> &'static str {
    match c {
        ColourCheck::Valid => "valid",
        ColourCheck::Monochromatic(_) => "monochromatic",
        ColourCheck::Unverified => "unverified",
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Mean of 0/1 values; NaN when there are none.
fn frequency(it: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = it.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Sample moments; entries are NaN when undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Moments {
        let c = xs.len();
        if c == 0 {
            return Moments {
                count: 0,
                mean: f64::NAN,
                variance: f64::NAN,
                skewness: f64::NAN,
                excess_kurtosis: f64::NAN,
            };
        }
        let cf = c as f64;
        let mean = xs.iter().sum::<f64>() / cf;
        let central = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / cf;
        let (m2, m3, m4) = (central(2), central(3), central(4));
        let defined = c >= 2 && m2 > 0.0;
        Moments {
            count: c,
            mean,
            variance: if c >= 2 { m2 * cf / (cf - 1.0) } else { f64::NAN },
            skewness: if defined { m3 / m2.powf(1.5) } else { f64::NAN },
            excess_kurtosis: if defined { m4 / (m2 * m2) - 3.0 } else { f64::NAN },
        }
    }
}

/// Kolmogorov–Smirnov distance of the standardized sample to `N(0,1)`.
pub fn ks_to_normal(xs: &[f64]) -> f64 {
    let m = Moments::of(xs);
    if m.variance.is_nan() || m.variance <= 0.0 {
        return f64::NAN;
    }
    let sd = m.variance.sqrt();
    let mut z: Vec<f64> = xs.iter().map(|x| (x - m.mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let c = z.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in z.iter().enumerate() {
        let f = normal.cdf(x);
        d = d.max((f - i as f64 / c).abs()).max(((i + 1) as f64 / c - f).abs());
    }
    d
}

/// Summary of `h = min(α, ω)` against its asymptotic targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HNormality {
    pub n: usize,
    pub moments: Moments,
    pub ks_distance: f64,
    /// `n / (2 ln n)`.
    pub mean_target: f64,
    /// `n / (2 ln² n)`.
    pub variance_target: f64,
    /// `E[#blocks]` of a uniform partition of `n − k` elements with `k ~ L(n)`.
    pub block_count_mean: f64,
}

impl HNormality {
    pub fn from_samples(n: usize, hs: &[f64]) -> HNormality {
        let ln = (n as f64).ln();
        let ld = LDistribution::build(n);
        let bell = bell_table(n + 1, 0);
        let block_count_mean = (0..=n)
            .map(|k| {
                let m = n - k;
                ld.pmf(k) * (bell.log(m + 1).div(bell.log(m)).to_f64() - 1.0)
            })
            .sum();
        HNormality {
            n,
            moments: Moments::of(hs),
            ks_distance: ks_to_normal(hs),
            mean_target: n as f64 / (2.0 * ln),
            variance_target: n as f64 / (2.0 * ln * ln),
            block_count_mean,
        }
    }

    fn rows(&self) -> Vec<SummaryRow> {
        vec![
            SummaryRow::plain("h_mean", self.moments.mean)
                .with_reference(self.mean_target)
                .noted("reference: n/(2 ln n)"),
            SummaryRow::plain("h_mean_block_count_reference", self.block_count_mean)
                .noted("exact mean block count of sigma under L(n)"),
            SummaryRow::plain("h_variance", self.moments.variance)
                .with_reference(self.variance_target)
                .noted("reference: n/(2 ln^2 n)"),
            SummaryRow::plain("h_skewness", self.moments.skewness).with_reference(0.0),
            SummaryRow::plain("h_excess_kurtosis", self.moments.excess_kurtosis).with_reference(0.0),
            SummaryRow::plain("h_ks_distance", self.ks_distance),
        ]
    }
}

pub fn h_normality_stats(n: usize, trials: usize, seed: u64) -> Result<HNormality> {
    let report = run(&ExperimentSpec::new(ExperimentName::HNormality, n, trials, seed))?;
    let hs: Vec<f64> = report.records.iter().filter_map(|r| r.get_f64("h")).collect();
    Ok(HNormality::from_samples(n, &hs))
}

/// Plug-in total variation between an empirical law on `0..=n` and `L(n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvEstimate {
    pub tv: f64,
    /// `sqrt(support / trials)`, the scale of pure sampling noise.
    pub noise_floor: f64,
    /// Values of `k` with `P(X = k) > 1e-9`.
    pub support: usize,
    pub trials: usize,
}

impl TvEstimate {
    pub fn from_samples(d: &LDistribution, xs: &[usize]) -> TvEstimate {
        let n = d.n;
        let mut counts = vec![0usize; n + 1];
        let mut outside = 0usize;
        for &x in xs {
            if x <= n {
                counts[x] += 1;
            } else {
                outside += 1;
            }
        }
        let t = xs.len().max(1) as f64;
        let tv = 0.5
            * ((0..=n).map(|k| (counts[k] as f64 / t - d.pmf(k)).abs()).sum::<f64>() + outside as f64 / t);
        let support = (0..=n).filter(|&k| d.pmf(k) > 1e-9).count();
        TvEstimate {
            tv,
            noise_floor: (support as f64 / t).sqrt(),
            support,
            trials: xs.len(),
        }
    }
}

pub fn big_h_vs_ln(n: usize, trials: usize, seed: u64) -> Result<TvEstimate> {
    let report = run(&ExperimentSpec::new(ExperimentName::BigHVsLn, n, trials, seed))?;
    let hs: Vec<usize> = report
        .records
        .iter()
        .filter_map(|r| r.get_f64("big_h"))
        .map(|x| x as usize)
        .collect();
    Ok(TvEstimate::from_samples(&LDistribution::build(n), &hs))
}
