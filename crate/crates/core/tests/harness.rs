use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use perfgen::exactalgs::{alpha_exact, omega_exact};
use perfgen::generator::{exact_gen_law, graph_from_mask};
use perfgen::harness::{big_h_vs_ln, h_normality_stats};
use perfgen::structure::alpha_omega_fast;
use perfgen::{run, trial_rng, ExperimentName, ExperimentSpec, Generator, Graph};

#[test]
fn hamilton_reference_is_half_the_exact_tail() {
    let r = run(&ExperimentSpec::new(ExperimentName::Hamilton, 200, 1000, 7)).unwrap();
    let row = r.summary_row("obstruction_rate").unwrap();
    let tail = Generator::new(200).ldist().log_upper_tail(100).to_f64();
    assert_eq!(row.reference, Some(0.5 * tail));
    assert_eq!(row.within, Some(true));
    for m in ["cycle_rate", "failure_rate", "certificates_verified"] {
        assert!(r.summary_row(m).is_some(), "{m}");
    }
}

#[test]
fn bipartite_pattern_appears_half_the_time() {
    let mut s = ExperimentSpec::new(ExperimentName::Trichotomy, 100, 2000, 11);
    s.pattern = Some(Graph::complete_bipartite(2, 3).to_graph6());
    let r = run(&s).unwrap();
    let row = r.summary_row("containment_rate").unwrap();
    assert_eq!(row.reference, Some(0.5));
    assert_eq!(row.within, Some(true), "{row:?}");
}

#[test]
fn big_h_is_noise_dominated() {
    let tv = big_h_vs_ln(500, 5000, 13).unwrap();
    assert!(tv.tv <= 3.0 * tv.noise_floor, "{tv:?}");
}

#[test]
fn big_h_dominates_h() {
    let r = run(&ExperimentSpec::new(ExperimentName::BigHVsLn, 80, 200, 17)).unwrap();
    for t in &r.records {
        assert!(t.fields["big_h"].as_u64() >= t.fields["h"].as_u64());
    }
}

#[test]
fn h_normality_handles_one_trial() {
    let s = h_normality_stats(60, 1, 19).unwrap();
    assert!(s.moments.variance.is_nan() && s.ks_distance.is_nan());
}

/// Law of `max(α, ω)` at `n = 6` from the exact generated-graph law.
fn exact_big_h_law() -> BTreeMap<usize, f64> {
    let mut law = BTreeMap::new();
    for (mask, p) in exact_gen_law(6).unwrap() {
        let g = graph_from_mask(6, mask);
        let h = alpha_exact(&g).unwrap().max(omega_exact(&g).unwrap());
        *law.entry(h).or_insert(0.0) += p.to_f64().unwrap();
    }
    law
}

#[test]
fn big_h_law_on_six_vertices_matches_enumeration() {
    let exact = exact_big_h_law();
    let gen = Generator::new(6);
    let t = 200_000;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..t {
        let (g, arr) = gen.gen(&mut trial_rng(23, i));
        let f = alpha_omega_fast(&g, &arr).unwrap();
        *counts.entry(f.alpha.max(f.omega)).or_default() += 1;
    }
    for (h, c) in &counts {
        let p = exact.get(h).copied().unwrap_or(0.0);
        let se = (p * (1.0 - p) / t as f64).sqrt();
        let q = *c as f64 / t as f64;
        assert!((q - p).abs() <= 4.0 * se + 1e-12, "H={h}: {q} vs {p}");
    }
    assert!(exact.keys().all(|h| counts.contains_key(h) || exact[h] < 1e-4));
}
