//! Acceptance gate: one test per release criterion.
//!
//! Every test prints a single `criterion N: pass/fail — …` line before
//! asserting, so `cargo test --test acceptance -- --nocapture` reads as a
//! sign-off checklist. Criteria with runtime budgets measure wall time under
//! a shared lock so concurrent tests cannot inflate each other's clocks.

use std::collections::BTreeMap;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use num_complex::Complex64;
use opalg_cli::gen;
use opalg_cli::suite::{run_suite, PropertyRecord, Report, SuiteConfig};
use opalg_core::fkdet::{fk_det, ldet_at};
use opalg_core::CMatrix;

const E_INV: f64 = 0.36787944117144233; // e⁻¹
const OFF_INTERVAL_LOGDET: f64 = 0.3862943611198906; // ∫₀¹ log(2 − t) dt = 2·ln 2 − 1
const SEED: u64 = 2026;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn gate(idx: usize, pass: bool, detail: &str) {
    println!(
        "criterion {idx}: {} — {detail}",
        if pass { "pass" } else { "fail" }
    );
    assert!(pass, "criterion {idx} failed — {detail}");
}

fn config(suite: &str, n_values: &[usize], trials: usize) -> SuiteConfig {
    SuiteConfig {
        suite: suite.to_string(),
        n_values: n_values.to_vec(),
        trials,
        seed: SEED,
        tolerances: BTreeMap::new(),
        output: None,
    }
}

fn run(cfg: &SuiteConfig) -> Report {
    run_suite(cfg).expect("suite runner errored")
}

fn record<'a>(report: &'a Report, name: &str) -> &'a PropertyRecord {
    report
        .properties
        .iter()
        .find(|p| p.name == name)
        .unwrap_or_else(|| panic!("suite {} has no property {name}", report.suite))
}

fn worst(report: &Report, names: &[&str]) -> f64 {
    names
        .iter()
        .map(|name| record(report, name).worst_residual)
        .fold(0.0, f64::max)
}

/// Determinant values of the midpoint discretization of multiplication by t
/// on [0, 1] at order 512: Δ(x) ≈ e⁻¹, the curve Δ(x − λ1) ≈
/// e⁻¹·λ^λ·(1−λ)^{1−λ} on (0, 1), and log Δ(x − 2·1) ≈ 2·ln 2 − 1, inside
/// five seconds.
#[test]
fn criterion_01_determinant_curve_at_order_512() {
    let _guard = serial();
    let clock = Instant::now();
    let n = 512;
    let x = gen::interval_midpoints(n);

    let det_err = (fk_det(&x).unwrap() - E_INV).abs();

    let curve = |lambda: f64| E_INV * lambda.powf(lambda) * (1.0 - lambda).powf(1.0 - lambda);
    // Frozen spot value: the curve at λ = 1/2 is e⁻¹/2.
    assert!((curve(0.5) - E_INV / 2.0).abs() < 1e-15);
    let mut curve_err = 0.0_f64;
    for &lambda in &[0.25, 0.5, 0.75] {
        let shifted = x.sub(&CMatrix::identity(n).scale_re(lambda));
        curve_err = curve_err.max((fk_det(&shifted).unwrap() - curve(lambda)).abs());
    }

    let logdet_err = (ldet_at(&x, Complex64::new(2.0, 0.0)).unwrap() - OFF_INTERVAL_LOGDET).abs();

    let secs = clock.elapsed().as_secs_f64();
    let pass = det_err <= 1e-2 && curve_err <= 1e-2 && logdet_err <= 1e-3 && secs < 5.0;
    gate(
        1,
        pass,
        &format!(
            "order-512 discretization: |Δ − e⁻¹| = {det_err:.2e} (≤ 1e-2), \
             curve error ≤ {curve_err:.2e} (≤ 1e-2), \
             off-interval logdet error = {logdet_err:.2e} (≤ 1e-3), {secs:.2} s (< 5 s)"
        ),
    );
}

/// Determinant axioms on 500 invertible pairs across n ∈ {2, 4, 8, 16} with
/// condition number ≤ 1e4: multiplicativity, *-invariance, Δ(λ1) = |λ| and
/// the contraction bound, all within relative 1e-8, inside thirty seconds.
#[test]
fn criterion_02_determinant_axioms() {
    let _guard = serial();
    let clock = Instant::now();
    let report = run(&config("fk-axioms", &[2, 4, 8, 16], 125));
    let secs = clock.elapsed().as_secs_f64();

    let names = ["multiplicative", "star-invariance", "scalar", "contraction"];
    let pairs = record(&report, "multiplicative").trials;
    let pass = report.failures == 0
        && names.iter().all(|name| record(&report, name).trials == 500)
        && worst(&report, &names) <= 1e-8
        && secs < 30.0;
    gate(
        2,
        pass,
        &format!(
            "{pairs} invertible pairs (n ∈ {{2,4,8,16}}, cond ≤ 1e4): \
             {} failures, worst relative residual {:.2e} (≤ 1e-8), {secs:.2} s (< 30 s)",
            report.failures,
            worst(&report, &names)
        ),
    );
}

/// The log-determinant identity log Δ(x − λ1) = Σ μ(t)·log|t − λ| on 100
/// random (x, λ) with λ bounded away from the spectrum, within 1e-8.
#[test]
fn criterion_03_logdet_atom_sum() {
    let _guard = serial();
    // The sampler keeps λ at distance ≥ 1e-2 from every eigenvalue, well
    // inside the required ≥ 1e-3 margin.
    let report = run(&config("brown-identities", &[2, 4, 8, 16], 25));
    let ldet = record(&report, "ldet-atom-sum");
    let pass = report.failures == 0 && ldet.trials == 100 && ldet.worst_residual <= 1e-8;
    gate(
        3,
        pass,
        &format!(
            "{} (x, λ) instances with spectral margin ≥ 1e-2: {} failures, \
             worst |log Δ(x − λ) − atom sum| = {:.2e} (≤ 1e-8)",
            ldet.trials, report.failures, ldet.worst_residual
        ),
    );
}

/// Spectral-splitting projections on 200 random x (n ≤ 16) against disks and
/// half-planes with boundary margin ≥ 1e-3: invariance residual ≤ 1e-8·‖x‖_F,
/// exact trace weight, and exact inside/outside corner eigenvalue counts.
#[test]
fn criterion_04_splitting_projections() {
    let _guard = serial();
    let report = run(&config("hs-projections", &[2, 4, 8, 16], 50));
    let names = [
        "invariance",
        "trace-weight",
        "corner-spectra",
        "complement-split",
    ];
    let pass = report.failures == 0 && names.iter().all(|name| record(&report, name).trials == 200);
    gate(
        4,
        pass,
        &format!(
            "200 (x, region) instances per property (n ∈ {{2,4,8,16}}, margin ≥ 1e-3): \
             {} failures, worst invariance residual {:.2e} (≤ 1e-8·‖x‖_F), \
             traces and corner counts exact",
            report.failures,
            record(&report, "invariance").worst_residual
        ),
    );
}

/// Measure decomposition across an invariant projection on 100 instances:
/// the weighted mixture of the two corner measures matches the measure of x
/// under atom matching at 1e-6, with exact rational weights.
#[test]
fn criterion_05_measure_decomposition() {
    let _guard = serial();
    let report = run(&config("hs-projections", &[2, 4, 8, 16], 25));
    let rec = record(&report, "measure-decomposition");
    let pass = report.failures == 0 && rec.trials == 100 && rec.failures == 0;
    gate(
        5,
        pass,
        &format!(
            "{} invariant-projection instances: {} failures, \
             mixture matches at 1e-6 with exact weights",
            rec.trials, rec.failures
        ),
    );
}

/// Rank-metric axioms and regular-ring identities, 100 trials per identity
/// per n ∈ {2, 4, 8}: exact integer-rank assertions, residuals ≤ 1e-10 on the
/// partial-inverse and normalizer identities, inside twenty seconds combined.
#[test]
fn criterion_06_rank_and_ring_identities() {
    let _guard = serial();
    let clock = Instant::now();
    let rank = run(&config("rank-axioms", &[2, 4, 8], 100));
    let ring = run(&config("regring-identities", &[2, 4, 8], 100));
    let secs = clock.elapsed().as_secs_f64();

    let inverse_names = ["pinv-identities", "support-identities", "normalizers"];
    let inverse_worst = worst(&ring, &inverse_names);
    let pass = rank.failures == 0
        && ring.failures == 0
        && rank.properties.iter().all(|p| p.trials == 300)
        && ring.properties.iter().all(|p| p.trials == 300)
        && inverse_worst <= 1e-10
        && secs < 20.0;
    gate(
        6,
        pass,
        &format!(
            "rank + ring suites, 300 trials per identity (n ∈ {{2,4,8}}): \
             {} failures, partial-inverse/normalizer worst {inverse_worst:.2e} (≤ 1e-10), \
             {secs:.2} s (< 20 s)",
            rank.failures + ring.failures
        ),
    );
}

/// Canonical-form round-trip: 200 seeded forms across n ∈ {2, 3, 4, 6, 8}
/// covering both Jordan kinds and both conjugation flags are recovered with
/// reconstruction residual ≤ 1e-8, and 200 forms perturbed at ε = 1e-2 are
/// all rejected with witnesses, inside sixty seconds.
#[test]
fn criterion_07_canonical_form_roundtrip() {
    let _guard = serial();
    let clock = Instant::now();
    let mut cfg = config("decomposition-roundtrip", &[2, 3, 4, 6, 8], 40);
    cfg.tolerances.insert("perturb_eps".to_string(), 1e-2);
    let report = run(&cfg);
    let secs = clock.elapsed().as_secs_f64();

    let roundtrip = record(&report, "round-trip");
    let rejected = record(&report, "perturbed-rejection");
    let pass = report.failures == 0
        && roundtrip.trials == 200
        && rejected.trials == 200
        && roundtrip.worst_residual <= 1e-8
        && secs < 60.0;
    gate(
        7,
        pass,
        &format!(
            "{} seeded forms recovered (worst residual {:.2e} ≤ 1e-8), \
             {} ε = 1e-2 perturbations rejected with witnesses, {secs:.1} s (< 60 s)",
            roundtrip.trials, roundtrip.worst_residual, rejected.trials
        ),
    );
}

/// Unital determinant-preserving forms: decomposition in det-preserving mode
/// returns a·b = 1 to 1e-8 with the right Jordan classification; the chain
/// identity Δ(x − λu) = Δ(|x| − λ1) holds to 1e-8 on 20 probes per instance;
/// measure preservation is confirmed by atom matching on 20 probes per map.
#[test]
fn criterion_08_unital_det_preserving_maps() {
    let _guard = serial();
    let report = run(&config("hk-theorem", &[2, 3, 4, 6], 25));
    let names = ["unital-det-roundtrip", "det-chain", "brown-preservation"];
    let pass = report.failures == 0 && names.iter().all(|name| record(&report, name).trials == 100);
    gate(
        8,
        pass,
        &format!(
            "100 unital det-preserving forms: {} failures, \
             a·b − 1 worst {:.2e} (≤ 1e-8), det-chain worst {:.2e} (≤ 1e-8), \
             measures match on 20 probes per map",
            report.failures,
            record(&report, "unital-det-roundtrip").worst_residual,
            record(&report, "det-chain").worst_residual
        ),
    );
}

/// Isometry structure lemmas on 50 generated isometries per n ∈ {2, 4, 6}:
/// invertibility preserved exactly, support-image order preserved to 1e-8,
/// idempotents preserved to 1e-8, one-sided zero products preserved with a
/// side consistent per map, and orthogonal supports meeting in rank 0.
#[test]
fn criterion_09_isometry_lemmas() {
    let _guard = serial();
    let report = run(&config("isometry-lemmas", &[2, 4, 6], 50));
    let names = [
        "invertibility",
        "order-preservation",
        "orthogonality-meet",
        "idempotent-image",
        "zero-product-side",
    ];
    let pass = report.failures == 0 && names.iter().all(|name| record(&report, name).trials == 150);
    gate(
        9,
        pass,
        &format!(
            "150 isometries per lemma (n ∈ {{2,4,6}}): {} failures, \
             idempotent worst {:.2e} (≤ 1e-8), order/zero-product/meet checks clean",
            report.failures,
            record(&report, "idempotent-image").worst_residual
        ),
    );
}

/// L₀-norm limit: on 100 instances whose smallest nonzero singular value is
/// ≥ 1e-3, the regularized norm of λx at λ = 1e8 is within 1e-6 of the rank
/// metric.
#[test]
fn criterion_10_l0_rank_limit() {
    let _guard = serial();
    let report = run(&config("rank-axioms", &[2, 4, 8], 34));
    let rec = record(&report, "l0-limit");
    let pass = report.failures == 0 && rec.trials == 102 && rec.worst_residual <= 1e-6;
    gate(
        10,
        pass,
        &format!(
            "{} instances with σ_min ≥ 1e-3: {} failures, \
             worst |‖λx‖_L0 − ‖x‖_S| = {:.2e} (≤ 1e-6) at λ = 1e8",
            rec.trials, rec.failures, rec.worst_residual
        ),
    );
}
