//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bicoef_core::{
    bi_starlike_bounds, check_membership, closed_form, compare_with_prior, membership_threshold,
    oracle_infimum, r_sigma_bounds, specialize, stress_test, ClassSpec, Complex64, FnuSpec, Lemma,
    MembershipConfig, OracleConfig, PhiProfile, PiecewiseProblem, SpecialFamily, TestFunction,
    TruncatedSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

mod tol {
    pub const ORACLE_REL: f64 = 1e-3;
    pub const ORACLE_BUDGET_SECS: u64 = 60;
    pub const IDENTITY: f64 = 1e-12;
    pub const REGRESSION: f64 = 1e-9;
    pub const SPECIALIZE: f64 = 1e-12;
    pub const STRESS_BUDGET_SECS: u64 = 120;
    pub const ROUNDTRIP: f64 = 1e-12;
    pub const THRESHOLD: f64 = 1e-6;
    pub const GOLDEN: f64 = 1e-6;
}

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tau(lambda: f64) -> f64 {
    (1.0 + lambda).powi(2) / (1.0 + 2.0 * lambda)
}

/// The piecewise infimum written out from `xi`, `eta` only.
fn piecewise(lemma: Lemma, xi: f64, eta: f64) -> f64 {
    let gamma = (xi - 1.0) / eta;
    let rho = (xi + 1.0) / eta;
    match lemma {
        Lemma::L21 if xi <= eta => 1.0 / (1.0 - gamma),
        Lemma::L21 => 1.0 / (rho - 1.0),
        Lemma::L22 if (1.0..=eta).contains(&xi) => 1.0 / (1.0 - gamma),
        Lemma::L22 if eta <= xi && xi <= 2.0 * eta - 1.0 => 1.0 / (rho - 1.0),
        Lemma::L23 if 1.0 - eta <= xi && xi <= eta => 2.0 / (1.0 - gamma),
        Lemma::L23 if eta <= xi && xi <= 3.0 * eta - 1.0 => 2.0 / (rho - 1.0),
        _ => 1.0,
    }
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let config = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..200 {
        let (xi, eta) = (rng.random_range(-6.0..6.0), rng.random_range(0.1..5.0));
        for lemma in Lemma::ALL {
            let p = PiecewiseProblem::new(lemma, xi, eta).unwrap();
            let exact = closed_form(&p).value;
            let rel = match oracle_infimum(&p, &config) {
                Ok(o) => (o.value - exact).abs() / exact,
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(rel);
            failures += usize::from(!(rel <= tol::ORACLE_REL));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed <= Duration::from_secs(tol::ORACLE_BUDGET_SECS),
        format!("600 problems, worst relative gap {worst:.2e}, {failures} over tolerance, {elapsed:.1?}"),
    )
}

fn theorem_lemma_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let lambda = rng.random_range(0.0..5.0);
        let b1 = rng.random_range(0.05..3.0);
        let b2 = rng.random_range(-3.0..3.0);
        let phi = PhiProfile::custom(b1, b2).unwrap();
        let r = r_sigma_bounds(lambda, &phi).unwrap().a3_bound;
        let r_want = b1 / (1.0 + 2.0 * lambda) * piecewise(Lemma::L22, b2 / b1, b1 / tau(lambda));
        let s = bi_starlike_bounds(&phi).unwrap().a3_bound;
        let s_want = b1 / 2.0 * piecewise(Lemma::L23, b2 / b1, b1);
        worst = worst.max((r - r_want).abs()).max((s - s_want).abs());
    }
    outcome(worst <= tol::IDENTITY, format!("500 draws, worst |difference| {worst:.2e}"))
}

fn closed_form_regressions() -> Outcome {
    let beta0 = PhiProfile::order_beta(0.0).unwrap();
    let power = bi_starlike_bounds(&PhiProfile::power(0.5).unwrap()).unwrap();
    let checks = [
        ("R(1, beta 0) a2", r_sigma_bounds(1.0, &beta0).unwrap().a2_bound, (2.0f64 / 3.0).sqrt()),
        ("S*(beta 0) a2", bi_starlike_bounds(&beta0).unwrap().a2_bound, 2f64.sqrt()),
        ("S*(power 0.5) a2", power.a2_bound, 2.0 * 0.5 / 1.5f64.sqrt()),
        ("S*(power 0.5) a3", power.a3_bound, 4.0 * 0.25 / 1.5),
        (
            "R(0, sqrt) a2",
            r_sigma_bounds(0.0, &PhiProfile::sqrt_lemniscate()).unwrap().a2_bound,
            1.0 / 7f64.sqrt(),
        ),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !((got - want).abs() <= tol::REGRESSION))
        .map(|(name, got, want)| format!("{name}: {got} vs {want}"))
        .collect();
    outcome(bad.is_empty(), if bad.is_empty() { "5 values".into() } else { bad.join("; ") })
}

fn specialization_cross_check() -> Outcome {
    let switch = 1.0 + 2f64.sqrt();
    let mut lambdas: Vec<f64> = (0..18).map(|i| 5.0 * i as f64 / 17.0).collect();
    lambdas.extend([switch - 1e-6, switch + 1e-6]);
    let mut families = Vec::new();
    for k in 1..=20 {
        families.push(SpecialFamily::Power { alpha: k as f64 / 20.0 });
    }
    for k in 0..20 {
        families.push(SpecialFamily::OrderBeta { beta: k as f64 / 20.0 });
    }
    let (mut worst, mut errors, mut prior_failures, mut prior_checked) = (0.0f64, 0, 0, 0);
    for &lambda in &lambdas {
        for family in &families {
            let phi = family.profile().unwrap();
            let general = r_sigma_bounds(lambda, &phi).unwrap();
            match specialize(lambda, *family) {
                Ok(s) => {
                    worst = worst
                        .max((s.a2_bound - general.a2_bound).abs())
                        .max((s.a3_bound - general.a3_bound).abs());
                }
                Err(_) => errors += 1,
            }
            for c in compare_with_prior(lambda, &phi).unwrap() {
                if !c.is_skipped() {
                    prior_checked += 1;
                    prior_failures += usize::from(!c.holds);
                }
            }
        }
    }
    outcome(
        worst <= tol::SPECIALIZE && errors == 0 && prior_failures == 0,
        format!(
            "800 grid points, worst |difference| {worst:.2e}, {errors} specialize errors, \
             {prior_failures}/{prior_checked} prior comparisons failed"
        ),
    )
}

fn stochastic_non_violation() -> Outcome {
    let start = Instant::now();
    let phis = [
        PhiProfile::order_beta(0.0).unwrap(),
        PhiProfile::order_beta(0.5).unwrap(),
        PhiProfile::power(0.5).unwrap(),
        PhiProfile::power(1.0).unwrap(),
        PhiProfile::sqrt_lemniscate(),
    ];
    let mut classes = Vec::new();
    for phi in phis {
        for lambda in [0.0, 1.0, 2.5] {
            classes.push(ClassSpec::r_sigma(lambda, phi).unwrap());
        }
        classes.push(ClassSpec::bi_starlike(phi).unwrap());
    }
    let mut failed = Vec::new();
    let mut checks = 0u64;
    for class in &classes {
        match stress_test(class, 100_000, SEED) {
            Ok(r) => checks += r.nu_checks,
            Err(e) => failed.push(format!("{class}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failed.is_empty() && elapsed <= Duration::from_secs(tol::STRESS_BUDGET_SECS),
        if failed.is_empty() {
            format!("20 classes x 1e5 samples, {checks} nu-inequality checks, 0 violations, {elapsed:.1?}")
        } else {
            format!("{}; {elapsed:.1?}", failed.join("; "))
        },
    )
}

fn series_round_trip() -> Outcome {
    const ORDER: usize = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let id = TruncatedSeries::identity(ORDER);
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..1000 {
        let tail: Vec<Complex64> = (1..ORDER)
            .map(|_| Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let f = TruncatedSeries::normalized(&tail, ORDER).unwrap();
        let err = f.compose(&f.invert().unwrap()).unwrap().max_abs_diff(&id).unwrap();
        worst = worst.max(err);
        failures += usize::from(!(err <= tol::ROUNDTRIP));
    }
    let koebe = TruncatedSeries::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap().invert().unwrap();
    let koebe_err = [(2, -2.0), (3, 5.0), (4, -14.0)]
        .iter()
        .map(|&(n, want)| (koebe.coeff(n) - Complex64::new(want, 0.0)).norm())
        .fold(0.0, f64::max);
    outcome(
        failures == 0 && koebe_err <= tol::ROUNDTRIP,
        format!(
            "{failures}/1000 series over tolerance (worst {worst:.2e}), Koebe inverse error {koebe_err:.1e}"
        ),
    )
}

fn membership_thresholds() -> Outcome {
    let cfg = MembershipConfig::default();
    let beta0 = PhiProfile::order_beta(0.0).unwrap();
    let r1 = ClassSpec::r_sigma(1.0, beta0).unwrap();
    let t = membership_threshold(&r1, 1.01, 3.0, 1e-9, &cfg).map(|t| t.threshold);
    let sqrt2_ok = t.as_ref().is_ok_and(|t| (t - 2f64.sqrt()).abs() <= tol::THRESHOLD);

    let starlike = ClassSpec::bi_starlike(beta0).unwrap();
    let outside: Vec<f64> = (0..=50)
        .map(|i| 1.01 + (5.0 - 1.01) * i as f64 / 50.0)
        .filter(|&nu| {
            let f = TestFunction::Fnu(FnuSpec::new(nu).unwrap());
            !check_membership(&f, &starlike, &cfg).is_ok_and(|v| v.verdict)
        })
        .collect();

    let lemniscate = ClassSpec::r_sigma(0.0, PhiProfile::sqrt_lemniscate()).unwrap();
    let sufficient = 2f64.sqrt() * (2f64.sqrt() + 1.0);
    let lt = membership_threshold(&lemniscate, 1.01, 10.0, 1e-9, &cfg).map(|t| t.threshold);
    let lemniscate_ok = lt.as_ref().is_ok_and(|t| *t <= sufficient + tol::THRESHOLD);

    outcome(
        sqrt2_ok && outside.is_empty() && lemniscate_ok,
        format!(
            "R(1, beta 0) threshold {t:?}; starlike grid misses {}/51; lemniscate threshold {lt:?} vs {sufficient:.7}",
            outside.len()
        ),
    )
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bicoef"))
        .args(args)
        .env_remove("BICOEF_SEED")
        .output()
        .expect("bicoef runs")
}

fn numeric_gap(got: &Value, want: &Value) -> Option<f64> {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => Some((a.as_f64()? - b.as_f64()?).abs()),
        (Value::Object(a), Value::Object(b)) if a.keys().eq(b.keys()) => a
            .iter()
            .map(|(k, v)| numeric_gap(v, &b[k]))
            .try_fold(0.0f64, |m, g| Some(m.max(g?))),
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => a
            .iter()
            .zip(b)
            .map(|(x, y)| numeric_gap(x, y))
            .try_fold(0.0f64, |m, g| Some(m.max(g?))),
        _ => (got == want).then_some(0.0),
    }
}

fn cli_golden_files() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let runs: [(&str, &[&str]); 3] = [
        ("bounds.json", &["bounds", "--class", "r-sigma", "--lambda", "1", "--phi", "beta:beta=0", "--json"]),
        ("lemma.json", &["lemma", "--id", "L22", "--xi", "1.5", "--eta", "2", "--oracle", "--json"]),
        (
            "threshold.json",
            &["threshold", "--class", "r-sigma", "--lambda", "1", "--phi", "beta:beta=0", "--lo", "1.01", "--hi", "3", "--json"],
        ),
    ];
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (file, args) in runs {
        let want: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap();
        let out = cli(args);
        let gap = serde_json::from_slice::<Value>(&out.stdout)
            .ok()
            .filter(|_| out.status.success())
            .and_then(|got| numeric_gap(&got, &want));
        match gap {
            Some(g) if g <= tol::GOLDEN => worst = worst.max(g),
            _ => bad.push(file),
        }
    }
    let seeded = ["sample", "--lambda", "1", "--phi", "sqrt", "--n", "20000", "--seed", "42", "--json"];
    let identical = cli(&seeded).stdout == cli(&seeded).stdout;
    outcome(
        bad.is_empty() && identical,
        format!("golden mismatches {bad:?}, worst gap {worst:.1e}, seeded rerun identical: {identical}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("lemma oracle agreement", oracle_agreement),
        ("theorem/lemma identity", theorem_lemma_identity),
        ("closed-form regressions", closed_form_regressions),
        ("specialization cross-checks", specialization_cross_check),
        ("stochastic non-violation", stochastic_non_violation),
        ("series round-trip", series_round_trip),
        ("membership thresholds", membership_thresholds),
        ("cli golden files", cli_golden_files),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
