//! Seeded stress tests of the coefficient bounds.
//!
//! A member `f` of either class comes with two Schwarz functions `r`, `s`
//! and Caratheodory functions `p = (1 + r)/(1 - r)`, `q = (1 + s)/(1 - s)`.
//! Matching coefficients gives `a2`, `a3` in terms of `(p1, p2)` and forces
//! `q1 = -p1`; the remaining relation fixes `q2`. A sampled `p` is kept as
//! admissible when that `q2` lies in the second-coefficient body
//!
//! ```text
//! |q2 - q1^2/2| <= 2 - |q1|^2/2
//! ```
//!
//! Every admissible instance satisfies all the relations the bounds are
//! derived from, so a bound exceeded on one of them is a real violation.
//!
//! Sampling: draws are split into chunks of [`CHUNK`] indices; chunk `c`
//! uses `ChaCha8Rng::seed_from_u64(seed)` on stream `c`. Each draw picks a
//! rotation `theta` uniform in `[0, 2 pi)`, a Blaschke degree in `{0, 1, 2}`
//! and, per factor, a point whose modulus is uniform-in-area, pushed to the
//! rim (`1 - u^4`) or zero with equal probability, and whose argument is
//! uniform. Reports are identical for identical seeds regardless of the
//! thread count.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fekete_szego_bound, ClassFamily, ClassSpec};
use crate::error::{Error, Result};
use crate::series::{Polynomial, TruncatedSeries};

/// Draws per generator stream.
pub const CHUNK: u64 = 1024;
/// Slack for bound checks on sampled instances.
pub const BOUND_TOL: f64 = 1e-9;
/// Slack for the coefficient-body test of the reconstructed `q2`.
pub const BODY_TOL: f64 = 1e-12;
/// At most this many violations are listed in a report.
pub const MAX_LISTED: usize = 100;
/// Values of `x` at which the `p2 - (nu/2) p1^2` inequality is probed
/// during [`stress_test`].
pub const X_PROBES: [f64; 9] = [-2.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0];

const MAX_RADIUS: f64 = 1.0 - 1e-12;

/// `w(z) = e^{i theta} z prod (z - c)/(1 - conj(c) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzSpec {
    pub theta: f64,
    pub blaschke_params: Vec<Complex64>,
}

impl SchwarzSpec {
    pub fn new(theta: f64, blaschke_params: Vec<Complex64>) -> Result<Self> {
        let spec = Self {
            theta,
            blaschke_params,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::InvalidSchwarz(format!("theta = {}", self.theta)));
        }
        if self.blaschke_params.len() > 2 {
            return Err(Error::InvalidSchwarz(format!(
                "at most 2 Blaschke factors, got {}",
                self.blaschke_params.len()
            )));
        }
        if let Some(c) = self.blaschke_params.iter().find(|c| !(c.norm() < 1.0)) {
            return Err(Error::InvalidSchwarz(format!("|{c}| >= 1")));
        }
        Ok(())
    }

    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let theta = rng.random::<f64>() * TAU;
        let degree = rng.random_range(0..=2);
        let blaschke_params = (0..degree)
            .map(|_| {
                let u: f64 = rng.random();
                let r = match rng.random_range(0..3) {
                    0 => u.sqrt(),
                    1 => 1.0 - u.powi(4),
                    _ => 0.0,
                };
                Complex64::from_polar(r.min(MAX_RADIUS), rng.random::<f64>() * TAU)
            })
            .collect();
        Self {
            theta,
            blaschke_params,
        }
    }
}

/// `(p1, p2)` of `p = (1 + w)/(1 - w)` for the Schwarz function `spec`.
pub fn sample_caratheodory(spec: &SchwarzSpec) -> Result<(Complex64, Complex64)> {
    spec.validate()?;
    // w has no constant term, so z^1 and z^2 only need the factors to O(z).
    let mut factor = Polynomial::constant(Complex64::from_polar(1.0, spec.theta));
    for &c in &spec.blaschke_params {
        // (z - c)/(1 - conj(c) z) = -c + (1 - |c|^2) z + O(z^2)
        let b = Polynomial::new(vec![-c, Complex64::new(1.0 - c.norm_sqr(), 0.0)]);
        factor = factor.mul_truncated(&b, 1);
    }
    let w: TruncatedSeries = factor.times_z(2);
    let w2 = w.multiply(&w)?;
    // p = 1 + 2 (w + w^2 + ...)
    Ok((2.0 * w.coeff(1), 2.0 * (w.coeff(2) + w2.coeff(2))))
}

/// Whether `(c1, c2)` lies in the second-coefficient body.
pub fn in_body(c1: Complex64, c2: Complex64) -> bool {
    let r = c1.norm_sqr();
    c1.norm() <= 2.0 + BODY_TOL && (c2 - c1 * c1 / 2.0).norm() <= 2.0 - r / 2.0 + BODY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaratheodorySample {
    pub p1: Complex64,
    pub p2: Complex64,
    pub q1: Complex64,
    pub q2: Complex64,
    pub admissible: bool,
    pub a2: Complex64,
    pub a3: Complex64,
}

/// Coefficients `a2`, `a3` and the `q` pair forced by `(p1, p2)`.
pub fn derive_instance(class: &ClassSpec, p1: Complex64, p2: Complex64) -> CaratheodorySample {
    let (b1, b2) = class.phi().coefficients();
    let q1 = -p1;
    let (a2, a3, q2) = match class.family() {
        ClassFamily::RSigma { lambda } => {
            let s = 1.0 + 2.0 * lambda;
            let a2 = b1 * p1 / (2.0 * (1.0 + lambda));
            let a3 = (b1 * p2 / 2.0 + p1 * p1 * (b2 - b1) / 4.0) / s;
            let q2 = (2.0 / b1) * (s * (2.0 * a2 * a2 - a3) - q1 * q1 * (b2 - b1) / 4.0);
            (a2, a3, q2)
        }
        ClassFamily::BiStarlike => {
            let a2 = b1 * p1 / 2.0;
            // 2 a3 - a2^2 = B2 p1^2/4 + (B1/2)(p2 - p1^2/2)
            let a3 = (b2 * p1 * p1 / 4.0 + (b1 / 2.0) * (p2 - p1 * p1 / 2.0) + a2 * a2) / 2.0;
            // 3 a2^2 - 2 a3 = B2 q1^2/4 + (B1/2)(q2 - q1^2/2)
            let q2 = (2.0 / b1) * (3.0 * a2 * a2 - 2.0 * a3 - b2 * q1 * q1 / 4.0) + q1 * q1 / 2.0;
            (a2, a3, q2)
        }
    };
    CaratheodorySample {
        p1,
        p2,
        q1,
        q2,
        admissible: in_body(q1, q2),
        a2,
        a3,
    }
}

/// `nu = x B1/tau - B2/B1 + 1`, with `tau = 1` for the bi-starlike class.
pub fn nu_for(class: &ClassSpec, x: f64) -> f64 {
    let (b1, b2) = class.phi().coefficients();
    x * b1 / class.tau() - b2 / b1 + 1.0
}

/// Left and right side of `|p2 - (nu/2) p1^2| <= max{2, 2|nu - 1|}`.
pub fn nu_inequality(p1: Complex64, p2: Complex64, nu: f64) -> (f64, f64) {
    ((p2 - nu / 2.0 * p1 * p1).norm(), 2.0f64.max(2.0 * (nu - 1.0).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    A2Bound,
    A3Bound,
    /// `|p2 - (nu/2) p1^2| <= max{2, 2|nu - 1|}`.
    NuInequality,
    FeketeSzego,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub kind: ViolationKind,
    pub observed: f64,
    pub bound: f64,
    pub p1: Complex64,
    pub p2: Complex64,
}

impl Violation {
    fn into_error(self) -> Error {
        Error::TheoremViolation {
            index: self.index,
            detail: format!(
                "{:?}: observed {} > bound {} at p1 = {}, p2 = {}",
                self.kind, self.observed, self.bound, self.p1, self.p2
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressReport {
    #[serde(flatten)]
    pub class: ClassSpec,
    pub n: u64,
    pub seed: u64,
    pub admissible_count: u64,
    pub admissibility_rate: f64,
    /// Largest `|a2|`, `|a3|` over admissible instances (0 if none).
    pub max_a2: f64,
    pub max_a3: f64,
    pub bound_a2: f64,
    pub bound_a3: f64,
    /// Number of `(p, nu)` pairs checked against the `nu` inequality.
    pub nu_checks: u64,
    pub violation_count: u64,
    /// The first [`MAX_LISTED`] violations by sample index.
    pub violations: Vec<Violation>,
}

impl StressReport {
    /// `Err(TheoremViolation)` for the first violation, if any.
    pub fn ensure_clean(&self) -> Result<()> {
        match self.violations.first() {
            Some(v) => Err(v.into_error()),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeSzegoReport {
    #[serde(flatten)]
    pub class: ClassSpec,
    pub x: f64,
    pub nu: f64,
    pub n: u64,
    pub seed: u64,
    pub admissible_count: u64,
    /// Largest `|a3 - x a2^2|` (`|2 a3 - (x + 1) a2^2|` for bi-starlike)
    /// over all samples.
    pub max_functional: f64,
    pub bound: f64,
    pub max_nu_lhs: f64,
    pub nu_bound: f64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl FeketeSzegoReport {
    pub fn ensure_clean(&self) -> Result<()> {
        match self.violations.first() {
            Some(v) => Err(v.into_error()),
            None => Ok(()),
        }
    }
}

#[derive(Default)]
struct Tally {
    admissible: u64,
    max_a: f64,
    max_b: f64,
    checks: u64,
    violation_count: u64,
    violations: Vec<Violation>,
}

impl Tally {
    fn flag(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(v);
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.admissible += other.admissible;
        self.max_a = self.max_a.max(other.max_a);
        self.max_b = self.max_b.max(other.max_b);
        self.checks += other.checks;
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self
    }
}

/// Calls `visit(index, p1, p2)` for each draw of chunk `c`.
fn for_chunk(n: u64, seed: u64, c: u64, mut visit: impl FnMut(u64, Complex64, Complex64)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(c);
    for index in c * CHUNK..((c + 1) * CHUNK).min(n) {
        let spec = SchwarzSpec::draw(&mut rng);
        let (p1, p2) = sample_caratheodory(&spec).expect("drawn specs are valid");
        visit(index, p1, p2);
    }
}

/// The `n` seeded `(p1, p2)` draws used by the stress tests, in index order.
pub fn sample_pairs(n: u64, seed: u64) -> Vec<(Complex64, Complex64)> {
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut out = Vec::with_capacity(CHUNK as usize);
            for_chunk(n, seed, c, |_, p1, p2| out.push((p1, p2)));
            out
        })
        .collect()
}

/// Runs `visit(index, p1, p2, tally)` over `n` seeded draws in parallel.
fn sweep<F>(n: u64, seed: u64, visit: F) -> Tally
where
    F: Fn(u64, Complex64, Complex64, &mut Tally) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::default();
            for_chunk(n, seed, c, |index, p1, p2| visit(index, p1, p2, &mut tally));
            tally
        })
        .collect();
    let mut total = parts.into_iter().fold(Tally::default(), Tally::merge);
    total.violations.sort_by_key(|v| v.index);
    total.violations.truncate(MAX_LISTED);
    total
}

/// Samples `n` instances and checks the `|a2|`, `|a3|` bounds on the
/// admissible ones and the `nu` inequality on every `p` (and every
/// admissible `q`) at each `x` in [`X_PROBES`]. Violations are reported,
/// not raised; see [`stress_test`].
pub fn run_stress(class: &ClassSpec, n: u64, seed: u64) -> Result<StressReport> {
    let bounds = class.bounds()?;
    let (bound_a2, bound_a3) = (bounds.a2_bound, bounds.a3_bound);
    let nus: Vec<f64> = X_PROBES.iter().map(|&x| nu_for(class, x)).collect();

    let tally = sweep(n, seed, |index, p1, p2, t| {
        let s = derive_instance(class, p1, p2);
        let mut pairs = vec![(p1, p2)];
        if s.admissible {
            pairs.push((s.q1, s.q2));
            t.admissible += 1;
            let (a2, a3) = (s.a2.norm(), s.a3.norm());
            t.max_a = t.max_a.max(a2);
            t.max_b = t.max_b.max(a3);
            let mut flag = |kind, observed, bound| {
                t.flag(Violation {
                    index,
                    kind,
                    observed,
                    bound,
                    p1,
                    p2,
                })
            };
            if a2 > bound_a2 + BOUND_TOL {
                flag(ViolationKind::A2Bound, a2, bound_a2);
            }
            if a3 > bound_a3 + BOUND_TOL {
                flag(ViolationKind::A3Bound, a3, bound_a3);
            }
        }
        for (c1, c2) in pairs {
            for &nu in &nus {
                t.checks += 1;
                let (lhs, rhs) = nu_inequality(c1, c2, nu);
                if lhs > rhs + BOUND_TOL {
                    t.flag(Violation {
                        index,
                        kind: ViolationKind::NuInequality,
                        observed: lhs,
                        bound: rhs,
                        p1,
                        p2,
                    });
                }
            }
        }
    });

    Ok(StressReport {
        class: *class,
        n,
        seed,
        admissible_count: tally.admissible,
        admissibility_rate: if n == 0 {
            0.0
        } else {
            tally.admissible as f64 / n as f64
        },
        max_a2: tally.max_a,
        max_a3: tally.max_b,
        bound_a2,
        bound_a3,
        nu_checks: tally.checks,
        violation_count: tally.violation_count,
        violations: tally.violations,
    })
}

/// [`run_stress`], failing with `TheoremViolation` on the first violation.
pub fn stress_test(class: &ClassSpec, n: u64, seed: u64) -> Result<StressReport> {
    let report = run_stress(class, n, seed)?;
    report.ensure_clean()?;
    Ok(report)
}

/// Bound on the class's Fekete-Szego functional at `x`.
pub fn fekete_szego_class_bound(class: &ClassSpec, x: f64) -> Result<f64> {
    match class.family() {
        ClassFamily::RSigma { lambda } => fekete_szego_bound(lambda, class.phi(), x),
        ClassFamily::BiStarlike => {
            if !x.is_finite() {
                return Err(Error::HypothesisViolated(format!("x must be finite, got {x}")));
            }
            let (b1, b2) = class.phi().coefficients();
            Ok(b1 * (x * b1 - b2 / b1).abs().max(1.0))
        }
    }
}

/// Samples `n` instances and checks the `nu` inequality on each `p` and
/// the Fekete-Szego bound on each derived `(a2, a3)`. The bound follows
/// from the `f`-side relations alone, so it is checked on every sample,
/// admissible or not. Violations are reported, not raised.
pub fn run_fekete_szego(class: &ClassSpec, x: f64, n: u64, seed: u64) -> Result<FeketeSzegoReport> {
    let bound = fekete_szego_class_bound(class, x)?;
    let nu = nu_for(class, x);
    let nu_bound = 2.0f64.max(2.0 * (nu - 1.0).abs());
    let bi_starlike = class.family() == ClassFamily::BiStarlike;

    let tally = sweep(n, seed, |index, p1, p2, t| {
        let s = derive_instance(class, p1, p2);
        t.admissible += u64::from(s.admissible);
        let functional = if bi_starlike {
            (2.0 * s.a3 - (x + 1.0) * s.a2 * s.a2).norm()
        } else {
            (s.a3 - x * s.a2 * s.a2).norm()
        };
        let (lhs, rhs) = nu_inequality(p1, p2, nu);
        t.max_a = t.max_a.max(functional);
        t.max_b = t.max_b.max(lhs);
        t.checks += 1;
        let mut flag = |kind, observed, bound| {
            t.flag(Violation {
                index,
                kind,
                observed,
                bound,
                p1,
                p2,
            })
        };
        if functional > bound + BOUND_TOL {
            flag(ViolationKind::FeketeSzego, functional, bound);
        }
        if lhs > rhs + BOUND_TOL {
            flag(ViolationKind::NuInequality, lhs, rhs);
        }
    });

    Ok(FeketeSzegoReport {
        class: *class,
        x,
        nu,
        n,
        seed,
        admissible_count: tally.admissible,
        max_functional: tally.max_a,
        bound,
        max_nu_lhs: tally.max_b,
        nu_bound,
        violation_count: tally.violation_count,
        violations: tally.violations,
    })
}

/// [`run_fekete_szego`], failing with `TheoremViolation` on the first
/// violation.
pub fn fekete_szego_stress(class: &ClassSpec, x: f64, n: u64, seed: u64) -> Result<FeketeSzegoReport> {
    let report = run_fekete_szego(class, x, n, seed)?;
    report.ensure_clean()?;
    Ok(report)
}
