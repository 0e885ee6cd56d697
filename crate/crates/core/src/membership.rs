//! Numeric class membership by subordination sampling.
//!
//! A subordination `F < phi` with univalent `phi` holds iff `F(0) = phi(0)`
//! and `F(D)` lies in `phi(D)`. The class operators used here are
//! continuous up to the closed disk for the test functions in scope, so
//! membership is decided by sampling `F` on circles `|z| = r` (including
//! `r = 1`) and checking the region margin, with a small closure tolerance
//! so that tangential contact counts as contained.
//!
//! The worked family is `f_nu(z) = nu z / (nu - z)` with inverse
//! `g_nu(w) = nu w / (nu + w)`. Both `f_nu(z)/z` and `z f_nu'(z)/f_nu(z)`
//! equal `nu / (nu - z)`, which maps the unit disk onto the disk with
//! centre `nu^2/(nu^2 - 1)` and radius `nu/(nu^2 - 1)`; `f_nu'` is the
//! square of that map.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{ClassFamily, ClassSpec};
use crate::error::{Error, Result};
use crate::phi::PhiProfile;
use crate::series::{Polynomial, TruncatedSeries};

/// Margins down to `-CLOSURE_TOL` count as contained.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Minimum number of boundary samples.
pub const MIN_SAMPLES: usize = 64;
/// Slack for `a_n <= bound` in consistency checks.
const CONSISTENCY_TOL: f64 = 1e-12;
const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnuSpec {
    nu: f64,
}

impl FnuSpec {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 1.0) {
            return Err(Error::DegenerateDisk(nu));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `f_nu(z) = nu z / (nu - z)`.
    pub fn f(&self, z: Complex64) -> Complex64 {
        self.nu * z / (self.nu - z)
    }

    /// `g_nu(w) = nu w / (nu + w)`, the inverse of `f_nu`.
    pub fn g(&self, w: Complex64) -> Complex64 {
        self.nu * w / (self.nu + w)
    }

    /// `z + z^2/nu + z^3/nu^2 + ...` truncated at `order`.
    pub fn series(&self, order: usize) -> TruncatedSeries {
        let coeffs = (0..order.max(1))
            .map(|k| Complex64::new(self.nu.powi(-(k as i32)), 0.0))
            .collect();
        TruncatedSeries::new(coeffs).expect("order >= 1")
    }

    pub fn a2(&self) -> f64 {
        1.0 / self.nu
    }

    pub fn a3(&self) -> f64 {
        1.0 / (self.nu * self.nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskMode {
    /// `f_nu(z)/z`.
    Ratio,
    /// `f_nu'(z)`: the disk describes `sqrt(f_nu')`.
    Derivative,
    /// `z f_nu'(z)/f_nu(z)`, identical to [`DiskMode::Ratio`].
    StarlikeRatio,
}

/// An open disk. When `squared` is set the disk describes the square root
/// of the image, and containment is tested on `w^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
    pub squared: bool,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64, squared: bool) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidMembershipConfig(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            center,
            radius,
            squared,
        })
    }

    /// Boundary point at angle `theta`, squared if the disk is tagged.
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        let w = self.center + Complex64::from_polar(self.radius, theta);
        if self.squared {
            w * w
        } else {
            w
        }
    }
}

pub fn fnu_image_disk(nu: f64, mode: DiskMode) -> Result<Disk> {
    let spec = FnuSpec::new(nu)?;
    let d = spec.nu * spec.nu - 1.0;
    Disk::new(
        Complex64::new(spec.nu * spec.nu / d, 0.0),
        spec.nu / d,
        mode == DiskMode::Derivative,
    )
}

/// Minimum of a periodic function sampled at `n` equally spaced angles,
/// polished by golden-section search in the cells next to the worst sample.
fn min_on_circle(n: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let h = TAU / n as f64;
    let (mut arg, mut val) = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = k as f64 * h;
        let v = f(t);
        if v < val {
            arg = t;
            val = v;
        }
    }
    let (t, v) = golden_min(&f, arg - h, arg + h);
    if v < val {
        (t, v)
    } else {
        (arg, val)
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Smallest region margin over the disk boundary (squared if tagged).
pub fn disk_margin(disk: &Disk, phi: &PhiProfile, samples: usize) -> Result<f64> {
    if !phi.has_region() {
        return Err(Error::NoRegionPredicate(phi.to_string()));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidMembershipConfig(format!(
            "need at least {MIN_SAMPLES} boundary samples, got {samples}"
        )));
    }
    let margin = |t: f64| {
        phi.region_margin(disk.boundary_point(t))
            .unwrap_or(f64::NEG_INFINITY)
    };
    Ok(min_on_circle(samples, margin).1)
}

/// Whether the disk (or its square, when tagged) lies in `phi(D)` up to
/// the closure tolerance.
pub fn disk_in_region(disk: &Disk, phi: &PhiProfile, samples: usize) -> Result<bool> {
    Ok(disk_margin(disk, phi, samples)? >= -CLOSURE_TOL)
}

/// A function to test for class membership.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Fnu(FnuSpec),
    /// A polynomial `f`; its inverse is the truncated compositional inverse.
    Series(TruncatedSeries),
}

impl TestFunction {
    pub fn describe(&self) -> String {
        match self {
            TestFunction::Fnu(s) => format!("fnu:nu={}", s.nu),
            TestFunction::Series(s) => {
                let parts: Vec<String> = s.coeffs().iter().map(|c| format!("{}", c.re)).collect();
                format!("series:[{}]", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipConfig {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub closure_tol: f64,
}

impl Default for MembershipConfig {
    /// Radii 0.9, 0.99, 0.999 and the boundary circle, 2048 angles each.
    fn default() -> Self {
        Self {
            radii: vec![0.9, 0.99, 0.999, 1.0],
            angles: 2048,
            closure_tol: CLOSURE_TOL,
        }
    }
}

impl MembershipConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::InvalidMembershipConfig(format!(
                "radii must be non-empty and in (0, 1], got {:?}",
                self.radii
            )));
        }
        if self.angles < MIN_SAMPLES {
            return Err(Error::InvalidMembershipConfig(format!(
                "need at least {MIN_SAMPLES} angles, got {}",
                self.angles
            )));
        }
        if !(self.closure_tol >= 0.0 && self.closure_tol.is_finite()) {
            return Err(Error::InvalidMembershipConfig(format!(
                "closure tolerance must be finite and >= 0, got {}",
                self.closure_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The function itself.
    F,
    /// Its inverse.
    G,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: bool,
    /// Smallest region margin seen; negative means outside.
    pub margin: f64,
    pub worst_side: Side,
    pub worst_z: Complex64,
    pub worst_value: Complex64,
}

/// Evaluates a class operator on one side (the function or its inverse).
enum Operator {
    Fnu { nu: f64, sign: f64 },
    Poly { ratio: Polynomial, derivative: Polynomial },
}

impl Operator {
    fn new(f: &TestFunction, side: Side) -> Result<Self> {
        Ok(match f {
            TestFunction::Fnu(s) => Operator::Fnu {
                nu: s.nu,
                sign: if side == Side::F { -1.0 } else { 1.0 },
            },
            TestFunction::Series(series) => {
                let s = match side {
                    Side::F => series.clone(),
                    Side::G => series.invert()?,
                };
                Operator::Poly {
                    ratio: s.divided_by_z(),
                    derivative: s.derivative(),
                }
            }
        })
    }

    fn apply(&self, family: ClassFamily, z: Complex64) -> Complex64 {
        // (f(z)/z, f'(z), z f'(z)/f(z))
        let (ratio, deriv) = match self {
            Operator::Fnu { nu, sign } => {
                let q = *nu / (*nu + *sign * z);
                (q, q * q)
            }
            Operator::Poly { ratio, derivative } => (ratio.evaluate(z), derivative.evaluate(z)),
        };
        match family {
            ClassFamily::RSigma { lambda } => ratio * (1.0 - lambda) + deriv * lambda,
            ClassFamily::BiStarlike => match self {
                // z f'/f = nu/(nu - z) for f_nu, same as f/z
                Operator::Fnu { .. } => ratio,
                Operator::Poly { .. } => deriv / ratio,
            },
        }
    }
}

/// Tests both subordinations required by the class: the operator applied
/// to `f` and to its inverse must map into `phi(D)`.
pub fn check_membership(
    f: &TestFunction,
    class: &ClassSpec,
    config: &MembershipConfig,
) -> Result<MembershipVerdict> {
    config.validate()?;
    let phi = class.phi();
    if !phi.has_region() {
        return Err(Error::NoRegionPredicate(phi.to_string()));
    }
    let family = class.family();

    let mut worst: Option<MembershipVerdict> = None;
    for side in [Side::F, Side::G] {
        let op = Operator::new(f, side)?;
        for &r in &config.radii {
            let at = |t: f64| Complex64::from_polar(r, t);
            let margin = |t: f64| {
                phi.region_margin(op.apply(family, at(t)))
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let (t, m) = min_on_circle(config.angles, margin);
            if worst.as_ref().is_none_or(|w| m < w.margin) {
                let z = at(t);
                worst = Some(MembershipVerdict {
                    verdict: false,
                    margin: m,
                    worst_side: side,
                    worst_z: z,
                    worst_value: op.apply(family, z),
                });
            }
        }
    }
    let mut v = worst.expect("radii is non-empty");
    v.verdict = v.margin >= -config.closure_tol;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    /// Membership already held at the lower end of the bracket.
    pub at_lower_edge: bool,
    pub iterations: u32,
}

/// Smallest `nu` in `[lo, hi]` (to within `tol`) for which `f_nu` belongs
/// to the class, found by bisection. Assumes membership is monotone in `nu`.
pub fn membership_threshold(
    class: &ClassSpec,
    lo: f64,
    hi: f64,
    tol: f64,
    config: &MembershipConfig,
) -> Result<ThresholdResult> {
    let bracket = |reason: String| Error::InvalidBracket { lo, hi, reason };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(bracket(format!("tolerance must be positive, got {tol}")));
    }
    if !(lo < hi) {
        return Err(bracket("need lo < hi".into()));
    }
    let member = |nu: f64| -> Result<bool> {
        Ok(check_membership(&TestFunction::Fnu(FnuSpec::new(nu)?), class, config)?.verdict)
    };
    if !member(hi)? {
        return Err(bracket(format!("f_nu is not in {class} at the upper end")));
    }
    if member(lo)? {
        return Ok(ThresholdResult {
            threshold: lo,
            at_lower_edge: true,
            iterations: 0,
        });
    }
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if member(mid)? {
            b = mid;
        } else {
            a = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        threshold: b,
        at_lower_edge: false,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub nu: f64,
    pub a2: f64,
    pub a3: f64,
    pub a2_bound: f64,
    pub a3_bound: f64,
}

/// Checks `|a2| = 1/nu` and `|a3| = 1/nu^2` of `f_nu` against the class
/// bounds. Membership of `f_nu` is the caller's responsibility.
pub fn bound_consistency_check(class: &ClassSpec, f: &FnuSpec) -> Result<ConsistencyReport> {
    let bounds = class.bounds()?;
    let report = ConsistencyReport {
        nu: f.nu,
        a2: f.a2(),
        a3: f.a3(),
        a2_bound: bounds.a2_bound,
        a3_bound: bounds.a3_bound,
    };
    if report.a2 > report.a2_bound + CONSISTENCY_TOL {
        return Err(Error::BoundViolation(format!(
            "|a2| = {} exceeds {} for f_nu, nu = {} in {class}",
            report.a2, report.a2_bound, f.nu
        )));
    }
    if report.a3 > report.a3_bound + CONSISTENCY_TOL {
        return Err(Error::BoundViolation(format!(
            "|a3| = {} exceeds {} for f_nu, nu = {} in {class}",
            report.a3, report.a3_bound, f.nu
        )));
    }
    Ok(report)
}
