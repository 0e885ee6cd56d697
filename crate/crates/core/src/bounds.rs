//! Closed-form bounds on `|a2|` and `|a3|` for `f(z) = z + a2 z^2 + ...`
//! when both `f` and its inverse satisfy a subordination to `phi`.
//!
//! For `R_sigma(lambda, phi)` let `tau = (1 + lambda)^2 / (1 + 2 lambda)`
//! and split on the sign of `B1^2 - tau B2`:
//!
//! ```text
//! case a (tau B2 <= B1^2):  D = B1^2 - tau B2 + tau B1
//! case b (tau B2 >= B1^2):  D = tau B2 + tau B1 - B1^2
//! |a2| <= B1 sqrt(B1) / sqrt((1 + 2 lambda) D)
//! |a3| <= B1 / (1 + 2 lambda) * max{B1^2 / D, 1}
//! ```
//!
//! `S*_sigma(phi)` has the same shape with `tau = 1`, no `1 + 2 lambda`
//! factor in `|a2|` and `|a3| <= max{B1^3 / D, B1 / 2}`. Its second case is
//! taken under `B2 >= B1^2`.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::infimum::LemmaBranch;
use crate::phi::{PhiFamily, PhiProfile};

/// Explicit specializations must match the general formulas to this.
pub const SPECIALIZATION_TOL: f64 = 1e-12;
/// Slack allowed in `new <= prior` comparisons.
pub const COMPARISON_TOL: f64 = 1e-12;
/// Relative width of the tie band between case a and case b.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassFamily {
    /// `(1 - lambda) f(z)/z + lambda f'(z) < phi(z)` for `f` and its inverse.
    RSigma { lambda: f64 },
    /// `z f'(z) / f(z) < phi(z)` for `f` and its inverse.
    BiStarlike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassSpec {
    family: ClassFamily,
    phi: PhiProfile,
}

impl ClassSpec {
    pub fn r_sigma(lambda: f64, phi: PhiProfile) -> Result<Self> {
        check_lambda(lambda)?;
        phi.validate()?;
        Ok(Self {
            family: ClassFamily::RSigma { lambda },
            phi,
        })
    }

    pub fn bi_starlike(phi: PhiProfile) -> Result<Self> {
        phi.validate()?;
        Ok(Self {
            family: ClassFamily::BiStarlike,
            phi,
        })
    }

    pub fn family(&self) -> ClassFamily {
        self.family
    }

    pub fn phi(&self) -> &PhiProfile {
        &self.phi
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.family {
            ClassFamily::RSigma { lambda } => Some(lambda),
            ClassFamily::BiStarlike => None,
        }
    }

    /// `(1 + lambda)^2 / (1 + 2 lambda)`, or 1 for the bi-starlike class.
    pub fn tau(&self) -> f64 {
        self.lambda().map_or(1.0, tau)
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            ClassFamily::RSigma { .. } => "r-sigma",
            ClassFamily::BiStarlike => "bi-starlike",
        }
    }

    /// Bounds for this class.
    pub fn bounds(&self) -> Result<BoundReport> {
        match self.family {
            ClassFamily::RSigma { lambda } => r_sigma_bounds(lambda, &self.phi),
            ClassFamily::BiStarlike => bi_starlike_bounds(&self.phi),
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            ClassFamily::RSigma { lambda } => write!(f, "r-sigma(lambda={lambda}, {})", self.phi),
            ClassFamily::BiStarlike => write!(f, "bi-starlike({})", self.phi),
        }
    }
}

impl Serialize for ClassSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ClassSpec", 3)?;
        s.serialize_field("class", self.name())?;
        s.serialize_field("lambda", &self.lambda())?;
        s.serialize_field("phi", &self.phi)?;
        s.end()
    }
}

/// Which side of the case split produced the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseBranch {
    CaseA,
    CaseB,
    Boundary,
}

impl fmt::Display for CaseBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseBranch::CaseA => "case_a",
            CaseBranch::CaseB => "case_b",
            CaseBranch::Boundary => "boundary",
        })
    }
}

/// An earlier bound set against the one computed here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    /// `None` when the earlier expression is undefined for these inputs.
    pub prior: Option<f64>,
    pub new: f64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Comparison {
    fn checked(name: &str, prior: f64, new: f64) -> Self {
        Self {
            name: name.to_string(),
            prior: Some(prior),
            new,
            holds: new <= prior + COMPARISON_TOL,
            note: None,
        }
    }

    fn skipped(name: &str, new: f64, note: String) -> Self {
        Self {
            name: name.to_string(),
            prior: None,
            new,
            holds: true,
            note: Some(note),
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.prior.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(flatten)]
    pub class: ClassSpec,
    pub b1: f64,
    pub b2: f64,
    pub tau: f64,
    pub branch: CaseBranch,
    pub a2_bound: f64,
    pub a3_bound: f64,
    pub a3_branch: LemmaBranch,
    pub comparisons: Vec<Comparison>,
}

pub fn tau(lambda: f64) -> f64 {
    (1.0 + lambda).powi(2) / (1.0 + 2.0 * lambda)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

fn check_b2(phi: &PhiProfile) -> Result<()> {
    if !phi.b2().is_finite() {
        return Err(Error::HypothesisViolated(format!(
            "B2 must be a finite real, got {}",
            phi.b2()
        )));
    }
    Ok(())
}

/// Case split on `scaled_b2` against `b1^2`, returning the branch and the
/// matching denominator `D` (with `tau = scale`).
fn split(b1: f64, b2: f64, scale: f64) -> Result<(CaseBranch, f64)> {
    let b1sq = b1 * b1;
    let tb2 = scale * b2;
    let branch = if (tb2 - b1sq).abs() <= BOUNDARY_TOL * b1sq.max(1.0) {
        CaseBranch::Boundary
    } else if tb2 < b1sq {
        CaseBranch::CaseA
    } else {
        CaseBranch::CaseB
    };
    // Both formulas reduce to tau B1 on the boundary; the case-a form is
    // used inside the tie band so the value stays continuous with case a.
    let den = match branch {
        CaseBranch::CaseA | CaseBranch::Boundary => b1sq - tb2 + scale * b1,
        CaseBranch::CaseB => tb2 + scale * b1 - b1sq,
    };
    if !(den > 0.0) {
        return Err(Error::InternalInconsistency(format!(
            "non-positive denominator {den} on {branch} (B1={b1}, B2={b2}, tau={scale})"
        )));
    }
    Ok((branch, den))
}

fn a3_branch(branch: CaseBranch, ratio_wins: bool) -> LemmaBranch {
    match (ratio_wins, branch) {
        (false, _) => LemmaBranch::Otherwise,
        (true, CaseBranch::CaseB) => LemmaBranch::Second,
        (true, _) => LemmaBranch::First,
    }
}

/// Bounds for `R_sigma(lambda, phi)`.
pub fn r_sigma_bounds(lambda: f64, phi: &PhiProfile) -> Result<BoundReport> {
    check_lambda(lambda)?;
    check_b2(phi)?;
    let (b1, b2) = phi.coefficients();
    let t = tau(lambda);
    let scale = 1.0 + 2.0 * lambda;
    let (branch, den) = split(b1, b2, t)?;

    let a2_bound = b1 * b1.sqrt() / (scale * den).sqrt();
    let ratio = b1 * b1 / den;
    let a3_bound = b1 / scale * ratio.max(1.0);

    Ok(BoundReport {
        class: ClassSpec::r_sigma(lambda, *phi)?,
        b1,
        b2,
        tau: t,
        branch,
        a2_bound,
        a3_bound,
        a3_branch: a3_branch(branch, ratio >= 1.0),
        comparisons: prior_comparisons(lambda, phi, a2_bound),
    })
}

/// Bounds for `S*_sigma(phi)`.
pub fn bi_starlike_bounds(phi: &PhiProfile) -> Result<BoundReport> {
    check_b2(phi)?;
    let (b1, b2) = phi.coefficients();
    let (branch, den) = split(b1, b2, 1.0)?;

    let a2_bound = b1 * b1.sqrt() / den.sqrt();
    let ratio_term = b1.powi(3) / den;
    let unit_term = b1 / 2.0;
    let a3_bound = ratio_term.max(unit_term);

    Ok(BoundReport {
        class: ClassSpec::bi_starlike(*phi)?,
        b1,
        b2,
        tau: 1.0,
        branch,
        a2_bound,
        a3_bound,
        a3_branch: a3_branch(branch, ratio_term >= unit_term),
        comparisons: Vec::new(),
    })
}

/// `|a3 - x a2^2| <= B1/(1 + 2 lambda) * max{1, |x B1/tau - B2/B1|}`.
pub fn fekete_szego_bound(lambda: f64, phi: &PhiProfile, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_b2(phi)?;
    if !x.is_finite() {
        return Err(Error::HypothesisViolated(format!("x must be finite, got {x}")));
    }
    let (b1, b2) = phi.coefficients();
    let t = tau(lambda);
    Ok(b1 / (1.0 + 2.0 * lambda) * (x * b1 / t - b2 / b1).abs().max(1.0))
}

/// Families with explicit, hand-simplified bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialFamily {
    /// `phi = ((1 + z)/(1 - z))^alpha`.
    Power { alpha: f64 },
    /// `phi = (1 + (1 - 2 beta) z)/(1 - z)`.
    OrderBeta { beta: f64 },
}

impl SpecialFamily {
    pub fn profile(&self) -> Result<PhiProfile> {
        match *self {
            SpecialFamily::Power { alpha } => PhiProfile::power(alpha),
            SpecialFamily::OrderBeta { beta } => PhiProfile::order_beta(beta),
        }
    }
}

/// `R_sigma` bounds from the explicit per-family formulas, cross-checked
/// against [`r_sigma_bounds`].
///
/// Power family: the `|a2|` formula switches at `lambda = 1 + sqrt(2)`
/// and `|a3| <= 2 alpha / (1 + 2 lambda)`. Order-beta family: it switches at
/// `beta = (1 - lambda^2 + 2 lambda) / (2 (1 + 2 lambda))` and
/// `|a3| <= 2 (1 - beta) / (1 + 2 lambda)`.
pub fn specialize(lambda: f64, family: SpecialFamily) -> Result<BoundReport> {
    check_lambda(lambda)?;
    let phi = family.profile()?;
    let general = r_sigma_bounds(lambda, &phi)?;
    let scale = 1.0 + 2.0 * lambda;

    let (a2, a3, branch) = match family {
        SpecialFamily::Power { alpha } => {
            let switch = 1.0 + SQRT_2;
            let k = 1.0 - lambda * lambda + 2.0 * lambda;
            let (a2, branch) = if lambda <= switch {
                let b = if lambda == switch {
                    CaseBranch::Boundary
                } else {
                    CaseBranch::CaseA
                };
                (2.0 * alpha / ((1.0 + lambda).powi(2) + alpha * k).sqrt(), b)
            } else {
                (
                    2.0 * alpha / ((1.0 + lambda).powi(2) - alpha * k).sqrt(),
                    CaseBranch::CaseB,
                )
            };
            (a2, 2.0 * alpha / scale, branch)
        }
        SpecialFamily::OrderBeta { beta } => {
            let switch = (1.0 - lambda * lambda + 2.0 * lambda) / (2.0 * scale);
            let (a2, branch) = if beta <= switch {
                let b = if beta == switch {
                    CaseBranch::Boundary
                } else {
                    CaseBranch::CaseA
                };
                ((2.0 * (1.0 - beta) / scale).sqrt(), b)
            } else {
                (
                    (1.0 - beta) * (2.0 / (lambda * lambda + beta * scale)).sqrt(),
                    CaseBranch::CaseB,
                )
            };
            (a2, 2.0 * (1.0 - beta) / scale, branch)
        }
    };

    agree("a2", a2, general.a2_bound)?;
    agree("a3", a3, general.a3_bound)?;
    Ok(BoundReport {
        branch,
        a2_bound: a2,
        a3_bound: a3,
        ..general
    })
}

/// `S*_sigma` bounds from the explicit power / order-beta formulas,
/// cross-checked against [`bi_starlike_bounds`].
pub fn specialize_bi_starlike(family: SpecialFamily) -> Result<BoundReport> {
    let phi = family.profile()?;
    let general = bi_starlike_bounds(&phi)?;
    let (a2, a3) = match family {
        SpecialFamily::Power { alpha } => {
            let a3 = if alpha <= 1.0 / 3.0 {
                alpha
            } else {
                4.0 * alpha * alpha / (alpha + 1.0)
            };
            (2.0 * alpha / (alpha + 1.0).sqrt(), a3)
        }
        SpecialFamily::OrderBeta { beta } => {
            let a2 = if beta <= 0.5 {
                (2.0 * (1.0 - beta)).sqrt()
            } else {
                (1.0 - beta) * (2.0 / beta).sqrt()
            };
            let a3 = if beta <= 0.5 {
                2.0 * (1.0 - beta)
            } else if beta <= 2.0 / 3.0 {
                2.0 * (1.0 - beta).powi(2) / beta
            } else {
                1.0 - beta
            };
            (a2, a3)
        }
    };
    agree("a2", a2, general.a2_bound)?;
    agree("a3", a3, general.a3_bound)?;
    Ok(BoundReport {
        a2_bound: a2,
        a3_bound: a3,
        ..general
    })
}

fn agree(what: &str, explicit: f64, general: f64) -> Result<()> {
    if (explicit - general).abs() > SPECIALIZATION_TOL * general.abs().max(1.0) {
        return Err(Error::InternalInconsistency(format!(
            "{what}: explicit formula gives {explicit}, general bound gives {general}"
        )));
    }
    Ok(())
}

/// The `R_sigma` `|a2|` bound against earlier bounds, each checked as
/// `new <= prior`.
///
/// * `prior_a2_general`: `sqrt((2 B1 - B2)/(1 + 2 lambda))` when
///   `B2 <= B1`, `sqrt(B2/(1 + 2 lambda))` when `B2 >= B1`. Skipped when
///   the radicand is not positive.
/// * `prior_a2_power`: `2 alpha / sqrt((1+lambda)^2 + alpha (1 - lambda^2 + 2 lambda))`
///   for the power family, i.e. the small-`lambda` formula used for every `lambda`.
/// * `prior_a2_beta`: `sqrt(2 (1 - beta)/(1 + 2 lambda))` for the order-beta family.
pub fn compare_with_prior(lambda: f64, phi: &PhiProfile) -> Result<Vec<Comparison>> {
    let report = r_sigma_bounds(lambda, phi)?;
    Ok(report.comparisons)
}

fn prior_comparisons(lambda: f64, phi: &PhiProfile, new: f64) -> Vec<Comparison> {
    let (b1, b2) = phi.coefficients();
    let scale = 1.0 + 2.0 * lambda;
    let mut out = Vec::new();

    let radicand = if b2 <= b1 { 2.0 * b1 - b2 } else { b2 };
    if radicand > 0.0 {
        out.push(Comparison::checked(
            "prior_a2_general",
            (radicand / scale).sqrt(),
            new,
        ));
    } else {
        out.push(Comparison::skipped(
            "prior_a2_general",
            new,
            format!("prior radicand {radicand} is not positive"),
        ));
    }

    match *phi.family() {
        PhiFamily::Power { alpha } => {
            let r = (1.0 + lambda).powi(2) + alpha * (1.0 - lambda * lambda + 2.0 * lambda);
            if r > 0.0 {
                out.push(Comparison::checked(
                    "prior_a2_power",
                    2.0 * alpha / r.sqrt(),
                    new,
                ));
            } else {
                out.push(Comparison::skipped(
                    "prior_a2_power",
                    new,
                    format!("prior radicand {r} is not positive"),
                ));
            }
        }
        PhiFamily::OrderBeta { beta } => {
            out.push(Comparison::checked(
                "prior_a2_beta",
                (2.0 * (1.0 - beta) / scale).sqrt(),
                new,
            ));
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn r_sigma_examples() {
        let beta0 = PhiProfile::order_beta(0.0).unwrap();
        let r = r_sigma_bounds(1.0, &beta0).unwrap();
        assert!(close(r.a2_bound, (2.0f64 / 3.0).sqrt(), 1e-15));
        assert!(close(r.a3_bound, 2.0 / 3.0, 1e-15));
        assert_eq!(r.branch, CaseBranch::CaseA);

        let r = r_sigma_bounds(0.0, &beta0).unwrap();
        assert!(close(r.a2_bound, SQRT_2, 1e-15));
        assert!(close(r.a3_bound, 2.0, 1e-15));

        let r = r_sigma_bounds(1.0, &PhiProfile::power(1.0).unwrap()).unwrap();
        assert!(close(r.a2_bound, (2.0f64 / 3.0).sqrt(), 1e-15));
    }

    #[test]
    fn lemniscate_lambda_zero() {
        let r = r_sigma_bounds(0.0, &PhiProfile::sqrt_lemniscate()).unwrap();
        assert!(close(r.a2_bound, 1.0 / 7f64.sqrt(), 1e-15));
        assert!(close(r.a3_bound, 0.5, 1e-15));
    }

    #[test]
    fn bi_starlike_examples() {
        let r = bi_starlike_bounds(&PhiProfile::order_beta(0.0).unwrap()).unwrap();
        assert!(close(r.a2_bound, SQRT_2, 1e-15));
        assert!(close(r.a3_bound, 2.0, 1e-15));

        let r = bi_starlike_bounds(&PhiProfile::power(0.5).unwrap()).unwrap();
        assert!(close(r.a2_bound, 1.0 / 1.5f64.sqrt(), 1e-15));
        assert!(close(r.a3_bound, 2.0 / 3.0, 1e-15));

        let r = bi_starlike_bounds(&PhiProfile::power(1.0 / 3.0).unwrap()).unwrap();
        assert!(close(r.a3_bound, 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn bi_starlike_second_case() {
        // B2 = 3 > B1^2 = 1 selects the second case
        let phi = PhiProfile::custom(1.0, 3.0).unwrap();
        let r = bi_starlike_bounds(&phi).unwrap();
        assert_eq!(r.branch, CaseBranch::CaseB);
        assert!(close(r.a2_bound, 1.0 / 3f64.sqrt(), 1e-15));
        assert!(close(r.a3_bound, 0.5, 1e-15));
    }

    #[test]
    fn boundary_branch() {
        // lambda = 0: tau = 1, B2 = B1^2
        let phi = PhiProfile::custom(1.5, 2.25).unwrap();
        let r = r_sigma_bounds(0.0, &phi).unwrap();
        assert_eq!(r.branch, CaseBranch::Boundary);
        // denominator reduces to tau B1
        assert!(close(r.a2_bound, 1.5 * 1.5f64.sqrt() / 1.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn invalid_inputs() {
        let phi = PhiProfile::order_beta(0.0).unwrap();
        assert_eq!(
            r_sigma_bounds(-0.5, &phi).unwrap_err(),
            Error::InvalidLambda(-0.5)
        );
        assert!(r_sigma_bounds(f64::NAN, &phi).is_err());
        assert!(fekete_szego_bound(-1.0, &phi, 0.0).is_err());
    }

    #[test]
    fn fekete_szego_examples() {
        let phi = PhiProfile::order_beta(0.0).unwrap();
        assert!(close(fekete_szego_bound(1.0, &phi, 0.0).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(fekete_szego_bound(1.0, &phi, 2.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(fekete_szego_bound(0.0, &phi, 1.0).unwrap(), 2.0, 1e-15));
    }

    #[test]
    fn specialize_examples() {
        let r = specialize(3.0, SpecialFamily::Power { alpha: 1.0 }).unwrap();
        assert!(close(r.a2_bound, 2.0 / 18f64.sqrt(), 1e-12));
        assert_eq!(r.branch, CaseBranch::CaseB);

        let r = specialize(0.0, SpecialFamily::OrderBeta { beta: 0.75 }).unwrap();
        assert!(close(r.a2_bound, 0.25 * (2.0f64 / 0.75).sqrt(), 1e-12));
        assert_eq!(r.branch, CaseBranch::CaseB);

        let r = specialize(0.0, SpecialFamily::OrderBeta { beta: 0.0 }).unwrap();
        assert!(close(r.a2_bound, SQRT_2, 1e-12));
        assert_eq!(r.branch, CaseBranch::CaseA);
    }

    #[test]
    fn specialize_bi_starlike_examples() {
        for alpha in [0.1, 1.0 / 3.0, 0.5, 0.9, 1.0] {
            specialize_bi_starlike(SpecialFamily::Power { alpha }).unwrap();
        }
        for beta in [0.0, 0.3, 0.5, 0.6, 2.0 / 3.0, 0.8, 0.99] {
            specialize_bi_starlike(SpecialFamily::OrderBeta { beta }).unwrap();
        }
    }

    #[test]
    fn prior_comparison_examples() {
        let c = compare_with_prior(1.0, &PhiProfile::order_beta(0.0).unwrap()).unwrap();
        let general = &c[0];
        assert!(close(general.prior.unwrap(), (2.0f64 / 3.0).sqrt(), 1e-15));
        assert!(close(general.new, (2.0f64 / 3.0).sqrt(), 1e-15));
        assert!(general.holds);

        let c = compare_with_prior(4.0, &PhiProfile::power(1.0).unwrap()).unwrap();
        let power = c.iter().find(|c| c.name == "prior_a2_power").unwrap();
        assert!(power.new < power.prior.unwrap() - 1e-3);
        assert!(close(power.prior.unwrap(), 2.0 / 18f64.sqrt(), 1e-15));

        let c = compare_with_prior(0.0, &PhiProfile::custom(1.0, 0.5).unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(close(c[0].prior.unwrap(), 1.5f64.sqrt(), 1e-15));
        assert!(close(c[0].new, 1.0 / 1.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn json_field_names() {
        let r = r_sigma_bounds(1.0, &PhiProfile::order_beta(0.0).unwrap()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "class", "lambda", "phi", "b1", "b2", "tau", "branch", "a2_bound", "a3_bound",
            "a3_branch", "comparisons",
        ] {
            assert!(v.get(key).is_some(), "missing {key} in {v}");
        }
        assert_eq!(v["class"], "r-sigma");
        assert_eq!(v["phi"], "beta:beta=0");
        assert_eq!(v["branch"], "case_a");
    }
}
