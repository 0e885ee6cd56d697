//! Ma-Minda target functions `phi(z) = 1 + B1 z + B2 z^2 + ...`.
//!
//! Every built-in family knows its closed form, its first two Taylor
//! coefficients and a membership test for the open image region
//! `phi(D)`. Custom profiles carry only `(B1, B2)`: enough for the
//! coefficient bounds, not for subordination tests.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiFamily {
    /// `(1 + A z) / (1 + B z)` with `-1 <= B < A <= 1`.
    Janowski { a: f64, b: f64 },
    /// `((1 + z) / (1 - z))^alpha` with `0 < alpha <= 1`.
    Power { alpha: f64 },
    /// `(1 + (1 - 2 beta) z) / (1 - z)` with `0 <= beta < 1`.
    OrderBeta { beta: f64 },
    /// `sqrt(1 + z)`, image bounded by the right lobe of `|w^2 - 1| = 1`.
    SqrtLemniscate,
    /// Coefficients only.
    Custom { b1: f64, b2: f64 },
}

impl PhiFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PhiFamily::Janowski { .. } => "janowski",
            PhiFamily::Power { .. } => "power",
            PhiFamily::OrderBeta { .. } => "beta",
            PhiFamily::SqrtLemniscate => "sqrt",
            PhiFamily::Custom { .. } => "custom",
        }
    }
}

/// A validated target function together with its coefficients `B1`, `B2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiProfile {
    family: PhiFamily,
    b1: f64,
    b2: f64,
}

impl PhiProfile {
    pub fn new(family: PhiFamily) -> Result<Self> {
        validate(&family)?;
        let (b1, b2) = family_coefficients(&family);
        Ok(Self { family, b1, b2 })
    }

    pub fn janowski(a: f64, b: f64) -> Result<Self> {
        Self::new(PhiFamily::Janowski { a, b })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(PhiFamily::Power { alpha })
    }

    pub fn order_beta(beta: f64) -> Result<Self> {
        Self::new(PhiFamily::OrderBeta { beta })
    }

    pub fn sqrt_lemniscate() -> Self {
        Self {
            family: PhiFamily::SqrtLemniscate,
            b1: 0.5,
            b2: -0.125,
        }
    }

    pub fn custom(b1: f64, b2: f64) -> Result<Self> {
        Self::new(PhiFamily::Custom { b1, b2 })
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// `(B1, B2)`.
    pub fn coefficients(&self) -> (f64, f64) {
        (self.b1, self.b2)
    }

    pub fn has_region(&self) -> bool {
        !matches!(self.family, PhiFamily::Custom { .. })
    }

    /// Re-checks the parameter ranges of the family.
    pub fn validate(&self) -> Result<()> {
        validate(&self.family)
    }

    /// `phi(z)` by the family's closed form (principal branches).
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match self.family {
            PhiFamily::Janowski { a, b } => Ok((one + z * a) / (one + z * b)),
            PhiFamily::Power { alpha } => Ok(((one + z) / (one - z)).powf(alpha)),
            PhiFamily::OrderBeta { beta } => Ok((one + z * (1.0 - 2.0 * beta)) / (one - z)),
            PhiFamily::SqrtLemniscate => Ok((one + z).sqrt()),
            PhiFamily::Custom { .. } => Err(Error::NoClosedForm(self.to_string())),
        }
    }

    /// Whether `w` lies in the open region `phi(D)`.
    pub fn region_contains(&self, w: Complex64) -> Result<bool> {
        self.region_margin(w).map(|m| m > 0.0)
    }

    /// Signed margin of `w` against the boundary of `phi(D)`: positive
    /// inside, zero on the boundary, negative outside.
    ///
    /// For half-planes, disks and sectors this is the Euclidean signed
    /// distance. For the lemniscate lobe it is `min(1 - |w^2 - 1|, Re w)`,
    /// which has the right sign and zero set but is not a distance.
    pub fn region_margin(&self, w: Complex64) -> Result<f64> {
        match self.family {
            PhiFamily::Janowski { a, b } => {
                if b == -1.0 {
                    Ok(w.re - (1.0 - a) / 2.0)
                } else {
                    let d = 1.0 - b * b;
                    let center = (1.0 - a * b) / d;
                    let radius = (a - b) / d;
                    Ok(radius - (w - center).norm())
                }
            }
            PhiFamily::OrderBeta { beta } => Ok(w.re - beta),
            PhiFamily::Power { alpha } => Ok(sector_margin(w, alpha * FRAC_PI_2)),
            PhiFamily::SqrtLemniscate => {
                let lobe = 1.0 - (w * w - 1.0).norm();
                Ok(lobe.min(w.re))
            }
            PhiFamily::Custom { .. } => Err(Error::NoRegionPredicate(self.to_string())),
        }
    }
}

/// Signed distance to the sector `|arg w| < half_angle` (`half_angle <= pi/2`).
fn sector_margin(w: Complex64, half_angle: f64) -> f64 {
    let r = w.norm();
    if r == 0.0 {
        return 0.0;
    }
    let slack = half_angle - w.arg().abs();
    if slack >= -FRAC_PI_2 {
        r * slack.sin()
    } else {
        -r
    }
}

fn family_coefficients(family: &PhiFamily) -> (f64, f64) {
    match *family {
        PhiFamily::Janowski { a, b } => (a - b, -b * (a - b)),
        PhiFamily::Power { alpha } => (2.0 * alpha, 2.0 * alpha * alpha),
        PhiFamily::OrderBeta { beta } => (2.0 * (1.0 - beta), 2.0 * (1.0 - beta)),
        PhiFamily::SqrtLemniscate => (0.5, -0.125),
        PhiFamily::Custom { b1, b2 } => (b1, b2),
    }
}

fn validate(family: &PhiFamily) -> Result<()> {
    let invalid = |msg: String| Err(Error::InvalidProfile(msg));
    match *family {
        PhiFamily::Janowski { a, b } => {
            if !(a.is_finite() && b.is_finite()) {
                return invalid(format!("janowski parameters must be finite (A={a}, B={b})"));
            }
            if !(-1.0 <= b && b < a && a <= 1.0) {
                return invalid(format!("janowski needs -1 <= B < A <= 1 (A={a}, B={b})"));
            }
        }
        PhiFamily::Power { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return invalid(format!("power needs 0 < alpha <= 1 (alpha={alpha})"));
            }
        }
        PhiFamily::OrderBeta { beta } => {
            if !(0.0..1.0).contains(&beta) {
                return invalid(format!("beta needs 0 <= beta < 1 (beta={beta})"));
            }
        }
        PhiFamily::SqrtLemniscate => {}
        PhiFamily::Custom { b1, b2 } => {
            if !b1.is_finite() {
                return invalid(format!("custom B1 must be finite (b1={b1})"));
            }
            if b1 <= 0.0 {
                return Err(Error::B1NotPositive(b1));
            }
            if !b2.is_finite() {
                return invalid(format!("custom B2 must be a finite real (b2={b2})"));
            }
        }
    }
    Ok(())
}

impl fmt::Display for PhiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            PhiFamily::Janowski { a, b } => write!(f, "janowski:A={a},B={b}"),
            PhiFamily::Power { alpha } => write!(f, "power:alpha={alpha}"),
            PhiFamily::OrderBeta { beta } => write!(f, "beta:beta={beta}"),
            PhiFamily::SqrtLemniscate => write!(f, "sqrt"),
            PhiFamily::Custom { b1, b2 } => write!(f, "custom:b1={b1},b2={b2}"),
        }
    }
}

impl FromStr for PhiProfile {
    type Err = Error;

    /// Parses `janowski:A=1,B=-1`, `power:alpha=0.5`, `beta:beta=0.25`,
    /// `sqrt` or `custom:b1=2,b2=1.5`.
    fn from_str(input: &str) -> Result<Self> {
        let syntax = |reason: &str| Error::ProfileSyntax {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s, None),
        };

        let mut params: Vec<(String, f64)> = Vec::new();
        if let Some(rest) = rest {
            for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| syntax("parameters must look like key=value"))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| syntax(&format!("`{}` is not a number", v.trim())))?;
                params.push((k.trim().to_string(), v));
            }
        }
        let take = |params: &mut Vec<(String, f64)>, key: &str| -> Result<f64> {
            let pos = params
                .iter()
                .position(|(k, _)| k == key || k.eq_ignore_ascii_case(key))
                .ok_or_else(|| syntax(&format!("missing parameter `{key}`")))?;
            Ok(params.remove(pos).1)
        };

        let family = match name.to_ascii_lowercase().as_str() {
            "janowski" => {
                let a = take(&mut params, "A")?;
                let b = take(&mut params, "B")?;
                PhiFamily::Janowski { a, b }
            }
            "power" => PhiFamily::Power {
                alpha: take(&mut params, "alpha")?,
            },
            "beta" => PhiFamily::OrderBeta {
                beta: take(&mut params, "beta")?,
            },
            "sqrt" => PhiFamily::SqrtLemniscate,
            "custom" => {
                let b1 = take(&mut params, "b1")?;
                let b2 = take(&mut params, "b2")?;
                PhiFamily::Custom { b1, b2 }
            }
            other => return Err(syntax(&format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(syntax(&format!("unexpected parameter `{k}`")));
        }
        PhiProfile::new(family)
    }
}

impl Serialize for PhiProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhiProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
