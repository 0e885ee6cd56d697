//! Piecewise infima over the plane.
//!
//! With `G(x) = max{1, |eta x - xi|}` (`eta > 0`) and the knots
//! `gamma = (xi - 1)/eta`, `rho = (xi + 1)/eta`, three ratios are minimized
//! over `(x, y)` in the plane minus the line `x + y = 2`:
//!
//! | lemma | numerator                         |
//! |-------|-----------------------------------|
//! | L21   | `G(x) + G(y)`                     |
//! | L22   | `|2 - y| G(x) + |x| G(y)`         |
//! | L23   | `|3 - y| G(x) + |x + 1| G(y)`     |
//!
//! each divided by `|2 - x - y|`. [`closed_form`] evaluates the known
//! piecewise answer; [`oracle_infimum`] recovers it independently by grid
//! search with local refinement, a finite set of kink points and far-field
//! sweeps that realize the limits at infinity.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|2 - x - y|` below this is treated as the singular line.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Grid points this close to the singular line are skipped by the oracle.
pub const EXCLUSION_BAND: f64 = 1e-9;
/// Distance used to sample the limits at infinity.
const FAR_FIELD: f64 = 1e8;
/// Number of best coarse-grid rows refined locally.
const REFINE_SEEDS: usize = 8;
/// Local refinement window, in units of the previous step.
const REFINE_SPAN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    L21,
    L22,
    L23,
}

impl Lemma {
    pub const ALL: [Lemma; 3] = [Lemma::L21, Lemma::L22, Lemma::L23];
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::L21 => "L21",
            Lemma::L22 => "L22",
            Lemma::L23 => "L23",
        })
    }
}

impl FromStr for Lemma {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().replace(['.', '_'], "").as_str() {
            "L21" => Ok(Lemma::L21),
            "L22" => Ok(Lemma::L22),
            "L23" => Ok(Lemma::L23),
            _ => Err(format!("unknown lemma `{s}` (expected L21, L22 or L23)")),
        }
    }
}

/// Which piece of a closed form fired. Ties at piece boundaries report the
/// lower-indexed piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaBranch {
    First,
    Second,
    Otherwise,
}

impl fmt::Display for LemmaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaBranch::First => "first",
            LemmaBranch::Second => "second",
            LemmaBranch::Otherwise => "otherwise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseProblem {
    pub lemma: Lemma,
    pub xi: f64,
    pub eta: f64,
}

impl PiecewiseProblem {
    pub fn new(lemma: Lemma, xi: f64, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidEta(eta));
        }
        if !xi.is_finite() {
            return Err(Error::HypothesisViolated(format!("xi must be finite, got {xi}")));
        }
        Ok(Self { lemma, xi, eta })
    }

    pub fn gamma(&self) -> f64 {
        (self.xi - 1.0) / self.eta
    }

    pub fn rho(&self) -> f64 {
        (self.xi + 1.0) / self.eta
    }

    fn g(&self, x: f64) -> f64 {
        g_function(x, self.xi, self.eta)
    }

    /// The ratio without the singular-line check.
    fn ratio(&self, x: f64, y: f64) -> f64 {
        let numerator = match self.lemma {
            Lemma::L21 => self.g(x) + self.g(y),
            Lemma::L22 => (2.0 - y).abs() * self.g(x) + x.abs() * self.g(y),
            Lemma::L23 => (3.0 - y).abs() * self.g(x) + (x + 1.0).abs() * self.g(y),
        };
        numerator / (2.0 - x - y).abs()
    }
}

/// `G(x) = max{1, |eta x - xi|}`.
pub fn g_function(x: f64, xi: f64, eta: f64) -> f64 {
    (eta * x - xi).abs().max(1.0)
}

/// The ratio minimized by `problem.lemma` at `(x, y)`.
pub fn h_function(problem: &PiecewiseProblem, x: f64, y: f64) -> Result<f64> {
    if (2.0 - x - y).abs() < SINGULAR_TOL {
        return Err(Error::OnSingularLine { x, y });
    }
    Ok(problem.ratio(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfimumResult {
    pub value: f64,
    pub branch: LemmaBranch,
    pub gamma: f64,
    pub rho: f64,
}

/// The piecewise closed-form infimum.
///
/// * L21: `1/(1-gamma)` if `xi <= eta`, else `1/(rho-1)`.
/// * L22: `1/(1-gamma)` on `1 <= xi <= eta`, `1/(rho-1)` on
///   `eta <= xi <= 2 eta - 1`, else 1.
/// * L23: `2/(1-gamma)` on `1 - eta <= xi <= eta`, `2/(rho-1)` on
///   `eta <= xi <= 3 eta - 1`, else 1.
pub fn closed_form(problem: &PiecewiseProblem) -> InfimumResult {
    let (xi, eta) = (problem.xi, problem.eta);
    let gamma = problem.gamma();
    let rho = problem.rho();
    let (value, branch) = match problem.lemma {
        Lemma::L21 => {
            if xi <= eta {
                (1.0 / (1.0 - gamma), LemmaBranch::First)
            } else {
                (1.0 / (rho - 1.0), LemmaBranch::Second)
            }
        }
        Lemma::L22 => {
            if 1.0 <= xi && xi <= eta {
                (1.0 / (1.0 - gamma), LemmaBranch::First)
            } else if eta <= xi && xi <= 2.0 * eta - 1.0 {
                (1.0 / (rho - 1.0), LemmaBranch::Second)
            } else {
                (1.0, LemmaBranch::Otherwise)
            }
        }
        Lemma::L23 => {
            if 1.0 - eta <= xi && xi <= eta {
                (2.0 / (1.0 - gamma), LemmaBranch::First)
            } else if eta <= xi && xi <= 3.0 * eta - 1.0 {
                (2.0 / (rho - 1.0), LemmaBranch::Second)
            } else {
                (1.0, LemmaBranch::Otherwise)
            }
        }
    };
    InfimumResult {
        value,
        branch,
        gamma,
        rho,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// The coarse grid covers `[-half_width, half_width]^2`.
    pub half_width: f64,
    /// Number of local refinement rounds; each shrinks the step tenfold.
    pub levels: u32,
    /// Coarse grid spacing.
    pub base_step: f64,
}

impl Default for OracleConfig {
    /// 801 x 801 points on `[-100, 100]^2`, four refinement rounds.
    fn default() -> Self {
        Self {
            half_width: 100.0,
            levels: 4,
            base_step: 0.25,
        }
    }
}

/// Where the oracle found its minimum. Far-field points carry the finite
/// coordinate and `+-inf` for the one sent to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Argmin {
    Point { x: f64, y: f64 },
    AtInfinity { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    pub half_width: f64,
    pub levels: u32,
    pub final_step: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: Argmin,
    pub grid_stats: GridStats,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    x: f64,
    y: f64,
}

impl Best {
    const NONE: Best = Best {
        value: f64::INFINITY,
        x: f64::NAN,
        y: f64::NAN,
    };

    fn offer(&mut self, problem: &PiecewiseProblem, x: f64, y: f64) {
        if (2.0 - x - y).abs() < EXCLUSION_BAND {
            return;
        }
        let v = problem.ratio(x, y);
        if v < self.value {
            *self = Best { value: v, x, y };
        }
    }

    fn min(self, other: Best) -> Best {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

/// Brute-force infimum of [`h_function`] over the plane.
///
/// 1. Uniform grid on `[-w, w]^2` (rows evaluated in parallel), skipping
///    the band `|2 - x - y| < 1e-9`.
/// 2. The kink points `(gamma, gamma)`, `(rho, rho)`, `(gamma, rho)`,
///    `(rho, gamma)`, `(0, gamma)`, `(gamma, 0)`, `(0, rho)`, `(rho, 0)`,
///    `(gamma, 2)`, `(2, gamma)`.
/// 3. `levels` rounds of tenfold zoom around the best grid rows and every
///    kink point.
/// 4. Far-field sweeps with one or both coordinates at `+-1e8`, refined
///    the same way along the finite coordinate. These realize limits such
///    as `H(x, y) -> eta` as `x -> -inf`.
///
/// The least value seen is returned.
pub fn oracle_infimum(problem: &PiecewiseProblem, config: &OracleConfig) -> Result<OracleResult> {
    let gamma = problem.gamma();
    let rho = problem.rho();
    let required = gamma.abs().max(rho.abs()) + 2.0;
    if !(config.half_width > required) {
        return Err(Error::BoxTooSmall {
            half_width: config.half_width,
            required,
        });
    }
    if !(config.base_step > 0.0 && config.base_step < config.half_width) || config.levels > 10 {
        return Err(Error::InvalidOracleConfig(format!(
            "need 0 < base_step < half_width and levels <= 10 (got step {}, levels {})",
            config.base_step, config.levels
        )));
    }

    let w = config.half_width;
    let step = config.base_step;
    let n = (2.0 * w / step).floor() as usize + 1;
    let coord = |i: usize| -w + i as f64 * step;

    // 1. coarse grid, one row per task
    let mut rows: Vec<Best> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = coord(i);
            let mut best = Best::NONE;
            for j in 0..n {
                best.offer(problem, x, coord(j));
            }
            best
        })
        .collect();
    let mut evaluations = (n * n) as u64;

    // 2. kink points
    let kinks = [
        (gamma, gamma),
        (rho, rho),
        (gamma, rho),
        (rho, gamma),
        (0.0, gamma),
        (gamma, 0.0),
        (0.0, rho),
        (rho, 0.0),
        (gamma, 2.0),
        (2.0, gamma),
    ];
    let mut seeds: Vec<Best> = kinks
        .iter()
        .map(|&(x, y)| {
            let mut b = Best::NONE;
            b.offer(problem, x, y);
            b
        })
        .filter(|b| b.value.is_finite())
        .collect();
    evaluations += kinks.len() as u64;

    // 3. local zoom around the best rows and the kinks
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    seeds.extend(rows.iter().take(REFINE_SEEDS).copied());
    let refined: Vec<(Best, u64)> = seeds
        .par_iter()
        .map(|&seed| refine_2d(problem, seed, step, config.levels))
        .collect();
    let mut best = Best::NONE;
    for (b, evals) in refined {
        best = best.min(b);
        evaluations += evals;
    }
    let mut argmin = Argmin::Point {
        x: best.x,
        y: best.y,
    };

    // 4. far field
    let (far, far_evals) = far_field(problem, w, step, config.levels, &[gamma, rho]);
    evaluations += far_evals;
    if far.value < best.value {
        best = far;
        argmin = Argmin::AtInfinity {
            x: saturate(far.x),
            y: saturate(far.y),
        };
    }

    Ok(OracleResult {
        value: best.value,
        argmin,
        grid_stats: GridStats {
            half_width: w,
            levels: config.levels,
            final_step: step / 10f64.powi(config.levels as i32),
            evaluations,
        },
    })
}

fn saturate(v: f64) -> f64 {
    if v.abs() >= FAR_FIELD {
        v.signum() * f64::INFINITY
    } else {
        v
    }
}

fn refine_2d(problem: &PiecewiseProblem, seed: Best, base_step: f64, levels: u32) -> (Best, u64) {
    let mut best = seed;
    let mut prev = base_step;
    let mut evals = 0u64;
    for _ in 0..levels {
        let step = prev / 10.0;
        let half = (REFINE_SPAN * prev / step).round() as i64;
        let (cx, cy) = (best.x, best.y);
        for i in -half..=half {
            let x = cx + i as f64 * step;
            for j in -half..=half {
                best.offer(problem, x, cy + j as f64 * step);
            }
        }
        evals += ((2 * half + 1) * (2 * half + 1)) as u64;
        prev = step;
    }
    (best, evals)
}

/// Sweeps with one coordinate pinned at `+-FAR_FIELD` and the other on the
/// coarse grid (plus the knots), refines the best sweep point along the
/// free axis, and also probes both coordinates far away along 64 rays.
fn far_field(
    problem: &PiecewiseProblem,
    w: f64,
    step: f64,
    levels: u32,
    knots: &[f64],
) -> (Best, u64) {
    let n = (2.0 * w / step).floor() as usize + 1;
    let mut free: Vec<f64> = (0..n).map(|i| -w + i as f64 * step).collect();
    free.extend_from_slice(knots);
    free.extend_from_slice(&[0.0, 2.0, -1.0, 3.0]);

    // (pinned value, pinned is x?)
    let pins = [
        (FAR_FIELD, true),
        (-FAR_FIELD, true),
        (FAR_FIELD, false),
        (-FAR_FIELD, false),
    ];
    let at = |pin: f64, pin_x: bool, t: f64| if pin_x { (pin, t) } else { (t, pin) };

    let mut best = Best::NONE;
    let mut evals = 0u64;
    for &(pin, pin_x) in &pins {
        let mut line = Best::NONE;
        for &t in &free {
            let (x, y) = at(pin, pin_x, t);
            line.offer(problem, x, y);
        }
        evals += free.len() as u64;
        // zoom along the free coordinate
        let mut prev = step;
        for _ in 0..levels {
            let s = prev / 10.0;
            let half = (REFINE_SPAN * prev / s).round() as i64;
            let centre = if pin_x { line.y } else { line.x };
            for k in -half..=half {
                let (x, y) = at(pin, pin_x, centre + k as f64 * s);
                line.offer(problem, x, y);
            }
            evals += (2 * half + 1) as u64;
            prev = s;
        }
        best = best.min(line);
    }

    for k in 0..64 {
        let t = k as f64 * std::f64::consts::TAU / 64.0;
        best.offer(problem, FAR_FIELD * t.cos(), FAR_FIELD * t.sin());
    }
    evals += 64;
    (best, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lemma: Lemma, xi: f64, eta: f64) -> PiecewiseProblem {
        PiecewiseProblem::new(lemma, xi, eta).unwrap()
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_function(0.0, 0.0, 1.0), 1.0);
        assert_eq!(g_function(3.0, 1.0, 2.0), 5.0);
        let pr = p(Lemma::L21, 0.7, 1.9);
        assert!((g_function(pr.gamma(), 0.7, 1.9) - 1.0).abs() < 1e-15);
        assert!((g_function(pr.rho(), 0.7, 1.9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_function(&p(Lemma::L21, 1.0, 2.0), 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(h_function(&p(Lemma::L22, 1.0, 2.0), 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(h_function(&p(Lemma::L23, 1.0, 2.0), 0.0, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn h_rejects_singular_line() {
        let pr = p(Lemma::L22, 1.0, 2.0);
        assert!(matches!(
            h_function(&pr, 1.5, 0.5),
            Err(Error::OnSingularLine { .. })
        ));
    }

    #[test]
    fn invalid_eta() {
        assert!(matches!(
            PiecewiseProblem::new(Lemma::L21, 0.0, 0.0),
            Err(Error::InvalidEta(_))
        ));
        assert!(PiecewiseProblem::new(Lemma::L21, 0.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form(&p(Lemma::L21, 0.0, 1.0));
        assert_eq!((r.value, r.branch, r.gamma), (0.5, LemmaBranch::First, -1.0));

        let r = closed_form(&p(Lemma::L22, 1.5, 2.0));
        assert!((r.value - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.gamma, 0.25);

        let r = closed_form(&p(Lemma::L23, 3.0, 2.0));
        assert_eq!((r.value, r.branch, r.rho), (2.0, LemmaBranch::Second, 2.0));

        let r = closed_form(&p(Lemma::L21, 3.0, 2.0));
        assert_eq!((r.value, r.branch), (1.0, LemmaBranch::Second));

        let r = closed_form(&p(Lemma::L22, 0.5, 2.0));
        assert_eq!((r.value, r.branch), (1.0, LemmaBranch::Otherwise));
    }

    #[test]
    fn knot_spacing() {
        let r = closed_form(&p(Lemma::L23, -2.3, 0.7));
        assert!((r.rho - r.gamma - 2.0 / 0.7).abs() < 1e-14);
    }

    #[test]
    fn boundary_ties_take_lower_branch() {
        // xi = eta sits on the first/second boundary of every lemma
        for lemma in Lemma::ALL {
            let r = closed_form(&p(lemma, 2.0, 2.0));
            assert_eq!(r.branch, LemmaBranch::First, "{lemma}");
        }
    }

    #[test]
    fn oracle_examples() {
        let cfg = OracleConfig::default();
        for (lemma, xi, eta, want) in [
            (Lemma::L21, 1.0, 2.0, 1.0),
            (Lemma::L22, 0.5, 2.0, 1.0),
            (Lemma::L23, 1.0, 2.0, 2.0),
        ] {
            let o = oracle_infimum(&p(lemma, xi, eta), &cfg).unwrap();
            assert!((o.value - want).abs() <= 1e-3, "{lemma}: {o:?}");
        }
    }

    #[test]
    fn oracle_rejects_small_box() {
        let cfg = OracleConfig {
            half_width: 5.0,
            ..OracleConfig::default()
        };
        // rho = 11 / 0.5 = 22
        assert!(matches!(
            oracle_infimum(&p(Lemma::L21, 10.0, 0.5), &cfg),
            Err(Error::BoxTooSmall { .. })
        ));
    }

    #[test]
    fn lemma_parsing() {
        assert_eq!("L22".parse::<Lemma>().unwrap(), Lemma::L22);
        assert_eq!("l2.3".parse::<Lemma>().unwrap(), Lemma::L23);
        assert!("L24".parse::<Lemma>().is_err());
    }
}
