//! Truncated power series of functions vanishing at the origin.
//!
//! A [`TruncatedSeries`] of order `N` stores `a_1, ..., a_N` for
//! `f(z) = a_1 z + a_2 z^2 + ... + a_N z^N`. Products and compositions of
//! such series again vanish at the origin, so the representation is closed
//! under both operations; everything is truncated at `z^N`.
//!
//! The compositional inverse of a normalized `f` (that is, `a_1 = 1`)
//! begins
//!
//! ```text
//! g(w) = w - a2 w^2 + (2 a2^2 - a3) w^3 - (5 a2^3 - 5 a2 a3 + a4) w^4 + ...
//! ```
//!
//! Note the cubic `5 a2^3` in the fourth coefficient; the quadratic
//! `5 a2^2` that is sometimes printed for it does not survive the Koebe
//! check (`z + 2z^2 + 3z^3 + 4z^4` must invert to `w - 2w^2 + 5w^3 - 14w^4`).

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 10;

/// `a_1` counts as 1 when within this distance of it.
const NORMALIZATION_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series from `a_1..a_N`; the order is `coeffs.len()`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z + tail[0] z^2 + tail[1] z^3 + ...`, zero-padded to `order`.
    pub fn normalized(tail: &[Complex64], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptySeries);
        }
        if tail.len() + 1 > order {
            return Err(Error::OrderMismatch(tail.len() + 1, order));
        }
        let mut coeffs = vec![ZERO; order];
        coeffs[0] = ONE;
        coeffs[1..=tail.len()].copy_from_slice(tail);
        Ok(Self { coeffs })
    }

    /// The identity map `z` at the given order.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![ZERO; order.max(1)];
        coeffs[0] = ONE;
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order.max(1)],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_n`; zero for `n = 0` and beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        if n == 0 || n > self.coeffs.len() {
            ZERO
        } else {
            self.coeffs[n - 1]
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.coeffs[0] - ONE).norm() <= NORMALIZATION_TOL
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    /// Cauchy product truncated at `z^N`. The product of two series without
    /// constant term starts at `z^2`, so the result has `a_1 = 0`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.multiply_unchecked(other))
    }

    fn multiply_unchecked(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = vec![ZERO; n];
        // z^i * z^j lands on z^(i+j), stored at index i+j-1.
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = i + j + 1;
                if k >= n {
                    break;
                }
                out[k] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Coefficients of `self(inner(z))` through `z^N`, accumulated in
    /// double-double precision and rounded once.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        let inner: Vec<Dd> = inner.coeffs.iter().map(|&c| widen(c)).collect();
        Ok(Self {
            coeffs: dd_compose(&self.coeffs, &inner).into_iter().map(narrow).collect(),
        })
    }

    /// Compositional inverse of a normalized series.
    ///
    /// Solves the triangular system `[w^n] f(g(w)) = 0` for `n = 2..N`
    /// one coefficient at a time: with `g_2..g_{n-1}` fixed and `g_n = 0`,
    /// the `w^n` coefficient of `f(g)` is exactly the residual that `g_n`
    /// must cancel, because `g_n` enters it only through `a_1 g_n = g_n`.
    /// Residuals are computed in double-double precision against the
    /// already rounded lower coefficients, so each `g_n` is off only by its
    /// own final rounding.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized(format!("{}", self.coeffs[0])));
        }
        let mut g = Self::identity(self.order());
        for n in 2..=self.order() {
            let inner: Vec<Dd> = g.coeffs.iter().map(|&c| widen(c)).collect();
            let residual = dd_compose(&self.coeffs[..n], &inner[..n])[n - 1];
            g.coeffs[n - 1] = -narrow(residual);
        }
        Ok(g)
    }

    /// Term-wise derivative `a_1 + 2 a_2 z + ... + N a_N z^(N-1)`.
    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &a)| a * (i as f64 + 1.0))
                .collect(),
        )
    }

    /// `f(z) / z = a_1 + a_2 z + ... + a_N z^(N-1)`.
    pub fn divided_by_z(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a) * z
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// A polynomial `c_0 + c_1 z + ... + c_M z^M` (constant term allowed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Number of stored coefficients (degree bound + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    /// Product truncated after `z^max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        let mut out = vec![ZERO; max_degree + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(max_degree + 1) {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j > max_degree {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// `z * self`, truncated at `z^order`, as a series without constant term.
    pub fn times_z(&self, order: usize) -> TruncatedSeries {
        let mut coeffs = vec![ZERO; order.max(1)];
        for (slot, &c) in coeffs.iter_mut().zip(&self.coeffs) {
            *slot = c;
        }
        TruncatedSeries { coeffs }
    }
}

type Dd = Complex<TwoFloat>;

const DD_ZERO: Dd = Complex::new(TwoFloat::from_f64(0.0), TwoFloat::from_f64(0.0));

fn widen(c: Complex64) -> Dd {
    Complex::new(TwoFloat::from(c.re), TwoFloat::from(c.im))
}

fn narrow(c: Dd) -> Complex64 {
    Complex64::new(f64::from(c.re), f64::from(c.im))
}

/// Truncated product of two coefficient lists without constant term
/// (index `i` holds `z^(i+1)`).
fn dd_multiply(a: &[Dd], b: &[Dd]) -> Vec<Dd> {
    let n = a.len();
    let mut out = vec![DD_ZERO; n];
    for (i, &x) in a.iter().enumerate() {
        if x == DD_ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n.saturating_sub(i + 1)) {
            out[i + j + 1] += x * y;
        }
    }
    out
}

fn dd_compose(outer: &[Complex64], inner: &[Dd]) -> Vec<Dd> {
    let n = outer.len();
    let mut out = vec![DD_ZERO; n];
    let mut power = inner.to_vec();
    for (k, &a) in outer.iter().enumerate() {
        if a != ZERO {
            let a = widen(a);
            for (acc, &p) in out.iter_mut().zip(&power) {
                *acc += a * p;
            }
        }
        if k + 1 < n {
            power = dd_multiply(&power, inner);
        }
    }
    out
}
