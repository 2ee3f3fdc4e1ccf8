//! q-numbers and the shared parameter/tolerance context.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::uqsu2::Spin;

pub type Scalar = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Parameters shared by every computation: the deformation `q`, the coideal
/// parameter `a` (with `t = q^a - q^{-a}`), the comparison tolerance and the
/// spin cutoff used by global checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QContext {
    pub q: f64,
    pub a: f64,
    pub tol: f64,
    pub max_spin: Spin,
}

impl QContext {
    pub fn new(q: f64, a: f64, tol: f64, max_spin: Spin) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidContext(format!("q must lie in (0,1), got {q}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidContext(format!("a must be positive, got {a}")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidContext(format!("tol must be positive, got {tol}")));
        }
        if max_spin.twice() < 2 {
            return Err(Error::InvalidContext(format!(
                "max_spin must be at least 1, got {max_spin}"
            )));
        }
        Ok(Self { q, a, tol, max_spin })
    }

    /// `t = q^a - q^{-a}`.
    pub fn t(&self) -> f64 {
        self.q.powf(self.a) - self.q.powf(-self.a)
    }

    pub fn q_int(&self, x: f64) -> f64 {
        q_int(self.q, x)
    }

    /// The q-integer `[a + m]`, i.e. the eigenvalue of `iB_t` labelled by `m`.
    pub fn shifted_q_int(&self, m: i64) -> f64 {
        q_int(self.q, self.a + m as f64)
    }

    pub fn approx_eq(&self, x: Scalar, y: Scalar) -> bool {
        approx_eq(x, y, self.tol)
    }

    pub fn approx_eq_matrix(&self, x: &CMatrix, y: &CMatrix) -> Result<bool> {
        approx_eq_matrix(x, y, self.tol)
    }
}

/// `[x] = (q^x - q^{-x}) / (q - q^{-1})`.
pub fn q_int(q: f64, x: f64) -> f64 {
    (q.powf(x) - q.powf(-x)) / (q - 1.0 / q)
}

/// `(x; base)_n = (1 - x)(1 - base x) ... (1 - base^{n-1} x)`.
pub fn q_pochhammer(x: Scalar, base: Scalar, n: usize) -> Scalar {
    let mut acc = Scalar::new(1.0, 0.0);
    let mut factor = x;
    for _ in 0..n {
        acc *= Scalar::new(1.0, 0.0) - factor;
        factor *= base;
    }
    acc
}

pub fn approx_eq(x: Scalar, y: Scalar, tol: f64) -> bool {
    (x - y).norm() <= tol
}

/// Largest entrywise modulus of `x - y`.
pub fn max_abs_diff(x: &CMatrix, y: &CMatrix) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

pub fn approx_eq_matrix(x: &CMatrix, y: &CMatrix, tol: f64) -> Result<bool> {
    Ok(max_abs_diff(x, y)? <= tol)
}

/// Largest entrywise modulus.
pub fn max_abs(x: &CMatrix) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn c(re: f64) -> Scalar {
    Scalar::new(re, 0.0)
}
