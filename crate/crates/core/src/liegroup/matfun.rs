//! Matrix exponential and principal logarithm.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Default tolerance for [`matrix_exp`] and [`matrix_log`].
pub const DEFAULT_TOL: f64 = 1e-13;

/// Scaling and squaring around a Taylor series; the series on `x / 2^s` is
/// cut once a term drops below `tol · 2^{-s}` relative to the partial sum.
pub fn matrix_exp(x: &Matrix, tol: f64) -> Matrix {
    assert!(x.is_square(), "matrix_exp needs a square matrix");
    let n = x.nrows();
    let norm = x.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = x / 2f64.powi(s);
    let cut = (tol * 2f64.powi(-s)).max(f64::EPSILON * 0.25);
    let mut sum = Matrix::identity(n, n);
    let mut term = Matrix::identity(n, n);
    for j in 1..60 {
        term = &term * &a / j as f64;
        sum += &term;
        if term.norm() <= cut * sum.norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal logarithm for `‖g − I‖_F < 1`.
///
/// Square roots (Denman–Beavers) bring `g` within 0.05 of `I`, then
/// `log g = 2 Σ Y^{2k+1}/(2k+1)` with `Y = (g − I)(g + I)^{-1}`. Fails with
/// [`Error::NotConverged`] if `‖exp(log g) − g‖_F > tol · max(1, ‖g‖_F)`.
pub fn matrix_log(g: &Matrix, tol: f64) -> Result<Matrix> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch(format!("{}×{} matrix has no logarithm", g.nrows(), g.ncols())));
    }
    let n = g.nrows();
    let id = Matrix::identity(n, n);
    let dist = (g - &id).norm();
    if !(dist < 1.0) {
        return Err(Error::LogDomain(dist));
    }
    let mut a = g.clone();
    let mut squarings = 0;
    while (&a - &id).norm() > 0.05 {
        a = sqrt_near_identity(&a)?;
        squarings += 1;
    }
    let y = (&a - &id) * (&a + &id).try_inverse().ok_or_else(|| Error::NotConverged("g + I singular".into()))?;
    let y2 = &y * &y;
    let mut power = y.clone();
    let mut sum = y.clone();
    for k in 1..60 {
        power = &power * &y2;
        let term = &power / (2 * k + 1) as f64;
        sum += &term;
        if term.norm() <= f64::EPSILON * 0.25 * sum.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let log = sum * 2f64.powi(squarings + 1);
    let residual = (matrix_exp(&log, tol.min(DEFAULT_TOL)) - g).norm();
    if residual > tol * g.norm().max(1.0) {
        return Err(Error::NotConverged(format!("log residual {residual:e}")));
    }
    Ok(log)
}

fn sqrt_near_identity(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = Matrix::identity(n, n);
    for _ in 0..60 {
        let yi = y.clone().try_inverse().ok_or_else(|| Error::NotConverged("singular square-root iterate".into()))?;
        let zi = z.clone().try_inverse().ok_or_else(|| Error::NotConverged("singular square-root iterate".into()))?;
        let next = (&y + zi) * 0.5;
        z = (&z + yi) * 0.5;
        let step = (&next - &y).norm();
        y = next;
        if step <= 4.0 * f64::EPSILON * y.norm() {
            return Ok(y);
        }
    }
    Err(Error::NotConverged("square root".into()))
}

/// Row-major `d × d` matrix from a flat vector of length `d²`.
pub fn to_matrix(v: &[f64], d: usize) -> Matrix {
    Matrix::from_row_slice(d, d, v)
}

/// Row-major flattening.
pub fn flatten(m: &Matrix) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}
