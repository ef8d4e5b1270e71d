use serde::Serialize;

/// Outcome of checking `lhs ≤ rhs` at multiplicative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn leq(lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs * (1.0 + tol) + f64::MIN_POSITIVE;
        Self { lhs, rhs, pass }
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn close(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { lhs, rhs, pass: (lhs - rhs).abs() <= tol }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Default multiplicative tolerance for sampled inequalities.
pub const DEFAULT_TOL: f64 = 1e-9;
