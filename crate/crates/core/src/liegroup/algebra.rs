//! Matrix Lie algebras with a scaled Frobenius norm.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::matfun::Matrix;
use crate::error::{Error, Result};
use crate::funcmodel::{LinearImage, SharedJet};

/// `‖xy − yx‖_F ≤ 2 ‖x‖_F ‖y‖_F`.
pub const FROBENIUS_BRACKET_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    basis: Vec<Matrix>,
    scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraInfo {
    pub name: String,
    pub matrix_dim: usize,
    pub basis_len: usize,
    pub scale: f64,
}

impl LieAlgebra {
    /// Built with scale `M = 2`, so `‖[x,y]‖_𝔤 ≤ ‖x‖_𝔤 ‖y‖_𝔤`.
    fn from_basis(name: &str, dim: usize, basis: Vec<Matrix>) -> Self {
        Self { name: name.into(), dim, basis, scale: FROBENIUS_BRACKET_BOUND }
    }

    pub fn so3() -> Self {
        let e = |i: usize, j: usize| {
            let mut m = Matrix::zeros(3, 3);
            m[(i, j)] = -1.0;
            m[(j, i)] = 1.0;
            m
        };
        Self::from_basis("so3", 3, vec![e(1, 2), e(2, 0), e(0, 1)])
    }

    /// Basis `H, E, F`.
    pub fn sl2() -> Self {
        let h = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let e = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let f = Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        Self::from_basis("sl2", 2, vec![h, e, f])
    }

    /// Strictly upper triangular `3 × 3` matrices.
    pub fn heisenberg() -> Self {
        let e = |i: usize, j: usize| {
            let mut m = Matrix::zeros(3, 3);
            m[(i, j)] = 1.0;
            m
        };
        Self::from_basis("heisenberg", 3, vec![e(0, 1), e(1, 2), e(0, 2)])
    }

    /// Diagonal `d × d` matrices.
    pub fn abelian(d: usize) -> Self {
        let basis = (0..d)
            .map(|i| {
                let mut m = Matrix::zeros(d, d);
                m[(i, i)] = 1.0;
                m
            })
            .collect();
        Self::from_basis(&format!("abelian{d}"), d, basis)
    }

    /// `so3`, `sl2`, `heisenberg`, or `abelian<d>`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "so3" => Ok(Self::so3()),
            "sl2" => Ok(Self::sl2()),
            "heisenberg" | "h3" => Ok(Self::heisenberg()),
            other => other
                .strip_prefix("abelian")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|d| *d >= 1)
                .map(Self::abelian)
                .ok_or_else(|| Error::ConfigInvalid(format!("unknown algebra {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix_dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..self.clone() }
    }

    pub fn info(&self) -> AlgebraInfo {
        AlgebraInfo { name: self.name.clone(), matrix_dim: self.dim, basis_len: self.basis.len(), scale: self.scale }
    }

    pub fn bracket(&self, x: &Matrix, y: &Matrix) -> Matrix {
        x * y - y * x
    }

    /// `‖x‖_𝔤 = c ‖x‖_F`.
    pub fn norm(&self, x: &Matrix) -> f64 {
        self.scale * x.norm()
    }

    pub fn element(&self, coords: &[f64]) -> Matrix {
        self.basis.iter().zip(coords).fold(Matrix::zeros(self.dim, self.dim), |acc, (b, c)| acc + b * *c)
    }

    /// Uniform coordinates in `[−1, 1]`, rescaled to Frobenius norm `radius`.
    pub fn random_element<R: Rng>(&self, rng: &mut R, radius: f64) -> Matrix {
        let coords: Vec<f64> = (0..self.basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = self.element(&coords);
        let n = x.norm();
        if n == 0.0 {
            x
        } else {
            x * (radius / n)
        }
    }

    /// Lifts `γ : Ω → ℝ^{basis}` to the flattened matrix-valued `Σ γ_b B_b`.
    pub fn embed(&self, coords: SharedJet) -> Result<SharedJet> {
        if coords.out_dim() != self.basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a {}-dimensional algebra",
                coords.out_dim(),
                self.basis.len()
            )));
        }
        let d2 = self.dim * self.dim;
        let rows = (0..d2)
            .map(|r| self.basis.iter().map(|b| b[(r / self.dim, r % self.dim)]).collect())
            .collect();
        Ok(Arc::new(LinearImage::new(rows, coords)?))
    }
}

/// Scale `c = M C_k` with `M = 2`, so `‖[x,y]‖_𝔤 ≤ (1/C_k) ‖x‖_𝔤 ‖y‖_𝔤`.
pub fn rescale_compatible(alg: &LieAlgebra, ck: f64) -> Result<LieAlgebra> {
    if !(ck > 0.0 && ck.is_finite()) {
        return Err(Error::ConfigInvalid(format!("rescaling constant {ck} must be positive")));
    }
    Ok(alg.with_scale(FROBENIUS_BRACKET_BOUND * ck))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn all() -> Vec<LieAlgebra> {
        vec![LieAlgebra::so3(), LieAlgebra::sl2(), LieAlgebra::heisenberg(), LieAlgebra::abelian(3)]
    }

    #[test]
    fn brackets_close_and_satisfy_jacobi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for g in all() {
            for _ in 0..50 {
                let (x, y, z) = (g.random_element(&mut rng, 1.0), g.random_element(&mut rng, 1.0), g.random_element(&mut rng, 1.0));
                assert!((g.bracket(&x, &y) + g.bracket(&y, &x)).norm() < 1e-14);
                let jac = g.bracket(&x, &g.bracket(&y, &z)) + g.bracket(&y, &g.bracket(&z, &x)) + g.bracket(&z, &g.bracket(&x, &y));
                assert!(jac.norm() < 1e-13);
                let t = 0.7;
                let lin = g.bracket(&(&x + &z * t), &y) - g.bracket(&x, &y) - g.bracket(&z, &y) * t;
                assert!(lin.norm() < 1e-14);
                // stays in the algebra: traceless for sl2, so3 antisymmetric, h3 strictly upper
                let b = g.bracket(&x, &y);
                match g.name() {
                    "sl2" => assert!(b.trace().abs() < 1e-14),
                    "so3" => assert!((&b + b.transpose()).norm() < 1e-14),
                    "heisenberg" => assert!((0..3).all(|i| (0..=i).all(|j| b[(i, j)] == 0.0))),
                    _ => assert!(b.norm() == 0.0),
                }
            }
        }
    }

    #[test]
    fn rescaled_bracket_contract() {
        assert_eq!(rescale_compatible(&LieAlgebra::so3(), 2.0).unwrap().scale(), 4.0);
        assert!(rescale_compatible(&LieAlgebra::so3(), 0.0).is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for g in all() {
            for ck in [1.0, 2.0, 37.5] {
                let h = rescale_compatible(&g, ck).unwrap();
                for _ in 0..200 {
                    let rx: f64 = rng.gen_range(0.0..3.0);
                let x = h.random_element(&mut rng, rx);
                    let ry: f64 = rng.gen_range(0.0..3.0);
                let y = h.random_element(&mut rng, ry);
                    assert!(h.norm(&h.bracket(&x, &y)) <= h.norm(&x) * h.norm(&y) / ck * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn embedding_and_names() {
        let g = LieAlgebra::by_name("abelian2").unwrap();
        assert_eq!(g.matrix_dim(), 2);
        assert!(LieAlgebra::by_name("so4").is_err());
        let h = LieAlgebra::heisenberg();
        let coords = crate::funcmodel::poly_jet(crate::funcmodel::Polynomial::constant(vec![1.0, 2.0, 3.0], 1));
        let lifted = h.embed(coords).unwrap();
        assert_eq!(lifted.eval(&[0.0]), vec![0.0, 1.0, 3.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
    }
}
