//! Seeded random test functions and the JSON corpus file.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcmodel::{Envelope, JetSum, Polynomial, ScalarFamily, SharedJet, SymMultilinearMap, UNBOUNDED_ORDER};

pub const CORPUS_SCHEMA_VERSION: u32 = 1;

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Polynomial with symmetrized homogeneous parts, coefficients in `[-1, 1]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, in_dim: usize, out_dim: usize, degree: usize) -> Polynomial {
    let parts = (0..=degree)
        .map(|j| {
            let len = in_dim.pow(j as u32) * out_dim;
            SymMultilinearMap::from_coeffs(j, in_dim, out_dim, uniform_vec(rng, len)).expect("sized")
        })
        .collect();
    Polynomial::new(parts).expect("consistent parts")
}

/// Two ridge functions `f(⟨a, x⟩) w` plus a quadratic polynomial.
pub fn random_smooth<R: Rng>(rng: &mut R, in_dim: usize, out_dim: usize) -> SharedJet {
    let families = [ScalarFamily::Sin, ScalarFamily::Cos, ScalarFamily::Exp];
    let mut terms: Vec<SharedJet> = (0..2)
        .map(|_| {
            let family = families[rng.gen_range(0..families.len())];
            let a: Vec<f64> = uniform_vec(rng, in_dim).iter().map(|c| 2.0 * c).collect();
            let w = uniform_vec(rng, out_dim);
            Arc::new(Envelope::new(family, a, w, UNBOUNDED_ORDER)) as SharedJet
        })
        .collect();
    terms.push(Arc::new(random_polynomial(rng, in_dim, out_dim, 2)));
    Arc::new(JetSum::new(terms).expect("same shapes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub id: String,
    pub in_dim: usize,
    pub out_dim: usize,
    /// `parts[j]` lists the order-j coefficients, multi-index row-major with the
    /// output index last.
    pub parts: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterRecord {
    pub sign: i8,
    pub function: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordRecord {
    pub id: String,
    pub algebra: String,
    pub letters: Vec<LetterRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFile {
    pub schema_version: u32,
    pub functions: Vec<PolynomialRecord>,
    #[serde(default)]
    pub words: Vec<WordRecord>,
}

impl PolynomialRecord {
    pub fn from_polynomial(id: impl Into<String>, p: &Polynomial) -> Self {
        use crate::funcmodel::JetFunction;
        Self {
            id: id.into(),
            in_dim: p.in_dim(),
            out_dim: p.out_dim(),
            parts: p.parts().iter().map(|t| t.coeffs().to_vec()).collect(),
        }
    }

    /// Symmetrizes each part.
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let parts = self
            .parts
            .iter()
            .enumerate()
            .map(|(j, c)| SymMultilinearMap::from_coeffs(j, self.in_dim, self.out_dim, c.clone()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::ConfigInvalid(format!("function {}: {e}", self.id)))?;
        Polynomial::new(parts)
    }
}

impl CorpusFile {
    pub fn generate<R: Rng>(rng: &mut R, count: usize, in_dim: usize, out_dim: usize, degree: usize) -> Self {
        let functions = (0..count)
            .map(|i| PolynomialRecord::from_polynomial(format!("f{i:04}"), &random_polynomial(rng, in_dim, out_dim, degree)))
            .collect();
        Self { schema_version: CORPUS_SCHEMA_VERSION, functions, words: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        if c.schema_version != CORPUS_SCHEMA_VERSION {
            return Err(Error::ConfigInvalid(format!("unsupported corpus schema {}", c.schema_version)));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn polynomials(&self) -> Result<Vec<(String, Polynomial)>> {
        self.functions.iter().map(|r| Ok((r.id.clone(), r.to_polynomial()?))).collect()
    }

    pub fn function(&self, id: &str) -> Result<Polynomial> {
        self.functions
            .iter()
            .find(|r| r.id == id)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown function id {id}")))?
            .to_polynomial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn corpus_roundtrip_symmetrizes() {
        let json = r#"{"schema_version":1,"functions":[
            {"id":"q","in_dim":2,"out_dim":1,"parts":[[0.5],[1.0,0.0],[1.0,2.0,0.0,3.0]]}]}"#;
        let c = CorpusFile::from_json(json).unwrap();
        let p = c.function("q").unwrap();
        assert_eq!(p.parts()[2].coeffs(), &[1.0, 1.0, 1.0, 3.0]);
        let again = CorpusFile::from_json(&c.to_json()).unwrap();
        assert_eq!(again, c);
        assert!(c.function("missing").is_err());
    }

    #[test]
    fn generation_is_seeded() {
        let a = CorpusFile::generate(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), 4, 2, 1, 3);
        let b = CorpusFile::generate(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), 4, 2, 1, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn bad_schema_rejected() {
        assert!(CorpusFile::from_json(r#"{"schema_version":9,"functions":[]}"#).is_err());
        let bad = r#"{"schema_version":1,"functions":[{"id":"q","in_dim":2,"out_dim":1,"parts":[[0.5],[1.0]]}]}"#;
        assert!(CorpusFile::from_json(bad).unwrap().polynomials().is_err());
    }
}
