//! Sparse real polynomials in a fixed number of variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    /// One exponent per variable.
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub nvars: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self {
            nvars,
            terms: vec![Monomial { coeff: c, powers: vec![0; nvars] }],
        }
    }

    pub fn variable(nvars: usize, k: usize) -> Self {
        let mut powers = vec![0; nvars];
        powers[k] = 1;
        Self {
            nvars,
            terms: vec![Monomial { coeff: 1.0, powers }],
        }
    }

    /// Dense univariate polynomial `Σ c_k x^k`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        Self {
            nvars: 1,
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, c)| Monomial { coeff: *c, powers: vec![k as u32] })
                .collect(),
        }
    }

    pub fn from_terms(nvars: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.len() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, got: p.len() });
        }
        let mut out = Self {
            nvars,
            terms: terms.into_iter().map(|(coeff, powers)| Monomial { coeff, powers }).collect(),
        };
        out.simplify();
        Ok(out)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.powers.iter().sum()).max().unwrap_or(0)
    }

    /// Merges equal monomials and drops zero coefficients.
    pub fn simplify(&mut self) {
        self.terms.sort_by(|a, b| a.powers.cmp(&b.powers));
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for m in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.powers == m.powers => last.coeff += m.coeff,
                _ => merged.push(m),
            }
        }
        merged.retain(|m| m.coeff != 0.0);
        self.terms = merged;
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coeff * m.powers.iter().zip(x).map(|(p, v)| v.powi(*p as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars];
        for m in &self.terms {
            for k in 0..self.nvars {
                let pk = m.powers[k];
                if pk == 0 {
                    continue;
                }
                let mut v = m.coeff * pk as f64;
                for (j, (p, xj)) in m.powers.iter().zip(x).enumerate() {
                    let e = if j == k { p - 1 } else { *p };
                    v *= xj.powi(e as i32);
                }
                g[k] += v;
            }
        }
        g
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.simplify();
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|m| m.coeff *= s);
        out.simplify();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    powers: a.powers.iter().zip(&b.powers).map(|(p, q)| p + q).collect(),
                });
            }
        }
        let mut out = Self { nvars: self.nvars, terms };
        out.simplify();
        out
    }
}
