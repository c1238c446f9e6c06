//! Multivariate polynomials with exact analytic gradients: the function DSL
//! for interval/box set-valued maps.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sum of terms c * prod_j x_j^(p_j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub dim: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "c")]
    pub coeff: f64,
    #[serde(rename = "p")]
    pub exponents: Vec<u32>,
}

impl Poly {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidValue("non-finite coefficient".into()));
            }
        }
        Ok(Poly { dim, terms })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Poly {
            dim,
            terms: vec![Term {
                coeff: c,
                exponents: vec![0; dim],
            }],
        }
    }

    /// c * x_i
    pub fn linear(dim: usize, i: usize, c: f64) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Poly {
            dim,
            terms: vec![Term {
                coeff: c,
                exponents: e,
            }],
        }
    }

    pub fn plus(mut self, other: &Poly) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * t.exponents
                        .iter()
                        .zip(z)
                        .map(|(&p, &x)| x.powi(p as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            for j in 0..self.dim {
                let pj = t.exponents[j];
                if pj == 0 {
                    continue;
                }
                let mut v = t.coeff * pj as f64 * z[j].powi(pj as i32 - 1);
                for (i, (&p, &x)) in t.exponents.iter().zip(z).enumerate() {
                    if i != j {
                        v *= x.powi(p as i32);
                    }
                }
                g[j] += v;
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    #[test]
    fn eval_and_gradient() {
        // f(x,y) = 2 x^2 y + 3 y
        let f = Poly::new(
            2,
            vec![
                Term { coeff: 2.0, exponents: vec![2, 1] },
                Term { coeff: 3.0, exponents: vec![0, 1] },
            ],
        )
        .unwrap();
        assert!((f.eval(&[1.0, 2.0]) - 10.0).abs() < 1e-12);
        let g = f.gradient(&[1.0, 2.0]);
        assert!((g[0] - 8.0).abs() < 1e-12);
        assert!((g[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = sample::rng_from_seed(17);
        let f = Poly::new(
            3,
            vec![
                Term { coeff: 1.5, exponents: vec![2, 0, 1] },
                Term { coeff: -0.7, exponents: vec![0, 3, 0] },
                Term { coeff: 0.3, exponents: vec![1, 1, 1] },
            ],
        )
        .unwrap();
        let h = 1e-6;
        for _ in 0..50 {
            let z: Vec<f64> = (0..3).map(|_| sample::uniform_in(&mut rng, -2.0, 2.0)).collect();
            let g = f.gradient(&z);
            for j in 0..3 {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                let fd = (f.eval(&zp) - f.eval(&zm)) / (2.0 * h);
                let tol = 1e-4 * (1.0 + g[j].abs());
                assert!((g[j] - fd).abs() < tol, "z={z:?} j={j}: {} vs {}", g[j], fd);
            }
        }
    }
}
