//! Multivariate polynomials in several complex variables.
//!
//! Superpotentials and gauge kinetic functions are holomorphic polynomials;
//! a term list keeps evaluation and exact differentiation simple.

use num_complex::Complex64;

/// One monomial: coeff * prod_i z_i^{exponents[i]}.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: Complex64,
}

/// Polynomial in `nvars` complex variables, stored as a term list.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: Vec<Term>,
}

impl Poly {
    pub fn new(nvars: usize, terms: Vec<Term>) -> Self {
        for t in &terms {
            assert_eq!(t.exponents.len(), nvars, "term arity mismatch");
        }
        Poly { nvars, terms }
    }

    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Poly {
            nvars,
            terms: vec![Term {
                exponents: vec![0; nvars],
                coeff: c,
            }],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == Complex64::ZERO)
    }

    /// True when every coefficient is real; such polynomials commute with
    /// complex conjugation of the argument.
    pub fn has_real_coeffs(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == 0.0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.nvars);
        let mut acc = Complex64::ZERO;
        for t in &self.terms {
            let mut m = t.coeff;
            for (zi, &e) in z.iter().zip(&t.exponents) {
                m *= zi.powu(e);
            }
            acc += m;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        assert!(var < self.nvars);
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[var] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let n = e[var];
                e[var] = n - 1;
                Term {
                    exponents: e,
                    coeff: t.coeff * n as f64,
                }
            })
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Gradient: all first partials evaluated at z.
    pub fn grad(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.nvars).map(|i| self.derivative(i).eval(z)).collect()
    }
}
