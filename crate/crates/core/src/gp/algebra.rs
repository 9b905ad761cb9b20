//! Monomials and posynomials over positive variables.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of an optimization variable inside a [`GpProblem`](super::GpProblem).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// `c * prod_v x_v^(a_v)` with `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<S> {
    coeff: S,
    exponents: BTreeMap<VarId, S>,
}

impl<S: Scalar> Monomial<S> {
    /// Constant monomial. Fails unless `coeff > 0`.
    pub fn constant(coeff: S) -> Result<Self> {
        if !(coeff > S::zero()) || !coeff.is_finite() {
            return Err(Error::Domain(format!(
                "monomial coefficient must be strictly positive and finite, got {coeff}"
            )));
        }
        Ok(Self {
            coeff,
            exponents: BTreeMap::new(),
        })
    }

    /// The bare variable `x_v`.
    pub fn var(v: VarId) -> Self {
        let mut exponents = BTreeMap::new();
        exponents.insert(v, S::one());
        Self {
            coeff: S::one(),
            exponents,
        }
    }

    /// Multiply in `x_v^e` (exponents on the same variable accumulate).
    pub fn with_exponent(mut self, v: VarId, e: S) -> Self {
        let entry = self.exponents.entry(v).or_insert_with(S::zero);
        *entry += e;
        if *entry == S::zero() {
            self.exponents.remove(&v);
        }
        self
    }

    pub fn coeff(&self) -> S {
        self.coeff
    }

    pub fn exponent(&self, v: VarId) -> S {
        self.exponents.get(&v).copied().unwrap_or_else(S::zero)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (VarId, S)> + '_ {
        self.exponents.iter().map(|(&v, &e)| (v, e))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.exponents.keys().next_back().map(|v| v.0)
    }

    /// Value at a strictly positive point.
    pub fn eval(&self, x: &[S]) -> S {
        let mut v = self.coeff;
        for (&var, &e) in &self.exponents {
            v *= x[var.0].powf(e);
        }
        v
    }

    /// Natural log of the value at a strictly positive point.
    pub fn ln_eval(&self, x: &[S]) -> S {
        let mut v = self.coeff.ln();
        for (&var, &e) in &self.exponents {
            v += e * x[var.0].ln();
        }
        v
    }

    /// `self / rhs` as a monomial.
    pub fn divided_by(&self, rhs: &Monomial<S>) -> Monomial<S> {
        let mut out = self.clone();
        out.coeff = self.coeff / rhs.coeff;
        for (&v, &e) in &rhs.exponents {
            out = out.with_exponent(v, -e);
        }
        out
    }

    pub(crate) fn from_parts(coeff: S, exponents: BTreeMap<VarId, S>) -> Result<Self> {
        if !(coeff > S::zero()) || !coeff.is_finite() {
            return Err(Error::Domain(format!(
                "monomial coefficient must be strictly positive and finite, got {coeff}"
            )));
        }
        Ok(Self { coeff, exponents })
    }
}

impl<S: Scalar> fmt::Display for Monomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (v, e) in &self.exponents {
            write!(f, " * {v}^{e}")?;
        }
        Ok(())
    }
}

/// Sum of monomials with positive coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Posynomial<S> {
    terms: Vec<Monomial<S>>,
}

impl<S: Scalar> Posynomial<S> {
    pub fn new(terms: Vec<Monomial<S>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("posynomial needs at least one term".into()));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Monomial<S>] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn push(&mut self, term: Monomial<S>) {
        self.terms.push(term);
    }

    pub fn eval(&self, x: &[S]) -> S {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(Monomial::max_var).max()
    }
}

impl<S: Scalar> From<Monomial<S>> for Posynomial<S> {
    fn from(m: Monomial<S>) -> Self {
        Self { terms: vec![m] }
    }
}

impl<S: Scalar> fmt::Display for Posynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_eval_and_log() {
        let m = Monomial::constant(2.0f64)
            .unwrap()
            .with_exponent(VarId(0), 2.0)
            .with_exponent(VarId(2), -1.0);
        let x = [3.0, 99.0, 4.0];
        assert!((m.eval(&x) - 2.0 * 9.0 / 4.0).abs() < 1e-12);
        assert!((m.ln_eval(&x) - (2.0 * 9.0 / 4.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn exponents_cancel_to_zero() {
        let m = Monomial::var(VarId(1)).with_exponent(VarId(1), -1.0);
        assert_eq!(m.exponent(VarId(1)), 0.0);
        assert_eq!(m.max_var(), None);
    }

    #[test]
    fn nonpositive_coefficient_rejected() {
        assert!(Monomial::constant(0.0f64).is_err());
        assert!(Monomial::constant(-1.0f64).is_err());
        assert!(Monomial::constant(f64::NAN).is_err());
    }

    #[test]
    fn division_subtracts_exponents() {
        let a = Monomial::constant(6.0f64)
            .unwrap()
            .with_exponent(VarId(0), 3.0);
        let b = Monomial::constant(2.0f64)
            .unwrap()
            .with_exponent(VarId(0), 1.0)
            .with_exponent(VarId(1), 2.0);
        let q = a.divided_by(&b);
        assert_eq!(q.coeff(), 3.0);
        assert_eq!(q.exponent(VarId(0)), 2.0);
        assert_eq!(q.exponent(VarId(1)), -2.0);
    }

    #[test]
    fn posynomial_sums_terms() {
        let p = Posynomial::new(vec![
            Monomial::var(VarId(0)),
            Monomial::constant(1.0f64)
                .unwrap()
                .with_exponent(VarId(0), -1.0),
        ])
        .unwrap();
        assert!((p.eval(&[2.0]) - 2.5).abs() < 1e-12);
        assert_eq!(p.max_var(), Some(0));
    }

    #[test]
    fn empty_posynomial_rejected() {
        assert!(Posynomial::<f64>::new(vec![]).is_err());
    }
}
