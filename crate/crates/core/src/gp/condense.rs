//! Arithmetic-geometric-mean condensation of posynomials.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gp::algebra::{Monomial, Posynomial, VarId};
use crate::scalar::Scalar;

/// Best local monomial under-estimator of `p` around `x0`:
/// `m(x) = prod_l (u_l(x) / beta_l)^beta_l` with `beta_l = u_l(x0) / p(x0)`.
///
/// The result touches `p` at `x0` with matching gradient and satisfies
/// `m(x) <= p(x)` for every strictly positive `x`.
pub fn monomial_condense<S: Scalar>(p: &Posynomial<S>, x0: &[S]) -> Result<Monomial<S>> {
    if let Some(max_var) = p.max_var() {
        if x0.len() <= max_var {
            return Err(Error::Domain(format!(
                "expansion point has {} entries but posynomial uses x{max_var}",
                x0.len()
            )));
        }
    }
    for t in p.terms() {
        for (v, _) in t.exponents() {
            if !(x0[v.0] > S::zero()) {
                return Err(Error::Domain(format!(
                    "expansion point must be strictly positive, {v} = {}",
                    x0[v.0]
                )));
            }
        }
    }
    if p.num_terms() == 1 {
        return Ok(p.terms()[0].clone());
    }

    // Weights via a stabilized softmax over the log term values.
    let ln_u: Vec<S> = p.terms().iter().map(|t| t.ln_eval(x0)).collect();
    let max_ln = ln_u
        .iter()
        .copied()
        .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
    let sum_exp: S = ln_u.iter().map(|&l| (l - max_ln).exp()).sum();
    let ln_p = max_ln + sum_exp.ln();

    let mut ln_coeff = S::zero();
    let mut exponents: BTreeMap<VarId, S> = BTreeMap::new();
    for (term, &lu) in p.terms().iter().zip(&ln_u) {
        let beta = (lu - ln_p).exp();
        // ln of (c_l / beta_l)^beta_l
        ln_coeff += beta * (term.coeff().ln() - beta.ln());
        for (v, e) in term.exponents() {
            let acc = exponents.entry(v).or_insert_with(S::zero);
            *acc += beta * e;
        }
    }
    exponents.retain(|_, e| *e != S::zero());
    Monomial::from_parts(ln_coeff.exp(), exponents)
}
