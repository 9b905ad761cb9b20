//! Geometric-program container and solve-result types.

use crate::error::{Error, Result};
use crate::gp::algebra::{Monomial, Posynomial, VarId};
use crate::scalar::{lit, Scalar};

/// One `posynomial <= monomial` constraint.
#[derive(Debug, Clone)]
pub struct PosyConstraint<S> {
    pub label: String,
    pub lhs: Posynomial<S>,
    pub rhs: Monomial<S>,
}

/// A geometric program: maximize a monomial over positive variables subject
/// to posynomial-under-monomial constraints and per-variable box bounds.
#[derive(Debug, Clone)]
pub struct GpProblem<S> {
    var_names: Vec<String>,
    objective: Monomial<S>,
    constraints: Vec<PosyConstraint<S>>,
    bounds: Vec<(Option<S>, Option<S>)>,
}

impl<S: Scalar> GpProblem<S> {
    pub fn new() -> Self {
        Self {
            var_names: Vec::new(),
            objective: Monomial::constant(S::one()).expect("unit coefficient"),
            constraints: Vec::new(),
            bounds: Vec::new(),
        }
    }

    /// Register a new positive variable and return its id.
    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.var_names.push(name.into());
        self.bounds.push((None, None));
        VarId(self.var_names.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v.0]
    }

    /// Monomial to maximize.
    pub fn set_objective(&mut self, objective: Monomial<S>) -> Result<()> {
        self.check_vars(objective.max_var())?;
        self.objective = objective;
        Ok(())
    }

    pub fn objective(&self) -> &Monomial<S> {
        &self.objective
    }

    pub fn add_constraint(
        &mut self,
        label: impl Into<String>,
        lhs: Posynomial<S>,
        rhs: Monomial<S>,
    ) -> Result<()> {
        self.check_vars(lhs.max_var())?;
        self.check_vars(rhs.max_var())?;
        self.constraints.push(PosyConstraint {
            label: label.into(),
            lhs,
            rhs,
        });
        Ok(())
    }

    pub fn constraints(&self) -> &[PosyConstraint<S>] {
        &self.constraints
    }

    /// Box bounds for one variable; values must be strictly positive.
    pub fn set_bounds(&mut self, v: VarId, lower: Option<S>, upper: Option<S>) -> Result<()> {
        self.check_vars(Some(v.0))?;
        for b in [lower, upper].into_iter().flatten() {
            if !(b > S::zero()) || !b.is_finite() {
                return Err(Error::Gp(format!(
                    "bound for {v} must be strictly positive and finite, got {b}"
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (lower, upper) {
            if lo > hi {
                return Err(Error::Gp(format!("empty bound interval for {v}")));
            }
        }
        self.bounds[v.0] = (lower, upper);
        Ok(())
    }

    pub fn bounds(&self) -> &[(Option<S>, Option<S>)] {
        &self.bounds
    }

    fn check_vars(&self, max_var: Option<usize>) -> Result<()> {
        match max_var {
            Some(m) if m >= self.var_names.len() => Err(Error::Gp(format!(
                "variable x{m} is not registered (have {})",
                self.var_names.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Labels of constraints violated at `x` by more than `tol` in log domain,
    /// including box bounds.
    pub fn violated_at(&self, x: &[S], tol: S) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.constraints {
            let gap = c.lhs.eval(x).ln() - c.rhs.eval(x).ln();
            if !(gap <= tol) {
                out.push(format!("{} (log violation {gap})", c.label));
            }
        }
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if let Some(lo) = lo {
                let gap = lo.ln() - x[i].ln();
                if !(gap <= tol) {
                    out.push(format!(
                        "lower bound on {} (log violation {gap})",
                        self.var_names[i]
                    ));
                }
            }
            if let Some(hi) = hi {
                let gap = x[i].ln() - hi.ln();
                if !(gap <= tol) {
                    out.push(format!(
                        "upper bound on {} (log violation {gap})",
                        self.var_names[i]
                    ));
                }
            }
        }
        out
    }

    /// Plain-text dump, one statement per line, exponent maps explicit.
    /// Format: see the repository README.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "gp num_vars={}", self.num_vars());
        for (i, name) in self.var_names.iter().enumerate() {
            let _ = writeln!(s, "var x{i} {name}");
        }
        let _ = writeln!(s, "maximize {}", self.objective);
        for c in &self.constraints {
            let _ = writeln!(s, "subject_to {}: {} <= {}", c.label, c.lhs, c.rhs);
        }
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_some() || hi.is_some() {
                let fmt_opt = |o: &Option<S>| match o {
                    Some(v) => format!("{v}"),
                    None => "-".to_string(),
                };
                let _ = writeln!(s, "bound x{i} in [{}, {}]", fmt_opt(lo), fmt_opt(hi));
            }
        }
        s
    }
}

impl<S: Scalar> Default for GpProblem<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Terminal state of a GP or successive-GP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIter,
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::MaxIter => "max-iter",
            SolveStatus::NumericalFailure => "numerical-failure",
        }
    }
}

/// Solution of a GP (or the final iterate of a successive solve).
#[derive(Debug, Clone)]
pub struct SolveResult<S> {
    /// Variable values in the original (positive) domain.
    pub values: Vec<S>,
    /// Objective monomial evaluated at `values`.
    pub objective: S,
    pub status: SolveStatus,
    /// Iteration count (interior-point steps for one GP, outer iterations
    /// for a successive solve).
    pub iterations: usize,
    /// Diagnostics for non-optimal outcomes: violated constraint labels.
    pub violated: Vec<String>,
}

/// Tolerances for the log-domain solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<S> {
    /// Accepted log-domain constraint violation on the returned point.
    pub feas_tol: S,
    /// Interior-point convergence tolerance (duality gap and residuals).
    pub cone_tol: S,
    /// Iteration cap for the interior-point backend.
    pub max_backend_iters: u32,
}

impl<S: Scalar> Default for SolverConfig<S> {
    fn default() -> Self {
        Self {
            feas_tol: lit(1e-8),
            cone_tol: lit(1e-9),
            max_backend_iters: 200,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_lists_every_piece() {
        let mut p = GpProblem::<f64>::new();
        let t = p.add_var("t");
        let x = p.add_var("x");
        p.set_objective(Monomial::var(t)).unwrap();
        p.add_constraint(
            "cap",
            Posynomial::from(Monomial::var(t).with_exponent(x, 1.0)),
            Monomial::constant(1.0).unwrap(),
        )
        .unwrap();
        p.set_bounds(x, Some(2.0), None).unwrap();
        let d = p.dump();
        assert!(d.contains("gp num_vars=2"));
        assert!(d.contains("var x0 t"));
        assert!(d.contains("subject_to cap: 1 * x0^1 * x1^1 <= 1"));
        assert!(d.contains("bound x1 in [2, -]"));
    }

    #[test]
    fn unregistered_variable_rejected() {
        let mut p = GpProblem::<f64>::new();
        let _ = p.add_var("a");
        assert!(p.set_objective(Monomial::var(VarId(3))).is_err());
    }

    #[test]
    fn violations_reported_in_log_domain() {
        let mut p = GpProblem::<f64>::new();
        let x = p.add_var("x");
        p.add_constraint(
            "cap",
            Posynomial::from(Monomial::var(x)),
            Monomial::constant(1.0).unwrap(),
        )
        .unwrap();
        p.set_bounds(x, Some(0.5), None).unwrap();
        assert!(p.violated_at(&[1.0], 1e-8).is_empty());
        let v = p.violated_at(&[2.0], 1e-8);
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("cap"));
        let v = p.violated_at(&[0.25], 1e-8);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("lower bound"));
    }
}
