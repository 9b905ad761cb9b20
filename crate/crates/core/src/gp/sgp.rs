//! Successive GP: iterate condense-at-point, trust-region bounds, solve,
//! recenter, until the objective stalls or the iteration cap is reached.

use clarabel::algebra::FloatT;

use crate::error::{Error, Result};
use crate::gp::algebra::VarId;
use crate::gp::problem::{GpProblem, SolveResult, SolveStatus, SolverConfig};
use crate::gp::solve::gp_solve;
use crate::scalar::Scalar;

/// Settings of the successive loop.
#[derive(Debug, Clone, Copy)]
pub struct SgpSettings<S> {
    /// Trust parameter; each iteration constrains trust variables to
    /// `[x0/omega, x0*omega]`. Must exceed 1.
    pub omega: S,
    /// Stop once the objective changes by at most this much between iterations.
    pub epsilon: S,
    /// Maximum number of GP solves.
    pub max_iters: usize,
    pub solver: SolverConfig<S>,
}

impl<S: Scalar> Default for SgpSettings<S> {
    fn default() -> Self {
        Self {
            omega: crate::scalar::lit(1.1),
            epsilon: crate::scalar::lit(1e-6),
            max_iters: 100,
            solver: SolverConfig::default(),
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone)]
pub struct IterationRecord<S> {
    pub objective: S,
    pub point: Vec<S>,
}

/// Final result plus the accepted iterate per iteration.
#[derive(Debug, Clone)]
pub struct SgpOutcome<S> {
    pub result: SolveResult<S>,
    pub trace: Vec<IterationRecord<S>>,
}

/// Run the successive-approximation loop.
///
/// `build` produces the GP approximation of the signomial problem around the
/// given point (all required condensations applied, no trust bounds); the
/// loop adds the trust bounds for `trust_vars`, solves, and recenters on the
/// solution. The first GP being infeasible is reported as an infeasible
/// result carrying the violated constraint labels; a later failure returns
/// the best iterate found so far flagged as a numerical failure.
pub fn sgp_solve<S, F>(
    build: F,
    trust_vars: &[VarId],
    x0: &[S],
    settings: &SgpSettings<S>,
) -> Result<SgpOutcome<S>>
where
    S: Scalar + FloatT,
    F: Fn(&[S]) -> Result<GpProblem<S>>,
{
    if !(settings.omega > S::one()) {
        return Err(Error::Domain("omega must exceed 1".into()));
    }
    if !(settings.epsilon > S::zero()) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    if settings.max_iters == 0 {
        return Err(Error::Domain("max_iters must be at least 1".into()));
    }
    for (i, &v) in x0.iter().enumerate() {
        if !(v > S::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "initial point must be strictly positive, x{i} = {v}"
            )));
        }
    }

    // Recorded traces are guaranteed non-decreasing within this slack; an
    // inexact solve that regresses further ends the run instead.
    let monotone_slack = crate::scalar::lit::<S>(1e-9);

    let mut current = x0.to_vec();
    let mut trace: Vec<IterationRecord<S>> = Vec::new();
    let mut converged = false;
    let mut floor_failure = false;

    for iter in 1..=settings.max_iters {
        let mut problem = build(&current)?;
        for &v in trust_vars {
            let c = current[v.0];
            problem.set_bounds(v, Some(c / settings.omega), Some(c * settings.omega))?;
        }
        let sol = gp_solve(&problem, &settings.solver)?;
        match sol.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible if iter == 1 => {
                let violated = problem.violated_at(&current, settings.solver.feas_tol);
                return Ok(SgpOutcome {
                    result: SolveResult {
                        values: current,
                        objective: S::nan(),
                        status: SolveStatus::Infeasible,
                        iterations: 0,
                        violated,
                    },
                    trace,
                });
            }
            _ => {
                // Keep the best point seen so far; flag the run.
                let (values, objective) = match trace.last() {
                    Some(rec) => (rec.point.clone(), rec.objective),
                    None => (current, S::nan()),
                };
                return Ok(SgpOutcome {
                    result: SolveResult {
                        values,
                        objective,
                        status: SolveStatus::NumericalFailure,
                        iterations: trace.len(),
                        violated: sol.violated,
                    },
                    trace,
                });
            }
        }

        if let Some(last) = trace.last() {
            let delta = sol.objective - last.objective;
            if delta < -monotone_slack {
                // Solver accuracy floor: the fresh iterate is worse than the
                // incumbent. Stop on the incumbent; a small step counts as
                // the stall condition, a large one as a failure.
                if -delta <= settings.epsilon {
                    converged = true;
                } else {
                    floor_failure = true;
                }
                break;
            }
            if delta.abs() <= settings.epsilon {
                trace.push(IterationRecord {
                    objective: sol.objective,
                    point: sol.values,
                });
                converged = true;
                break;
            }
        }
        current = sol.values.clone();
        trace.push(IterationRecord {
            objective: sol.objective,
            point: sol.values,
        });
        let _ = iter;
    }

    let last = trace.last().expect("at least one accepted iterate");
    let status = if converged {
        SolveStatus::Optimal
    } else if floor_failure {
        SolveStatus::NumericalFailure
    } else {
        SolveStatus::MaxIter
    };
    Ok(SgpOutcome {
        result: SolveResult {
            values: last.point.clone(),
            objective: last.objective,
            status,
            iterations: trace.len(),
            violated: Vec::new(),
        },
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::algebra::{Monomial, Posynomial};
    use crate::gp::condense::monomial_condense;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        let denom = b.abs().max(1e-300);
        assert!(
            ((a - b) / denom).abs() <= tol,
            "expected {b}, got {a} (rel tol {tol})"
        );
    }

    /// maximize t subject to t <= d1^-4 + d2^-4, d1 >= a, d2 >= c.
    /// True optimum: t = a^-4 + c^-4 with both distance floors active.
    fn toy_recipe(a: f64, c: f64) -> impl Fn(&[f64]) -> crate::error::Result<GpProblem<f64>> {
        move |point: &[f64]| {
            let mut p = GpProblem::<f64>::new();
            let t = p.add_var("t");
            let d1 = p.add_var("d1");
            let d2 = p.add_var("d2");
            p.set_objective(Monomial::var(t))?;
            let sum = Posynomial::new(vec![
                Monomial::constant(1.0)?.with_exponent(d1, -4.0),
                Monomial::constant(1.0)?.with_exponent(d2, -4.0),
            ])?;
            let condensed = monomial_condense(&sum, point)?;
            p.add_constraint("power", Posynomial::from(Monomial::var(t)), condensed)?;
            p.add_constraint(
                "floor1",
                Posynomial::from(Monomial::constant(a)?.with_exponent(d1, -1.0)),
                Monomial::constant(1.0)?,
            )?;
            p.add_constraint(
                "floor2",
                Posynomial::from(Monomial::constant(c)?.with_exponent(d2, -1.0)),
                Monomial::constant(1.0)?,
            )?;
            Ok(p)
        }
    }

    #[test]
    fn toy_sgp_reaches_analytic_optimum() {
        let (a, c) = (2.0, 3.0);
        let recipe = toy_recipe(a, c);
        let x0 = vec![1.0, a + 1.0, c + 2.0];
        let settings = SgpSettings::<f64> {
            epsilon: 1e-10,
            ..Default::default()
        };
        let out = sgp_solve(&recipe, &[VarId(1), VarId(2)], &x0, &settings).unwrap();
        assert_eq!(out.result.status, SolveStatus::Optimal);
        let expect = a.powi(-4) + c.powi(-4);
        assert_rel(out.result.objective, expect, 1e-6);
        assert_rel(out.result.values[1], a, 1e-5);
        assert_rel(out.result.values[2], c, 1e-5);
        // Monotone trace.
        for w in out.trace.windows(2) {
            assert!(w[1].objective >= w[0].objective - 1e-9);
        }
    }

    #[test]
    fn pure_gp_converges_immediately() {
        // No signomial structure: the recipe ignores the point.
        let recipe = |_: &[f64]| {
            let mut p = GpProblem::<f64>::new();
            let t = p.add_var("t");
            p.set_objective(Monomial::var(t))?;
            p.add_constraint(
                "cap",
                Posynomial::from(Monomial::var(t)),
                Monomial::constant(5.0)?,
            )?;
            Ok(p)
        };
        let out = sgp_solve(recipe, &[], &[1.0], &SgpSettings::default()).unwrap();
        assert_eq!(out.result.status, SolveStatus::Optimal);
        assert!(out.trace.len() <= 2, "took {} iterations", out.trace.len());
        assert_rel(out.result.objective, 5.0, 1e-7);
    }

    #[test]
    fn tight_trust_region_limits_step() {
        let recipe = toy_recipe(2.0, 2.0);
        let x0 = vec![1.0, 4.0, 4.0];
        let settings = SgpSettings::<f64> {
            omega: 1.0 + 1e-4,
            epsilon: 1e-12,
            max_iters: 1,
            ..Default::default()
        };
        let out = sgp_solve(&recipe, &[VarId(1), VarId(2)], &x0, &settings).unwrap();
        let d1 = out.result.values[1];
        assert!((4.0 / (1.0 + 1.1e-4)..=4.0 * (1.0 + 1.1e-4)).contains(&d1));
    }

    #[test]
    fn infeasible_first_gp_reports_constraints() {
        let recipe = |_: &[f64]| {
            let mut p = GpProblem::<f64>::new();
            let t = p.add_var("t");
            p.set_objective(Monomial::var(t))?;
            // t >= 4 and t <= 2 cannot hold together.
            p.add_constraint(
                "floor",
                Posynomial::from(Monomial::constant(4.0)?.with_exponent(t, -1.0)),
                Monomial::constant(1.0)?,
            )?;
            p.add_constraint(
                "cap",
                Posynomial::from(Monomial::var(t)),
                Monomial::constant(2.0)?,
            )?;
            Ok(p)
        };
        let out = sgp_solve(recipe, &[], &[1.0], &SgpSettings::default()).unwrap();
        assert_eq!(out.result.status, SolveStatus::Infeasible);
        assert!(!out.result.violated.is_empty());
    }

    #[test]
    fn rejects_bad_settings_and_start() {
        let recipe = toy_recipe(2.0, 2.0);
        let bad = SgpSettings::<f64> {
            omega: 1.0,
            ..Default::default()
        };
        assert!(sgp_solve(&recipe, &[], &[1.0, 3.0, 3.0], &bad).is_err());
        let good = SgpSettings::<f64>::default();
        assert!(sgp_solve(&recipe, &[], &[1.0, -3.0, 3.0], &good).is_err());
    }
}
