//! Narrow interface to the convex solver that handles the log-domain program.
//!
//! A geometric program in log coordinates is a linear objective under linear
//! and log-sum-exp inequality constraints. The interface below is exactly
//! that; one interior-point backend ships with the crate.

use clarabel::algebra::{CscMatrix, FloatT};
use clarabel::solver::{
    DefaultSettings, DefaultSolver, ExponentialConeT, IPSolver, NonnegativeConeT, SolverStatus,
    SupportedConeT,
};

use crate::error::{Error, Result};
use crate::gp::problem::SolverConfig;
use crate::scalar::Scalar;

/// Sparse affine expression `constant + sum_i coeff_i * y_i`.
#[derive(Debug, Clone)]
pub struct AffineExpr<S> {
    pub terms: Vec<(usize, S)>,
    pub constant: S,
}

/// Convex program in log coordinates.
#[derive(Debug, Clone)]
pub struct LogConvexProgram<S> {
    pub num_vars: usize,
    /// Minimize `sum_i coeff_i * y_i`.
    pub minimize: Vec<(usize, S)>,
    /// `expr <= 0` rows.
    pub linear_le: Vec<AffineExpr<S>>,
    /// `log(sum_k exp(expr_k)) <= 0` blocks.
    pub lse_blocks: Vec<Vec<AffineExpr<S>>>,
}

/// Backend outcome, still in log coordinates.
#[derive(Debug, Clone)]
pub struct BackendSolution<S> {
    pub y: Vec<S>,
    pub status: BackendStatus,
    pub iterations: usize,
    /// Relative primal-dual objective gap reported by the solver.
    pub rel_gap: S,
    /// Primal residual at the returned iterate.
    pub r_prim: S,
    /// Dual (stationarity) residual at the returned iterate.
    pub r_dual: S,
    /// Complementarity measure at the returned iterate.
    pub mu: S,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendStatus {
    Solved,
    AlmostSolved,
    Infeasible,
    MaxIterations,
    Failed(String),
}

/// Something that can solve a [`LogConvexProgram`].
pub trait LogConvexBackend<S: Scalar> {
    fn solve(
        &self,
        prog: &LogConvexProgram<S>,
        config: &SolverConfig<S>,
    ) -> Result<BackendSolution<S>>;
}

/// Interior-point backend built on an exponential-cone formulation: each
/// log-sum-exp block becomes one auxiliary variable and one exponential cone
/// per term plus a shared budget row `sum_k u_k <= 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClarabelBackend;

impl<S: Scalar + FloatT> LogConvexBackend<S> for ClarabelBackend {
    fn solve(
        &self,
        prog: &LogConvexProgram<S>,
        config: &SolverConfig<S>,
    ) -> Result<BackendSolution<S>> {
        let n = prog.num_vars;
        let num_terms: usize = prog.lse_blocks.iter().map(Vec::len).sum();
        let nz = n + num_terms;
        let num_nonneg = prog.linear_le.len() + prog.lse_blocks.len();
        let num_rows = num_nonneg + 3 * num_terms;

        let mut rows: Vec<usize> = Vec::new();
        let mut cols: Vec<usize> = Vec::new();
        let mut vals: Vec<S> = Vec::new();
        let mut b = vec![S::zero(); num_rows];
        let mut push = |r: usize, c: usize, v: S| {
            if v != S::zero() {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        };

        let mut row = 0usize;
        for expr in &prog.linear_le {
            for &(v, c) in &expr.terms {
                push(row, v, c);
            }
            b[row] = -expr.constant;
            row += 1;
        }
        let mut term_base = n;
        for block in &prog.lse_blocks {
            for k in 0..block.len() {
                push(row, term_base + k, S::one());
            }
            b[row] = S::one();
            row += 1;
            term_base += block.len();
        }

        // Exponential cones: (expr_k, 1, u_k).
        let mut u_idx = n;
        for block in &prog.lse_blocks {
            for expr in block {
                for &(v, c) in &expr.terms {
                    push(row, v, -c);
                }
                b[row] = expr.constant;
                b[row + 1] = S::one();
                push(row + 2, u_idx, -S::one());
                row += 3;
                u_idx += 1;
            }
        }
        debug_assert_eq!(row, num_rows);

        let a = CscMatrix::new_from_triplets(num_rows, nz, rows, cols, vals);
        let p = CscMatrix::<S>::zeros((nz, nz));
        let mut q = vec![S::zero(); nz];
        for &(v, c) in &prog.minimize {
            if v >= n {
                return Err(Error::Gp(format!(
                    "objective references variable {v} out of {n}"
                )));
            }
            q[v] += c;
        }

        let mut cones: Vec<SupportedConeT<S>> = Vec::with_capacity(1 + num_terms);
        if num_nonneg > 0 {
            cones.push(NonnegativeConeT(num_nonneg));
        }
        for _ in 0..num_terms {
            cones.push(ExponentialConeT());
        }

        let settings = DefaultSettings::<S> {
            verbose: false,
            max_iter: config.max_backend_iters,
            tol_gap_abs: config.cone_tol,
            tol_gap_rel: config.cone_tol,
            tol_feas: config.cone_tol,
            // Near-duplicate active constraints (adjacent stripe elements see
            // nearly identical distances) make the boundary ill-conditioned;
            // a shorter maximum step keeps the central path stable there.
            max_step_fraction: S::from_f64(0.9).expect("step fraction"),
            ..Default::default()
        };

        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
            .map_err(|e| Error::Gp(format!("solver setup failed: {e:?}")))?;
        solver.solve();

        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => BackendStatus::Solved,
            SolverStatus::AlmostSolved => BackendStatus::AlmostSolved,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                BackendStatus::Infeasible
            }
            SolverStatus::MaxIterations | SolverStatus::MaxTime => BackendStatus::MaxIterations,
            other => BackendStatus::Failed(format!("{other:?}")),
        };
        let denom = S::one().max(sol.obj_val.abs());
        let rel_gap = (sol.obj_val - sol.obj_val_dual).abs() / denom;
        Ok(BackendSolution {
            y: sol.x[..n].to_vec(),
            status,
            iterations: sol.iterations as usize,
            rel_gap,
            r_prim: sol.r_prim,
            r_dual: sol.r_dual,
            mu: solver.info.mu,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_rows_only() {
        // minimize -y subject to y <= 3.
        let prog = LogConvexProgram {
            num_vars: 1,
            minimize: vec![(0, -1.0f64)],
            linear_le: vec![AffineExpr {
                terms: vec![(0, 1.0)],
                constant: -3.0,
            }],
            lse_blocks: vec![],
        };
        let sol = ClarabelBackend
            .solve(&prog, &SolverConfig::default())
            .unwrap();
        assert_eq!(sol.status, BackendStatus::Solved);
        assert!((sol.y[0] - 3.0).abs() < 1e-8, "y = {}", sol.y[0]);
    }

    #[test]
    fn lse_block_binds() {
        // minimize -y subject to log(exp(y) + exp(y - 1)) <= 0:
        // exp(y)(1 + e^-1) = 1 at the optimum.
        let prog = LogConvexProgram {
            num_vars: 1,
            minimize: vec![(0, -1.0f64)],
            linear_le: vec![],
            lse_blocks: vec![vec![
                AffineExpr {
                    terms: vec![(0, 1.0)],
                    constant: 0.0,
                },
                AffineExpr {
                    terms: vec![(0, 1.0)],
                    constant: -1.0,
                },
            ]],
        };
        let sol = ClarabelBackend
            .solve(&prog, &SolverConfig::default())
            .unwrap();
        assert_eq!(sol.status, BackendStatus::Solved);
        let expect = -(1.0 + (-1.0f64).exp()).ln();
        assert!((sol.y[0] - expect).abs() < 1e-7, "y = {}", sol.y[0]);
    }

    #[test]
    fn infeasible_detected() {
        // y <= -1 and y >= 1.
        let prog = LogConvexProgram {
            num_vars: 1,
            minimize: vec![(0, 1.0f64)],
            linear_le: vec![
                AffineExpr {
                    terms: vec![(0, 1.0)],
                    constant: 1.0,
                },
                AffineExpr {
                    terms: vec![(0, -1.0)],
                    constant: 1.0,
                },
            ],
            lse_blocks: vec![],
        };
        let sol = ClarabelBackend
            .solve(&prog, &SolverConfig::default())
            .unwrap();
        assert_eq!(sol.status, BackendStatus::Infeasible);
    }
}
