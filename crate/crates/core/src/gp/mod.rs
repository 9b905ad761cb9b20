//! Signomial/geometric programming core: posynomial algebra, AM-GM monomial
//! condensation, a log-domain interior-point solve and the successive-GP
//! trust-region loop.

mod algebra;
mod backend;
mod condense;
mod problem;
mod sgp;
mod solve;

pub use algebra::{Monomial, Posynomial, VarId};
pub use backend::{
    AffineExpr, BackendSolution, BackendStatus, ClarabelBackend, LogConvexBackend, LogConvexProgram,
};
pub use condense::monomial_condense;
pub use problem::{GpProblem, PosyConstraint, SolveResult, SolveStatus, SolverConfig};
pub use sgp::{sgp_solve, IterationRecord, SgpOutcome, SgpSettings};
pub use solve::{gp_solve, gp_solve_with};
