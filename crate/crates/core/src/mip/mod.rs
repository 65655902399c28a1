//! Small exact MIP engine: a dense simplex for relaxations and a best-bound
//! branch-and-bound with a lazy-constraint callback.

mod bnb;
mod model;
mod simplex;

pub use bnb::{
    accept_all, solve_bnb, BranchAndBound, Candidate, LazyDecision, Limits, MipSolver, MipStatus, SolveOutcome,
};
pub use model::{Constraint, CutTag, LinearCut, LinearModel, Relation, VarKind, Variable};
pub use simplex::{solve_lp, solve_relaxation, LpSolution, LpStatus};

/// Integrality tolerance for binaries.
pub const INT_TOL: f64 = 1e-6;
/// Minimum violation for a cut to count as cutting off a candidate.
pub const CUT_VIOLATION: f64 = 1e-6;
