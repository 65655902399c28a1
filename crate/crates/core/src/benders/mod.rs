//! Scenario-based solvers: the decomposition master with submodular or
//! common-coverage cuts, the deterministic equivalents, and the oracle phase
//! that repairs sampled answers.

mod cuts;
mod model;
mod solve;

pub use cuts::{
    evaluate_new_valid, new_valid_bound, separate_new_valid, separate_submodular, submodular_bound, theta_var, z_var,
    CoverageFamily, NewValidInequalitySpec, ThetaBound,
};
pub use model::{build_dep, build_dep_lt, build_master, BendersMaster};
pub use solve::{solve_dep, solve_dep_lt, solve_sampling, CutFamily, SamplingConfig};
