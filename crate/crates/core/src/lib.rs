//! Solvers for the probabilistic partial set covering problem (PPSC):
//! choose cover-sets at minimum cost so that at least `tau` items are covered
//! with probability `1 - epsilon`.
//!
//! * [`oracle`] evaluates the chance constraint exactly with a
//!   Poisson-binomial dynamic program.
//! * [`exact`] solves PPSC to optimality by delayed generation of strengthened
//!   no-good cuts driven by that oracle.
//! * [`benders`] solves a scenario approximation with submodular or
//!   common-coverage cuts, then repairs the answer against the oracle.
//! * [`compact`] embeds the oracle recursion into a linear MIP for the
//!   linear-threshold model.
//! * [`mip`] is the small branch-and-bound engine under all of the above.

pub mod benders;
pub mod compact;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod instance;
pub mod mip;
pub mod oracle;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use instance::{generate_paper_instance, CoverageModel, PpscInstance, Selection};
pub use report::{SolveReport, SolveStatus};
