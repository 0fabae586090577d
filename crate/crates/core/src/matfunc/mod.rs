//! Actions `q(tau, A) f` for real operators: shifted solves, the
//! `h`, `g` and `G` actions, and a dense matrix-exponential oracle.

mod actions;
mod expm;
mod operator;
mod solve;

pub use actions::{accelerated_action, g_action, h_action, ActionPlan, VectorSequence};
pub use expm::{expm, expm1, expm_action, reference_solution, THETA_13};
pub use operator::{BandedOperator, MAX_DENSE_DIM};
pub use solve::{shifted_solve, ShiftedFactorization, ShiftedSolver};
