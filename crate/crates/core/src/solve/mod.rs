//! Linear and nonlinear solvers, sub/supersolutions, degenerate sweeps,
//! domain exhaustion and estimate reports.

mod construct;
mod estimates;
pub mod linalg;
mod manufactured;
mod newton;
mod poisson;
mod problem;
mod sweeps;

pub use construct::{build_subsolution, build_supersolution, subsolution_ladder};
pub use estimates::{verify_estimates, EstimateReport, NORMAL_SLACK, SANDWICH_SLACK};
pub use manufactured::{bowl, manufactured, manufactured_psi, Manufactured};
pub use newton::{
    linearization_check, operator_values, real_coefficients, solve_closed, solve_closed_from, solve_dirichlet,
    solve_dirichlet_from,
};
pub use poisson::{poisson_dirichlet, unit_poisson};
pub use problem::{Mode, ProblemSpec, SolveOptions, SolveResult};
pub use sweeps::{
    boundary_profile, degenerate_sweep, domain_exhaustion, level_mask, stability_pair, DegenerateSweep,
    ExhaustionLevel, ExhaustionReport, StabilityReport, STABILITY_ABS, STABILITY_REL,
};
