//! Hermitian eigenvalues and the bordered-matrix localization lemma.

mod batch;
mod bordered;
mod derivative;
mod hermitian;

pub use batch::{random_instance, read_instances, run_battery, BatteryRow, LemmaInstance};
pub use bordered::{
    char_poly_residual, char_poly_scale, growth_threshold, interval_census, localize, refinement_localize,
    refinement_threshold, BorderedHermitian, Census, LocalizationVerdict, RefinementVerdict,
};
pub use derivative::{matrix_derivative, pairing_gap};
pub use hermitian::{eig_hermitian, eigh, symmetric_eigenvalues, Eigh, HermitianMatrix, JACOBI_MAX_SWEEPS};
