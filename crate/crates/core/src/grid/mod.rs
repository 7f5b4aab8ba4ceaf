//! Flat grids (tori and products `X × S`), fields on them and
//! finite-difference complex-differential operators.

mod domain;
mod field;
mod io;
mod ops;

pub use domain::{DomainKind, GridDomain, NodeKind, SFactor};
pub use field::{HermitianField, ScalarField};
pub use io::{read_hcl1, write_hcl1, write_field_csv, Hcl1Header, HCL1_MAGIC, PRODUCT_FLAG};
pub use ops::{
    chern_laplacian, complex_from_real, complex_hessian, complex_hessian_at, gradient_at, gradient_sup,
    inward_normal_derivative, real_hessian_at,
};
