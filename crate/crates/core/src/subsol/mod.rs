//! Level sets of `f`, the ε-dichotomy and the C-subsolution test.

mod csub;
mod dichotomy;

pub use csub::{is_c_subsolution, AxisOutcome, CSubReport, CSubVerdict};
pub use dichotomy::{
    build_context, certify_hypothesis, dichotomy_check, epsilon_formula, epsilon_terms, sample_level_set,
    DichotomyCase, DichotomyContext, DichotomyReport, HypothesisCertificate, HYPOTHESIS_RAYS,
};

use crate::error::Result;
use crate::symfunc::{level_on_ray, level_on_shift, FuncFamily, LambdaTuple};

/// Point of `∂Γ^σ` on the ray `t·direction`.
pub fn level_set_point(f: &FuncFamily, sigma: f64, direction: &LambdaTuple) -> Result<LambdaTuple> {
    LambdaTuple::new(level_on_ray(f, direction.as_slice(), sigma)?)
}

/// Point of `∂Γ^σ` on the shift line `base + t·1⃗`.
pub fn level_set_point_shift(f: &FuncFamily, sigma: f64, base: &LambdaTuple) -> Result<LambdaTuple> {
    LambdaTuple::new(level_on_shift(f, base.as_slice(), sigma)?)
}
