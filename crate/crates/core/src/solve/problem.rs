use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::estimates::EstimateReport;
use crate::error::{Error, Result};
use crate::grid::{GridDomain, HermitianField, ScalarField};
use crate::symfunc::FuncFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Closed,
    Dirichlet,
}

/// `f(λ(χ + i∂∂̄u)) = ψ` on a grid, with boundary data `φ` in Dirichlet mode.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: Arc<GridDomain>,
    pub family: FuncFamily,
    pub chi: HermitianField,
    pub psi: ScalarField,
    pub phi: Option<ScalarField>,
    pub mode: Mode,
}

impl ProblemSpec {
    pub fn new(
        family: FuncFamily,
        chi: HermitianField,
        psi: ScalarField,
        phi: Option<ScalarField>,
        mode: Mode,
    ) -> Result<Self> {
        let domain = psi.domain().clone();
        let spec = Self { domain, family, chi, psi, phi, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        self.family.validate()?;
        if self.family.n != d.n() {
            return Err(Error::Domain(format!("family has n = {}, grid has n = {}", self.family.n, d.n())));
        }
        if !self.chi.domain().same_geometry(d) || !self.psi.domain().same_geometry(d) {
            return Err(Error::Domain("χ and ψ must live on the problem grid".into()));
        }
        match self.mode {
            Mode::Closed => {
                if !d.is_fully_periodic() {
                    return Err(Error::Domain("closed mode needs a fully periodic grid".into()));
                }
            }
            Mode::Dirichlet => {
                if !d.has_boundary() {
                    return Err(Error::Domain("Dirichlet mode needs boundary nodes".into()));
                }
                match &self.phi {
                    Some(phi) if phi.domain().same_geometry(d) => {}
                    Some(_) => return Err(Error::Domain("φ must live on the problem grid".into())),
                    None => return Err(Error::Domain("Dirichlet mode needs boundary data φ".into())),
                }
            }
        }
        Ok(())
    }

    /// `inf ψ ≤ sup_∂Γ f`: the equation degenerates somewhere.
    pub fn is_degenerate(&self) -> bool {
        self.psi.min() <= self.family.sup_boundary() + 1e-12
    }

    pub fn phi(&self) -> Result<&ScalarField> {
        self.phi.as_ref().ok_or_else(|| Error::Domain("problem has no boundary data".into()))
    }

    /// Same data on a grid with identical geometry and another mask.
    pub fn restricted(&self, domain: Arc<GridDomain>) -> Result<Self> {
        Ok(Self {
            domain: domain.clone(),
            family: self.family.clone(),
            chi: self.chi.on_domain(domain.clone())?,
            psi: self.psi.on_domain(domain.clone())?,
            phi: self.phi.as_ref().map(|p| p.on_domain(domain)).transpose()?,
            mode: self.mode,
        })
    }

    pub fn with_psi(&self, psi: ScalarField) -> Result<Self> {
        let mut s = self.clone();
        s.psi = psi.on_domain(self.domain.clone())?;
        Ok(s)
    }

    pub fn with_phi(&self, phi: ScalarField) -> Result<Self> {
        let mut s = self.clone();
        s.phi = Some(phi.on_domain(self.domain.clone())?);
        Ok(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Relative residual target; stop at `‖R‖∞ ≤ tolerance·(1 + ‖ψ‖∞)`.
    pub tolerance: f64,
    pub max_newton: usize,
    pub continuation: bool,
    pub continuation_steps: usize,
    pub linear_tolerance: f64,
    pub max_linear: usize,
    /// Strictness `δ` of constructed subsolutions.
    pub delta: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_newton: 60,
            continuation: false,
            continuation_steps: 8,
            linear_tolerance: 1e-11,
            max_linear: 20_000,
            delta: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: ScalarField,
    pub c: Option<f64>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub admissible: bool,
    pub estimates: EstimateReport,
    /// Ladder parameter of the constructed subsolution, if any.
    pub subsolution_t: Option<f64>,
    pub continuation_stages: usize,
}

impl SolveResult {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}
