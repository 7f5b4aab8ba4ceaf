use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, HermitianField, SFactor, ScalarField};
use crate::solve::{bowl, manufactured, manufactured_psi, Mode, ProblemSpec, SolveOptions};
use crate::spectra::HermitianMatrix;
use crate::symfunc::{FuncFamily, LambdaTuple};

fn tau() -> f64 {
    std::f64::consts::TAU
}

fn default_x_cells() -> usize {
    4
}

fn unit_lengths() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SConfig {
    Rectangle {
        cells: [usize; 2],
        #[serde(default = "unit_lengths")]
        lengths: [f64; 2],
    },
    Annulus { radial_cells: usize, r_in: f64, r_out: f64, angular_cells: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Torus {
        n: usize,
        cells: usize,
        #[serde(default = "tau")]
        length: f64,
    },
    Product {
        n: usize,
        #[serde(default = "default_x_cells")]
        x_cells: usize,
        #[serde(default = "tau")]
        x_length: f64,
        s: SConfig,
    },
}

impl DomainConfig {
    pub fn build(&self) -> Result<GridDomain> {
        match self {
            DomainConfig::Torus { n, cells, length } => GridDomain::torus(*n, &vec![*cells; 2 * n], &vec![*length; 2 * n]),
            DomainConfig::Product { n, x_cells, x_length, s } => {
                let s = match s {
                    SConfig::Rectangle { cells, lengths } => SFactor::rectangle(*cells, *lengths),
                    SConfig::Annulus { radial_cells, r_in, r_out, angular_cells } => {
                        if !(r_out > r_in && *r_in >= 0.0) {
                            return Err(Error::Config("annulus needs 0 <= r_in < r_out".into()));
                        }
                        SFactor::annulus(*radial_cells, *r_in, *r_out, *angular_cells)
                    }
                };
                let m = 2 * n.saturating_sub(1);
                GridDomain::product(*n, &vec![*x_cells; m], &vec![*x_length; m], &s)
            }
        }
    }
}

/// A named expression or a field file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSource {
    Expr(String),
    File { file: PathBuf },
    Scalar { scalar: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    pub tolerance: f64,
    pub max_newton: usize,
    pub continuation: bool,
    pub seed: Option<u64>,
    pub epsilon_ladder: Vec<f64>,
    pub alpha_ladder: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub boundary_shift: f64,
    pub delta: f64,
    pub samples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        let s = SolveOptions::default();
        Self {
            tolerance: s.tolerance,
            max_newton: s.max_newton,
            continuation: false,
            seed: None,
            epsilon_ladder: vec![1.0, 0.5, 0.25, 0.125],
            alpha_ladder: vec![0.2, 0.1, 0.05],
            amplitudes: vec![0.25, 0.5, 1.0],
            boundary_shift: 0.05,
            delta: s.delta,
            samples: 100,
        }
    }
}

impl RunOptions {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tolerance: self.tolerance,
            max_newton: self.max_newton,
            continuation: self.continuation,
            delta: self.delta,
            ..SolveOptions::default()
        }
    }
}

fn default_chi() -> FieldSource {
    FieldSource::Expr("identity".into())
}

fn default_phi() -> FieldSource {
    FieldSource::Expr("zero".into())
}

/// JSON problem description for the solver commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: DomainConfig,
    pub family: FuncFamily,
    #[serde(default = "default_chi")]
    pub chi: FieldSource,
    pub psi: FieldSource,
    #[serde(default = "default_phi")]
    pub phi: FieldSource,
    pub mode: Mode,
    #[serde(default)]
    pub options: RunOptions,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in {what}")))
}

fn load_field(domain: &Arc<GridDomain>, base: &Path, file: &Path) -> Result<ScalarField> {
    let path = if file.is_absolute() { file.to_path_buf() } else { base.join(file) };
    let f = File::open(&path).map_err(|e| Error::Config(format!("field file {}: {e}", path.display())))?;
    ScalarField::read_hcl1(domain.clone(), &mut BufReader::new(f))
}

impl ProblemConfig {
    /// Builds the problem; relative field paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<ProblemSpec> {
        let domain = Arc::new(self.domain.build().map_err(|e| Error::Config(e.to_string()))?);
        let family = self.family.clone();
        family.validate().map_err(|e| Error::Config(e.to_string()))?;
        if family.n != domain.n() {
            return Err(Error::Config(format!("family has n = {}, domain has n = {}", family.n, domain.n())));
        }
        let chi = match &self.chi {
            FieldSource::Expr(s) if s == "identity" => HermitianField::identity(domain.clone()),
            FieldSource::Scalar { scalar } => {
                HermitianField::constant(domain.clone(), HermitianMatrix::from_real_diagonal(&vec![*scalar; domain.n()]))?
            }
            FieldSource::File { file } => HermitianField::scalar_multiple(&load_field(&domain, base, file)?),
            FieldSource::Expr(s) => return Err(Error::Config(format!("unknown χ expression {s:?}"))),
        };
        let psi = match &self.psi {
            FieldSource::File { file } => load_field(&domain, base, file)?,
            FieldSource::Scalar { scalar } => ScalarField::constant(domain.clone(), *scalar),
            FieldSource::Expr(s) => {
                let (head, arg) = s.split_once(':').map_or((s.as_str(), None), |(h, a)| (h, Some(a)));
                match (head, arg) {
                    ("f_identity", shift) => {
                        let shift = shift.map(|a| parse_num(a, "psi")).transpose()?.unwrap_or(0.0);
                        let v = family.eval(&LambdaTuple::ones(family.n)?)?;
                        ScalarField::constant(domain.clone(), v + shift)
                    }
                    ("const", Some(a)) => ScalarField::constant(domain.clone(), parse_num(a, "psi")?),
                    ("manufactured", Some(a)) => {
                        let m = manufactured(&domain, parse_num(a, "psi")?)?;
                        manufactured_psi(&family, &chi, &m)?
                    }
                    ("bowl", Some(a)) => bowl(&domain, parse_num(a, "psi")?)?,
                    _ => return Err(Error::Config(format!("unknown ψ expression {s:?}"))),
                }
            }
        };
        let phi = match self.mode {
            Mode::Closed => None,
            Mode::Dirichlet => Some(match &self.phi {
                FieldSource::File { file } => load_field(&domain, base, file)?,
                FieldSource::Scalar { scalar } => ScalarField::constant(domain.clone(), *scalar),
                FieldSource::Expr(s) => {
                    let (head, arg) = s.split_once(':').map_or((s.as_str(), None), |(h, a)| (h, Some(a)));
                    match (head, arg) {
                        ("zero", None) => ScalarField::zeros(domain.clone()),
                        ("const", Some(a)) => ScalarField::constant(domain.clone(), parse_num(a, "phi")?),
                        ("manufactured", Some(a)) => manufactured(&domain, parse_num(a, "phi")?)?.exact,
                        _ => return Err(Error::Config(format!("unknown φ expression {s:?}"))),
                    }
                }
            }),
        };
        ProblemSpec::new(family, chi, psi, phi, self.mode).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_product_config() {
        let json = r#"{
            "domain": {"kind": "product", "n": 2, "s": {"shape": "rectangle", "cells": [8, 8]}},
            "family": {"kind": "log_det", "n": 2},
            "psi": "manufactured:0.1",
            "phi": "manufactured:0.1",
            "mode": "dirichlet",
            "options": {"tolerance": 1e-10}
        }"#;
        let c: ProblemConfig = serde_json::from_str(json).unwrap();
        let spec = c.build(Path::new(".")).unwrap();
        assert_eq!(spec.domain.counts(), &[4, 4, 9, 9]);
        assert_eq!(c.options.tolerance, 1e-10);
        assert_eq!(c.options.boundary_shift, 0.05);
    }

    #[test]
    fn parses_torus_and_shift() {
        let json = r#"{
            "domain": {"kind": "torus", "n": 2, "cells": 4},
            "family": {"kind": "sigma_root", "k": 2, "n": 2},
            "chi": {"scalar": 2.0},
            "psi": "f_identity:-1",
            "mode": "closed"
        }"#;
        let c: ProblemConfig = serde_json::from_str(json).unwrap();
        let spec = c.build(Path::new(".")).unwrap();
        assert!((spec.psi.max() - 0.0).abs() < 1e-15);
        assert!(spec.phi.is_none());
    }

    #[test]
    fn missing_file_is_config_error() {
        let json = r#"{
            "domain": {"kind": "torus", "n": 2, "cells": 4},
            "family": {"kind": "log_det", "n": 2},
            "psi": {"file": "/nonexistent/psi.hcl1"},
            "mode": "closed"
        }"#;
        let c: ProblemConfig = serde_json::from_str(json).unwrap();
        assert!(matches!(c.build(Path::new(".")), Err(Error::Config(_))));
        let bad = r#"{"domain": {"kind": "torus", "n": 2, "cells": 4}, "family": {"kind": "log_det", "n": 2}, "psi": "nope", "mode": "closed"}"#;
        let c: ProblemConfig = serde_json::from_str(bad).unwrap();
        assert!(matches!(c.build(Path::new(".")), Err(Error::Config(_))));
    }
}
