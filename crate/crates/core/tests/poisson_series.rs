use std::f64::consts::PI;
use std::sync::Arc;

use hcl_core::grid::{inward_normal_derivative, GridDomain, NodeKind, SFactor, ScalarField};
use hcl_core::solve::{poisson_dirichlet, unit_poisson};

/// `h(x, y)` for `¼Δh = 1` on the unit square, `h = 0` on the boundary, by
/// the double sine series over odd modes.
fn series(x: f64, y: f64, modes: usize) -> f64 {
    let mut s = 0.0;
    for m in (1..=modes).step_by(2) {
        for n in (1..=modes).step_by(2) {
            let (mf, nf) = (m as f64, n as f64);
            let coeff = -16.0 / (PI.powi(4) * mf * nf * (mf * mf + nf * nf));
            s += coeff * (mf * PI * x).sin() * (nf * PI * y).sin();
        }
    }
    4.0 * s
}

fn square(cells: usize) -> Arc<GridDomain> {
    Arc::new(GridDomain::product(1, &[], &[], &SFactor::unit_square(cells)).unwrap())
}

fn centre(h: &ScalarField) -> f64 {
    let d = h.domain();
    let c = (d.counts()[0] - 1) / 2;
    h.get(d.index(&[c, c]))
}

#[test]
fn centre_value_converges_to_series() {
    let exact = series(0.5, 0.5, 801);
    assert!((exact + 0.294685).abs() < 1e-5, "{exact}");
    let e32 = (centre(&unit_poisson(&square(32)).unwrap()) - exact).abs();
    let e64 = (centre(&unit_poisson(&square(64)).unwrap()) - exact).abs();
    assert!(e64 / exact.abs() < 5e-4);
    let order = (e32 / e64).log2();
    assert!(order > 1.8, "order {order}");
}

#[test]
fn off_centre_points_match_series() {
    let h = unit_poisson(&square(64)).unwrap();
    let d = h.domain();
    for (i, j) in [(16, 16), (8, 40), (48, 20)] {
        let (x, y) = (i as f64 / 64.0, j as f64 / 64.0);
        let v = h.get(d.index(&[i, j]));
        assert!((v - series(x, y, 801)).abs() < 2e-4, "({x}, {y})");
    }
}

#[test]
fn sign_conditions() {
    let h = unit_poisson(&square(32)).unwrap();
    let d = h.domain();
    for i in d.nodes_of(NodeKind::Interior) {
        assert!(h.get(i) < 0.0);
    }
    for i in d.nodes_of(NodeKind::Boundary) {
        assert_eq!(h.get(i), 0.0);
        let c = d.multi_index(i);
        let corner = (c[0] == 0 || c[0] == 32) && (c[1] == 0 || c[1] == 32);
        if !corner {
            // ν the inner unit normal
            let (_, dnu) = inward_normal_derivative(&h, i).unwrap();
            assert!(dnu < 0.0);
        }
    }
}

#[test]
fn harmonic_boundary_data_reproduced() {
    // x² − y² is harmonic and quadratic, so the five-point solve is exact
    let d = square(16);
    let g = ScalarField::from_fn(d.clone(), |c| c[0] * c[0] - c[1] * c[1]).unwrap();
    let u = poisson_dirichlet(&d, &ScalarField::zeros(d.clone()), &g).unwrap();
    assert!(u.dist(&g).unwrap() < 1e-11);
}

#[test]
fn torus_has_no_boundary() {
    let d = Arc::new(GridDomain::cubic_torus(1, 8).unwrap());
    assert!(unit_poisson(&d).is_err());
}
