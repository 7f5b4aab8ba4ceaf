use std::f64::consts::TAU;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use hcl_core::grid::{
    chern_laplacian, complex_hessian, gradient_at, inward_normal_derivative, read_hcl1, write_field_csv, write_hcl1,
    GridDomain, NodeKind, SFactor, ScalarField, HCL1_MAGIC, PRODUCT_FLAG,
};

fn plane(cells: usize) -> Arc<GridDomain> {
    Arc::new(GridDomain::product(1, &[], &[], &SFactor::unit_square(cells)).unwrap())
}

/// `u = sin(x¹ + 2y²)` on `T⁴`; its complex Hessian in closed form.
fn wave_hessian(c: &[f64]) -> [[Complex64; 2]; 2] {
    let s = (c[0] + 2.0 * c[3]).sin();
    [
        [Complex64::new(-0.25 * s, 0.0), Complex64::new(0.0, -0.5 * s)],
        [Complex64::new(0.0, 0.5 * s), Complex64::new(-s, 0.0)],
    ]
}

fn hessian_error(cells: usize) -> f64 {
    // the wave is constant along y¹ and x², so those axes stay coarse
    let d = Arc::new(GridDomain::torus(2, &[cells, 4, 4, cells], &[TAU; 4]).unwrap());
    let u = ScalarField::from_fn(d.clone(), |c| (c[0] + 2.0 * c[3]).sin()).unwrap();
    let h = complex_hessian(&u).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..d.len() {
        let exact = wave_hessian(&d.coords(i));
        for j in 0..2 {
            for k in 0..2 {
                err = err.max((h.get(i).get(j, k) - exact[j][k]).norm());
            }
        }
    }
    err
}

#[test]
fn complex_hessian_second_order_on_torus() {
    let (e1, e2, e3) = (hessian_error(16), hessian_error(32), hessian_error(64));
    let p1 = (e1 / e2).log2();
    let p2 = (e2 / e3).log2();
    assert!(p1 > 1.9 && p2 > 1.9, "orders {p1} {p2}");
}

#[test]
fn hessian_exact_on_quadratics_including_boundary() {
    // u = x² − 3xy + 2y²: u_{zz̄} = ¼(2 + 4) = 1.5 everywhere
    let d = plane(6);
    let u = ScalarField::from_fn(d.clone(), |c| c[0] * c[0] - 3.0 * c[0] * c[1] + 2.0 * c[1] * c[1]).unwrap();
    let h = complex_hessian(&u).unwrap();
    for i in 0..d.len() {
        assert_abs_diff_eq!(h.get(i).get(0, 0).re, 1.5, epsilon = 1e-9);
        let g = gradient_at(&u, i).unwrap();
        let c = d.coords(i);
        assert_abs_diff_eq!(g[0], 2.0 * c[0] - 3.0 * c[1], epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], -3.0 * c[0] + 4.0 * c[1], epsilon = 1e-9);
    }
}

#[test]
fn chern_laplacian_is_quarter_euclidean() {
    let d = Arc::new(GridDomain::cubic_torus(2, 32).unwrap());
    let u = ScalarField::from_fn(d.clone(), |c| (c[1]).cos() + (2.0 * c[2]).sin()).unwrap();
    let l = chern_laplacian(&u).unwrap();
    let tr = complex_hessian(&u).unwrap().trace();
    let mut err: f64 = 0.0;
    for i in 0..d.len() {
        let c = d.coords(i);
        let exact = 0.25 * (-(c[1]).cos() - 4.0 * (2.0 * c[2]).sin());
        err = err.max((l.get(i) - exact).abs());
        assert_abs_diff_eq!(l.get(i), tr.get(i), epsilon = 1e-10);
    }
    // second-order truncation, h = 2π/32
    assert!(err < 0.02, "{err}");
}

#[test]
fn inward_derivative_on_edges() {
    // u = y(1 − y) has inward derivative 1 on both y-edges
    let d = plane(8);
    let u = ScalarField::from_fn(d.clone(), |c| c[1] * (1.0 - c[1])).unwrap();
    for i in d.nodes_of(NodeKind::Boundary) {
        let (axis, v) = inward_normal_derivative(&u, i).unwrap();
        if axis == 1 {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        } else {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn layout_and_neighbors() {
    let s = SFactor::annulus(4, 1.0, 2.0, 8);
    let d = GridDomain::product_uniform(2, 3, &s).unwrap();
    assert_eq!(d.counts(), &[3, 3, 5, 8]);
    assert_eq!(d.periodic(), &[true, true, false, true]);
    assert_eq!(d.len(), 3 * 3 * 5 * 8);
    for idx in [0, 17, d.len() - 1] {
        assert_eq!(d.index(&d.multi_index(idx)), idx);
    }
    let last = d.index(&[2, 0, 0, 0]);
    assert_eq!(d.neighbor(last, 0, 1), Some(d.index(&[0, 0, 0, 0])));
    assert_eq!(d.neighbor(0, 2, -1), None);
    assert_abs_diff_eq!(d.spacing()[0], TAU / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(d.spacing()[2], 0.25, epsilon = 1e-15);
}

#[test]
fn hcl1_layout_and_roundtrip() {
    let d = Arc::new(GridDomain::product_uniform(2, 2, &SFactor::unit_square(2)).unwrap());
    let u = ScalarField::from_fn(d.clone(), |c| c.iter().sum()).unwrap();
    let mut bytes = Vec::new();
    write_hcl1(&u, &mut bytes).unwrap();
    assert_eq!(&bytes[..4], HCL1_MAGIC);
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
    let counts: Vec<u32> = (0..4).map(|a| u32::from_le_bytes(bytes[8 + 4 * a..12 + 4 * a].try_into().unwrap())).collect();
    assert_eq!(counts, vec![2, 2, 3, 3]);
    let flags = u32::from_le_bytes(bytes[24..28].try_into().unwrap());
    assert_eq!(flags, PRODUCT_FLAG | 0b11);
    assert_eq!(bytes.len(), 28 + 8 * d.len());
    let v0 = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
    assert_eq!(v0, u.get(0));

    let (h, vals) = read_hcl1(&mut bytes.as_slice()).unwrap();
    assert_eq!(h.counts, counts);
    assert_eq!(vals, u.values());
    let back = ScalarField::read_hcl1(d.clone(), &mut bytes.as_slice()).unwrap();
    assert_eq!(back.values(), u.values());

    let other = Arc::new(GridDomain::cubic_torus(2, 2).unwrap());
    assert!(ScalarField::read_hcl1(other, &mut bytes.as_slice()).is_err());
    assert!(read_hcl1(&mut &b"HCL2"[..]).is_err());
}

#[test]
fn field_csv_header() {
    let d = plane(2);
    let u = ScalarField::constant(d, 1.5);
    let mut out = Vec::new();
    write_field_csv(&u, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# hcl-schema v1"));
    assert_eq!(lines.next(), Some("node,x1,y1,kind,value"));
    assert_eq!(lines.next(), Some("0,0,0,boundary,1.5"));
    assert_eq!(text.lines().count(), 2 + 9);
}
