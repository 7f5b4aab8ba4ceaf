use num_complex::Complex64;
use proptest::prelude::*;

use hcl_core::grid::{GridDomain, SFactor};
use hcl_core::solve::linalg::{solve_general, CsrMatrix};
use hcl_core::spectra::{eigh, growth_threshold, localize, BorderedHermitian, HermitianMatrix};
use hcl_core::symfunc::{sigma_k, FuncFamily, LambdaTuple};

fn hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        HermitianMatrix::new(n, data).unwrap()
    })
}

fn sized_hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (2usize..=6).prop_flat_map(hermitian)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spectrum_preserves_trace_and_norm(a in sized_hermitian()) {
        let v = eigh(&a).unwrap().values;
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        let s: f64 = v.iter().sum();
        let q: f64 = v.iter().map(|x| x * x).sum();
        prop_assert!((s - a.trace()).abs() < 1e-11 * (1.0 + a.frobenius()));
        prop_assert!((q - a.frobenius().powi(2)).abs() < 1e-10 * (1.0 + q));
    }

    #[test]
    fn spectrum_is_affine_equivariant(a in sized_hermitian(), s in 0.1f64..5.0, c in -3.0f64..3.0) {
        let n = a.dim();
        let b = a.scale(s).add(&HermitianMatrix::identity(n).scale(c));
        let va = eigh(&a).unwrap().values;
        let vb = eigh(&b).unwrap().values;
        for (x, y) in va.iter().zip(&vb) {
            prop_assert!((s * x + c - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn sigma_k_symmetric_and_homogeneous(v in prop::collection::vec(-2.0f64..2.0, 2..7), t in 0.2f64..3.0, k in 0usize..7) {
        let n = v.len();
        let k = k.min(n);
        let l = LambdaTuple::from_slice(&v).unwrap();
        let mut rev = v.clone();
        rev.reverse();
        let s = sigma_k(&l, k).unwrap();
        prop_assert!((sigma_k(&LambdaTuple::new(rev).unwrap(), k).unwrap() - s).abs() < 1e-10 * (1.0 + s.abs()));
        let st = sigma_k(&l.scaled(t), k).unwrap();
        prop_assert!((st - t.powi(k as i32) * s).abs() < 1e-9 * (1.0 + st.abs()));
    }

    #[test]
    fn roots_are_one_homogeneous_and_increasing(v in prop::collection::vec(0.05f64..3.0, 3..6), t in 0.2f64..4.0) {
        let n = v.len();
        let f = FuncFamily::sigma_root(n, 2).unwrap();
        let x = f.eval_slice(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|a| a * t).collect();
        prop_assert!((f.eval_slice(&scaled).unwrap() - t * x).abs() < 1e-10 * (1.0 + x));
        prop_assert!(f.grad_slice(&v).unwrap().iter().all(|g| *g > 0.0));
        let mut bumped = v.clone();
        bumped[0] += 0.1;
        prop_assert!(f.eval_slice(&bumped).unwrap() > x);
    }

    #[test]
    fn lemma_holds_above_threshold(
        d in prop::collection::vec(-1.0f64..1.0, 1..6),
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        eps in 0.05f64..1.0,
        mult in 1.0f64..20.0,
    ) {
        let a: Vec<Complex64> = a[..d.len()].iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let b = BorderedHermitian::new(d, a, 0.0).unwrap();
        let t = growth_threshold(&b, eps).unwrap();
        prop_assert!(localize(&b.with_corner(mult * t), eps).unwrap().satisfied);
    }

    #[test]
    fn grid_index_roundtrip(cells in 2usize..6, x in 2usize..4, idx in 0usize..10_000) {
        let d = GridDomain::product_uniform(2, x, &SFactor::unit_square(cells)).unwrap();
        let i = idx % d.len();
        prop_assert_eq!(d.index(&d.multi_index(i)), i);
        for axis in 0..d.dim() {
            if let Some(j) = d.neighbor(i, axis, 1) {
                prop_assert_eq!(d.neighbor(j, axis, -1), Some(i));
            }
        }
    }

    #[test]
    fn general_solver_inverts_diagonally_dominant(n in 3usize..40, seed in 0u64..1000) {
        let mut rows = Vec::new();
        let mut x_true = Vec::new();
        for i in 0..n {
            let h = ((i as u64 * 7919 + seed * 104729) % 1000) as f64 / 1000.0;
            let mut r = vec![(i, 4.0 + h)];
            if i > 0 { r.push((i - 1, -1.0 + 0.5 * h)); }
            if i + 1 < n { r.push((i + 1, -1.0)); }
            rows.push(r);
            x_true.push((i as f64).sin());
        }
        let a = CsrMatrix::from_rows(n, rows);
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let (x, stats) = solve_general(&a, &b, 1e-12, 1000).unwrap();
        prop_assert!(stats.converged);
        for (p, q) in x.iter().zip(&x_true) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }
}
