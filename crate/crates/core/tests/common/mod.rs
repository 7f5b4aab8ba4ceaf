#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hcl_core::spectra::HermitianMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1] + i[-1, 1]`, then Hermitian-symmetrized.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..=j {
            let z = if i == j {
                Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            data[j * n + i] = z;
            data[i * n + j] = z.conj();
        }
    }
    HermitianMatrix::new(n, data).unwrap()
}

/// Eigenvalues via the real symmetric embedding `[[Re, −Im], [Im, Re]]`,
/// whose spectrum is that of `A` doubled; nalgebra does the work.
pub fn oracle_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    let n = a.dim();
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = a.get(r % n, c % n);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.iter().step_by(2).copied().collect()
}

/// `det(A − xI)` by complex LU.
pub fn oracle_char_poly(a: &HermitianMatrix, x: f64) -> Complex64 {
    let n = a.dim();
    let m = DMatrix::from_fn(n, n, |r, c| {
        let z = a.get(r, c);
        if r == c {
            z - x
        } else {
            z
        }
    });
    m.determinant()
}

/// `σ_k` by summing over all `k`-subsets.
pub fn brute_sigma(l: &[f64], k: usize) -> f64 {
    let n = l.len();
    if k == 0 {
        return 1.0;
    }
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| l[i]).product::<f64>())
        .sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
