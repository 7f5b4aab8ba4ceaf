use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symfunc::LambdaTuple;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense `n × n` Hermitian matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from column-major entries and symmetrizes `(A + A^H)/2`.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Domain(format!("expected {} entries, got {}", n * n, data.len())));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        let mut m = Self { n, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i + i * n] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(*d, 0.0));
        }
        m
    }

    /// Builds from a real symmetric matrix given by rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain("matrix rows must be square".into()));
            }
            for (j, v) in row.iter().enumerate() {
                data[i + j * n] = Complex64::new(*v, 0.0);
            }
        }
        Self::new(n, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.n]
    }

    /// Sets `(i, j)` and its mirror `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        let n = self.n;
        if i == j {
            self.data[i + i * n] = Complex64::new(z.re, 0.0);
        } else {
            self.data[i + j * n] = z;
            self.data[j + i * n] = z.conj();
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for j in 0..n {
            for i in 0..=j {
                let a = self.data[i + j * n];
                let b = self.data[j + i * n];
                let avg = (a + b.conj()) * 0.5;
                self.data[i + j * n] = avg;
                self.data[j + i * n] = avg.conj();
            }
            self.data[j + j * n].im = 0.0;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += self.data[i + j * n].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `Re tr(self · other)`; real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.get(i, j) * other.get(j, i)).re;
            }
        }
        s
    }

    /// `U diag(w) U^H` for a unitary `U` (column-major).
    pub fn from_eigenframe(frame: &[Complex64], weights: &[f64]) -> Self {
        let n = weights.len();
        let mut m = Self::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                let mut z = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    z += frame[i + k * n] * frame[j + k * n].conj() * weights[k];
                }
                m.set(i, j, z);
            }
        }
        m
    }
}

/// Eigenvalues (ascending) and the unitary eigenframe (column `k` belongs to
/// eigenvalue `k`, column-major storage).
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Vec<Complex64>,
    pub sweeps: usize,
}

/// Cyclic complex Jacobi.
pub fn eigh(a: &HermitianMatrix) -> Result<Eigh> {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = HermitianMatrix::identity(n).data;
    let norm = a.frobenius();
    let at = |i: usize, j: usize| i + j * n;
    let off = |m: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += m[at(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut last_off = off(&m);
    while last_off > f64::EPSILON * norm && last_off > f64::MIN_POSITIVE {
        if sweeps == JACOBI_MAX_SWEEPS {
            if last_off <= 1e-12 * norm {
                break;
            }
            return Err(Error::Numeric(format!(
                "Jacobi did not converge after {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {last_off:e})"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[at(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let phase = apq / b;
                let app = m[at(p, p)].re;
                let aqq = m[at(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U acts on columns (p, q): U_pp = c, U_pq = s, U_qp = -s·conj(φ), U_qq = c·conj(φ)
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[at(k, p)];
                    let mkq = m[at(k, q)];
                    m[at(k, p)] = mkp * upp + mkq * uqp;
                    m[at(k, q)] = mkp * upq + mkq * uqq;
                }
                for k in 0..n {
                    let mpk = m[at(p, k)];
                    let mqk = m[at(q, k)];
                    m[at(p, k)] = upp.conj() * mpk + uqp.conj() * mqk;
                    m[at(q, k)] = upq.conj() * mpk + uqq.conj() * mqk;
                }
                m[at(p, q)] = Complex64::new(0.0, 0.0);
                m[at(q, p)] = Complex64::new(0.0, 0.0);
                m[at(p, p)].im = 0.0;
                m[at(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[at(k, p)];
                    let vkq = v[at(k, q)];
                    v[at(k, p)] = vkp * upp + vkq * uqp;
                    v[at(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
        let now = off(&m);
        if now >= last_off && now <= 1e-12 * norm {
            break;
        }
        last_off = now;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[at(i, i)].re.total_cmp(&m[at(j, j)].re));
    let values = order.iter().map(|&i| m[at(i, i)].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[at(k, dst)] = v[at(k, src)];
        }
    }
    Ok(Eigh { values, vectors, sweeps })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<LambdaTuple> {
    let e = eigh(a)?;
    if e.values.len() < 2 {
        return Err(Error::Domain("eigenvalue tuples need n >= 2".into()));
    }
    LambdaTuple::new(e.values)
}

/// Eigenvalues (ascending) of a real symmetric matrix given by rows.
pub fn symmetric_eigenvalues(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    Ok(eigh(&HermitianMatrix::from_real_rows(rows)?)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum() {
        let a = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(eig_hermitian(&a).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let a = HermitianMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let l = eig_hermitian(&a).unwrap();
        assert_abs_diff_eq!(l[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = HermitianMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let l = eig_hermitian(&a).unwrap();
        assert_abs_diff_eq!(l[0], 2.0 - 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 2.0 + 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn complex_eigenvectors_reconstruct() {
        let n = 4;
        let mut a = HermitianMatrix::zeros(n);
        let entries = [(0, 1, c(0.3, -0.7)), (0, 3, c(-1.1, 0.2)), (1, 2, c(0.5, 0.5)), (2, 3, c(0.0, 1.3))];
        for (i, j, z) in entries {
            a.set(i, j, z);
        }
        for (i, d) in [0.2, -1.0, 2.5, 0.7].iter().enumerate() {
            a.set(i, i, c(*d, 0.0));
        }
        let e = eigh(&a).unwrap();
        let back = HermitianMatrix::from_eigenframe(&e.vectors, &e.values);
        for (x, y) in back.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).norm() < 1e-13);
        }
        assert_abs_diff_eq!(e.values.iter().sum::<f64>(), a.trace(), epsilon = 1e-13);
    }

    #[test]
    fn construction_symmetrizes() {
        let a = HermitianMatrix::new(2, vec![c(1.0, 0.5), c(2.0, 1.0), c(2.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(a.get(0, 0).im, 0.0);
        assert_eq!(a.get(0, 1), a.get(1, 0).conj());
        assert!(HermitianMatrix::new(2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
