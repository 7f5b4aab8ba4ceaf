use rayon::prelude::*;

use crate::error::{Error, Result};

const PAR_ROWS: usize = 4096;

/// Compressed sparse rows.
#[derive(Debug, Clone, Default)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists; repeated columns are summed.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = cols.len();
            for (c, v) in row {
                if cols.len() > start && *cols.last().expect("nonempty") == c {
                    *vals.last_mut().expect("nonempty") += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[s..e].iter().zip(&self.vals[s..e]).map(|(&c, &v)| v * x[c]).sum()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        if self.n >= PAR_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, yr)| *yr = self.row_dot(r, x));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = self.row_dot(r, x);
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
                self.cols[s..e].iter().zip(&self.vals[s..e]).find(|(&c, _)| c == r).map_or(0.0, |(_, &v)| v)
            })
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[s..e].iter().position(|&x| x == c).map_or(0.0, |p| self.vals[s + p])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStats {
    pub iterations: usize,
    /// `‖b − Ax‖₂ / ‖b‖₂` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn jacobi(a: &CsrMatrix) -> Vec<f64> {
    a.diagonal().into_iter().map(|d| if d != 0.0 && d.is_finite() { 1.0 / d } else { 1.0 }).collect()
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; b.len()];
    a.matvec(x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    r
}

/// Jacobi-preconditioned conjugate gradients for SPD `a`.
pub fn cg(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> LinearStats {
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return LinearStats { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let minv = jacobi(a);
    let mut r = residual(a, b, x);
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; b.len()];
    let mut rel = norm(&r) / bn;
    for it in 0..max_iter {
        if rel <= tol {
            return LinearStats { iterations: it, relative_residual: rel, converged: true };
        }
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return LinearStats { iterations: it, relative_residual: rel, converged: false };
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / bn;
        for i in 0..z.len() {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rel = norm(&residual(a, b, x)) / bn;
    LinearStats { iterations: max_iter, relative_residual: rel, converged: rel <= tol }
}

/// Right-preconditioned BiCGSTAB with shadow residual `r̂ = r₀`.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> LinearStats {
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return LinearStats { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let minv = jacobi(a);
    let mut r = residual(a, b, x);
    let shadow = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = norm(&r) / bn;
    for it in 0..max_iter {
        if rel <= tol {
            return LinearStats { iterations: it, relative_residual: rel, converged: true };
        }
        let rho_new = dot(&shadow, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return LinearStats { iterations: it, relative_residual: rel, converged: false };
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            ph[i] = p[i] * minv[i];
        }
        a.matvec(&ph, &mut v);
        let sv = dot(&shadow, &v);
        if sv == 0.0 {
            return LinearStats { iterations: it, relative_residual: rel, converged: false };
        }
        alpha = rho / sv;
        for i in 0..n {
            r[i] -= alpha * v[i];
            x[i] += alpha * ph[i];
        }
        rel = norm(&r) / bn;
        if rel <= tol {
            return LinearStats { iterations: it + 1, relative_residual: rel, converged: true };
        }
        for i in 0..n {
            sh[i] = r[i] * minv[i];
        }
        a.matvec(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &r) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += omega * sh[i];
            r[i] -= omega * t[i];
        }
        rel = norm(&r) / bn;
    }
    let rel = norm(&residual(a, b, x)) / bn;
    LinearStats { iterations: max_iter, relative_residual: rel, converged: rel <= tol }
}

/// Restarted GMRES(m), right Jacobi preconditioning.
pub fn gmres(a: &CsrMatrix, b: &[f64], x: &mut [f64], restart: usize, tol: f64, max_iter: usize) -> LinearStats {
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return LinearStats { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let minv = jacobi(a);
    let m = restart.max(1);
    let mut total = 0;
    let mut w = vec![0.0; n];
    while total < max_iter {
        let r = residual(a, b, x);
        let beta = norm(&r);
        if beta / bn <= tol {
            return LinearStats { iterations: total, relative_residual: beta / bn, converged: true };
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && total < max_iter {
            let z: Vec<f64> = basis[k].iter().zip(&minv).map(|(v, mi)| v * mi).collect();
            a.matvec(&z, &mut w);
            for (j, q) in basis.iter().enumerate() {
                let h = dot(&w, q);
                hess[j][k] = h;
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= h * qi);
            }
            let wn = norm(&w);
            hess[k + 1][k] = wn;
            for j in 0..k {
                let tmp = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
                hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
                hess[j][k] = tmp;
            }
            let den = hess[k][k].hypot(hess[k + 1][k]);
            if den == 0.0 {
                break;
            }
            cs[k] = hess[k][k] / den;
            sn[k] = hess[k + 1][k] / den;
            hess[k][k] = den;
            hess[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            if g[k].abs() / bn <= tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| hess[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for i in 0..n {
                x[i] += yj * basis[j][i] * minv[i];
            }
        }
        if k == 0 {
            break;
        }
    }
    let rel = norm(&residual(a, b, x)) / bn;
    LinearStats { iterations: total, relative_residual: rel, converged: rel <= tol }
}

/// BiCGSTAB, falling back to GMRES(50) from the BiCGSTAB iterate.
pub fn solve_general(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, LinearStats)> {
    let mut x = vec![0.0; b.len()];
    let s = bicgstab(a, b, &mut x, tol, max_iter);
    if s.converged {
        return Ok((x, s));
    }
    if !x.iter().all(|v| v.is_finite()) {
        x.iter_mut().for_each(|v| *v = 0.0);
    }
    let g = gmres(a, b, &mut x, 50, tol, max_iter);
    if g.converged {
        return Ok((x, LinearStats { iterations: s.iterations + g.iterations, ..g }));
    }
    Err(Error::Numeric(format!(
        "linear solve did not converge (relative residual {:e} after {} iterations)",
        g.relative_residual,
        s.iterations + g.iterations
    )))
}
