use rayon::prelude::*;

use super::construct::{build_subsolution, build_supersolution};
use super::estimates::verify_estimates;
use super::linalg::{solve_general, CsrMatrix};
use super::poisson::interior_map;
use super::problem::{Mode, ProblemSpec, SolveOptions, SolveResult};
use crate::error::{Error, Result};
use crate::grid::{complex_hessian_at, NodeKind, ScalarField};
use crate::spectra::{eigh, HermitianMatrix};

const MIN_STEP: f64 = 1e-12;

/// Real `2n × 2n` coefficients `A` with `tr(M·H(v)) = Σ_ab A_ab D_ab v`,
/// where `H(v)` is the complex Hessian assembled from real second
/// differences.
pub fn real_coefficients(m: &HermitianMatrix) -> Vec<f64> {
    let n = m.dim();
    let dim = 2 * n;
    let mut a = vec![0.0; dim * dim];
    for j in 0..n {
        for k in 0..n {
            let z = m.get(j, k);
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            a[xj * dim + xk] += 0.25 * z.re;
            a[yj * dim + yk] += 0.25 * z.re;
            a[xj * dim + yk] += 0.25 * z.im;
            a[yj * dim + xk] -= 0.25 * z.im;
        }
    }
    a
}

/// `f(λ(χ + i∂∂̄u))` at one node, `None` outside the cone; with the
/// linearization coefficients on request.
fn node_state(spec: &ProblemSpec, u: &ScalarField, i: usize, coeffs: bool) -> Result<Option<(f64, Vec<f64>)>> {
    let g = spec.chi.get(i).add(&complex_hessian_at(u, i)?);
    let e = eigh(&g)?;
    let f = &spec.family;
    if !f.admits(&e.values) {
        return Ok(None);
    }
    let value = f.eval_slice(&e.values)?;
    if !coeffs {
        return Ok(Some((value, Vec::new())));
    }
    let grad = f.grad_slice(&e.values)?;
    let m = HermitianMatrix::from_eigenframe(&e.vectors, &grad);
    Ok(Some((value, real_coefficients(&m))))
}

/// `f(λ(g[u]))` on interior nodes (0 elsewhere); inadmissible nodes are an
/// error.
pub fn operator_values(spec: &ProblemSpec, u: &ScalarField) -> Result<ScalarField> {
    let d = &spec.domain;
    let vals = (0..d.len())
        .into_par_iter()
        .map(|i| {
            if d.node_kind(i) != NodeKind::Interior {
                return Ok(0.0);
            }
            node_state(spec, u, i, false)?
                .map(|s| s.0)
                .ok_or_else(|| Error::Inadmissible(format!("λ(g[u]) leaves the cone at node {i}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(d.clone(), vals)
}

struct Eval {
    residual: Vec<f64>,
    inadmissible: Option<usize>,
    coeffs: Vec<Vec<f64>>,
}

impl Eval {
    fn norm(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub(crate) struct Newton<'a> {
    spec: &'a ProblemSpec,
    opts: &'a SolveOptions,
    unknowns: Vec<usize>,
    map: Vec<Option<usize>>,
    closed: bool,
}

pub(crate) struct NewtonOutcome {
    pub u: ScalarField,
    pub c: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl<'a> Newton<'a> {
    pub fn new(spec: &'a ProblemSpec, opts: &'a SolveOptions) -> Self {
        let (unknowns, map) = interior_map(&spec.domain);
        Self { spec, opts, unknowns, map, closed: spec.mode == Mode::Closed }
    }

    fn evaluate(&self, u: &ScalarField, psi: &[f64], c: f64, coeffs: bool) -> Result<Eval> {
        let states = self
            .unknowns
            .par_iter()
            .map(|&i| node_state(self.spec, u, i, coeffs))
            .collect::<Result<Vec<_>>>()?;
        let mut residual = Vec::with_capacity(states.len());
        let mut out = Vec::new();
        for (k, s) in states.into_iter().enumerate() {
            match s {
                Some((v, a)) => {
                    residual.push(v - psi[k] - c);
                    if coeffs {
                        out.push(a);
                    }
                }
                None => {
                    return Ok(Eval { residual: Vec::new(), inadmissible: Some(self.unknowns[k]), coeffs: Vec::new() })
                }
            }
        }
        Ok(Eval { residual, inadmissible: None, coeffs: out })
    }

    fn jacobian(&self, coeffs: &[Vec<f64>]) -> CsrMatrix {
        let d = &self.spec.domain;
        let dim = d.dim();
        let h = d.spacing();
        let m = self.unknowns.len();
        let size = if self.closed { m + 1 } else { m };
        let mut rows: Vec<Vec<(usize, f64)>> = self
            .unknowns
            .par_iter()
            .zip(coeffs.par_iter())
            .map(|(&i, a)| {
                let mut row = Vec::with_capacity(2 * dim * dim + 2);
                let mut push = |j: Option<usize>, w: f64| {
                    if let Some(k) = j.and_then(|j| self.map[j]) {
                        row.push((k, w));
                    }
                };
                for p in 0..dim {
                    let w = a[p * dim + p] / (h[p] * h[p]);
                    push(Some(i), -2.0 * w);
                    push(d.neighbor(i, p, 1), w);
                    push(d.neighbor(i, p, -1), w);
                    for q in (p + 1)..dim {
                        let w = (a[p * dim + q] + a[q * dim + p]) / (4.0 * h[p] * h[q]);
                        for (sp, sq, sign) in [(1, 1, 1.0), (-1, -1, 1.0), (1, -1, -1.0), (-1, 1, -1.0)] {
                            push(d.neighbor(i, p, sp).and_then(|j| d.neighbor(j, q, sq)), sign * w);
                        }
                    }
                }
                if self.closed {
                    row.push((m, -1.0));
                }
                row
            })
            .collect();
        if self.closed {
            rows.push((0..m).map(|k| (k, 1.0 / m as f64)).collect());
        }
        CsrMatrix::from_rows(size, rows)
    }

    /// Damped Newton from `u0` toward `f(λ(g[u])) = psi (+ c)`.
    pub fn run(&self, u0: ScalarField, c0: f64, psi: &[f64], tol: f64) -> Result<NewtonOutcome> {
        let m = self.unknowns.len();
        let mut u = u0;
        let mut c = c0;
        let mut ev = self.evaluate(&u, psi, c, true)?;
        if let Some(node) = ev.inadmissible {
            return Err(Error::ConeExit(format!("initial iterate is inadmissible at node {node}")));
        }
        let mut history = vec![ev.norm()];
        for it in 0..self.opts.max_newton {
            let rn = *history.last().expect("nonempty");
            if rn <= tol {
                return Ok(NewtonOutcome { u, c, iterations: it, history });
            }
            let jac = self.jacobian(&ev.coeffs);
            let mut rhs: Vec<f64> = ev.residual.iter().map(|r| -r).collect();
            if self.closed {
                rhs.push(0.0);
            }
            let (step, _) = solve_general(&jac, &rhs, self.opts.linear_tolerance, self.opts.max_linear).map_err(|e| {
                if self.closed {
                    Error::Gauge(format!("bordered Newton system: {e}"))
                } else {
                    e
                }
            })?;
            let mut alpha = 1.0;
            let mut saw_admissible = false;
            loop {
                let mut trial = u.clone();
                {
                    let vals = trial.values_mut();
                    for (k, &i) in self.unknowns.iter().enumerate() {
                        vals[i] += alpha * step[k];
                    }
                }
                let ct = if self.closed { c + alpha * step[m] } else { c };
                let te = self.evaluate(&trial, psi, ct, true)?;
                if te.inadmissible.is_none() {
                    saw_admissible = true;
                    if te.norm() < rn {
                        u = trial;
                        c = ct;
                        ev = te;
                        history.push(ev.norm());
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < MIN_STEP {
                    return Err(if saw_admissible {
                        Error::Stall(format!(
                            "damping underflow at Newton step {it}: residual {rn:e}, target {tol:e}"
                        ))
                    } else {
                        Error::ConeExit(format!(
                            "every damped step leaves the cone at Newton step {it} (residual {rn:e})"
                        ))
                    });
                }
            }
        }
        let rn = *history.last().expect("nonempty");
        if rn <= tol {
            return Ok(NewtonOutcome { u, c, iterations: self.opts.max_newton, history });
        }
        Err(Error::Stall(format!("no convergence in {} Newton steps (residual {rn:e})", self.opts.max_newton)))
    }

    /// Runs with an `s`-ladder `ψ_s = (1−s)·f(λ(g[u0])) + s·ψ`, bisecting
    /// steps that stall.
    pub fn run_continuation(&self, u0: ScalarField, c0: f64, psi: &[f64], tol: f64) -> Result<(NewtonOutcome, usize)> {
        let start = self.evaluate(&u0, &vec![0.0; psi.len()], 0.0, false)?;
        if let Some(node) = start.inadmissible {
            return Err(Error::ConeExit(format!("initial iterate is inadmissible at node {node}")));
        }
        let f0 = start.residual;
        let steps = self.opts.continuation_steps.max(1);
        let mut s = 0.0;
        let mut ds = 1.0 / steps as f64;
        let mut u = u0;
        let mut c = c0;
        let mut iterations = 0;
        let mut history = Vec::new();
        let mut stages = 0;
        while s < 1.0 {
            let next = (s + ds).min(1.0);
            let target: Vec<f64> = f0.iter().zip(psi).map(|(a, b)| (1.0 - next) * a + next * b).collect();
            match self.run(u.clone(), c, &target, tol) {
                Ok(out) => {
                    iterations += out.iterations;
                    history.extend(out.history);
                    u = out.u;
                    c = out.c;
                    s = next;
                    stages += 1;
                }
                Err(Error::Stall(_)) | Err(Error::ConeExit(_)) if ds > 1.0 / (steps as f64 * 64.0) => ds *= 0.5,
                Err(e) => return Err(e),
            }
        }
        Ok((NewtonOutcome { u, c, iterations, history }, stages))
    }
}

fn residual_target(spec: &ProblemSpec, opts: &SolveOptions) -> f64 {
    opts.tolerance * (1.0 + spec.psi.max_abs())
}

/// Dirichlet solve from a constructed strict subsolution.
pub fn solve_dirichlet(spec: &ProblemSpec, opts: &SolveOptions) -> Result<SolveResult> {
    spec.validate()?;
    let (sub, t) = build_subsolution(spec, opts.delta)?;
    let mut r = solve_dirichlet_from(spec, &sub, opts)?;
    r.subsolution_t = Some(t);
    Ok(r)
}

/// Dirichlet solve from a given initial iterate (its boundary values are
/// replaced by `φ`).
pub fn solve_dirichlet_from(spec: &ProblemSpec, initial: &ScalarField, opts: &SolveOptions) -> Result<SolveResult> {
    spec.validate()?;
    if spec.mode != Mode::Dirichlet {
        return Err(Error::Precondition("solve_dirichlet needs Dirichlet mode".into()));
    }
    if spec.is_degenerate() {
        return Err(Error::Precondition("ψ reaches sup over the cone boundary; use a degenerate sweep".into()));
    }
    let d = &spec.domain;
    let phi = spec.phi()?;
    let mut u0 = initial.on_domain(d.clone())?;
    for i in 0..d.len() {
        if d.node_kind(i) != NodeKind::Interior {
            u0.values_mut()[i] = phi.get(i);
        }
    }
    let newton = Newton::new(spec, opts);
    let psi: Vec<f64> = newton.unknowns.iter().map(|&i| spec.psi.get(i)).collect();
    let tol = residual_target(spec, opts);
    let (out, stages) = if opts.continuation {
        newton.run_continuation(u0.clone(), 0.0, &psi, tol)?
    } else {
        (newton.run(u0.clone(), 0.0, &psi, tol)?, 0)
    };
    let sup = build_supersolution(spec)?;
    let estimates = verify_estimates(&out.u, spec, Some(&u0), Some(&sup))?;
    Ok(SolveResult {
        u: out.u,
        c: None,
        iterations: out.iterations,
        residual_history: out.history,
        admissible: true,
        estimates,
        subsolution_t: None,
        continuation_stages: stages,
    })
}

/// Closed problem `f(λ(g[u])) = ψ + c` with `sup u = 0`, from `u ≡ 0`.
pub fn solve_closed(spec: &ProblemSpec, opts: &SolveOptions) -> Result<SolveResult> {
    solve_closed_from(spec, &ScalarField::zeros(spec.domain.clone()), opts)
}

pub fn solve_closed_from(spec: &ProblemSpec, initial: &ScalarField, opts: &SolveOptions) -> Result<SolveResult> {
    spec.validate()?;
    if spec.mode != Mode::Closed {
        return Err(Error::Precondition("solve_closed needs closed mode".into()));
    }
    let newton = Newton::new(spec, opts);
    let u0 = initial.on_domain(spec.domain.clone())?;
    let psi: Vec<f64> = newton.unknowns.iter().map(|&i| spec.psi.get(i)).collect();
    let f0 = newton.evaluate(&u0, &psi, 0.0, false)?;
    if let Some(node) = f0.inadmissible {
        return Err(Error::ConeExit(format!("initial iterate is inadmissible at node {node}")));
    }
    let c0 = f0.residual.iter().sum::<f64>() / f0.residual.len() as f64;
    let tol = residual_target(spec, opts);
    let (out, stages) = if opts.continuation {
        newton.run_continuation(u0, c0, &psi, tol)?
    } else {
        (newton.run(u0, c0, &psi, tol)?, 0)
    };
    let top = out.u.max();
    let u = out.u.map(|v| v - top);
    let estimates = verify_estimates(&u, spec, None, None)?;
    Ok(SolveResult {
        u,
        c: Some(out.c),
        iterations: out.iterations,
        residual_history: out.history,
        admissible: true,
        estimates,
        subsolution_t: None,
        continuation_stages: stages,
    })
}

/// Discrete residual `f(λ(g[u])) − ψ` on the unknown nodes and the assembled
/// linearization applied to `v`; for derivative checks.
pub fn linearization_check(spec: &ProblemSpec, u: &ScalarField, v: &ScalarField) -> Result<(Vec<f64>, Vec<f64>)> {
    let opts = SolveOptions::default();
    let newton = Newton::new(spec, &opts);
    let zero = vec![0.0; newton.unknowns.len()];
    let ev = newton.evaluate(u, &zero, 0.0, true)?;
    if let Some(node) = ev.inadmissible {
        return Err(Error::Inadmissible(format!("u is inadmissible at node {node}")));
    }
    let jac = newton.jacobian(&ev.coeffs);
    let mut x: Vec<f64> = newton.unknowns.iter().map(|&i| v.get(i)).collect();
    if newton.closed {
        x.push(0.0);
    }
    let mut y = vec![0.0; x.len()];
    jac.matvec(&x, &mut y);
    y.truncate(newton.unknowns.len());
    Ok((ev.residual, y))
}
