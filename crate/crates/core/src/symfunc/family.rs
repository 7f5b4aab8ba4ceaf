use serde::{Deserialize, Serialize};

use super::{cone_margin, LambdaTuple, SigmaJet};
use crate::error::{Error, Result};

/// The supported operator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `Σ log λ_i` on `Γ_n` (complex Monge–Ampère).
    LogDet,
    /// `σ_k^{1/k}` on `Γ_k`.
    SigmaRoot { k: usize },
    /// `log σ_k` on `Γ_k`.
    LogSigma { k: usize },
    /// `(σ_k / σ_l)^{1/(k-l)}` on `Γ_k`, `0 ≤ l < k`.
    SigmaQuotient { k: usize, l: usize },
    /// `σ_{k+1}/σ_k + Σ_{j≤k} β_j log σ_j` on `Γ_k`.
    GuanMixed { k: usize, beta: Vec<f64> },
}

/// A symmetric function together with its dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuncFamily {
    #[serde(flatten)]
    pub kind: FamilyKind,
    pub n: usize,
}

/// Value, gradient and Hessian of a scalar function of `λ`.
#[derive(Debug, Clone)]
pub(crate) struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

impl Jet {
    fn zero(n: usize) -> Self {
        Self { value: 0.0, grad: vec![0.0; n], hess: vec![vec![0.0; n]; n] }
    }

    fn from_sigma(s: SigmaJet) -> Self {
        Self { value: s.value, grad: s.grad, hess: s.hess }
    }

    /// `log g`.
    fn log(&self) -> Self {
        let g = self.value;
        let n = self.grad.len();
        let grad: Vec<f64> = self.grad.iter().map(|d| d / g).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                hess[i][j] = self.hess[i][j] / g - grad[i] * grad[j];
            }
        }
        Self { value: g.ln(), grad, hess }
    }

    /// `exp g`.
    fn exp(&self) -> Self {
        let e = self.value.exp();
        let n = self.grad.len();
        let grad: Vec<f64> = self.grad.iter().map(|d| e * d).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                hess[i][j] = e * (self.hess[i][j] + self.grad[i] * self.grad[j]);
            }
        }
        Self { value: e, grad, hess }
    }

    /// `a / b`.
    fn quotient(a: &Self, b: &Self) -> Self {
        let n = a.grad.len();
        let (av, bv) = (a.value, b.value);
        let grad: Vec<f64> = (0..n).map(|i| a.grad[i] / bv - av * b.grad[i] / (bv * bv)).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                hess[i][j] = a.hess[i][j] / bv
                    - (a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j]) / (bv * bv)
                    - av * b.hess[i][j] / (bv * bv)
                    + 2.0 * av * b.grad[i] * b.grad[j] / (bv * bv * bv);
            }
        }
        Self { value: av / bv, grad, hess }
    }

    fn axpy(&mut self, alpha: f64, other: &Self) {
        self.value += alpha * other.value;
        for (g, o) in self.grad.iter_mut().zip(&other.grad) {
            *g += alpha * o;
        }
        for (row, orow) in self.hess.iter_mut().zip(&other.hess) {
            for (h, o) in row.iter_mut().zip(orow) {
                *h += alpha * o;
            }
        }
    }

    fn scale(mut self, alpha: f64) -> Self {
        self.value *= alpha;
        self.grad.iter_mut().for_each(|g| *g *= alpha);
        self.hess.iter_mut().flatten().for_each(|h| *h *= alpha);
        self
    }
}

impl FuncFamily {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        let family = Self { kind, n };
        family.validate()?;
        Ok(family)
    }

    pub fn log_det(n: usize) -> Result<Self> {
        Self::new(FamilyKind::LogDet, n)
    }

    pub fn sigma_root(n: usize, k: usize) -> Result<Self> {
        Self::new(FamilyKind::SigmaRoot { k }, n)
    }

    pub fn log_sigma(n: usize, k: usize) -> Result<Self> {
        Self::new(FamilyKind::LogSigma { k }, n)
    }

    pub fn sigma_quotient(n: usize, k: usize, l: usize) -> Result<Self> {
        Self::new(FamilyKind::SigmaQuotient { k, l }, n)
    }

    pub fn guan_mixed(n: usize, k: usize, beta: Vec<f64>) -> Result<Self> {
        Self::new(FamilyKind::GuanMixed { k, beta }, n)
    }

    /// Checks the family invariants; called by every constructor and after
    /// deserialization.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Domain(format!("family dimension must be >= 2, got {n}")));
        }
        let check_k = |k: usize| {
            if k == 0 || k > n {
                Err(Error::Domain(format!("cone index k = {k} outside 1..={n}")))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            FamilyKind::LogDet => Ok(()),
            FamilyKind::SigmaRoot { k } | FamilyKind::LogSigma { k } => check_k(*k),
            FamilyKind::SigmaQuotient { k, l } => {
                check_k(*k)?;
                if l >= k {
                    return Err(Error::Domain(format!("quotient needs l < k, got l = {l}, k = {k}")));
                }
                Ok(())
            }
            FamilyKind::GuanMixed { k, beta } => {
                check_k(*k)?;
                if beta.len() != *k {
                    return Err(Error::Domain(format!(
                        "mixed family needs {k} weights, got {}",
                        beta.len()
                    )));
                }
                if beta.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
                    return Err(Error::Domain("mixed family weights must be >= 0".into()));
                }
                if beta.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::Domain("mixed family weights must have positive sum".into()));
                }
                Ok(())
            }
        }
    }

    /// Index `k` of the cone `Γ_k` on which the family lives.
    pub fn cone_index(&self) -> usize {
        match &self.kind {
            FamilyKind::LogDet => self.n,
            FamilyKind::SigmaRoot { k }
            | FamilyKind::LogSigma { k }
            | FamilyKind::SigmaQuotient { k, .. }
            | FamilyKind::GuanMixed { k, .. } => *k,
        }
    }

    /// `sup_{∂Γ} f`: `-∞` for the logarithmic families, `0` for the
    /// homogeneous ones.
    pub fn sup_boundary(&self) -> f64 {
        match &self.kind {
            FamilyKind::SigmaRoot { .. } | FamilyKind::SigmaQuotient { .. } => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    /// `sup_Γ f`; every supported family is unbounded above.
    pub fn sup_cone(&self) -> f64 {
        f64::INFINITY
    }

    /// Whether `f(λ_1, …, λ_{n-1}, λ_n + t) → +∞` for every `λ ∈ Γ`.
    pub fn is_unbounded_along_axes(&self) -> bool {
        !matches!(self.kind, FamilyKind::SigmaQuotient { l, .. } if l >= 1)
    }

    pub fn short_name(&self) -> String {
        match &self.kind {
            FamilyKind::LogDet => format!("logdet_n{}", self.n),
            FamilyKind::SigmaRoot { k } => format!("sigma{k}_root_n{}", self.n),
            FamilyKind::LogSigma { k } => format!("log_sigma{k}_n{}", self.n),
            FamilyKind::SigmaQuotient { k, l } => format!("quotient{k}_{l}_n{}", self.n),
            FamilyKind::GuanMixed { k, beta } => {
                let b: Vec<String> = beta.iter().map(|b| format!("{b}")).collect();
                format!("mixed{k}_b{}_n{}", b.join("-"), self.n)
            }
        }
    }

    pub fn admits(&self, lambda: &[f64]) -> bool {
        lambda.len() == self.n && cone_margin(lambda, self.cone_index()) > 0.0
    }

    fn require_admissible(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(Error::Domain(format!(
                "family has n = {}, tuple has {} entries",
                self.n,
                lambda.len()
            )));
        }
        let margin = cone_margin(lambda, self.cone_index());
        if !(margin > 0.0) {
            return Err(Error::Inadmissible(format!(
                "λ = {lambda:?} outside Γ_{} (min σ_j = {margin:e})",
                self.cone_index()
            )));
        }
        Ok(())
    }

    pub(crate) fn jet(&self, lambda: &[f64]) -> Result<Jet> {
        self.require_admissible(lambda)?;
        let n = self.n;
        let sigma = |k: usize| Jet::from_sigma(SigmaJet::new(lambda, k));
        let jet = match &self.kind {
            FamilyKind::LogDet => {
                let mut j = Jet::zero(n);
                for i in 0..n {
                    j.value += lambda[i].ln();
                    j.grad[i] = 1.0 / lambda[i];
                    j.hess[i][i] = -1.0 / (lambda[i] * lambda[i]);
                }
                j
            }
            FamilyKind::SigmaRoot { k } => sigma(*k).log().scale(1.0 / *k as f64).exp(),
            FamilyKind::LogSigma { k } => sigma(*k).log(),
            FamilyKind::SigmaQuotient { k, l } => {
                let mut log_ratio = sigma(*k).log();
                if *l > 0 {
                    log_ratio.axpy(-1.0, &sigma(*l).log());
                }
                log_ratio.scale(1.0 / (*k - *l) as f64).exp()
            }
            FamilyKind::GuanMixed { k, beta } => {
                let mut j = Jet::quotient(&sigma(*k + 1), &sigma(*k));
                for (idx, b) in beta.iter().enumerate() {
                    if *b != 0.0 {
                        j.axpy(*b, &sigma(idx + 1).log());
                    }
                }
                j
            }
        };
        if !jet.value.is_finite() {
            return Err(Error::Numeric(format!("f(λ) not finite at {lambda:?}")));
        }
        Ok(jet)
    }

    /// `f(λ)`; errors outside the cone instead of returning NaN.
    pub fn eval(&self, lambda: &LambdaTuple) -> Result<f64> {
        self.eval_slice(lambda.as_slice())
    }

    pub fn eval_slice(&self, lambda: &[f64]) -> Result<f64> {
        // value-only path: avoids building the Hessian on hot loops
        self.require_admissible(lambda)?;
        let s = |k: usize| super::elementary(lambda, k.min(self.n))[k.min(self.n)];
        let value = match &self.kind {
            FamilyKind::LogDet => lambda.iter().map(|v| v.ln()).sum(),
            FamilyKind::SigmaRoot { k } => s(*k).powf(1.0 / *k as f64),
            FamilyKind::LogSigma { k } => s(*k).ln(),
            FamilyKind::SigmaQuotient { k, l } => (s(*k) / s(*l)).powf(1.0 / (*k - *l) as f64),
            FamilyKind::GuanMixed { k, beta } => {
                let e = super::elementary(lambda, (*k + 1).min(self.n));
                let next = if *k + 1 <= self.n { e[*k + 1] } else { 0.0 };
                let mut v = next / e[*k];
                for (idx, b) in beta.iter().enumerate() {
                    if *b != 0.0 {
                        v += b * e[idx + 1].ln();
                    }
                }
                v
            }
        };
        if !value.is_finite() {
            return Err(Error::Numeric(format!("f(λ) not finite at {lambda:?}")));
        }
        Ok(value)
    }

    /// `(f_1, …, f_n)`.
    pub fn grad(&self, lambda: &LambdaTuple) -> Result<LambdaTuple> {
        LambdaTuple::new(self.grad_slice(lambda.as_slice())?)
    }

    pub fn grad_slice(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jet(lambda)?.grad)
    }

    /// Second derivatives `∂²f/∂λ_i∂λ_j`.
    pub fn hessian(&self, lambda: &LambdaTuple) -> Result<Vec<Vec<f64>>> {
        Ok(self.jet(lambda.as_slice())?.hess)
    }

    /// `f(1⃗)`.
    pub fn value_at_identity(&self) -> f64 {
        self.eval_slice(&vec![1.0; self.n]).expect("1⃗ lies in every Gårding cone")
    }
}
