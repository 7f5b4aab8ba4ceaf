use serde::Serialize;

use crate::error::{Error, Result};
use crate::symfunc::{FuncFamily, LambdaTuple};

const DECAY_RATIO: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CSubVerdict {
    Yes,
    No,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AxisOutcome {
    /// `f(λ̲ + t e_i)` exceeded `ψ` at this `t`.
    Exceeds(f64),
    /// Increments decay geometrically toward a limit at or below `ψ`.
    Bounded(f64),
    /// Still rising and below `ψ` at `t_max`.
    Rising(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct CSubReport {
    pub verdict: CSubVerdict,
    pub axes: Vec<AxisOutcome>,
    /// Rising axes resolved by the family being unbounded along every axis.
    pub analytic: bool,
}

impl CSubReport {
    pub fn is_yes(&self) -> bool {
        self.verdict == CSubVerdict::Yes
    }
}

fn axis_outcome(f: &FuncFamily, lambda: &LambdaTuple, axis: usize, psi: f64, t_max: f64) -> Result<AxisOutcome> {
    let mut values = Vec::new();
    let mut t = 1.0;
    loop {
        let v = f.eval(&lambda.bumped(axis, t))?;
        if v > psi {
            return Ok(AxisOutcome::Exceeds(t));
        }
        values.push(v);
        if t >= t_max {
            break;
        }
        t = (2.0 * t).min(t_max);
    }
    let last = *values.last().expect("ladder is nonempty");
    if values.len() < 3 {
        return Ok(AxisOutcome::Rising(last));
    }
    let m = values.len();
    let d1 = values[m - 2] - values[m - 3];
    let d2 = values[m - 1] - values[m - 2];
    if d2 <= 1e-14 * (1.0 + last.abs()) {
        return Ok(AxisOutcome::Bounded(last));
    }
    let ratio = d2 / d1;
    if d1 > 0.0 && ratio <= DECAY_RATIO {
        let limit = last + d2 * ratio / (1.0 - ratio);
        if limit <= psi {
            return Ok(AxisOutcome::Bounded(limit));
        }
    }
    Ok(AxisOutcome::Rising(last))
}

/// Per-axis test of whether `{μ ∈ λ̲ + Γ_n : f(μ) = ψ}` is bounded, on the
/// ladder `t = 1, 2, 4, …, t_max`.
pub fn is_c_subsolution(f: &FuncFamily, lambda: &LambdaTuple, psi: f64, t_max: f64) -> Result<CSubReport> {
    if lambda.len() != f.n {
        return Err(Error::Domain(format!("λ has {} entries, family has n = {}", lambda.len(), f.n)));
    }
    if !f.admits(lambda.as_slice()) {
        return Err(Error::Inadmissible(format!("λ = {:?} outside the cone", lambda.as_slice())));
    }
    if !(t_max > 1.0) || psi.is_nan() {
        return Err(Error::Domain(format!("need t_max > 1 and a numeric ψ, got t_max = {t_max}, ψ = {psi}")));
    }
    let axes = (0..f.n).map(|i| axis_outcome(f, lambda, i, psi, t_max)).collect::<Result<Vec<_>>>()?;
    let any_bounded = axes.iter().any(|a| matches!(a, AxisOutcome::Bounded(_)));
    let any_rising = axes.iter().any(|a| matches!(a, AxisOutcome::Rising(_)));
    let (verdict, analytic) = if any_bounded {
        (CSubVerdict::No, false)
    } else if any_rising {
        if f.is_unbounded_along_axes() {
            (CSubVerdict::Yes, true)
        } else {
            (CSubVerdict::Indeterminate, false)
        }
    } else {
        (CSubVerdict::Yes, false)
    };
    Ok(CSubReport { verdict, axes, analytic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::DEFAULT_T_MAX;

    fn lt(v: &[f64]) -> LambdaTuple {
        LambdaTuple::from_slice(v).unwrap()
    }

    #[test]
    fn unbounded_families() {
        let f = FuncFamily::log_det(3).unwrap();
        let r = is_c_subsolution(&f, &lt(&[0.1, 1.0, 5.0]), 4.0, DEFAULT_T_MAX).unwrap();
        assert!(r.is_yes());
        assert!(!r.analytic);
        let r = is_c_subsolution(&f, &lt(&[0.1, 1.0, 5.0]), 1e6, DEFAULT_T_MAX).unwrap();
        assert!(r.is_yes());
        assert!(r.analytic);
        let s1 = FuncFamily::sigma_root(3, 1).unwrap();
        assert!(is_c_subsolution(&s1, &lt(&[1.0, 1.0, 1.0]), 100.0, DEFAULT_T_MAX).unwrap().is_yes());
    }

    #[test]
    fn quotient_bounded_axis() {
        let f = FuncFamily::sigma_quotient(3, 2, 1).unwrap();
        let l = lt(&[1.0, 1.0, 1.0]);
        // f(λ + t e_1) → λ_2 + λ_3 = 2
        let r = is_c_subsolution(&f, &l, 2.5, DEFAULT_T_MAX).unwrap();
        assert_eq!(r.verdict, CSubVerdict::No);
        assert!(is_c_subsolution(&f, &l, 1.9, DEFAULT_T_MAX).unwrap().is_yes());
    }

    #[test]
    fn mixed_family_is_unbounded() {
        let f = FuncFamily::guan_mixed(3, 2, vec![0.0, 1.0]).unwrap();
        let l = lt(&[-0.45, 1.0, 1.0]);
        let r = is_c_subsolution(&f, &l, 50.0, DEFAULT_T_MAX).unwrap();
        assert!(r.is_yes() && r.analytic);
    }

    #[test]
    fn errors() {
        let f = FuncFamily::log_det(2).unwrap();
        assert!(matches!(is_c_subsolution(&f, &lt(&[-1.0, 1.0]), 0.0, 8.0), Err(Error::Inadmissible(_))));
        assert!(matches!(is_c_subsolution(&f, &lt(&[1.0, 1.0]), 0.0, 1.0), Err(Error::Domain(_))));
    }
}
