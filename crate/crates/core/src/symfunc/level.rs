use super::FuncFamily;
use crate::error::{Error, Result};

const MAX_DOUBLINGS: usize = 64;
const MAX_BISECTIONS: usize = 400;

/// Tolerance `1e-10·(1+|σ|)` for locating `∂Γ^σ = {f = σ}`.
pub fn level_tolerance(sigma: f64) -> f64 {
    1e-10 * (1.0 + sigma.abs())
}

/// `f(p)`, or `None` outside the cone (treated as below every level).
fn value(f: &FuncFamily, p: &[f64]) -> Option<f64> {
    if f.admits(p) {
        f.eval_slice(p).ok()
    } else {
        None
    }
}

fn bisect(
    f: &FuncFamily,
    sigma: f64,
    point: impl Fn(f64) -> Vec<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Result<Vec<f64>> {
    let tol = level_tolerance(sigma);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        match value(f, &point(mid)) {
            Some(v) if v == sigma => return Ok(point(mid)),
            Some(v) if v > sigma => hi = mid,
            _ => lo = mid,
        }
    }
    if let Some(v) = value(f, &point(lo)) {
        let vh = value(f, &point(hi)).unwrap_or(f64::INFINITY);
        if (v - sigma).abs() < (vh - sigma).abs() && (v - sigma).abs() <= tol {
            return Ok(point(lo));
        }
    }
    let p = point(hi);
    match value(f, &p) {
        Some(v) if (v - sigma).abs() <= tol => Ok(p),
        v => Err(Error::Range(format!(
            "level {sigma} not attained to tolerance (closest value {v:?})"
        ))),
    }
}

/// The point `base + t·1⃗` with `f = σ`; `t ↦ f(base + t·1⃗)` is increasing
/// wherever it is defined, so the crossing is unique.
pub fn level_on_shift(f: &FuncFamily, base: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !sigma.is_finite() {
        return Err(Error::Range(format!("level {sigma} is not finite")));
    }
    let point = |t: f64| base.iter().map(|b| b + t).collect::<Vec<f64>>();
    let min = base.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = (-min).max(0.0) + 1.0;
    let mut found = false;
    for _ in 0..MAX_DOUBLINGS {
        if matches!(value(f, &point(hi)), Some(v) if v >= sigma) {
            found = true;
            break;
        }
        hi = 2.0 * hi + 1.0;
    }
    if !found {
        return Err(Error::Range(format!("level {sigma} above the range of the shift ray")));
    }
    let mut step = 1.0;
    let mut lo = hi - step;
    let mut found = false;
    for _ in 0..MAX_DOUBLINGS {
        match value(f, &point(lo)) {
            Some(v) if v >= sigma => {
                step *= 2.0;
                lo = hi - step;
            }
            _ => {
                found = true;
                break;
            }
        }
    }
    if !found {
        return Err(Error::Range(format!("level {sigma} below the range of the shift ray")));
    }
    bisect(f, sigma, point, lo, hi)
}

/// First crossing of `f = σ` on `base + s·dir`, `s > 0`, for a direction
/// with positive entries (so `f` increases along the ray). `None` if the ray
/// starts above `σ` or never reaches it.
pub fn level_along(f: &FuncFamily, base: &[f64], dir: &[f64], sigma: f64) -> Result<Option<(f64, Vec<f64>)>> {
    if dir.iter().any(|&d| d.is_nan() || d <= 0.0) {
        return Err(Error::Domain("ray direction must have positive entries".into()));
    }
    let point = |s: f64| base.iter().zip(dir).map(|(b, d)| b + s * d).collect::<Vec<f64>>();
    if matches!(value(f, base), Some(v) if v >= sigma) {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        if matches!(value(f, &point(hi)), Some(v) if v >= sigma) {
            let p = bisect(f, sigma, point, lo, hi)?;
            let s = p.iter().zip(base).zip(dir).map(|((p, b), d)| (p - b) / d).fold(0.0, f64::max);
            return Ok(Some((s, p)));
        }
        lo = hi;
        hi *= 2.0;
    }
    Ok(None)
}

/// The point `t·direction` with `f = σ`, assuming `f` is unbounded above
/// along the ray (then `t ↦ f(t·direction)` is concave and nondecreasing).
pub fn level_on_ray(f: &FuncFamily, direction: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !f.admits(direction) {
        return Err(Error::Inadmissible(format!("ray direction {direction:?} outside the cone")));
    }
    if !sigma.is_finite() {
        return Err(Error::Range(format!("level {sigma} is not finite")));
    }
    let point = |t: f64| direction.iter().map(|d| d * t).collect::<Vec<f64>>();
    let at = |t: f64| value(f, &point(t)).unwrap_or(f64::NEG_INFINITY);
    let (mut lo, mut hi) = (1.0, 1.0);
    if at(1.0) < sigma {
        let mut ok = false;
        for _ in 0..MAX_DOUBLINGS {
            hi *= 2.0;
            if at(hi) >= sigma {
                ok = true;
                break;
            }
            lo = hi;
        }
        if !ok {
            return Err(Error::Range(format!("level {sigma} above the range of the ray")));
        }
    } else {
        let mut ok = false;
        for _ in 0..MAX_DOUBLINGS {
            lo *= 0.5;
            if at(lo) < sigma {
                ok = true;
                break;
            }
            hi = lo;
        }
        if !ok {
            return Err(Error::Range(format!("level {sigma} below the range of the ray")));
        }
    }
    bisect(f, sigma, point, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_family_on_diagonal() {
        let f = FuncFamily::sigma_root(3, 1).unwrap();
        let p = level_on_ray(&f, &[1.0, 1.0, 1.0], 3.0).unwrap();
        for v in p {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn logdet_ray() {
        let f = FuncFamily::log_det(2).unwrap();
        let p = level_on_ray(&f, &[1.0, 2.0], 0.0).unwrap();
        let t = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(p[0], t, epsilon = 1e-9);
        assert_abs_diff_eq!(p[1], 2.0 * t, epsilon = 1e-9);
    }

    #[test]
    fn shift_hits_level_for_negative_base() {
        let f = FuncFamily::guan_mixed(3, 2, vec![0.0, 1.0]).unwrap();
        let p = level_on_shift(&f, &[-3.0, 0.5, 2.0], 1.5).unwrap();
        assert!((f.eval_slice(&p).unwrap() - 1.5).abs() <= level_tolerance(1.5));
    }

    #[test]
    fn unreachable_level_is_range_error() {
        // σ_2^{1/2} never goes below its boundary value 0
        let f = FuncFamily::sigma_root(3, 2).unwrap();
        assert!(matches!(level_on_shift(&f, &[0.0, 0.0, 0.0], -1.0), Err(Error::Range(_))));
        let lin = FuncFamily::sigma_root(2, 1).unwrap();
        assert!(matches!(level_on_ray(&lin, &[1.0, 1.0], -1.0), Err(Error::Range(_))));
    }
}
