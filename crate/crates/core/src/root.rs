//! Bracketed one-dimensional root finding.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("function does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("function is not finite at {x}")]
    NotFinite { x: f64 },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

pub const DEFAULT_MAX_ITER: usize = 200;

/// Newton iteration safeguarded by bisection.
///
/// `f` must change sign on `[lo, hi]`. Each Newton step that would leave the
/// current bracket, or would not halve it, is replaced by a bisection step.
/// Stops once the bracket width is below `rtol * |x|`.
pub fn newton_bisect<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, rtol: f64, max_iter: usize) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RootError::NotFinite { x })
        }
    };
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(RootError::NoSignChange { lo, hi });
    }
    // Orient so that f(lo) < 0 < f(hi).
    if f_lo > 0.0 {
        core::mem::swap(&mut lo, &mut hi);
    }

    let mut x = 0.5 * (lo + hi);
    let mut last_width = (hi - lo).abs();
    for _ in 0..max_iter {
        let fx = eval(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let width = (hi - lo).abs();
        if width <= rtol * x.abs() {
            return Ok(x);
        }
        let newton = x - fx / df(x);
        if newton.is_finite() && (newton - x).abs() <= rtol * x.abs() {
            return Ok(newton);
        }
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let in_bracket = newton > a && newton < b;
        x = if in_bracket && width <= 0.5 * last_width {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
    }
    Err(RootError::NoConvergence { iterations: max_iter })
}

/// Plain bisection. Slower but derivative-free; useful as an oracle.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, rtol: f64, max_iter: usize) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !f_lo.is_finite() {
        return Err(RootError::NotFinite { x: lo });
    }
    if !f_hi.is_finite() {
        return Err(RootError::NotFinite { x: hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(RootError::NoSignChange { lo, hi });
    }
    if f_lo > 0.0 {
        core::mem::swap(&mut lo, &mut hi);
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rtol * mid.abs() || mid == lo || mid == hi {
            return Ok(mid);
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RootError::NoConvergence { iterations: max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = newton_bisect(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0, 1e-14, DEFAULT_MAX_ITER).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-14);
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, DEFAULT_MAX_ITER).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn decreasing_function_and_bad_derivative() {
        // A useless derivative forces the bisection fallback.
        let r = newton_bisect(|x| 1.0 - x * x * x, |_| 1e-300, 0.0, 3.0, 1e-13, DEFAULT_MAX_ITER).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(
            newton_bisect(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0, 1e-12, 50),
            Err(RootError::NoSignChange { lo: -1.0, hi: 1.0 })
        );
        assert_eq!(
            bisect(|x| x - 0.3, 0.0, 1.0, 0.0, 3),
            Err(RootError::NoConvergence { iterations: 3 })
        );
        assert!(matches!(
            newton_bisect(|x| 1.0 / x, |x| -1.0 / (x * x), 0.0, 1.0, 1e-12, 50),
            Err(RootError::NotFinite { .. })
        ));
    }
}
