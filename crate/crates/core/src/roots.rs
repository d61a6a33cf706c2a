//! Bracketed scalar root finding: bisection to a coarse bracket, then
//! safeguarded Newton polishing that falls back to bisection whenever a step
//! would leave the bracket.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Open interval known to contain exactly one sign change.
///
/// Endpoints are never evaluated, which lets callers bracket between the
/// poles of a function.
#[derive(Debug, Clone, Copy)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    /// Whether the function is negative just above `lo` (i.e. it crosses upwards).
    pub increasing: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Relative bracket width at which bisection hands over to Newton.
    pub bisect_rel: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RootOptions<T> {
    fn default() -> Self {
        Self { bisect_rel: T::tol(1e-6), max_iter: 4000 }
    }
}

/// Find the root of `f` inside `bracket`. `f` returns the value and its derivative.
pub fn hybrid_root<T, F>(mut f: F, bracket: Bracket<T>, opts: RootOptions<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let Bracket { mut lo, mut hi, increasing } = bracket;
    if !(lo < hi) {
        return Err(Error::NumericalFailure(format!("empty bracket [{lo}, {hi}]")));
    }
    let half = lit::<T>(0.5);
    let eps = T::epsilon();
    // Moves the bracket end that shares the sign of `fx`.
    let shrink = |x: T, fx: T, lo: &mut T, hi: &mut T| {
        if (fx < T::zero()) == increasing {
            *lo = x;
        } else {
            *hi = x;
        }
    };

    let mut iter = 0;
    while hi - lo > opts.bisect_rel * (lo.abs().max(hi.abs())) {
        let mid = lo + half * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let (fm, _) = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if !fm.is_finite() {
            return Err(Error::NumericalFailure(format!("non-finite value {fm} at {mid}")));
        }
        shrink(mid, fm, &mut lo, &mut hi);
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::NumericalFailure(format!("bisection stalled in [{lo}, {hi}]")));
        }
    }

    let mut x = lo + half * (hi - lo);
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::NumericalFailure(format!("non-finite value {fx} at {x}")));
        }
        shrink(x, fx, &mut lo, &mut hi);
        let newton = x - fx / dfx;
        let next = if dfx != T::zero() && newton > lo && newton < hi { newton } else { lo + half * (hi - lo) };
        let step = (next - x).abs();
        x = next;
        if step <= lit::<T>(2.0) * eps * x.abs()
            || hi - lo <= lit::<T>(4.0) * eps * x.abs().max(T::min_positive_value())
        {
            return Ok(x);
        }
    }
    Err(Error::NumericalFailure(format!("Newton polish did not converge in [{lo}, {hi}]")))
}

/// Plain bisection on a closed interval whose endpoints have opposite signs.
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, abs_tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo < T::zero()) == (f_hi < T::zero()) {
        return Err(Error::NumericalFailure(format!("no sign change on [{lo}, {hi}]")));
    }
    let half = lit::<T>(0.5);
    while hi - lo > abs_tol {
        let mid = lo + half * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + half * (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = hybrid_root(
            |x: f64| (x * x - 2.0, 2.0 * x),
            Bracket { lo: 0.0, hi: 2.0, increasing: true },
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decreasing_between_poles() {
        // 1/x - 1/(1-x) has its root at 1/2; both ends are poles.
        let f = |x: f64| (1.0 / x - 1.0 / (1.0 - x), -1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x)));
        let r = hybrid_root(f, Bracket { lo: 0.0, hi: 1.0, increasing: false }, RootOptions::default()).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        let r = hybrid_root(
            |x: f64| (x.powi(3) - 1e-3, 0.0),
            Bracket { lo: -1.0, hi: 1.0, increasing: true },
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - 0.1).abs() < 1e-14);
    }

    #[test]
    fn tiny_root_near_zero() {
        let r = hybrid_root(
            |x: f64| (x - 1e-31, 1.0),
            Bracket { lo: 0.0, hi: 1.0, increasing: true },
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - 1e-31).abs() < 1e-45);
    }

    #[test]
    fn bisect_cubic() {
        let r = bisect(|x: f64| x * x * x - 8.0, 0.0, 5.0, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-11);
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let r = hybrid_root(
            |x: f32| (x * x - 2.0, 2.0 * x),
            Bracket { lo: 0.0, hi: 2.0, increasing: true },
            RootOptions::default(),
        )
        .unwrap();
        assert!((r - 2f32.sqrt()).abs() < 1e-6);
    }
}
