//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the solvers, quadratures and eigensolver run on.
///
/// Implemented for `f32` and `f64`. Tolerances inside the crate are
/// expressed through [`Real::tol`] so they degrade gracefully to the
/// precision actually available.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Convert an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// The requested tolerance, floored at a small multiple of machine epsilon.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(requested).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for [`Real::lit`].
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// `cot(πx)` evaluated without losing relative accuracy near either end of (0, 1).
pub(crate) fn cot_pi<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x > half {
        let y = T::one() - x;
        -(T::PI() * y).cos() / (T::PI() * y).sin()
    } else {
        (T::PI() * x).cos() / (T::PI() * x).sin()
    }
}

/// `n!` in log space; exact for the small arguments used here.
pub(crate) fn ln_factorial<T: Real>(n: u32) -> T {
    (2..=n).map(|k| lit::<T>(f64::from(k)).ln()).sum()
}
