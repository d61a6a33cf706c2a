//! Survival amplitude `f⁰⁰(t)` of the first excited dressed level and the
//! probabilities derived from it.

mod cavity;
mod continuum;

pub use cavity::{
    cavity_min_bound, cavity_survival_minimum, cavity_survival_series, solve_delta_max, CavitySurvivalBound,
};
pub use continuum::{bath_integral_j, f00_closed, f00_quadrature, pole_term};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{classify_regime, Regime};
use crate::num::{lit, Real};
use crate::spectrum::NormalModeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DiscreteSum,
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DiscreteSum => "discrete",
            Method::ClosedForm => "closed",
            Method::Quadrature => "quadrature",
        }
    }
}

/// `f⁰⁰` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries<T> {
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub method: Method,
    pub regime: Regime<T>,
}

impl<T: Real> AmplitudeSeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn check_times<T: Real>(times: &[T]) -> Result<()> {
    match times.iter().find(|&&t| !(t >= T::zero()) || !t.is_finite()) {
        Some(t) => Err(Error::Input(format!("time {t} is not a finite non-negative value"))),
        None => Ok(()),
    }
}

/// `f⁰⁰(t) = Σ_s (t₀ˢ)² e^{−iΩ_s t}`, summed in mode order.
pub fn f00_discrete<T: Real>(modes: &NormalModeSet<T>, weights: &[T], times: &[T]) -> Result<AmplitudeSeries<T>> {
    if weights.len() != modes.len() {
        return Err(Error::DimensionMismatch { expected: modes.len(), found: weights.len() });
    }
    if weights.iter().any(|&w| !(w >= T::zero())) {
        return Err(Error::Input("weights must be non-negative".into()));
    }
    let total: T = weights.iter().copied().sum();
    if total > T::one() + T::tol(1e-10) {
        return Err(Error::Input(format!("weights sum to {total} > 1")));
    }
    check_times(times)?;
    let freqs = modes.frequencies();
    let values = times
        .par_iter()
        .map(|&t| {
            weights.iter().zip(freqs).fold(Complex::new(T::zero(), T::zero()), |acc, (&w, &om)| {
                let (s, c) = (om * t).sin_cos();
                acc + Complex::new(w * c, -w * s)
            })
        })
        .collect();
    Ok(AmplitudeSeries {
        times: times.to_vec(),
        values,
        method: Method::DiscreteSum,
        regime: classify_regime(modes.spec()),
    })
}

/// `|f⁰⁰(t)|²` pointwise.
pub fn survival_probability<T: Real>(series: &AmplitudeSeries<T>) -> Vec<T> {
    series.values.iter().map(|v| v.norm_sqr()).collect()
}

/// Weak-coupling exponential law `e^{−πgt}`.
pub fn weak_coupling_law<T: Real>(g: T, t: T) -> T {
    (-T::PI() * g * t).exp()
}

/// Strong-coupling law `(ω̄²/π²g²)·e^{−2ω̄²t/πg}` in its commonly quoted form.
///
/// The exponent is the exact late-time rate of the slow overdamped pole. The
/// prefactor is not its leading coefficient; see [`strong_coupling_leading`].
pub fn strong_coupling_law<T: Real>(bar_omega: T, g: T, t: T) -> T {
    let pg = T::PI() * g;
    bar_omega * bar_omega / (pg * pg) * (-lit::<T>(2.0) * bar_omega * bar_omega * t / pg).exp()
}

/// Leading large-`β` behaviour of the slow pole, `(ω̄⁴/π⁴g⁴)·e^{−2ω̄²t/πg}`.
pub fn strong_coupling_leading<T: Real>(bar_omega: T, g: T, t: T) -> T {
    let r = bar_omega * bar_omega / (T::PI() * T::PI() * g * g);
    r * r * (-lit::<T>(2.0) * bar_omega * bar_omega * t / (T::PI() * g)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OhmicSystemSpec;
    use crate::spectrum::{solve_finite_spectrum, SpectrumSource};

    #[test]
    fn sum_rule_at_zero() {
        let spec = OhmicSystemSpec::new(1.0, 0.3, 1.0, 30).unwrap().with_light_speed(1.0).unwrap();
        let modes = solve_finite_spectrum(&spec).unwrap();
        let s = f00_discrete(&modes, modes.weights(), &[0.0, 1.0, 5.0]).unwrap();
        assert!((s.values[0] - Complex::new(1.0, 0.0)).norm() < 1e-10);
        assert!(survival_probability(&s).iter().all(|&p| p <= 1.0 + 1e-12));
    }

    #[test]
    fn single_mode_is_pure_phase() {
        let spec = OhmicSystemSpec::new(2.0, 0.1, 1.0, 1).unwrap();
        let modes = NormalModeSet::from_parts(spec, vec![2.0], vec![1.0], SpectrumSource::FiniteN).unwrap();
        let s = f00_discrete(&modes, &[1.0], &[0.0f64, 0.7, 3.0]).unwrap();
        for (t, v) in s.times.iter().zip(&s.values) {
            assert_eq!(*v, Complex::new((2.0 * t).cos(), -(2.0 * t).sin()));
        }
        assert!(f00_discrete(&modes, &[1.0], &[-1.0]).is_err());
        assert!(f00_discrete(&modes, &[1.5], &[1.0]).is_err());
        assert!(f00_discrete(&modes, &[0.5, 0.5], &[1.0]).is_err());
    }

    #[test]
    fn comparators_share_exponent() {
        let (w, g) = (1.0f64, 10.0);
        let r1 = strong_coupling_law(w, g, 5.0) / strong_coupling_law(w, g, 1.0);
        let r2 = strong_coupling_leading(w, g, 5.0) / strong_coupling_leading(w, g, 1.0);
        assert!((r1 / r2 - 1.0).abs() < 1e-13);
        assert_eq!(weak_coupling_law(0.0f64, 3.0), 1.0);
    }
}
