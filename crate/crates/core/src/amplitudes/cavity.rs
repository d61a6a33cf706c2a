//! Survival of the excited dressed level inside a finite spherical cavity.

use num_complex::Complex;
use rayon::prelude::*;

use super::check_times;
use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::roots::bisect;
use crate::transform::{CavityWeights, SmallLRegime};

/// `|f⁰⁰(t)|² = (t₀⁰)⁴ + 2Σ_k (t₀⁰)²(t₀ᵏ)² cos(Ω_k − Ω₀)t + |Σ_k (t₀ᵏ)² e^{−iΩ_k t}|²`.
///
/// `frequencies` holds `Ω₀` followed by one frequency per excited weight.
pub fn cavity_survival_series<T: Real>(weights: &CavityWeights<T>, frequencies: &[T], times: &[T]) -> Result<Vec<T>> {
    if frequencies.len() != weights.excited.len() + 1 {
        return Err(Error::DimensionMismatch { expected: weights.excited.len() + 1, found: frequencies.len() });
    }
    check_times(times)?;
    let w0 = weights.ground;
    let om0 = frequencies[0];
    Ok(times
        .par_iter()
        .map(|&t| {
            let s = weights.excited.iter().zip(&frequencies[1..]).fold(
                Complex::new(T::zero(), T::zero()),
                |acc, (&w, &om)| {
                    let (sn, cs) = ((om - om0) * t).sin_cos();
                    acc + Complex::new(w * cs, -w * sn)
                },
            );
            w0 * w0 + lit::<T>(2.0) * w0 * s.re + s.norm_sqr()
        })
        .collect())
}

/// Smallest value of [`cavity_survival_series`] on `samples` evenly spaced
/// times in `[0, t_max]`, with the time at which it occurs.
pub fn cavity_survival_minimum<T: Real>(
    weights: &CavityWeights<T>,
    frequencies: &[T],
    t_max: T,
    samples: usize,
) -> Result<(T, T)> {
    if samples < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    let step = t_max / lit((samples - 1) as f64);
    let times: Vec<T> = (0..samples).map(|i| step * lit(i as f64)).collect();
    let probs = cavity_survival_series(weights, frequencies, &times)?;
    let (i, p) =
        probs.iter().enumerate().fold((0, T::infinity()), |best, (i, &p)| if p < best.1 { (i, p) } else { best });
    Ok((p, times[i]))
}

/// Analytic lower bound on the cavity survival probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySurvivalBound<T> {
    pub delta: T,
    pub regime: SmallLRegime,
    /// Raw value of the bound; may be negative in the strong regime.
    pub min_probability: T,
    /// Set when the raw value is negative (`δ` beyond `δ_max`).
    pub unphysical: bool,
}

/// Weak: `1 − (5π/3)δ + (14π²/9)δ²`.
/// Strong: `(2/(2+πδ))² − (2/(2+πδ))(πδ/3) − π²δ²/9`.
pub fn cavity_min_bound<T: Real>(delta: T, regime: SmallLRegime) -> Result<CavitySurvivalBound<T>> {
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(Error::parameter("delta", format!("must be finite and non-negative, got {delta}")));
    }
    let pd = T::PI() * delta;
    let min_probability = match regime {
        SmallLRegime::Weak => T::one() - lit::<T>(5.0) / lit(3.0) * pd + lit::<T>(14.0) / lit(9.0) * pd * pd,
        SmallLRegime::Strong => strong_bound(delta),
    };
    Ok(CavitySurvivalBound { delta, regime, min_probability, unphysical: min_probability < T::zero() })
}

fn strong_bound<T: Real>(delta: T) -> T {
    let pd = T::PI() * delta;
    let r = lit::<T>(2.0) / (lit::<T>(2.0) + pd);
    r * r - r * pd / lit(3.0) - pd * pd / lit(9.0)
}

/// The positive `δ` at which the strong-coupling bound reaches zero.
pub fn solve_delta_max<T: Real>() -> Result<T> {
    bisect(strong_bound::<T>, T::zero(), T::one(), T::tol(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_at_reference_points() {
        for r in [SmallLRegime::Weak, SmallLRegime::Strong] {
            assert_eq!(cavity_min_bound(0.0f64, r).unwrap().min_probability, 1.0);
        }
        let w = cavity_min_bound(0.005f64, SmallLRegime::Weak).unwrap();
        assert!((w.min_probability - 0.974204).abs() < 1e-6);
        let s = cavity_min_bound(0.1f64, SmallLRegime::Strong).unwrap();
        assert!((s.min_probability - 0.6454493).abs() < 1e-7);
        assert!(!s.unphysical);
        assert!(cavity_min_bound(0.5f64, SmallLRegime::Strong).unwrap().unphysical);
        assert!(cavity_min_bound(-0.1f64, SmallLRegime::Weak).is_err());
    }

    #[test]
    fn delta_max_is_quartic_root() {
        let d: f64 = solve_delta_max().unwrap();
        let x = std::f64::consts::PI * d;
        assert!((-x.powi(4) - 4.0 * x.powi(3) - 10.0 * x * x - 12.0 * x + 36.0).abs() < 1e-8);
        assert!((d - 0.3724).abs() < 1e-4);
    }

    #[test]
    fn series_at_zero_is_squared_total() {
        let w = CavityWeights { ground: 0.9, excited: vec![0.05, 0.02] };
        let p = cavity_survival_series(&w, &[1.0, 7.0, 13.0], &[0.0, 1.0]).unwrap();
        assert!((p[0] - 0.97f64.powi(2)).abs() < 1e-15);
        assert!(cavity_survival_series(&w, &[1.0, 7.0], &[0.0]).is_err());
    }
}
