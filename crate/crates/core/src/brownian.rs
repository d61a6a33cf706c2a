//! Zero-temperature classical path of the dressed particle prepared in a
//! dressed coherent state `λ = √n̄·e^{−iθ}`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::amplitudes::{bath_integral_j, pole_term, AmplitudeSeries};
use crate::error::{Error, Result};
use crate::model::{classify_regime, OhmicSystemSpec, RegimeKind};
use crate::num::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPreparation<T> {
    n_bar: T,
    theta: T,
}

impl<T: Real> CoherentPreparation<T> {
    pub fn new(n_bar: T, theta: T) -> Result<Self> {
        if !(n_bar >= T::zero()) || !n_bar.is_finite() {
            return Err(Error::parameter("n_bar", format!("must be finite and non-negative, got {n_bar}")));
        }
        if !theta.is_finite() {
            return Err(Error::parameter("theta", format!("must be finite, got {theta}")));
        }
        Ok(Self { n_bar, theta })
    }

    pub fn n_bar(&self) -> T {
        self.n_bar
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// `√n̄·e^{−iθ}`
    pub fn lambda(&self) -> Complex<T> {
        Complex::from_polar(self.n_bar.sqrt(), -self.theta)
    }
}

/// `√(ħn̄/2ω̄)`
fn prefactor<T: Real>(spec: &OhmicSystemSpec<T>, prep: &CoherentPreparation<T>) -> T {
    (spec.hbar() * prep.n_bar / (lit::<T>(2.0) * spec.bar_omega())).sqrt()
}

/// `q′_λ(t) = √(ħ/2ω̄)[λf⁰⁰(t) + λ*f⁰⁰*(t)]` from a precomputed amplitude series.
pub fn classical_path<T: Real>(
    spec: &OhmicSystemSpec<T>,
    prep: &CoherentPreparation<T>,
    times: &[T],
    f00_source: &AmplitudeSeries<T>,
) -> Result<Vec<T>> {
    if times.len() != f00_source.len() {
        return Err(Error::DimensionMismatch { expected: f00_source.len(), found: times.len() });
    }
    if let Some(i) = times.iter().zip(&f00_source.times).position(|(a, b)| a != b) {
        return Err(Error::Input(format!("time grid differs from the amplitude series at index {i}")));
    }
    let scale = (spec.hbar() / (lit::<T>(2.0) * spec.bar_omega())).sqrt();
    let lambda = prep.lambda();
    Ok(f00_source.values.iter().map(|&f| scale * lit::<T>(2.0) * (lambda * f).re).collect())
}

/// Regime-dispatched closed forms:
/// underdamped `√(ħn̄/2ω̄){[2cos(κt+θ) − (πg/κ)sin(κt+θ)]e^{−πgt/2} + 2sinθ·J(t)}`,
/// critical `√(ħn̄/2ω̄)[2cosθ(1 − πgt/2)e^{−πgt/2} + 2sinθ·J(t)]`,
/// overdamped `√(ħn̄/2ω̄)[2cosθ·P(t) + 2sinθ·J(t)]` with `P` the overdamped pole term.
pub fn path_closed_forms<T: Real>(
    spec: &OhmicSystemSpec<T>,
    prep: &CoherentPreparation<T>,
    times: &[T],
) -> Result<Vec<T>> {
    let pre = prefactor(spec, prep);
    let regime = classify_regime(spec);
    let two = lit::<T>(2.0);
    let (sn_th, cs_th) = prep.theta.sin_cos();
    let pg = T::PI() * spec.g();
    times
        .par_iter()
        .map(|&t| {
            let j = if sn_th == T::zero() { T::zero() } else { bath_integral_j(spec, t)? };
            let osc = match regime.kind {
                RegimeKind::Underdamped => {
                    let kappa = regime.kappa_abs;
                    let ph = kappa * t + prep.theta;
                    (two * ph.cos() - pg / kappa * ph.sin()) * (-pg * t / two).exp()
                }
                RegimeKind::Critical | RegimeKind::Overdamped => two * cs_th * pole_term(spec, t).re,
            };
            Ok(pre * (osc + two * sn_th * j))
        })
        .collect()
}

/// Weak-coupling form: the underdamped path with `κ → ω̄`.
pub fn weak_coupling_path<T: Real>(
    spec: &OhmicSystemSpec<T>,
    prep: &CoherentPreparation<T>,
    times: &[T],
) -> Result<Vec<T>> {
    let pre = prefactor(spec, prep);
    let two = lit::<T>(2.0);
    let (w, pg) = (spec.bar_omega(), T::PI() * spec.g());
    let sn_th = prep.theta.sin();
    times
        .par_iter()
        .map(|&t| {
            let j = if sn_th == T::zero() { T::zero() } else { bath_integral_j(spec, t)? };
            let ph = w * t + prep.theta;
            Ok(pre * ((two * ph.cos() - pg / w * ph.sin()) * (-pg * t / two).exp() + two * sn_th * j))
        })
        .collect()
}

/// Strong-coupling form dominated by the slow overdamped pole,
/// `√(ħn̄/2ω̄)[−2cosθ(ω̄²/π²g²)e^{−ω̄²t/πg} + 2sinθ·J(t)]`.
pub fn strong_coupling_path<T: Real>(
    spec: &OhmicSystemSpec<T>,
    prep: &CoherentPreparation<T>,
    times: &[T],
) -> Result<Vec<T>> {
    let pre = prefactor(spec, prep);
    let two = lit::<T>(2.0);
    let (w, pg) = (spec.bar_omega(), T::PI() * spec.g());
    let coeff = w * w / (pg * pg);
    let (sn_th, cs_th) = prep.theta.sin_cos();
    times
        .par_iter()
        .map(|&t| {
            let j = if sn_th == T::zero() { T::zero() } else { bath_integral_j(spec, t)? };
            Ok(pre * (-two * cs_th * coeff * (-w * w * t / pg).exp() + two * sn_th * j))
        })
        .collect()
}

/// Late-time power law shared by all regimes, `√(ħn̄/2ω̄)·8g·sinθ/(ω̄⁴t³)`.
pub fn asymptotic_path<T: Real>(spec: &OhmicSystemSpec<T>, prep: &CoherentPreparation<T>, t: T) -> T {
    let w2 = spec.bar_omega() * spec.bar_omega();
    prefactor(spec, prep) * lit::<T>(8.0) * spec.g() * prep.theta.sin() / (w2 * w2 * t * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::{f00_closed, f00_quadrature};
    use std::f64::consts::PI;

    fn spec(beta: f64) -> OhmicSystemSpec<f64> {
        OhmicSystemSpec::new(1.0, beta, 1.0, 1).unwrap()
    }

    #[test]
    fn lambda_modulus() {
        let p = CoherentPreparation::new(3.0f64, 0.4).unwrap();
        assert!((p.lambda().norm_sqr() - 3.0).abs() < 1e-14);
        assert!(CoherentPreparation::new(-1.0f64, 0.0).is_err());
    }

    #[test]
    fn zero_occupation_is_silent() {
        let s = spec(0.3);
        let p = CoherentPreparation::new(0.0, 0.7).unwrap();
        let times = [0.0, 1.0, 4.0];
        let f = f00_closed(&s, &times).unwrap();
        assert!(classical_path(&s, &p, &times, &f).unwrap().iter().all(|&q| q == 0.0));
        assert!(path_closed_forms(&s, &p, &times).unwrap().iter().all(|&q| q == 0.0));
    }

    #[test]
    fn closed_forms_match_quadrature_fed_path() {
        let times: Vec<f64> = (1..=40).map(|i| 0.25 * i as f64).collect();
        for beta in [1.0 / 137.0, 0.3, 2.0 / PI, 3.0, 10.0] {
            let s = spec(beta);
            let f = f00_quadrature(&s, &times).unwrap();
            for theta in [0.0, 0.9, PI / 2.0] {
                let p = CoherentPreparation::new(2.0, theta).unwrap();
                let a = classical_path(&s, &p, &times, &f).unwrap();
                let b = path_closed_forms(&s, &p, &times).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-5, "β = {beta}, θ = {theta}: {x} {y}");
                }
            }
        }
    }

    #[test]
    fn decoupled_is_free_oscillator() {
        let s = spec(1e-12);
        let p = CoherentPreparation::new(1.0, 0.0).unwrap();
        let times = [0.0, 0.3, 2.0, 9.0];
        let q = path_closed_forms(&s, &p, &times).unwrap();
        for (t, v) in times.iter().zip(&q) {
            assert!((v - 2f64.sqrt() * t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let s = spec(0.3);
        let p = CoherentPreparation::new(1.0, 0.0).unwrap();
        let f = f00_closed(&s, &[0.0, 1.0]).unwrap();
        assert!(matches!(classical_path(&s, &p, &[0.0], &f), Err(Error::DimensionMismatch { .. })));
        assert!(classical_path(&s, &p, &[0.0, 2.0], &f).is_err());
    }

    #[test]
    fn weak_form_tracks_exact_path() {
        let beta = 1.0 / 137.0;
        let s = spec(beta);
        let p = CoherentPreparation::new(1.0, 0.0).unwrap();
        let t_end = 3.0 / (PI * beta);
        let times: Vec<f64> = (0..=2000).map(|i| t_end * i as f64 / 2000.0).collect();
        let exact = path_closed_forms(&s, &p, &times).unwrap();
        let weak = weak_coupling_path(&s, &p, &times).unwrap();
        // phase slip from κ ≠ ω̄ accumulates as (ω̄ − κ)t ≈ π²β²t/8
        let amp = exact.iter().fold(0.0f64, |m, q| m.max(q.abs()));
        let worst = exact.iter().zip(&weak).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst / amp < 1e-2, "{}", worst / amp);
    }

    #[test]
    fn strong_form_tracks_slow_pole() {
        let beta = 10.0;
        let s = spec(beta);
        let p = CoherentPreparation::new(1.0, 0.0).unwrap();
        let times = [20.0, 40.0, 80.0];
        let exact = path_closed_forms(&s, &p, &times).unwrap();
        let approx = strong_coupling_path(&s, &p, &times).unwrap();
        for (a, b) in exact.iter().zip(&approx) {
            assert!((a / b - 1.0).abs() < 1e-2, "{a} {b}");
        }
    }
}
