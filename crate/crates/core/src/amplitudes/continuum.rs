//! `L → ∞` survival amplitude
//! `f⁰⁰(t) = ∫₀^∞ 2gΩ² e^{−iΩt} dΩ / [(Ω² − ω̄²)² + π²g²Ω²]`
//! by direct quadrature and by its pole plus branch-cut decomposition.
//!
//! Everything is evaluated in the dimensionless variables `s = ω̄t`,
//! `β = g/ω̄`, `a = πβ/2`, `k = |κ|/ω̄`.

use num_complex::Complex;
use rayon::prelude::*;

use super::{check_times, AmplitudeSeries, Method};
use crate::error::{Error, Result};
use crate::model::{classify_regime, OhmicSystemSpec, RegimeKind};
use crate::num::{lit, Real};
use crate::quadrature::{finite_part_double, integrate, integrate_to_infinity, principal_value, QuadOptions};

/// Largest accepted quadrature error estimate.
pub const MAX_QUAD_ERROR: f64 = 1e-7;
const TARGET_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
struct Continuum<T> {
    beta: T,
    a: T,
    k: T,
    kind: RegimeKind,
}

impl<T: Real> Continuum<T> {
    fn new(spec: &OhmicSystemSpec<T>) -> Self {
        let regime = classify_regime(spec);
        let beta = spec.g() / spec.bar_omega();
        Self { beta, a: T::PI() * beta / lit(2.0), k: regime.kappa_abs / spec.bar_omega(), kind: regime.kind }
    }

    fn opts() -> QuadOptions<T> {
        QuadOptions { abs_tol: T::tol(TARGET_ERROR), rel_tol: T::tol(1e-12), max_segments: 400_000 }
    }

    /// `2βx²/((x² − 1)² + π²β²x²)` on the real axis and its continuation.
    fn weight(&self, z: Complex<T>) -> Complex<T> {
        let z2 = z * z;
        let d = (z - T::one()) * (z + T::one());
        let pb = T::PI() * self.beta;
        z2 * (lit::<T>(2.0) * self.beta) / (d * d + z2 * (pb * pb))
    }

    /// Breakpoints resolving the resonances and the decay scale `1/s`, as
    /// offsets from `origin` within `[lo, hi]` (also offsets).
    fn breakpoints(&self, s: T, origin: T, lo: T, hi: T) -> Vec<T> {
        let mut pts = vec![lo, hi];
        let floor = lit::<T>(1e-6);
        let pb = T::PI() * self.beta;
        let mut centers = vec![(T::one(), pb), (self.a, self.a)];
        if self.kind != RegimeKind::Critical {
            centers.extend([(self.a, self.k), (self.a + self.k, self.k), ((self.a - self.k).abs(), self.k)]);
        }
        for &(c, w) in &centers {
            let c = c - origin;
            pts.push(c);
            // geometric ladder from an eighth of the width out to O(1) distance
            let mut off = w.max(floor) / lit(8.0);
            while off < lit(2.0) {
                pts.push(c - off);
                pts.push(c + off);
                off = off * lit(2.0);
            }
        }
        if s > T::zero() {
            for &m in &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
                pts.push(lit::<T>(m) / s - origin);
            }
        }
        finish_breaks(pts, lo, hi)
    }

    fn pole(&self, s: T) -> Complex<T> {
        let (a, k) = (self.a, self.k);
        let damp = (-a * s).exp();
        match self.kind {
            RegimeKind::Underdamped => {
                let (sn, cs) = (k * s).sin_cos();
                let r = a / k;
                Complex::new(damp * (cs - r * sn), -damp * (sn + r * cs))
            }
            RegimeKind::Critical => Complex::new((T::one() - a * s) * damp, T::zero()),
            RegimeKind::Overdamped => {
                let ks = k * s;
                let v = if ks < T::one() {
                    damp * (ks.cosh() - a * ks.sinh() / k)
                } else {
                    let sum = a + k;
                    let fast = (T::one() + a / k) * (-sum * s).exp();
                    let slow = (-s / sum).exp() / (k * sum);
                    (fast - slow) / lit(2.0)
                };
                Complex::new(v, T::zero())
            }
        }
    }

    /// `J = 2β ∫₀^∞ u² e^{−us} du / [(u² + 1)² − π²β²u²]`, with principal values
    /// at the real roots of the denominator (overdamped) or the Hadamard finite
    /// part at the double root (critical).
    fn bath_integral(&self, s: T) -> Result<T> {
        let a = self.a;
        let two = lit::<T>(2.0);
        // Critical: the roots are merged, A = (u − a)², B = (u + a)².
        let c0 = if self.kind == RegimeKind::Critical { a * a } else { T::one() };
        let b_of = move |u: T| u * u + two * a * u + c0;
        let phi = move |u: T| u * u * (-u * s).exp() / b_of(u);
        let a_of = move |u: T| u * u - two * a * u + c0;
        let top = lit::<T>(4.0) * (T::one() + a + self.k);
        let breaks = self.breakpoints(s, T::zero(), T::zero(), top);
        let inner = &breaks[1..breaks.len() - 1];
        let opts = Self::opts();
        let near = match self.kind {
            RegimeKind::Underdamped => {
                // A = (u − a)² + k²; the constant and linear Taylor terms of φ at
                // u = a are integrated in closed form.
                let k = self.k;
                let p0 = phi(a);
                let p1 = p0 * (two / a - s - (two * a + two * a) / b_of(a));
                let rest = integrate(
                    |u: T| {
                        let d = u - a;
                        (phi(u) - p0 - p1 * d) / (d * d + k * k)
                    },
                    &breaks,
                    opts,
                )?
                .require(lit(MAX_QUAD_ERROR), "branch-cut integral")?;
                let hi = top - a;
                let lorentz = ((hi / k).atan() + (a / k).atan()) / k;
                let odd = ((hi * hi + k * k) / (a * a + k * k)).ln() / two;
                rest + p0 * lorentz + p1 * odd
            }
            RegimeKind::Overdamped => {
                let (lo, hi) = (a - self.k, a + self.k);
                let lo = if lo > T::zero() { lo } else { T::one() / hi };
                let p_hi = principal_value(phi, hi, T::zero(), top, inner, opts)?
                    .require(lit(MAX_QUAD_ERROR), "principal value at the upper root")?;
                let p_lo = principal_value(phi, lo, T::zero(), top, inner, opts)?
                    .require(lit(MAX_QUAD_ERROR), "principal value at the lower root")?;
                (p_hi - p_lo) / (hi - lo)
            }
            RegimeKind::Critical => {
                let dphi = phi(a) * (two / a - s - (two * a + two * a) / b_of(a));
                finite_part_double(phi, dphi, a, T::zero(), top, inner, opts)?
                    .require(lit(MAX_QUAD_ERROR), "finite part at the double root")?
            }
        };
        let scale = if s > T::zero() { top.min(T::one() / s).max(top * lit(1e-3)) } else { top };
        let tail = integrate_to_infinity(|u: T| phi(u) / a_of(u), top, scale, opts)?
            .require(lit(MAX_QUAD_ERROR), "branch-cut tail")?;
        Ok(two * self.beta * (near + tail))
    }

    fn closed(&self, s: T) -> Result<Complex<T>> {
        Ok(self.pole(s) + Complex::new(T::zero(), self.bath_integral(s)?))
    }

    /// Direct quadrature along the real axis up to `X`, continued down the
    /// vertical ray `X − iy` where `e^{−izs}` decays. The real-axis part runs
    /// over `y = x − 1` so that a narrow resonance at `x = 1` keeps full
    /// resolution.
    fn quadrature(&self, s: T) -> Result<Complex<T>> {
        let pi = T::PI();
        let one = T::one();
        let two = lit::<T>(2.0);
        let x_max = lit::<T>(3.0) * (one + pi * self.beta);
        let mut breaks = self.breakpoints(s, one, -one, x_max - one);
        if s > T::zero() {
            let panel = pi / (lit::<T>(4.0) * s);
            let n = (x_max / panel).ceil().to_usize().unwrap_or(usize::MAX);
            if n > 2_000_000 {
                return Err(Error::NumericalFailure(format!("t·ω̄ = {s} needs {n} quadrature panels")));
            }
            breaks.extend((1..n).map(|i| lit::<T>(i as f64) * panel - one));
            breaks = finish_breaks(breaks, -one, x_max - one);
        }
        let opts = Self::opts();
        let pb = pi * self.beta;
        let (sn1, cs1) = s.sin_cos();
        let body = integrate(
            |y: T| {
                let x = one + y;
                let d = y * (two + y);
                let w = two * self.beta * x * x / (d * d + pb * pb * x * x);
                // e^{−ixs} = e^{−is}·e^{−iys}
                let (sn, cs) = (y * s).sin_cos();
                Complex::new(w * cs, -w * sn) * Complex::new(cs1, -sn1)
            },
            &breaks,
            opts,
        )?;
        let scale = if s > T::zero() { x_max.min(one / s) } else { x_max };
        let ray = integrate_to_infinity(
            |y: T| self.weight(Complex::new(x_max, -y)) * (-y * s).exp(),
            T::zero(),
            scale,
            opts,
        )?;
        let error = body.error + ray.error;
        if error > lit(MAX_QUAD_ERROR) {
            return Err(Error::NumericalFailure(format!(
                "f00 quadrature at t·ω̄ = {s}: error estimate {error:e} exceeds {MAX_QUAD_ERROR:e}"
            )));
        }
        let (sn, cs) = (x_max * s).sin_cos();
        // −i·e^{−iXs}
        let rot = Complex::new(-sn, -cs);
        Ok(body.value + rot * ray.value)
    }
}

fn finish_breaks<T: Real>(pts: Vec<T>, lo: T, hi: T) -> Vec<T> {
    let mut v: Vec<T> = pts.into_iter().filter(|&x| x >= lo && x <= hi && x.is_finite()).collect();
    v.push(lo);
    v.push(hi);
    v.sort_by(|x, y| x.as_f64().total_cmp(&y.as_f64()));
    let mut out: Vec<T> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|&p| x - p > lit::<T>(16.0) * T::epsilon() * x.abs()) {
            out.push(x);
        }
    }
    if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}

fn scaled_times<T: Real>(spec: &OhmicSystemSpec<T>, times: &[T]) -> Result<Vec<T>> {
    check_times(times)?;
    Ok(times.iter().map(|&t| t * spec.bar_omega()).collect())
}

/// Direct adaptive quadrature of the continuum amplitude.
pub fn f00_quadrature<T: Real>(spec: &OhmicSystemSpec<T>, times: &[T]) -> Result<AmplitudeSeries<T>> {
    let c = Continuum::new(spec);
    let values = scaled_times(spec, times)?.into_par_iter().map(|s| c.quadrature(s)).collect::<Result<_>>()?;
    Ok(AmplitudeSeries { times: times.to_vec(), values, method: Method::Quadrature, regime: classify_regime(spec) })
}

/// Pole contribution plus `i·J(t)`, dispatched on the damping regime.
pub fn f00_closed<T: Real>(spec: &OhmicSystemSpec<T>, times: &[T]) -> Result<AmplitudeSeries<T>> {
    let c = Continuum::new(spec);
    let values = scaled_times(spec, times)?.into_par_iter().map(|s| c.closed(s)).collect::<Result<_>>()?;
    Ok(AmplitudeSeries { times: times.to_vec(), values, method: Method::ClosedForm, regime: classify_regime(spec) })
}

/// Pole part alone:
/// underdamped `(1 − iπg/2κ)e^{−iκt−πgt/2}`, critical `(1 − πgt/2)e^{−πgt/2}`,
/// overdamped `½[(1 + πg/2|κ|)e^{−(πg/2+|κ|)t} + (1 − πg/2|κ|)e^{−(πg/2−|κ|)t}]`.
pub fn pole_term<T: Real>(spec: &OhmicSystemSpec<T>, t: T) -> Complex<T> {
    Continuum::new(spec).pole(t * spec.bar_omega())
}

/// Real branch-cut integral `J(t) = 2g ∫₀^∞ y² e^{−yt} dy / [(y² + ω̄²)² − π²g²y²]`.
pub fn bath_integral_j<T: Real>(spec: &OhmicSystemSpec<T>, t: T) -> Result<T> {
    check_times(&[t])?;
    Continuum::new(spec).bath_integral(t * spec.bar_omega())
}
