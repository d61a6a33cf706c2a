//! Normal-mode eigenfrequencies of the coupled oscillator + bath.
//!
//! Three routes are provided:
//!
//! * [`solve_finite_spectrum`]: the `N + 1` roots of the finite pole condition
//!   `ω₀² − Ω² = Σ c_k²/(ω_k² − Ω²)`, one per interval between bath frequencies.
//! * [`solve_cavity_spectrum`]: roots of the closed-form cotangent equation
//!   obtained in the `N → ∞` limit, one per branch of `cot(LΩ/2c)`.
//! * [`approx_small_l_spectrum`]: the linearized small-cavity asymptotics.
//!
//! Every root `Ω_r` is stored together with its detuning `Ω_r² − (rΔω)²`
//! from the bath frequency at the lower end of its bracket. Gaps such as
//! `ω_k² − Ω_r²` are rebuilt from the detuning, which keeps them accurate
//! even when a root sits extremely close to a bath frequency.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{derive_parameters, DerivedParams, OhmicSystemSpec};
use crate::num::{cot_pi, lit, Real};
use crate::roots::{hybrid_root, Bracket, RootOptions};

/// Relative residual every polished root must reach.
pub const ROOT_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumSource {
    FiniteN,
    CavityClosedForm,
    SmallLAsymptotic,
    DenseOracle,
}

impl SpectrumSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumSource::FiniteN => "finite-n",
            SpectrumSource::CavityClosedForm => "cavity",
            SpectrumSource::SmallLAsymptotic => "small-l",
            SpectrumSource::DenseOracle => "dense-oracle",
        }
    }
}

/// Which constant multiplies the `c/(LΩ)` term of the cavity spectrum equation.
///
/// `Published` keeps the constant 1 of the commonly quoted form
/// `cot(LΩ/2c) = Ω/πg + (c/LΩ)(1 − ω̄²L/πgc)`. `Rederived` uses the form
/// obtained by summing the pole condition exactly,
/// `cot(LΩ/2c) = Ω/πg + (2c/LΩ)(1 − ω̄²L/2πgc)`, which is the one whose
/// roots agree with the large-`N` finite spectrum and whose weights sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CavityVariant {
    Published,
    #[default]
    Rederived,
}

impl CavityVariant {
    fn multiplier(self) -> f64 {
        match self {
            CavityVariant::Published => 1.0,
            CavityVariant::Rederived => 2.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CavityVariant::Published => "paper",
            CavityVariant::Rederived => "rederived",
        }
    }
}

/// Sorted normal-mode frequencies with their particle weights `(t₀ʳ)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeSet<T> {
    frequencies: Vec<T>,
    weights: Vec<T>,
    /// `Ω_r² − ω_a²` with `a = anchors[r]`, the bath frequency nearest the root's bracket end.
    detunings: Vec<T>,
    anchors: Vec<usize>,
    /// Detunings come from the root solver rather than from `Ω_r² − (rΔω)²`.
    exact_detunings: bool,
    source: SpectrumSource,
    spec: OhmicSystemSpec<T>,
}

impl<T: Real> NormalModeSet<T> {
    /// Assemble a mode set from raw frequencies and weights.
    ///
    /// Frequencies must be positive and strictly increasing and weights
    /// non-negative. Detunings are recomputed from the frequencies, so gaps
    /// are only as accurate as the stored `Ω_r`.
    pub fn from_parts(
        spec: OhmicSystemSpec<T>,
        frequencies: Vec<T>,
        weights: Vec<T>,
        source: SpectrumSource,
    ) -> Result<Self> {
        if frequencies.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: frequencies.len(), found: weights.len() });
        }
        if frequencies.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::Input("frequencies must be finite and positive".into()));
        }
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("frequencies must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Input("weights must be finite and non-negative".into()));
        }
        let dw = derive_parameters(&spec).delta_omega;
        let detunings = frequencies
            .iter()
            .enumerate()
            .map(|(r, &om)| {
                let base = lit::<T>(r as f64) * dw;
                (om - base) * (om + base)
            })
            .collect();
        let anchors = (0..frequencies.len()).collect();
        Ok(Self { frequencies, weights, detunings, anchors, exact_detunings: false, source, spec })
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn spec(&self) -> &OhmicSystemSpec<T> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `ω_k² − Ω_r²`, rebuilt from the stored detuning of root `r`.
    pub fn square_gap(&self, k: usize, r: usize) -> T {
        let dw = derive_parameters(&self.spec).delta_omega;
        let kk = lit::<T>(k as f64);
        let aa = lit::<T>(self.anchors[r] as f64);
        (kk - aa) * (kk + aa) * dw * dw - self.detunings[r]
    }

    /// Whether gaps are rebuilt from solver detunings (accurate to working
    /// precision even for roots within rounding distance of a bath frequency).
    pub fn has_exact_detunings(&self) -> bool {
        self.exact_detunings
    }

    /// Replace the weights, keeping frequencies and detunings.
    pub fn with_weights(mut self, weights: Vec<T>) -> Result<Self> {
        if weights.len() != self.frequencies.len() {
            return Err(Error::DimensionMismatch { expected: self.frequencies.len(), found: weights.len() });
        }
        self.weights = weights;
        Ok(self)
    }

    /// Whether `Ω₀ < ω₁` and `ω_r < Ω_r < ω_{r+1}` hold for every stored root.
    /// The top root of a finite ladder is only bounded below by `ω_N`.
    /// Decided on the stored square gaps, which keep their sign for roots
    /// closer to a bath frequency than `Ω` itself can resolve.
    pub fn is_interlaced(&self) -> bool {
        let finite = matches!(self.source, SpectrumSource::FiniteN | SpectrumSource::DenseOracle);
        let n = self.spec.n_modes();
        self.frequencies.iter().enumerate().all(|(r, &om)| {
            let above = if r == 0 { om > T::zero() } else { self.square_gap(r, r) < T::zero() };
            above && ((finite && r == n) || self.square_gap(r + 1, r) > T::zero())
        })
    }
}

struct FiniteRoot<T> {
    omega: T,
    weight: T,
    detuning: T,
    anchor: usize,
}

/// All `N + 1` roots of the finite-`N` pole condition.
pub fn solve_finite_spectrum<T: Real>(spec: &OhmicSystemSpec<T>) -> Result<NormalModeSet<T>> {
    solve_finite_modes(spec, spec.n_modes() + 1)
}

/// The lowest `count` roots of the finite-`N` pole condition (`count ≤ N + 1`).
pub fn solve_finite_modes<T: Real>(spec: &OhmicSystemSpec<T>, count: usize) -> Result<NormalModeSet<T>> {
    let d = derive_parameters(spec);
    let n = spec.n_modes();
    if count == 0 || count > n + 1 {
        return Err(Error::Input(format!("requested {count} roots, system has {}", n + 1)));
    }
    if !(d.renormalized_sq() > T::zero()) {
        return Err(Error::Stability(
            "ω₀² ≤ N·η²: the pole condition admits a negative Ω² (damped collective mode)".into(),
        ));
    }
    let roots: Vec<FiniteRoot<T>> =
        (0..count).into_par_iter().map(|r| finite_root(spec, &d, r)).collect::<Result<_>>()?;
    let mut frequencies = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut detunings = Vec::with_capacity(count);
    let mut anchors = Vec::with_capacity(count);
    for root in roots {
        frequencies.push(root.omega);
        weights.push(root.weight);
        detunings.push(root.detuning);
        anchors.push(root.anchor);
    }
    Ok(NormalModeSet {
        frequencies,
        weights,
        detunings,
        anchors,
        exact_detunings: true,
        source: SpectrumSource::FiniteN,
        spec: *spec,
    })
}

/// Pole condition in the renormalized form, in units of Δω²:
/// `F(x) = ω̄² − x − η² x Σ_j 1/(j² − x)` with `x = a² + σ·s·w`.
///
/// The anchor `a` is the bracket end nearest the root (`σ = +1` for the lower
/// end `r`, `−1` for the upper end `r + 1`), so `s` resolves roots lying within
/// rounding distance of either asymptote.
struct FinitePoleCondition<T> {
    bar_sq: T,
    eta_sq: T,
    n: usize,
    anchor: usize,
    sign: T,
    width: T,
}

impl<T: Real> FinitePoleCondition<T> {
    fn offset(&self, s: T) -> T {
        self.sign * s * self.width
    }

    fn gap(&self, j: usize, s: T) -> T {
        let jj = lit::<T>(j as f64);
        let aa = lit::<T>(self.anchor as f64);
        (jj - aa) * (jj + aa) - self.offset(s)
    }

    fn x(&self, s: T) -> T {
        let aa = lit::<T>(self.anchor as f64);
        aa * aa + self.offset(s)
    }

    /// Value, derivative in `s`, and the scale used for relative residuals.
    fn eval(&self, s: T) -> (T, T, T) {
        let x = self.x(s);
        let mut sum = T::zero();
        let mut sum_abs = T::zero();
        let mut sum_sq = T::zero();
        for j in 1..=self.n {
            let inv = T::one() / self.gap(j, s);
            sum = sum + inv;
            sum_abs = sum_abs + inv.abs();
            sum_sq = sum_sq + inv * inv;
        }
        let value = self.bar_sq - x - self.eta_sq * x * sum;
        let deriv = self.sign * self.width * (-T::one() - self.eta_sq * (sum + x * sum_sq));
        let scale = self.bar_sq + x + self.eta_sq * x * sum_abs;
        (value, deriv, scale)
    }

    /// `(t₀)² = [1 + η² Σ j²/(j² − x)²]⁻¹`
    fn weight(&self, s: T) -> T {
        let mut acc = T::zero();
        for j in 1..=self.n {
            let jj = lit::<T>(j as f64);
            let g = self.gap(j, s);
            acc = acc + jj * jj / (g * g);
        }
        T::one() / (T::one() + self.eta_sq * acc)
    }
}

fn finite_root<T: Real>(spec: &OhmicSystemSpec<T>, d: &DerivedParams<T>, r: usize) -> Result<FiniteRoot<T>> {
    let n = spec.n_modes();
    let dw2 = d.delta_omega * d.delta_omega;
    let mut cond = FinitePoleCondition {
        bar_sq: spec.bar_omega() * spec.bar_omega() / dw2,
        eta_sq: d.eta_sq() / dw2,
        n,
        anchor: r,
        sign: T::one(),
        width: lit::<T>((2 * r + 1) as f64),
    };
    if r == n {
        // Last root lies above ω_N; grow the upper end until F changes sign.
        let nn = lit::<T>(n as f64);
        let base = nn.max(d.omega0 / d.delta_omega);
        let mut factor = lit::<T>(1.5);
        let max_factor = lit::<T>(1024.0);
        loop {
            let top = factor * base;
            cond.width = (top - nn) * (top + nn);
            if cond.eval(T::one()).0 < T::zero() {
                break;
            }
            factor = factor * lit(2.0);
            if factor > max_factor {
                return Err(Error::NumericalFailure(format!(
                    "no sign change above ω_N = {} after expanding the bracket to {}",
                    d.omega_k(n),
                    max_factor * base * d.delta_omega
                )));
            }
        }
    }
    if r < n && cond.eval(lit(0.5)).0 > T::zero() {
        cond.anchor = r + 1;
        cond.sign = -T::one();
    }
    let increasing = cond.sign < T::zero();
    let bracket = Bracket { lo: T::zero(), hi: T::one(), increasing };
    let s = hybrid_root(
        |s| {
            let (v, dv, _) = cond.eval(s);
            (v, dv)
        },
        bracket,
        RootOptions::default(),
    )
    .map_err(|e| Error::NumericalFailure(format!("finite-N root {r}: {e}")))?;
    let (value, _, scale) = cond.eval(s);
    if value.abs() > T::tol(ROOT_RESIDUAL) * scale {
        return Err(Error::NumericalFailure(format!(
            "finite-N root {r}: relative residual {:e} above {ROOT_RESIDUAL:e}",
            value.abs() / scale
        )));
    }
    let x = cond.x(s);
    Ok(FiniteRoot {
        omega: d.delta_omega * x.sqrt(),
        weight: cond.weight(s),
        detuning: cond.offset(s) * dw2,
        anchor: cond.anchor,
    })
}

/// Cotangent spectrum equation written for `Ω = Δω·(k + ε)`:
/// `G(ε) = cot(πε) − (k + ε)/δ − (m/2π − b)/(k + ε)` with `b = δ/(π²β²)`.
///
/// Evaluated in `u` with `k + ε = a + σu`, anchored at `a = k` (`σ = +1`) or
/// `a = k + 1` (`σ = −1`) as for the finite-`N` condition.
struct CavityCondition<T> {
    anchor: T,
    sign: T,
    inv_delta: T,
    tail: T,
}

impl<T: Real> CavityCondition<T> {
    fn new(d: &DerivedParams<T>, k: usize, variant: CavityVariant) -> Self {
        let b = d.delta / (T::PI() * T::PI() * d.beta * d.beta);
        let mut cond = Self {
            anchor: lit(k as f64),
            sign: T::one(),
            inv_delta: T::one() / d.delta,
            tail: lit::<T>(variant.multiplier()) / (lit::<T>(2.0) * T::PI()) - b,
        };
        if cond.eval(lit(0.5)).0 > T::zero() {
            cond.anchor = cond.anchor + T::one();
            cond.sign = -T::one();
        }
        cond
    }

    fn x(&self, u: T) -> T {
        self.anchor + self.sign * u
    }

    /// Value, derivative in `u`, and the residual scale.
    fn eval(&self, u: T) -> (T, T, T) {
        let x = self.x(u);
        // cot(π(1 − u)) = −cot(πu)
        let cot = self.sign * cot_pi(u);
        let sin = (T::PI() * u).sin();
        let value = cot - x * self.inv_delta - self.tail / x;
        let deriv = self.sign * (-T::PI() / (sin * sin) - self.inv_delta + self.tail / (x * x));
        let scale = cot.abs() + x * self.inv_delta + (self.tail / x).abs();
        (value, deriv, scale)
    }
}

/// The lowest `k_max + 1` roots of the cavity spectrum equation, with weights
/// from the closed-form matrix element `(t₀ʳ)²`.
pub fn solve_cavity_spectrum<T: Real>(
    spec: &OhmicSystemSpec<T>,
    k_max: usize,
    variant: CavityVariant,
) -> Result<NormalModeSet<T>> {
    if k_max < 1 {
        return Err(Error::Input("k_max must be at least 1".into()));
    }
    let d = derive_parameters(spec);
    let roots: Vec<(usize, T, T)> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let cond = CavityCondition::new(&d, k, variant);
            let u = hybrid_root(
                |u| {
                    let (v, dv, _) = cond.eval(u);
                    (v, dv)
                },
                Bracket { lo: T::zero(), hi: T::one(), increasing: cond.sign < T::zero() },
                RootOptions::default(),
            )
            .map_err(|err| Error::NumericalFailure(format!("cavity root {k}: {err}")))?;
            let (value, _, scale) = cond.eval(u);
            if value.abs() > T::tol(ROOT_RESIDUAL) * scale {
                return Err(Error::NumericalFailure(format!(
                    "cavity root {k}: relative residual {:e} above {ROOT_RESIDUAL:e}",
                    value.abs() / scale
                )));
            }
            let anchor = if cond.sign > T::zero() { k } else { k + 1 };
            Ok((anchor, cond.x(u), cond.sign * u))
        })
        .collect::<Result<_>>()?;
    let dw = d.delta_omega;
    let frequencies: Vec<T> = roots.iter().map(|&(_, x, _)| dw * x).collect();
    // Ω² − ω_a² = Δω²·v(2a + v) with v the signed offset from the anchor.
    let detunings = roots.iter().map(|&(a, _, v)| dw * dw * v * (lit::<T>(2.0 * a as f64) + v)).collect();
    let anchors = roots.iter().map(|&(a, _, _)| a).collect();
    let weights = frequencies.iter().map(|&om| cavity_weight(spec, &d, om)).collect();
    Ok(NormalModeSet {
        frequencies,
        weights,
        anchors,
        detunings,
        exact_detunings: true,
        source: SpectrumSource::CavityClosedForm,
        spec: *spec,
    })
}

/// `(t₀ʳ)² = η²Ω² / [(Ω² − ω̄²)² + (η²/2)(3Ω² − ω̄²) + π²g²Ω²]`
pub(crate) fn cavity_weight<T: Real>(spec: &OhmicSystemSpec<T>, d: &DerivedParams<T>, omega: T) -> T {
    let w2 = omega * omega;
    let b2 = spec.bar_omega() * spec.bar_omega();
    let pg = T::PI() * spec.g();
    let eta2 = d.eta_sq();
    let diff = (omega - spec.bar_omega()) * (omega + spec.bar_omega());
    let den = diff * diff + eta2 / lit(2.0) * (lit::<T>(3.0) * w2 - b2) + pg * pg * w2;
    eta2 * w2 / den
}

/// Linearized small-cavity spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallLSpectrum<T> {
    /// `ω̄/√(1 + πgL/2c)`
    pub omega_0: T,
    /// `ε_k` for `k = 1..=k_max`, with `Ω_k = (2πc/L)(k + ε_k)`.
    pub epsilons: Vec<T>,
    pub validity_factor: T,
    pub k_max: usize,
    pub delta_omega: T,
}

impl<T: Real> SmallLSpectrum<T> {
    /// `[Ω₀, Ω₁, …, Ω_kmax]`
    pub fn frequencies(&self) -> Vec<T> {
        std::iter::once(self.omega_0)
            .chain(self.epsilons.iter().enumerate().map(|(i, &e)| self.delta_omega * (lit::<T>((i + 1) as f64) + e)))
            .collect()
    }
}

pub fn approx_small_l_spectrum<T: Real>(spec: &OhmicSystemSpec<T>, k_max: usize) -> Result<SmallLSpectrum<T>> {
    if k_max < 1 {
        return Err(Error::Input("k_max must be at least 1".into()));
    }
    let d = derive_parameters(spec);
    let (c, l, g, wb) = (spec.light_speed(), spec.cavity_l(), spec.g(), spec.bar_omega());
    let pi = T::PI();
    let four_pi2_c2 = lit::<T>(4.0) * pi * pi * c * c;
    let wl2 = wb * wb * l * l;
    let factor = cavity_smallness_factor(spec);
    if d.delta > lit::<T>(0.1) * factor.f {
        log::warn!("small-L asymptotics used outside their range: δ = {} is not ≪ f = {}", d.delta, factor.f);
    }
    let mut epsilons = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kk = lit::<T>(k as f64);
        let resonance = four_pi2_c2 * kk * kk;
        let den = resonance - wl2;
        if den.abs() <= T::tol(1e-12) * resonance {
            return Err(Error::Singularity(format!("4π²c²k² = ω̄²L² at k = {k}")));
        }
        let eps = lit::<T>(4.0) * pi * g * c * l * kk / (lit::<T>(2.0) * den);
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::Input(format!(
                "linearized ε_{k} = {eps} outside (0, 1); the cavity is not small enough"
            )));
        }
        epsilons.push(eps);
    }
    let omega_0 = wb / (T::one() + pi * g * l / (lit::<T>(2.0) * c)).sqrt();
    Ok(SmallLSpectrum { omega_0, epsilons, validity_factor: factor.f, k_max, delta_omega: d.delta_omega })
}

/// Small-cavity condition `L ≪ (2c/g)·f` and its weak/strong-coupling limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessFactor<T> {
    /// `(π/2)β²(1 + √(1 + 4/(π²β²)))`
    pub f: T,
    /// `β`
    pub f_weak: T,
    /// `(π/2)β²`
    pub f_strong: T,
}

pub fn cavity_smallness_factor<T: Real>(spec: &OhmicSystemSpec<T>) -> SmallnessFactor<T> {
    smallness_factor_for_beta(spec.g() / spec.bar_omega())
}

pub fn smallness_factor_for_beta<T: Real>(beta: T) -> SmallnessFactor<T> {
    let pi = T::PI();
    let half_pi_b2 = pi / lit(2.0) * beta * beta;
    let root = (T::one() + lit::<T>(4.0) / (pi * pi * beta * beta)).sqrt();
    SmallnessFactor { f: half_pi_b2 * (T::one() + root), f_weak: beta, f_strong: half_pi_b2 }
}

/// `Σ_{k≥1} 1/(k² − u²) = 1/(2u²) − (π/2u)·cot(πu)`, continued to `u = 0`.
pub fn series_identity_closed<T: Real>(u: T) -> T {
    let pi = T::PI();
    if u.abs() < lit(1e-3) {
        // Σ_m ζ(2m) u^{2m−2}
        let u2 = u * u;
        let p2 = pi * pi;
        let z2 = p2 / lit(6.0);
        let z4 = p2 * p2 / lit(90.0);
        let z6 = p2 * p2 * p2 / lit(945.0);
        let z8 = p2 * p2 * p2 * p2 / lit(9450.0);
        return z2 + u2 * (z4 + u2 * (z6 + u2 * z8));
    }
    T::one() / (lit::<T>(2.0) * u * u) - pi / (lit::<T>(2.0) * u) / (pi * u).tan()
}

/// `|Σ_{k=1}^{n} 1/(k² − u²) − closed(u)|`. The partial sum is accumulated
/// from the smallest term upwards.
pub fn series_identity_residual<T: Real>(u: T, n_terms: usize) -> Result<T> {
    if n_terms == 0 {
        return Err(Error::Input("n_terms must be positive".into()));
    }
    let nearest = u.abs().round();
    if nearest >= T::one() && (u.abs() - nearest).abs() < lit(1e-6) {
        return Err(Error::Input(format!("u = {u} is within 1e-6 of the pole at {nearest}")));
    }
    let u2 = u * u;
    let partial = (1..=n_terms).rev().fold(T::zero(), |acc, k| {
        let kk = lit::<T>(k as f64);
        acc + T::one() / (kk * kk - u2)
    });
    Ok((partial - series_identity_closed(u)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_spec(n: usize, g: f64) -> OhmicSystemSpec<f64> {
        OhmicSystemSpec::new(1.0, g, 1.0, n).unwrap().with_light_speed(1.0).unwrap()
    }

    #[test]
    fn finite_spectrum_matches_dense_eigensolver() {
        // frozen from a dense symmetric eigensolver on the (N+1)×(N+1) potential matrix
        let omega = [
            0.97614656,
            6.3828263,
            12.61646962,
            18.88299266,
            25.15783155,
            31.43600674,
            37.7158529,
            43.99665643,
            50.27806571,
        ];
        let weight = [
            0.952072633,
            0.0310833387,
            0.00795589828,
            0.00355212255,
            0.00200173633,
            0.00128261053,
            0.000891688966,
            0.000656095271,
            0.000503876136,
        ];
        let modes = solve_finite_spectrum(&unit_spec(8, 0.1)).unwrap();
        for r in 0..9 {
            assert!((modes.frequencies()[r] - omega[r]).abs() < 1e-7);
            assert!((modes.weights()[r] - weight[r]).abs() / weight[r] < 1e-7);
        }
    }

    #[test]
    fn single_mode_matches_quadratic() {
        let spec = unit_spec(1, 0.1);
        let d = spec.derived();
        let modes = solve_finite_spectrum(&spec).unwrap();
        let (a, b, c1) = (d.omega0 * d.omega0, d.omega_k(1).powi(2), d.c_k(1));
        let disc = ((a - b).powi(2) + 4.0 * c1 * c1).sqrt();
        let lo = ((a + b - disc) / 2.0).sqrt();
        let hi = ((a + b + disc) / 2.0).sqrt();
        assert!((modes.frequencies()[0] - lo).abs() / lo < 1e-12);
        assert!((modes.frequencies()[1] - hi).abs() / hi < 1e-12);
        assert!((modes.weight_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoupled_limit() {
        let spec = unit_spec(6, 1e-9);
        let modes = solve_finite_spectrum(&spec).unwrap();
        let d = spec.derived();
        assert!((modes.frequencies()[0] - 1.0).abs() < 1e-7);
        for k in 1..=6 {
            let rel = (modes.frequencies()[k] - d.omega_k(k)) / d.omega_k(k);
            assert!(rel.abs() < 1e-7 && rel > 0.0);
        }
        assert!((modes.weights()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interlacing_and_sum_rule() {
        for n in [1, 3, 8, 40] {
            let modes = solve_finite_spectrum(&unit_spec(n, 0.3)).unwrap();
            assert_eq!(modes.len(), n + 1);
            assert!(modes.is_interlaced());
            let s = modes.weight_sum();
            assert!((1.0 - 1e-8..=1.0 + 1e-12).contains(&s), "{n}: {s}");
        }
    }

    #[test]
    fn lowest_root_decreases_with_coupling() {
        let mut last = f64::INFINITY;
        for i in 1..=12 {
            let g = 0.05 * i as f64;
            let w0 = solve_finite_modes(&unit_spec(16, g), 1).unwrap().frequencies()[0];
            assert!(w0 < last, "g = {g}");
            last = w0;
        }
    }

    #[test]
    fn partial_solve_matches_full() {
        let spec = unit_spec(20, 0.2);
        let full = solve_finite_spectrum(&spec).unwrap();
        let part = solve_finite_modes(&spec, 5).unwrap();
        assert_eq!(&full.frequencies()[..5], part.frequencies());
        assert!(solve_finite_modes(&spec, 22).is_err());
    }

    #[test]
    fn cavity_roots_interlace_and_weights_sum_below_one() {
        let spec =
            OhmicSystemSpec::from_dimensionless(4e14, 1.0 / 137.0, 0.005, crate::model::SPEED_OF_LIGHT, 1).unwrap();
        for variant in [CavityVariant::Published, CavityVariant::Rederived] {
            let modes = solve_cavity_spectrum(&spec, 200, variant).unwrap();
            assert_eq!(modes.len(), 201);
            assert!(modes.is_interlaced());
            assert!(modes.weight_sum() < 1.0);
        }
        assert!(matches!(solve_cavity_spectrum(&spec, 0, CavityVariant::Rederived), Err(Error::Input(_))));
    }

    #[test]
    fn rederived_cavity_matches_large_n() {
        let spec = unit_spec(4000, 0.1);
        let finite = solve_finite_modes(&spec, 6).unwrap();
        let cavity = solve_cavity_spectrum(&spec, 5, CavityVariant::Rederived).unwrap();
        for (a, b) in finite.frequencies().iter().zip(cavity.frequencies()) {
            assert!((a - b).abs() / b < 1e-4, "{a} {b}");
        }
        let published = solve_cavity_spectrum(&spec, 5, CavityVariant::Published).unwrap();
        assert!((published.frequencies()[0] - finite.frequencies()[0]).abs() > 1e-2);
    }

    #[test]
    fn small_l_matches_exact_excited_modes() {
        let spec =
            OhmicSystemSpec::from_dimensionless(4e14, 1.0 / 137.0, 0.005, crate::model::SPEED_OF_LIGHT, 1).unwrap();
        let approx = approx_small_l_spectrum(&spec, 50).unwrap();
        assert!(approx.epsilons.iter().all(|&e| e > 0.0 && e < 1.0));
        assert!(approx.omega_0 <= spec.bar_omega());
        let approx_freq = approx.frequencies();
        for variant in [CavityVariant::Published, CavityVariant::Rederived] {
            let exact = solve_cavity_spectrum(&spec, 50, variant).unwrap();
            for (k, (&a, &e)) in approx_freq.iter().zip(exact.frequencies()).enumerate().skip(1) {
                let rel = (a - e).abs() / e;
                assert!(rel < 1e-4, "k = {k}: {rel}");
            }
        }
    }

    #[test]
    fn small_l_gap_shrinks_quadratically() {
        // Excited-mode gap between the linearization and the exact roots scales as δ².
        let gap = |delta: f64| {
            let spec = OhmicSystemSpec::from_dimensionless(1.0f64, 0.5, delta, 1.0, 1).unwrap();
            let approx = approx_small_l_spectrum(&spec, 50).unwrap().frequencies();
            let exact = solve_cavity_spectrum(&spec, 50, CavityVariant::Rederived).unwrap();
            (1..=50).map(|k| (approx[k] - exact.frequencies()[k]).abs() / exact.frequencies()[k]).fold(0.0, f64::max)
        };
        let (a, b) = (gap(1e-2), gap(1e-3));
        assert!(a / b > 50.0 && a / b < 200.0, "{a} {b}");
    }

    #[test]
    fn small_l_lowest_mode_limits() {
        // As δ → 0 at fixed β the exact lowest root approaches ω̄/√(1 + πδ/3),
        // whereas the linearized closed form carries πδ in place of πδ/3.
        let delta = 1e-4;
        let spec = OhmicSystemSpec::from_dimensionless(1.0, 1.0, delta, 1.0, 1).unwrap();
        let exact = solve_cavity_spectrum(&spec, 1, CavityVariant::Rederived).unwrap().frequencies()[0];
        let limit = 1.0 / (1.0 + PI * delta / 3.0).sqrt();
        assert!((exact - limit).abs() < 1e-6, "{exact} {limit}");
        let approx = approx_small_l_spectrum(&spec, 1).unwrap().omega_0;
        assert!((approx - 1.0 / (1.0 + PI * delta).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn small_l_decoupled_and_singular() {
        let spec = OhmicSystemSpec::from_dimensionless(1.0f64, 1e-12, 1e-12, 1.0, 1).unwrap();
        let approx = approx_small_l_spectrum(&spec, 5).unwrap();
        assert!(approx.epsilons.iter().all(|&e| e < 1e-11));
        assert!((approx.omega_0 - 1.0).abs() < 1e-11);
        // ω̄L = 2πc·k exactly at k = 1
        let spec = OhmicSystemSpec::new(1.0, 0.1, 2.0 * PI, 1).unwrap().with_light_speed(1.0).unwrap();
        assert!(matches!(approx_small_l_spectrum(&spec, 3), Err(Error::Singularity(_))));
    }

    #[test]
    fn smallness_factor_limits() {
        let weak = smallness_factor_for_beta(1.0f64 / 137.0);
        // f = β + (π/2)β² + O(β³)
        let beta = 1.0 / 137.0;
        assert!((weak.f / beta - 1.0 - PI / 2.0 * beta).abs() < 1e-4);
        let strong = smallness_factor_for_beta(10.0f64);
        // f → πβ² = 2·f_strong for β ≫ 1
        assert!((strong.f / strong.f_strong - 2.0).abs() < 5e-3);
        let one = smallness_factor_for_beta(1.0f64);
        let direct = PI / 2.0 * (1.0 + (1.0 + 4.0 / (PI * PI)).sqrt());
        assert!((one.f - direct).abs() < 1e-15);
        for b in [1e-3f64, 0.1, 1.0, 10.0, 1e3] {
            let s = smallness_factor_for_beta(b);
            assert!(s.f > s.f_weak && s.f > s.f_strong);
        }
    }

    #[test]
    fn series_identity_values() {
        // telescoping: Σ 1/(k² − 1/4) = 2
        assert!((series_identity_closed(0.5f64) - 2.0).abs() < 1e-14);
        assert!((series_identity_closed(0.0f64) - PI * PI / 6.0).abs() < 1e-15);
        assert!((series_identity_closed(1e-6f64) - PI * PI / 6.0).abs() < 1e-10);
        // series and direct branches agree across the switch
        let lhs = series_identity_closed(0.999e-3f64);
        let rhs = 1.0 / (2.0 * 1.001e-3f64.powi(2)) - PI / (2.0 * 1.001e-3) / (PI * 1.001e-3).tan();
        assert!((lhs - rhs).abs() < 1e-8);
        assert!(series_identity_residual(1.0 + 1e-7, 10).is_err());
        assert!(series_identity_residual(0.3, 0).is_err());
    }

    #[test]
    fn series_residual_decays_like_inverse_n() {
        for &u in &[0.1f64, 0.3, 0.7] {
            let r3 = series_identity_residual(u, 1_000).unwrap();
            let r4 = series_identity_residual(u, 10_000).unwrap();
            assert!((r3 * 1_000.0 - 1.0).abs() < 1e-2, "{u}: {r3}");
            assert!((r3 / r4 - 10.0).abs() < 0.1);
        }
    }
}
