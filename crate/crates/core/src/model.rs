//! System parameters, derived quantities and regime classification.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Relative tolerance on κ² (in units of ω̄²) inside which the system is treated as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;

/// Physical description of an oscillator coupled to an ohmic bath.
///
/// The bath is a ladder of `n_modes` oscillators spaced by `2πc/L`; the
/// coupling to mode `k` is `η·ω_k` with `η² = 2g·Δω`. The oscillator
/// frequency given here is the renormalized one, so the bare frequency is
/// recovered as `ω₀² = ω̄² + N·η²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicSystemSpec<T> {
    bar_omega: T,
    g: T,
    cavity_l: T,
    light_speed: T,
    n_modes: usize,
    hbar: T,
}

fn positive<T: Real>(field: &'static str, value: T) -> Result<T> {
    if value.is_finite() && value > T::zero() {
        Ok(value)
    } else {
        Err(Error::parameter(field, format!("must be finite and > 0, got {value}")))
    }
}

impl<T: Real> OhmicSystemSpec<T> {
    /// Build a spec with the default propagation speed (vacuum light speed) and `ħ = 1`.
    pub fn new(bar_omega: T, g: T, cavity_l: T, n_modes: usize) -> Result<Self> {
        Self::with_all(bar_omega, g, cavity_l, lit(SPEED_OF_LIGHT), n_modes, T::one())
    }

    pub fn with_all(bar_omega: T, g: T, cavity_l: T, light_speed: T, n_modes: usize, hbar: T) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::parameter("n_modes", "must be at least 1"));
        }
        Ok(Self {
            bar_omega: positive("bar_omega", bar_omega)?,
            g: positive("g", g)?,
            cavity_l: positive("cavity_L", cavity_l)?,
            light_speed: positive("light_speed", light_speed)?,
            n_modes,
            hbar: positive("hbar", hbar)?,
        })
    }

    /// Build a spec from the dimensionless coupling `β = g/ω̄` and cavity parameter `δ = Lg/2c`.
    pub fn from_dimensionless(bar_omega: T, beta: T, delta: T, light_speed: T, n_modes: usize) -> Result<Self> {
        let bar_omega = positive("bar_omega", bar_omega)?;
        let beta = positive("beta", beta)?;
        let delta = positive("delta", delta)?;
        let light_speed = positive("light_speed", light_speed)?;
        let g = beta * bar_omega;
        let cavity_l = lit::<T>(2.0) * light_speed * delta / g;
        Self::with_all(bar_omega, g, cavity_l, light_speed, n_modes, T::one())
    }

    pub fn with_light_speed(self, light_speed: T) -> Result<Self> {
        Self::with_all(self.bar_omega, self.g, self.cavity_l, light_speed, self.n_modes, self.hbar)
    }

    pub fn with_hbar(self, hbar: T) -> Result<Self> {
        Self::with_all(self.bar_omega, self.g, self.cavity_l, self.light_speed, self.n_modes, hbar)
    }

    pub fn with_n_modes(self, n_modes: usize) -> Result<Self> {
        Self::with_all(self.bar_omega, self.g, self.cavity_l, self.light_speed, n_modes, self.hbar)
    }

    pub fn with_coupling(self, g: T) -> Result<Self> {
        Self::with_all(self.bar_omega, g, self.cavity_l, self.light_speed, self.n_modes, self.hbar)
    }

    pub fn with_cavity_length(self, cavity_l: T) -> Result<Self> {
        Self::with_all(self.bar_omega, self.g, cavity_l, self.light_speed, self.n_modes, self.hbar)
    }

    /// Renormalized oscillator frequency ω̄.
    pub fn bar_omega(&self) -> T {
        self.bar_omega
    }

    /// Ohmic coupling strength g.
    pub fn g(&self) -> T {
        self.g
    }

    pub fn cavity_l(&self) -> T {
        self.cavity_l
    }

    pub fn light_speed(&self) -> T {
        self.light_speed
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn derived(&self) -> DerivedParams<T> {
        derive_parameters(self)
    }

    pub fn regime(&self) -> Regime<T> {
        classify_regime(self)
    }
}

/// Quantities that follow from an [`OhmicSystemSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams<T> {
    /// Bath mode spacing `2πc/L`.
    pub delta_omega: T,
    /// Coupling normalization `√(2g·Δω)`.
    pub eta: T,
    /// Bare oscillator frequency `√(ω̄² + N·η²)`.
    pub omega0: T,
    /// `ω̄² − π²g²/4`.
    pub kappa_sq: T,
    /// `g/ω̄`.
    pub beta: T,
    /// `L·g/(2c)`.
    pub delta: T,
    pub n_modes: usize,
    bar_omega: T,
}

impl<T: Real> DerivedParams<T> {
    pub fn eta_sq(&self) -> T {
        self.eta * self.eta
    }

    /// Bath frequency `k·Δω`. Index 0 is the (absent) zero mode.
    pub fn omega_k(&self, k: usize) -> T {
        lit::<T>(k as f64) * self.delta_omega
    }

    /// Coupling `η·ω_k`.
    pub fn c_k(&self, k: usize) -> T {
        self.eta * self.omega_k(k)
    }

    /// `ω₀² − N·η²`, which reproduces ω̄² up to rounding.
    pub fn renormalized_sq(&self) -> T {
        self.omega0 * self.omega0 - lit::<T>(self.n_modes as f64) * self.eta_sq()
    }

    pub fn bar_omega(&self) -> T {
        self.bar_omega
    }
}

/// Compute every derived parameter. The spec constructor already enforces positivity.
pub fn derive_parameters<T: Real>(spec: &OhmicSystemSpec<T>) -> DerivedParams<T> {
    let two = lit::<T>(2.0);
    let delta_omega = two * T::PI() * spec.light_speed / spec.cavity_l;
    let eta_sq = two * spec.g * delta_omega;
    let n = lit::<T>(spec.n_modes as f64);
    let omega0 = (spec.bar_omega * spec.bar_omega + n * eta_sq).sqrt();
    let pg = T::PI() * spec.g;
    DerivedParams {
        delta_omega,
        eta: eta_sq.sqrt(),
        omega0,
        kappa_sq: spec.bar_omega * spec.bar_omega - pg * pg / lit(4.0),
        beta: spec.g / spec.bar_omega,
        delta: spec.cavity_l * spec.g / (two * spec.light_speed),
        n_modes: spec.n_modes,
        bar_omega: spec.bar_omega,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    Underdamped,
    Critical,
    Overdamped,
}

impl RegimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeKind::Underdamped => "underdamped",
            RegimeKind::Critical => "critical",
            RegimeKind::Overdamped => "overdamped",
        }
    }
}

impl std::fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Damping regime selected by the sign of `κ² = ω̄² − π²g²/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime<T> {
    pub kind: RegimeKind,
    pub kappa_sq: T,
    /// `√|κ²|`
    pub kappa_abs: T,
}

pub fn classify_regime<T: Real>(spec: &OhmicSystemSpec<T>) -> Regime<T> {
    let kappa_sq = derive_parameters(spec).kappa_sq;
    let tau = lit::<T>(CRITICAL_TOLERANCE) * spec.bar_omega * spec.bar_omega;
    let kind = if kappa_sq > tau {
        RegimeKind::Underdamped
    } else if kappa_sq < -tau {
        RegimeKind::Overdamped
    } else {
        RegimeKind::Critical
    };
    Regime { kind, kappa_sq, kappa_abs: kappa_sq.abs().sqrt() }
}
