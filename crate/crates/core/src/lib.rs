//! Dressed coordinates and dressed states for a harmonic oscillator linearly
//! coupled to an ohmic bath of `N` harmonic modes.
//!
//! The crate covers the normal-mode spectrum (finite `N`, the cavity
//! equation and its small-`L` asymptotics), the orthogonal transformation to
//! normal coordinates, survival amplitudes of the first excited dressed
//! level, the classical path of a coherently prepared dressed oscillator and
//! a dense eigensolver used as an independent oracle.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

// `!(x > 0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod brownian;
pub mod error;
pub mod model;
pub mod num;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod transform;

pub use amplitudes::{
    bath_integral_j, cavity_min_bound, cavity_survival_minimum, cavity_survival_series, f00_closed, f00_discrete,
    f00_quadrature, pole_term, solve_delta_max, survival_probability, AmplitudeSeries, CavitySurvivalBound, Method,
};
pub use brownian::{asymptotic_path, classical_path, path_closed_forms, CoherentPreparation};
pub use error::{Error, Result};
pub use model::{classify_regime, derive_parameters, DerivedParams, OhmicSystemSpec, Regime, RegimeKind};
pub use num::Real;
pub use oracle::{cross_validate, dense_mode_set, eigen_decompose, Check, ValidationReport};
pub use spectrum::{
    approx_small_l_spectrum, solve_cavity_spectrum, solve_finite_modes, solve_finite_spectrum, CavityVariant,
    NormalModeSet, SpectrumSource,
};
pub use transform::{
    cavity_weight_row, expansion_coefficient, finite_matrix, small_l_weights, CavityWeights, SmallLRegime,
    TransformMatrix,
};

pub type Spec = OhmicSystemSpec<f64>;
pub type Derived = DerivedParams<f64>;
pub type Modes = NormalModeSet<f64>;
pub type Transform = TransformMatrix<f64>;
pub type Amplitudes = AmplitudeSeries<f64>;
pub type Weights = CavityWeights<f64>;
pub type Preparation = CoherentPreparation<f64>;
