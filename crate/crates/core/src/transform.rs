//! Orthogonal map between bare coordinates `q_μ` and normal coordinates `Q_r`,
//! the dressed coordinates built on it, and the expansion of dressed number
//! states over normal-mode number states.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{derive_parameters, OhmicSystemSpec};
use crate::num::{lit, ln_factorial, Real};
use crate::spectrum::{cavity_weight, NormalModeSet, SpectrumSource};

/// Above this order the multinomial prefactor is refused.
pub const MAX_EXPANSION_LEVEL: u32 = 20;

const LINEAR_LOG_LIMIT: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformSource {
    FiniteN,
    CavityContinuumRow,
}

/// Row-major matrix of `t_μʳ`: rows are bare coordinates (0 = particle),
/// columns are normal modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix<T> {
    data: Vec<T>,
    rows: usize,
    cols: usize,
    source: TransformSource,
}

impl<T: Real> TransformMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>, source: TransformSource) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch { expected: n_cols, found: bad.len() });
        }
        Ok(Self { data: rows.into_iter().flatten().collect(), rows: n_rows, cols: n_cols, source })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn source(&self) -> TransformSource {
        self.source
    }

    /// `t_μʳ`
    pub fn get(&self, mu: usize, r: usize) -> T {
        self.data[mu * self.cols + r]
    }

    pub fn row(&self, mu: usize) -> &[T] {
        &self.data[mu * self.cols..(mu + 1) * self.cols]
    }

    pub fn column(&self, r: usize) -> Vec<T> {
        (0..self.rows).map(|mu| self.get(mu, r)).collect()
    }

    /// `max_{r,s} |Σ_μ t_μʳ t_μˢ − δ_rs|`
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.cols {
            for s in r..self.cols {
                let dot: T = (0..self.rows).map(|mu| self.get(mu, r) * self.get(mu, s)).sum();
                let target = if r == s { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `|Σ_r (t₀ʳ)² − 1|`
    pub fn row_sum_error(&self) -> T {
        let s: T = self.row(0).iter().map(|&t| t * t).sum();
        (s - T::one()).abs()
    }

    /// `Σ_r Ω_r² t_μʳ t_νʳ` for all `μ, ν`, row-major.
    pub fn reconstruct_potential(&self, frequencies: &[T]) -> Result<Vec<T>> {
        if frequencies.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: frequencies.len() });
        }
        let mut out = vec![T::zero(); self.rows * self.rows];
        for mu in 0..self.rows {
            for nu in 0..self.rows {
                out[mu * self.rows + nu] =
                    (0..self.cols).map(|r| frequencies[r] * frequencies[r] * self.get(mu, r) * self.get(nu, r)).sum();
            }
        }
        Ok(out)
    }
}

/// Full `(N+1)×(N+1)` transformation for a finite-`N` mode set.
///
/// Sets assembled from bare frequencies are rejected when some `Ω_r` lies
/// within `1e-12` (relative) of a bath frequency; solver output carries exact
/// detunings and is rejected only on an exact coincidence.
pub fn finite_matrix<T: Real>(spec: &OhmicSystemSpec<T>, modes: &NormalModeSet<T>) -> Result<TransformMatrix<T>> {
    let n = spec.n_modes();
    if modes.source() != SpectrumSource::FiniteN && modes.source() != SpectrumSource::DenseOracle {
        return Err(Error::Input(format!("finite matrix needs a finite-N mode set, got {}", modes.source().as_str())));
    }
    if modes.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: modes.len() });
    }
    let d = derive_parameters(spec);
    let columns: Vec<Vec<T>> = (0..=n)
        .into_par_iter()
        .map(|r| {
            let mut gaps = Vec::with_capacity(n);
            for k in 1..=n {
                let gap = modes.square_gap(k, r);
                let wk = d.omega_k(k);
                let limit = if modes.has_exact_detunings() { T::zero() } else { T::tol(1e-12) * wk * wk };
                if gap.abs() <= limit {
                    return Err(Error::Singularity(format!("Ω_{r} coincides with ω_{k}")));
                }
                gaps.push(gap);
            }
            let acc: T = (1..=n).map(|k| (d.c_k(k) / gaps[k - 1]).powi(2)).sum();
            let t0 = (T::one() + acc).sqrt().recip();
            let mut col = Vec::with_capacity(n + 1);
            col.push(t0);
            col.extend((1..=n).map(|k| d.c_k(k) * t0 / gaps[k - 1]));
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let data = (0..=n).flat_map(|mu| columns.iter().map(move |c| c[mu])).collect();
    Ok(TransformMatrix { data, rows: n + 1, cols: n + 1, source: TransformSource::FiniteN })
}

/// `(t₀ʳ)²` from the closed-form continuum matrix element, one per cavity root.
pub fn cavity_weight_row<T: Real>(spec: &OhmicSystemSpec<T>, modes: &NormalModeSet<T>) -> Result<Vec<T>> {
    if modes.source() != SpectrumSource::CavityClosedForm {
        return Err(Error::Input(format!("cavity weights need a cavity mode set, got {}", modes.source().as_str())));
    }
    let d = derive_parameters(spec);
    Ok(modes.frequencies().iter().map(|&om| cavity_weight(spec, &d, om)).collect())
}

/// Coupling regime selecting the small-cavity expression for `(t₀⁰)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmallLRegime {
    Weak,
    Strong,
}

/// Particle weights of the lowest mode and of `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityWeights<T> {
    pub ground: T,
    pub excited: Vec<T>,
}

impl<T: Real> CavityWeights<T> {
    /// `[(t₀⁰)², (t₀¹)², …]`
    pub fn all(&self) -> Vec<T> {
        std::iter::once(self.ground).chain(self.excited.iter().copied()).collect()
    }

    pub fn total(&self) -> T {
        self.ground + self.excited.iter().copied().sum::<T>()
    }
}

/// Small-cavity weights: `(t₀⁰)² = 1 − πδ` (weak) or `1/(1 + πδ/2)` (strong),
/// and `(t₀ᵏ)² = gL/(πck²) = 2δ/(πk²)`.
pub fn small_l_weights<T: Real>(
    spec: &OhmicSystemSpec<T>,
    regime: SmallLRegime,
    k_max: usize,
) -> Result<CavityWeights<T>> {
    let delta = derive_parameters(spec).delta;
    small_l_weights_for_delta(delta, regime, k_max)
}

pub fn small_l_weights_for_delta<T: Real>(delta: T, regime: SmallLRegime, k_max: usize) -> Result<CavityWeights<T>> {
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(Error::parameter("delta", format!("must be finite and non-negative, got {delta}")));
    }
    if delta > lit(0.05) {
        log::warn!("small-L weights at δ = {delta} > 0.05 are only qualitative");
    }
    let pi = T::PI();
    let ground = match regime {
        SmallLRegime::Weak => T::one() - pi * delta,
        SmallLRegime::Strong => T::one() / (T::one() + pi * delta / lit(2.0)),
    };
    if ground < T::zero() {
        return Err(Error::parameter("delta", format!("weak-coupling weight 1 − πδ is negative at δ = {delta}")));
    }
    let excited = (1..=k_max)
        .map(|k| {
            let kk = lit::<T>(k as f64);
            lit::<T>(2.0) * delta / (pi * kk * kk)
        })
        .collect();
    Ok(CavityWeights { ground, excited })
}

/// `q′_μ = ω̄_μ^{-1/2} Σ_r t_μʳ √Ω_r Q_r` with `ω̄_μ = (ω̄, ω₁, …, ω_N)`.
pub fn dressed_from_normal<T: Real>(
    normal: &[T],
    matrix: &TransformMatrix<T>,
    modes: &NormalModeSet<T>,
    spec: &OhmicSystemSpec<T>,
) -> Result<Vec<T>> {
    if matrix.cols != modes.len() {
        return Err(Error::DimensionMismatch { expected: matrix.cols, found: modes.len() });
    }
    if normal.len() != matrix.cols {
        return Err(Error::DimensionMismatch { expected: matrix.cols, found: normal.len() });
    }
    let d = derive_parameters(spec);
    let scaled: Vec<T> = normal.iter().zip(modes.frequencies()).map(|(&q, &om)| om.sqrt() * q).collect();
    Ok((0..matrix.rows)
        .map(|mu| {
            let bare = if mu == 0 { spec.bar_omega() } else { d.omega_k(mu) };
            let acc: T = matrix.row(mu).iter().zip(&scaled).map(|(&t, &s)| t * s).sum();
            acc / bare.sqrt()
        })
        .collect())
}

/// Amplitude of a normal-mode number state in the dressed state with `n₀′`
/// particle quanta.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficient<T> {
    pub value: T,
    /// `ln |value|`, `-inf` when the composition is excluded.
    pub ln_abs: T,
    pub particle_level: u32,
    pub occupations: Vec<u32>,
}

/// `√(n₀′!/Π n_r!) Π_r (t₀ʳ)^{n_r}` if `Σ n_r = n₀′`, else zero.
///
/// Occupations beyond the length of `occupations` are zero. Values whose
/// logarithm falls below −300 are flushed to zero.
pub fn expansion_coefficient<T: Real>(
    n0_prime: u32,
    occupations: &[u32],
    t0_row: &[T],
) -> Result<ExpansionCoefficient<T>> {
    if n0_prime > MAX_EXPANSION_LEVEL {
        return Err(Error::OverflowGuard(format!("n₀′ = {n0_prime} exceeds the cap of {MAX_EXPANSION_LEVEL}")));
    }
    if occupations.len() > t0_row.len() {
        return Err(Error::DimensionMismatch { expected: t0_row.len(), found: occupations.len() });
    }
    let make = |value: T, ln_abs: T| ExpansionCoefficient {
        value,
        ln_abs,
        particle_level: n0_prime,
        occupations: occupations.to_vec(),
    };
    let total: u64 = occupations.iter().map(|&n| u64::from(n)).sum();
    if total != u64::from(n0_prime) {
        return Ok(make(T::zero(), T::neg_infinity()));
    }
    let mut ln_abs = ln_factorial::<T>(n0_prime) / lit(2.0);
    let mut negative = false;
    for (&n, &t) in occupations.iter().zip(t0_row) {
        if n == 0 {
            continue;
        }
        if t == T::zero() {
            return Ok(make(T::zero(), T::neg_infinity()));
        }
        ln_abs = ln_abs - ln_factorial::<T>(n) / lit(2.0) + lit::<T>(f64::from(n)) * t.abs().ln();
        negative ^= t < T::zero() && n % 2 == 1;
    }
    if ln_abs > lit(LINEAR_LOG_LIMIT) {
        return Err(Error::OverflowGuard(format!("|coefficient| = e^{ln_abs} is not representable")));
    }
    let magnitude = if ln_abs < -lit::<T>(LINEAR_LOG_LIMIT) { T::zero() } else { ln_abs.exp() };
    Ok(make(if negative { -magnitude } else { magnitude }, ln_abs))
}

/// Every composition of `total` quanta over `slots` modes, in lexicographic order.
pub fn compositions(total: u32, slots: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slot: usize, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == slots {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for n in (0..=left).rev() {
            cur.push(n);
            rec(left - n, slot + 1, slots, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if slots > 0 {
        rec(total, 0, slots, &mut Vec::with_capacity(slots), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{solve_cavity_spectrum, solve_finite_spectrum, CavityVariant};
    use std::f64::consts::PI;

    fn unit_spec(n: usize, g: f64) -> OhmicSystemSpec<f64> {
        OhmicSystemSpec::new(1.0, g, 1.0, n).unwrap().with_light_speed(1.0).unwrap()
    }

    #[test]
    fn two_by_two_is_orthogonal() {
        // t₀ʳ > 0 in both columns turns the rotation into a reflection
        let spec = unit_spec(1, 0.2);
        let m = finite_matrix(&spec, &solve_finite_spectrum(&spec).unwrap()).unwrap();
        assert!((m.get(0, 0) + m.get(1, 1)).abs() < 1e-14);
        assert!((m.get(0, 1) - m.get(1, 0)).abs() < 1e-14);
        let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
        assert!((det + 1.0).abs() < 1e-14);
        assert!(m.row_sum_error() < 1e-15);
    }

    #[test]
    fn decoupled_matrix_is_identity() {
        let spec = unit_spec(5, 1e-9);
        let m = finite_matrix(&spec, &solve_finite_spectrum(&spec).unwrap()).unwrap();
        for mu in 0..6 {
            for r in 0..6 {
                let target = if mu == r { 1.0 } else { 0.0 };
                assert!((m.get(mu, r).abs() - target).abs() < 1e-4, "{mu} {r}");
            }
        }
    }

    #[test]
    fn orthonormal_with_positive_particle_row() {
        for n in [2, 8, 50, 200] {
            let spec = unit_spec(n, 0.4);
            let m = finite_matrix(&spec, &solve_finite_spectrum(&spec).unwrap()).unwrap();
            assert!(m.orthonormality_error() < 1e-8, "{n}");
            assert!(m.row_sum_error() < 1e-8);
            assert!(m.row(0).iter().all(|&t| t > 0.0));
        }
    }

    #[test]
    fn rejects_cavity_modes() {
        let spec = unit_spec(3, 0.1);
        let cav = solve_cavity_spectrum(&spec, 3, CavityVariant::Rederived).unwrap();
        assert!(finite_matrix(&spec, &cav).is_err());
        let fin = solve_finite_spectrum(&spec).unwrap();
        assert!(cavity_weight_row(&spec, &fin).is_err());
        assert_eq!(cavity_weight_row(&spec, &cav).unwrap(), cav.weights());
    }

    #[test]
    fn small_l_weights_values() {
        let w = small_l_weights_for_delta(0.0f64, SmallLRegime::Weak, 4).unwrap();
        assert_eq!(w.ground, 1.0);
        assert!(w.excited.iter().all(|&x| x == 0.0));
        let w = small_l_weights_for_delta(0.005f64, SmallLRegime::Weak, 10).unwrap();
        assert!((w.ground - (1.0 - 0.005 * PI)).abs() < 1e-15);
        assert!((w.excited[1] - 0.01 / (4.0 * PI)).abs() < 1e-17);
        let s = small_l_weights_for_delta(0.005f64, SmallLRegime::Strong, 1).unwrap();
        assert!((s.ground - 1.0 / (1.0 + 0.0025 * PI)).abs() < 1e-15);
        // closure deficit is (2π/3)δ at first order
        let delta = 1e-4;
        let w = small_l_weights_for_delta(delta, SmallLRegime::Weak, 1_000_000).unwrap();
        let tail = 2.0 * delta / PI / 1e6;
        assert!(((1.0 - w.total() - tail) - 2.0 * PI / 3.0 * delta).abs() < 1e-12);
        assert!(small_l_weights_for_delta(0.5f64, SmallLRegime::Weak, 1).is_err());
    }

    #[test]
    fn dressed_map_identity_and_rotation() {
        let spec = unit_spec(4, 1e-9);
        let modes = solve_finite_spectrum(&spec).unwrap();
        let m = finite_matrix(&spec, &modes).unwrap();
        let q = [0.3, -1.0, 2.0, 0.5, 0.1];
        let out = dressed_from_normal(&q, &m, &modes, &spec).unwrap();
        // identity up to the sign convention, which flips every bath axis
        assert!((out[0] - q[0]).abs() < 1e-4);
        for (a, b) in q.iter().zip(&out).skip(1) {
            assert!((a + b).abs() < 1e-4);
        }
        assert!(dressed_from_normal(&q[..3], &m, &modes, &spec).is_err());

        // hand-built 45° rotation on a fake two-mode set
        let spec = unit_spec(1, 0.1);
        let modes = NormalModeSet::from_parts(spec, vec![1.0, 4.0], vec![0.5, 0.5], SpectrumSource::FiniteN).unwrap();
        let h = 0.5f64.sqrt();
        let m = TransformMatrix::from_rows(vec![vec![h, -h], vec![h, h]], TransformSource::FiniteN).unwrap();
        let out = dressed_from_normal(&[1.0, 1.0], &m, &modes, &spec).unwrap();
        let w1 = 2.0 * PI;
        assert!((out[0] - h * (1.0 - 2.0)).abs() < 1e-15);
        assert!((out[1] - h * 3.0 / w1.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn expansion_vacuum_and_single_quantum() {
        let row = [0.8f64, 0.6];
        assert_eq!(expansion_coefficient(0, &[0, 0], &row).unwrap().value, 1.0);
        assert_eq!(expansion_coefficient(0, &[1, 0], &row).unwrap().value, 0.0);
        assert!((expansion_coefficient(1, &[0, 1], &row).unwrap().value - 0.6).abs() < 1e-15);
        // √(2!/1!1!)·0.8·0.6
        let v = expansion_coefficient(2, &[1, 1], &row).unwrap().value;
        assert!((v - 2f64.sqrt() * 0.48).abs() < 1e-15);
        assert!(matches!(expansion_coefficient(21, &[21], &[1.0]), Err(Error::OverflowGuard(_))));
        assert!(expansion_coefficient(1, &[0, 0, 1], &row).is_err());
        let neg = expansion_coefficient(3, &[3], &[-0.5f64]).unwrap().value;
        assert!((neg + 0.125).abs() < 1e-15);
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(3, 4).len(), 20);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
    }
}
