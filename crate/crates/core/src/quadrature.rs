//! Globally adaptive Gauss–Kronrod (7/15) quadrature, with helpers for
//! semi-infinite ranges, Cauchy principal values and Hadamard finite parts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real scalars and complex numbers.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> T;
    fn is_finite_value(self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_segments: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self { abs_tol: T::tol(1e-12), rel_tol: T::tol(1e-12), max_segments: 200_000 }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V, T> {
    pub value: V,
    /// Estimated absolute error.
    pub error: T,
    pub segments: usize,
    pub converged: bool,
}

impl<V, T: Real> QuadResult<V, T> {
    /// Turn a non-converged or over-budget result into an error.
    pub fn require(self, max_error: T, what: &str) -> Result<V> {
        if self.error <= max_error {
            Ok(self.value)
        } else {
            Err(Error::NumericalFailure(format!(
                "{what}: quadrature error estimate {:e} exceeds {:e}",
                self.error, max_error
            )))
        }
    }
}

struct Segment<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
}

struct ByError<T>(f64, usize, std::marker::PhantomData<T>);

impl<T> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for ByError<T> {}
impl<T> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by index so the refinement order is reproducible.
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn gauss_kronrod<T, V, F>(f: &mut F, a: T, b: T) -> Result<(V, T, bool)>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let mut samples = [(V::zero(), T::zero()); 15];
    let mut kronrod = V::zero();
    let mut gauss = V::zero();
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let dx = half_len * lit::<T>(x);
        let values: [V; 2] = if i == 7 { [f(center), V::zero()] } else { [f(center - dx), f(center + dx)] };
        let sum = values[0] + values[1];
        if !sum.is_finite_value() {
            return Err(Error::NumericalFailure(format!("non-finite integrand near {}", center - dx)));
        }
        samples[2 * i] = (values[0], lit(w));
        if i < 7 {
            samples[2 * i + 1] = (values[1], lit(w));
        }
        kronrod = kronrod + sum * lit::<T>(w);
        if i % 2 == 1 {
            gauss = gauss + sum * lit::<T>(WG[i / 2]);
        }
    }
    // Error estimate scaled as in QUADPACK, floored at the rounding level.
    let mean = kronrod * half;
    let (mut res_abs, mut res_asc) = (T::zero(), T::zero());
    for &(v, w) in &samples {
        res_abs = res_abs + w * v.magnitude();
        res_asc = res_asc + w * (v - mean).magnitude();
    }
    let res_abs = res_abs * half_len.abs();
    let res_asc = res_asc * half_len.abs();
    let raw = ((kronrod - gauss) * half_len).magnitude();
    let mut error = raw;
    if res_asc > T::zero() && raw > T::zero() {
        error = res_asc * T::one().min((lit::<T>(200.0) * raw / res_asc).powf(lit(1.5)));
    }
    let floor = lit::<T>(50.0) * T::epsilon() * res_abs;
    Ok((kronrod * half_len, error.max(floor), error <= floor))
}

/// Integrate `f` over the consecutive intervals defined by `breakpoints`
/// (sorted ascending, at least two points), refining the worst segment
/// until the total error estimate meets the tolerance.
pub fn integrate<T, V, F>(mut f: F, breakpoints: &[T], opts: QuadOptions<T>) -> Result<QuadResult<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    if breakpoints.len() < 2 {
        return Err(Error::Input("quadrature needs at least two breakpoints".into()));
    }
    let mut segments: Vec<Segment<V, T>> = Vec::with_capacity(breakpoints.len() * 2);
    let mut heap = BinaryHeap::new();
    let mut total_error = T::zero();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            if a == b {
                continue;
            }
            return Err(Error::Input(format!("breakpoints not ascending: {a} > {b}")));
        }
        let (value, error, settled) = gauss_kronrod(&mut f, a, b)?;
        total_error = total_error + error;
        if !settled {
            heap.push(ByError::<T>(error.as_f64(), segments.len(), Default::default()));
        }
        // Settled segments sit at the rounding floor and never enter the heap.
        segments.push(Segment { a, b, value, error });
    }

    let total_value = |segs: &[Segment<V, T>]| segs.iter().fold(V::zero(), |acc, s| acc + s.value);
    let mut running = total_value(&segments);
    let mut converged = false;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * running.magnitude());
        if total_error <= target {
            converged = true;
            break;
        }
        if segments.len() >= opts.max_segments {
            break;
        }
        let Some(ByError(_, idx, _)) = heap.pop() else { break };
        let seg = &segments[idx];
        let (a, b) = (seg.a, seg.b);
        let mid = lit::<T>(0.5) * (a + b);
        if !(mid > a && mid < b) || (b - a) <= T::epsilon() * lit::<T>(8.0) * a.abs().max(b.abs()) {
            // Cannot subdivide further; keep its error and stop refining it.
            continue;
        }
        let old_error = seg.error;
        let old_value = seg.value;
        let (v1, e1, s1) = gauss_kronrod(&mut f, a, mid)?;
        let (v2, e2, s2) = gauss_kronrod(&mut f, mid, b)?;
        total_error = total_error - old_error + e1 + e2;
        running = running - old_value + v1 + v2;
        segments[idx] = Segment { a, b: mid, value: v1, error: e1 };
        if !s1 {
            heap.push(ByError::<T>(e1.as_f64(), idx, Default::default()));
        }
        if !s2 {
            heap.push(ByError::<T>(e2.as_f64(), segments.len(), Default::default()));
        }
        segments.push(Segment { a: mid, b, value: v2, error: e2 });
    }

    // Sum in positional order so the result does not depend on refinement history.
    segments.sort_by(|x, y| x.a.as_f64().total_cmp(&y.a.as_f64()));
    let value = total_value(&segments);
    let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    Ok(QuadResult { value, error, segments: segments.len(), converged })
}

/// Integrate `f` over `[a, ∞)` through the map `y = a + scale·s/(1−s)`.
pub fn integrate_to_infinity<T, V, F>(mut f: F, a: T, scale: T, opts: QuadOptions<T>) -> Result<QuadResult<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let one = T::one();
    let mapped = |s: T| {
        let d = one - s;
        f(a + scale * s / d) * (scale / (d * d))
    };
    let breaks: Vec<T> = [0.0, 0.5, 0.75, 0.9, 0.99, 0.999, 1.0].iter().map(|&x| lit::<T>(x)).collect();
    integrate(mapped, &breaks, opts)
}

/// Cauchy principal value of `∫_a^b f(y)/(y − pole) dy` for `a < pole < b`, by
/// subtracting `f(pole)` and integrating the regular remainder.
pub fn principal_value<T, F>(
    mut f: F,
    pole: T,
    a: T,
    b: T,
    extra: &[T],
    opts: QuadOptions<T>,
) -> Result<QuadResult<T, T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(a < pole && pole < b) {
        return Err(Error::Input(format!("pole {pole} outside ({a}, {b})")));
    }
    let fp = f(pole);
    let breaks = sorted_breaks(a, b, pole, extra);
    let mut r = integrate(|y: T| (f(y) - fp) / (y - pole), &breaks, opts)?;
    r.value = r.value + fp * ((b - pole) / (pole - a)).ln();
    Ok(r)
}

/// Hadamard finite part of `∫_a^b f(y)/(y − pole)² dy` (the symmetric-excision
/// limit with the divergent `2/ε` term removed). `df_pole` is `f'(pole)`.
pub fn finite_part_double<T, F>(
    mut f: F,
    df_pole: T,
    pole: T,
    a: T,
    b: T,
    extra: &[T],
    opts: QuadOptions<T>,
) -> Result<QuadResult<T, T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(a < pole && pole < b) {
        return Err(Error::Input(format!("pole {pole} outside ({a}, {b})")));
    }
    let fp = f(pole);
    let breaks = sorted_breaks(a, b, pole, extra);
    let mut r = integrate(
        |y: T| {
            let d = y - pole;
            (f(y) - fp - df_pole * d) / (d * d)
        },
        &breaks,
        opts,
    )?;
    let left = pole - a;
    let right = b - pole;
    r.value = r.value - fp * (T::one() / left + T::one() / right) + df_pole * (right / left).ln();
    Ok(r)
}

fn sorted_breaks<T: Real>(a: T, b: T, pole: T, extra: &[T]) -> Vec<T> {
    let mut v: Vec<T> = vec![a, pole, b];
    let guard = T::tol(1e-10) * (b - a);
    v.extend(extra.iter().copied().filter(|&x| x - a > guard && b - x > guard && (x - pole).abs() > guard));
    v.sort_by(|x, y| x.as_f64().total_cmp(&y.as_f64()));
    v.dedup();
    v
}
