use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Accuracy targets and evaluation cap for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureBudget {
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
}

impl QuadratureBudget {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evals: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if max_evals < 1000 {
            return Err(Error::InvalidConfig(format!(
                "max_evals must be at least 1000, got {max_evals}"
            )));
        }
        Ok(Self { abs_tol, rel_tol, max_evals })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_evals(&self) -> usize {
        self.max_evals
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Tighter budget for the inner axis of a nested integral. The
    /// absolute floor drops far below the outer one: inner values can be
    /// small where the outer integrand still matters, and their error
    /// estimates are carried into the outer total.
    fn inner(&self) -> Self {
        Self {
            abs_tol: self.abs_tol * 1e-6,
            rel_tol: self.rel_tol * 0.1,
            max_evals: self.max_evals,
        }
    }
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-10, max_evals: 500_000 }
    }
}

/// Integration interval. Semi-infinite axes are compactified by
/// x = start + scale·t/(1−t), t ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Finite(f64, f64),
    SemiInfinite { start: f64, scale: f64 },
}

impl Interval {
    pub fn upper(start: f64) -> Self {
        Interval::SemiInfinite { start, scale: 1.0 }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            Interval::Finite(a, b) => (a, b),
            Interval::SemiInfinite { .. } => (0.0, 1.0),
        }
    }

    /// Maps the working variable to (x, dx/dt).
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Interval::Finite(..) => (t, 1.0),
            Interval::SemiInfinite { start, scale } => {
                let s = 1.0 - t;
                (start + scale * t / s, scale / (s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    carried: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One GK15 panel. `f` returns (value, carried error density); the second
/// component lets nested integrals propagate their inner error estimates.
fn kronrod<F: Fn(f64) -> (f64, f64)>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, cc) = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut carried = cc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, c1) = f(center - dx);
        let (f2, c2) = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        carried += WGK[j] * (c1.abs() + c2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    res_asc *= half.abs();
    let value = res_k * half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let res_abs = {
        let mut s = WGK[7] * fc.abs();
        for j in 0..7 {
            s += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        }
        s * half.abs()
    };
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error, carried: carried * half.abs() }
}

fn adaptive_core<F: Fn(f64) -> (f64, f64)>(
    f: &F,
    lo: f64,
    hi: f64,
    budget: &QuadratureBudget,
) -> (Quadrature, f64) {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let first = kronrod(f, lo, hi);
    let mut evals = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut carried = first.carried;
    heap.push(first);

    while error + carried > budget.target(value) && evals + 30 <= budget.max_evals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) || (worst.b - worst.a).abs() < 1e-14 * (hi - lo).abs() {
            // cannot subdivide further in floating point
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        carried += left.carried + right.carried - worst.carried;
        heap.push(left);
        heap.push(right);
    }

    // re-sum in a fixed order so rounding does not depend on refinement history
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.extend(frozen);
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segs.iter().map(|s| s.value).sum();
    let error: f64 = segs.iter().map(|s| s.error).sum();
    let carried: f64 = segs.iter().map(|s| s.carried).sum();
    (Quadrature { value, error, evals }, carried)
}

fn finish(q: Quadrature, budget: &QuadratureBudget) -> Result<Quadrature> {
    if q.error.is_finite() && q.error <= budget.target(q.value) {
        Ok(q)
    } else {
        Err(Error::Unconverged { value: q.value, error_estimate: q.error })
    }
}

/// ∫ f over `interval` with global adaptive GK15 bisection.
///
/// On exhaustion of `max_evals` the best value and its estimate are
/// returned inside [`Error::Unconverged`].
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    interval: Interval,
    budget: &QuadratureBudget,
) -> Result<Quadrature> {
    let (lo, hi) = interval.bounds();
    let g = |t: f64| {
        let (x, jac) = interval.map(t);
        let v = f(x) * jac;
        (if v.is_finite() { v } else { 0.0 }, 0.0)
    };
    let (q, _) = adaptive_core(&g, lo, hi, budget);
    finish(q, budget)
}

/// ∫∫ f(x, y) over a product of intervals, nested: the inner y-integral is
/// adaptive at every outer node and its error estimate is carried into
/// the total.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    outer: Interval,
    inner: Interval,
    budget: &QuadratureBudget,
) -> Result<Quadrature> {
    let inner_budget = budget.inner();
    let inner_evals = Cell::new(0usize);
    let (lo, hi) = outer.bounds();
    let g = |t: f64| {
        let (x, jac) = outer.map(t);
        let q = match integrate_adaptive(&|y| f(x, y), inner, &inner_budget) {
            Ok(q) => q,
            Err(Error::Unconverged { value, error_estimate }) => {
                Quadrature { value, error: error_estimate, evals: inner_budget.max_evals }
            }
            Err(_) => unreachable!("integrate_adaptive only fails with Unconverged"),
        };
        inner_evals.set(inner_evals.get() + q.evals);
        let v = q.value * jac;
        if v.is_finite() {
            (v, q.error * jac)
        } else {
            (0.0, 0.0)
        }
    };
    let (mut q, carried) = adaptive_core(&g, lo, hi, budget);
    q.error += carried;
    q.evals = inner_evals.get();
    finish(q, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureBudget {
        QuadratureBudget::new(1e-13, 1e-11, 200_000).unwrap()
    }

    #[test]
    fn polynomial() {
        let q = integrate_adaptive(&|x: f64| x * x, Interval::Finite(0.0, 1.0), &tight()).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_tail() {
        let q = integrate_adaptive(&|x: f64| (-x).exp(), Interval::upper(0.0), &tight()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_semi_infinite() {
        // closed form by p = √2 tan θ: π√2/8
        let exact = PI * 2f64.sqrt() / 8.0;
        let f = |p: f64| p * p / (1.0 + p * p / 2.0).powi(3);
        let q = integrate_adaptive(&f, Interval::upper(0.0), &tight()).unwrap();
        assert!((q.value - exact).abs() < 1e-11);

        // independent midpoint-rule oracle on [0, 200] plus analytic tail
        let n = 1_000_000;
        let h = 200.0 / n as f64;
        let mid: f64 = (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h;
        let tail = 8.0 / (3.0 * 200f64.powi(3)); // ∫_200^∞ 8/p⁴
        assert!((mid + tail - exact).abs() < 1e-7, "{}", mid + tail);
    }

    /// The reported error estimate must bound the true error.
    #[test]
    fn estimates_bound_true_error() {
        let loose = QuadratureBudget::new(1e-7, 1e-7, 100_000).unwrap();
        type Case = (Box<dyn Fn(f64) -> f64>, Interval, f64);
        let cases: Vec<Case> = vec![
            (Box::new(|x| x.sqrt()), Interval::Finite(0.0, 1.0), 2.0 / 3.0),
            (Box::new(|x| x.ln()), Interval::Finite(0.0, 1.0), -1.0),
            (Box::new(|x| 1.0 / (1.0 + x * x)), Interval::upper(0.0), PI / 2.0),
            (Box::new(|x| (-x * x).exp()), Interval::upper(0.0), PI.sqrt() / 2.0),
            (Box::new(|x| x.sin()), Interval::Finite(0.0, PI), 2.0),
            (Box::new(|x| 1.0 / x.sqrt()), Interval::Finite(0.0, 1.0), 2.0),
            (Box::new(|x| x.cos().powi(2)), Interval::Finite(0.0, 2.0 * PI), PI),
            (
                Box::new(|x| x.powi(4) * (1.0 - x).powi(4) / (1.0 + x * x)),
                Interval::Finite(0.0, 1.0),
                22.0 / 7.0 - PI,
            ),
            (Box::new(|x| x.exp()), Interval::Finite(-1.0, 1.0), 1f64.exp() - (-1f64).exp()),
            (Box::new(|x| 1.0 / (1.0 + x).powi(3)), Interval::upper(0.0), 0.5),
        ];
        for (i, (f, interval, exact)) in cases.into_iter().enumerate() {
            let q = integrate_adaptive(&f, interval, &loose).unwrap();
            assert!(
                (q.value - exact).abs() <= q.error.max(1e-15),
                "case {i}: value {} exact {exact} est {}",
                q.value,
                q.error
            );
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let budget = QuadratureBudget::new(1e-300, 1e-300, 1000).unwrap();
        let r = integrate_adaptive(&|x: f64| x.sin().abs(), Interval::Finite(0.0, 100.0), &budget);
        match r {
            Err(Error::Unconverged { value, error_estimate }) => {
                assert!(value > 60.0 && value < 67.0, "{value}");
                assert!(error_estimate > 0.0);
            }
            other => panic!("expected Unconverged, got {other:?}"),
        }
    }

    #[test]
    fn budget_validation() {
        assert!(QuadratureBudget::new(0.0, 1e-6, 10_000).is_err());
        assert!(QuadratureBudget::new(1e-6, 1e-6, 999).is_err());
    }

    #[test]
    fn nested_gaussian() {
        let f = |x: f64, y: f64| (-(x * x + y * y)).exp();
        let q = integrate_2d(&f, Interval::upper(0.0), Interval::upper(0.0), &tight()).unwrap();
        assert!((q.value - PI / 4.0).abs() < 1e-10);
    }
}
