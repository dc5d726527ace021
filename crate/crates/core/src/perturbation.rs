//! First- and second-order contributions to the reduced trace difference
//! w(Λ) = W(Λ)/(2πħ)³.
//!
//! The first-order kernel is localized at k = 0, so it only survives when
//! U(k) ~ C/k² (a Coulomb tail); it is evaluated as C·c₂(p, Λ), the finite
//! k → 0 limit of U(k) times the angle-averaged bracket. The second order is
//! a two-dimensional (p, k) quadrature after analytic angle averaging.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potentials::{Family, PotentialSpec, UnitSystem};
use crate::quadrature::{
    fit_power_law, geometric_grid, integrate_2d, integrate_adaptive, resolvent_bracket_over_k2,
    small_k_curvature, Interval, PowerLawFit, QuadratureBudget,
};

/// A reduced trace value with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    FirstOrder,
    SecondOrder,
    FirstPlusSecond,
    Oracle,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::FirstOrder => "first-order",
            Source::SecondOrder => "second-order",
            Source::FirstPlusSecond => "first+second-order",
            Source::Oracle => "oracle",
        }
    }
}

impl From<Order> for Source {
    fn from(order: Order) -> Self {
        match order {
            Order::First => Source::FirstOrder,
            Order::Second => Source::SecondOrder,
            Order::Sum => Source::FirstPlusSecond,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub lambda: f64,
    /// Reduced value W/(2πħ)³.
    pub w: f64,
    pub err: f64,
}

/// (Λ, w) samples from one source for one potential.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSamples {
    entries: Vec<TraceSample>,
    source: Source,
    spec: PotentialSpec,
    units: UnitSystem,
}

impl TraceSamples {
    pub fn new(
        entries: Vec<TraceSample>,
        source: Source,
        spec: PotentialSpec,
        units: UnitSystem,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if entries[0].lambda <= 0.0 || entries.windows(2).any(|w| !(w[0].lambda < w[1].lambda)) {
            return Err(Error::Domain("Λ values must be positive and strictly increasing".into()));
        }
        if entries.iter().any(|e| !(e.err >= 0.0)) {
            return Err(Error::Domain("sample errors must be nonnegative".into()));
        }
        Ok(Self { entries, source, spec, units })
    }

    pub fn entries(&self) -> &[TraceSample] {
        &self.entries
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.lambda, e.w)).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.entries.iter().all(|e| e.w == 0.0)
    }

    pub fn fit(&self) -> Result<PowerLawFit> {
        fit_power_law(&self.points())
    }
}

/// Geometric grid, 8 points per decade over [10, 10³].
pub fn default_lambda_grid() -> Vec<f64> {
    geometric_grid(10.0, 1000.0, 17).expect("static grid")
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Λ must be positive, got {lambda}")))
    }
}

/// w₁(Λ) = −(2πħ)⁻³ ∫d³p C·c₂(p, Λ)·(Λ + p²/2m)⁻¹ with C the signed
/// Coulomb-tail coefficient. Exactly zero for screened tails.
pub fn compute_w1(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda: f64,
    budget: &QuadratureBudget,
) -> Result<TraceValue> {
    check_lambda(lambda)?;
    let tail = spec.sign().factor() * spec.coulomb_tail_coefficient(units);
    if tail == 0.0 {
        return Ok(TraceValue { value: 0.0, error: 0.0 });
    }
    let m = units.mass();
    let integrand = |p: f64| {
        let e = lambda + p * p / (2.0 * m);
        p * p * small_k_curvature(p, lambda, units) / e
    };
    let scale = units.momentum_scale(lambda);
    let q = integrate_adaptive(&integrand, Interval::SemiInfinite { start: 0.0, scale }, budget)?;
    let pref = -4.0 * PI * tail / units.phase_cell();
    Ok(TraceValue { value: pref * q.value, error: (pref * q.error).abs() })
}

/// w₂(Λ) = (2πħ)⁻⁶ ∫d³p ∫d³k |U(k)|²·[⟨(Λ+(p+k)²/2m)⁻¹⟩ − (Λ+p²/2m)⁻¹]·(Λ+p²/2m)⁻².
pub fn compute_w2(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda: f64,
    budget: &QuadratureBudget,
) -> Result<TraceValue> {
    check_lambda(lambda)?;
    if spec.family() == Family::InverseSquare {
        return Err(Error::NotRepresentable("inverse-square"));
    }
    let m = units.mass();
    // p² · (k²U)² · bracket/k² / E²; the 4π·4π angular factors go in the prefactor
    let integrand = |p: f64, k: f64| {
        let e = lambda + p * p / (2.0 * m);
        let k2u = spec.k2_transform(units, k);
        p * p * k2u * k2u * resolvent_bracket_over_k2(p, k, lambda, units) / (e * e)
    };
    let scale = units.momentum_scale(lambda);
    // the transfer momentum also varies on the screening scale
    let mut k_scale = scale;
    if let Some(kappa) = spec.kappa() {
        k_scale = k_scale.min(units.hbar() * kappa);
    }
    if let Some(rc) = spec.r_cut() {
        k_scale = k_scale.min(units.hbar() / rc);
    }
    let outer = Interval::SemiInfinite { start: 0.0, scale };
    let inner = Interval::SemiInfinite { start: 0.0, scale: k_scale };
    let q = integrate_2d(&integrand, outer, inner, budget)?;
    let pref = 16.0 * PI * PI / units.phase_cell().powi(2);
    Ok(TraceValue { value: pref * q.value, error: pref * q.error })
}

/// −Z²e²/(8Λ²a₀), the Coulomb second-order result in reduced form.
pub fn w2_closed_form(z: f64, units: &UnitSystem, lambda: f64) -> f64 {
    -z * z * units.e2() / (8.0 * lambda * lambda * units.a0())
}

/// Evaluates the requested order on every grid point.
pub fn sample_w(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda_grid: &[f64],
    order: Order,
    budget: &QuadratureBudget,
) -> Result<TraceSamples> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("Λ grid must be strictly increasing".into()));
    }
    let entries = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let tv = match order {
                Order::First => compute_w1(spec, units, lambda, budget)?,
                Order::Second => compute_w2(spec, units, lambda, budget)?,
                Order::Sum => {
                    let a = compute_w1(spec, units, lambda, budget)?;
                    let b = compute_w2(spec, units, lambda, budget)?;
                    TraceValue { value: a.value + b.value, error: a.error + b.error }
                }
            };
            Ok(TraceSample { lambda, w: tv.value, err: tv.error })
        })
        .collect::<Result<Vec<_>>>()?;
    TraceSamples::new(entries, order.into(), *spec, *units)
}
