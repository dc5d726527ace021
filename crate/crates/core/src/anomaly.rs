//! Number and energy anomalies from the Λ → ∞ limits
//!
//!   δA_N/(2πħ)³ = −lim 2Λ² ∂w/∂Λ,
//!   δA_E/(2πħ)³ =  lim 2Λ² (1 + Λ∂/∂Λ) w,
//!
//! evaluated analytically on a fitted power law w ≈ cΛ^(−γ). That gives
//! δA_N = 2γc·Λ^(1−γ) and δA_E = 2c(1−γ)·Λ^(2−γ); the factor 2 is the spin
//! degeneracy.

use std::fmt;

use crate::error::{Error, Result};
use crate::perturbation::{sample_w, Order, TraceSamples};
use crate::potentials::{CaseLabel, PotentialSpec, UnitSystem};
use crate::quadrature::{PowerLawFit, QuadratureBudget};

/// Fits with a larger RMS log residual are not treated as power laws.
pub const MAX_FIT_RESIDUAL: f64 = 0.05;
/// Fitted exponents this close to an integer are snapped onto it.
pub const EXPONENT_SNAP: f64 = 0.05;
/// Smallest uncertainty below which a reduced value counts as zero.
pub const ZERO_FLOOR: f64 = 1e-6;
/// 2mα/ħ² below this is outside the strong-coupling regime.
pub const STRONG_COUPLING_MIN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Finite,
    Zero,
    Divergent,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Finite => "finite",
            Status::Zero => "zero",
            Status::Divergent => "divergent",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The Λ → ∞ limit of one extraction operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite { value: f64, uncertainty: f64 },
    /// |value| below `uncertainty`; reported as 0.
    Zero { uncertainty: f64 },
    /// Grows as amplitude·Λ^growth_exponent; no finite value exists.
    Divergent { growth_exponent: f64, amplitude: f64 },
}

impl Limit {
    pub fn status(&self) -> Status {
        match self {
            Limit::Finite { .. } => Status::Finite,
            Limit::Zero { .. } => Status::Zero,
            Limit::Divergent { .. } => Status::Divergent,
        }
    }

    /// The finite value, 0 for `Zero`, `None` when divergent.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Limit::Finite { value, .. } => Some(value),
            Limit::Zero { .. } => Some(0.0),
            Limit::Divergent { .. } => None,
        }
    }

    pub fn uncertainty(&self) -> Option<f64> {
        match *self {
            Limit::Finite { uncertainty, .. } | Limit::Zero { uncertainty } => Some(uncertainty),
            Limit::Divergent { .. } => None,
        }
    }

    pub fn growth_exponent(&self) -> Option<f64> {
        match *self {
            Limit::Divergent { growth_exponent, .. } => Some(growth_exponent),
            _ => None,
        }
    }

    fn zero(uncertainty: f64) -> Self {
        Limit::Zero { uncertainty: uncertainty.max(ZERO_FLOOR) }
    }

    fn finite_or_zero(value: f64, uncertainty: f64) -> Self {
        let threshold = uncertainty.max(ZERO_FLOOR);
        if value.abs() < threshold {
            Limit::Zero { uncertainty: threshold }
        } else {
            Limit::Finite { value, uncertainty }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyResult {
    pub case_label: CaseLabel,
    /// δA_N/(2πħ)³.
    pub a_n: Limit,
    /// δA_E/(2πħ)³.
    pub a_e: Limit,
    /// `None` when every sample is exactly zero.
    pub fit: Option<PowerLawFit>,
    /// The exponent the limits were taken at, after snapping.
    pub exponent_used: Option<f64>,
}

impl AnomalyResult {
    pub fn status_n(&self) -> Status {
        self.a_n.status()
    }

    pub fn status_e(&self) -> Status {
        self.a_e.status()
    }

    fn null(case_label: CaseLabel, uncertainty: f64) -> Self {
        Self {
            case_label,
            a_n: Limit::zero(uncertainty),
            a_e: Limit::zero(uncertainty),
            fit: None,
            exponent_used: None,
        }
    }
}

fn snap(gamma: f64) -> f64 {
    let nearest = gamma.round();
    if (nearest == 1.0 || nearest == 2.0) && (gamma - nearest).abs() < EXPONENT_SNAP {
        nearest
    } else {
        gamma
    }
}

/// Amplitude at a fixed exponent, c = sgn·exp⟨ln|w| + γ ln Λ⟩, with the
/// RMS spread of ln|w| + γ ln Λ as its relative uncertainty.
fn refit_amplitude(points: &[(f64, f64)], gamma: f64) -> (f64, f64) {
    let logs: Vec<f64> = points.iter().map(|&(l, w)| w.abs().ln() + gamma * l.ln()).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let spread = (logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    (points[0].1.signum() * mean.exp(), spread)
}

/// Applies both extraction operators to `fit` and the samples behind it.
pub fn extract_anomalies(samples: &TraceSamples, fit: &PowerLawFit) -> Result<AnomalyResult> {
    if fit.residual >= MAX_FIT_RESIDUAL {
        return Err(Error::NotPowerLaw { residual: fit.residual });
    }
    let case_label = samples.spec().classify().case_label;
    let points = samples.points();
    let gamma = snap(fit.exponent);
    let (c, spread) = if gamma == fit.exponent {
        (fit.amplitude, fit.residual)
    } else {
        refit_amplitude(&points, gamma)
    };
    let sample_rel = samples
        .entries()
        .iter()
        .filter(|e| e.w != 0.0)
        .map(|e| e.err / e.w.abs())
        .fold(0.0, f64::max);
    let rel = spread + sample_rel;

    // δA_N = 2γc·Λ^(1−γ)
    let coef_n = 2.0 * gamma * c;
    let a_n = if gamma > 1.0 {
        Limit::zero(coef_n.abs() * rel)
    } else if gamma == 1.0 {
        Limit::finite_or_zero(coef_n, coef_n.abs() * rel)
    } else {
        Limit::Divergent { growth_exponent: 1.0 - gamma, amplitude: coef_n }
    };

    // δA_E = 2c(1−γ)·Λ^(2−γ)
    let coef_e = 2.0 * c * (1.0 - gamma);
    let a_e = if gamma > 2.0 || gamma == 1.0 {
        Limit::zero(2.0 * c.abs() * rel)
    } else if gamma == 2.0 {
        Limit::finite_or_zero(coef_e, coef_e.abs() * rel)
    } else {
        Limit::Divergent { growth_exponent: 2.0 - gamma, amplitude: coef_e }
    };

    Ok(AnomalyResult { case_label, a_n, a_e, fit: Some(*fit), exponent_used: Some(gamma) })
}

/// Fits and extracts in one step. Identically zero samples give a null
/// result without a fit.
pub fn analyze(samples: &TraceSamples) -> Result<AnomalyResult> {
    if samples.is_identically_zero() {
        let err = samples.entries().iter().map(|e| e.err).fold(0.0, f64::max);
        return Ok(AnomalyResult::null(samples.spec().classify().case_label, err));
    }
    let fit = samples.fit()?;
    extract_anomalies(samples, &fit)
}

/// −√(2mα)/(36ħ).
pub fn delta_an_case_a_closed_form(alpha: f64, units: &UnitSystem) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be nonnegative, got {alpha}")));
    }
    Ok(-(2.0 * units.mass() * alpha).sqrt() / (36.0 * units.hbar()))
}

/// Z²e²/(4a₀).
pub fn delta_ae_case_b_closed_form(z: f64, units: &UnitSystem) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("Z must be nonnegative, got {z}")));
    }
    Ok(z * z * units.e2() / (4.0 * units.a0()))
}

/// 2mα/ħ².
pub fn coupling_strength(alpha: f64, units: &UnitSystem) -> f64 {
    2.0 * units.mass() * alpha / (units.hbar() * units.hbar())
}

/// Rejects couplings outside the strong-coupling regime 2mα/ħ² ≥ 100.
pub fn require_strong_coupling(alpha: f64, units: &UnitSystem) -> Result<()> {
    let g = coupling_strength(alpha, units);
    if g >= STRONG_COUPLING_MIN {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "2mα/ħ² = {g} is below the strong-coupling threshold {STRONG_COUPLING_MIN}"
        )))
    }
}

/// Extraction applied to first-order samples only.
pub fn classify_divergence_first_order(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda_grid: &[f64],
    budget: &QuadratureBudget,
) -> Result<AnomalyResult> {
    analyze(&sample_w(spec, units, lambda_grid, Order::First, budget)?)
}
