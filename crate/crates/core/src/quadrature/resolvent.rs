use crate::error::{Error, Result};
use crate::potentials::UnitSystem;

use super::{integrate_adaptive, Interval, QuadratureBudget};

/// (artanh(x)/x − 1)/x² for 0 ≤ x < 1. The series branch avoids the
/// cancellation in artanh(x)/x − 1 at small x.
fn artanh_excess(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..=12 {
            sum += term / (2 * n + 1) as f64;
            term *= x2;
        }
        sum
    } else {
        (x.atanh() / x - 1.0) / (x * x)
    }
}

/// Angle average ⟨(Λ + (p+k)²/2m)⁻¹⟩ over the relative direction of p and k:
/// (m/2pk)·ln[(Λ+(p+k)²/2m)/(Λ+(p−k)²/2m)], written as artanh(x)/(x·E₊)
/// with E₊ = Λ + (p²+k²)/2m and x = pk/(mE₊) so that p = 0 and k = 0 reduce
/// exactly to the free propagator.
pub fn angle_averaged_resolvent(p: f64, k: f64, lambda: f64, units: &UnitSystem) -> f64 {
    let m = units.mass();
    let e_plus = lambda + (p * p + k * k) / (2.0 * m);
    let x = p * k / (m * e_plus);
    (1.0 + x * x * artanh_excess(x)) / e_plus
}

/// [⟨(Λ + (p+k)²/2m)⁻¹⟩ − (Λ + p²/2m)⁻¹]/k², finite at k = 0 where it
/// equals [`small_k_curvature`].
pub fn resolvent_bracket_over_k2(p: f64, k: f64, lambda: f64, units: &UnitSystem) -> f64 {
    let m = units.mass();
    let e = lambda + p * p / (2.0 * m);
    let e_plus = e + k * k / (2.0 * m);
    let x = p * k / (m * e_plus);
    p * p * artanh_excess(x) / (m * m * e_plus.powi(3)) - 1.0 / (2.0 * m * e_plus * e)
}

/// c₂(p, Λ) = lim_{k→0} k⁻²[⟨(Λ+(p+k)²/2m)⁻¹⟩ − (Λ+p²/2m)⁻¹]
///          = −1/(2mE²) + p²/(3m²E³),  E = Λ + p²/2m.
pub fn small_k_curvature(p: f64, lambda: f64, units: &UnitSystem) -> f64 {
    let m = units.mass();
    let e = lambda + p * p / (2.0 * m);
    -1.0 / (2.0 * m * e * e) + p * p / (3.0 * m * m * e.powi(3))
}

/// ∫₀¹ dx [a x + b(1−x)]⁻², which equals 1/(ab).
pub fn feynman_combine(a: f64, b: f64, budget: &QuadratureBudget) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "Feynman parameters must be positive, got ({a}, {b})"
        )));
    }
    let f = |x: f64| (a * x + b * (1.0 - x)).powi(-2);
    Ok(integrate_adaptive(&f, Interval::Finite(0.0, 1.0), budget)?.value)
}
