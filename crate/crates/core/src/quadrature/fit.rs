use crate::error::{Error, Result};

/// W ≈ c·Λ^(−γ) from a log-log least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Signed amplitude c.
    pub amplitude: f64,
    /// γ.
    pub exponent: f64,
    /// Standard error of γ from the regression.
    pub exponent_err: f64,
    /// RMS residual of ln|W| about the fitted line.
    pub residual: f64,
    pub lambda_range: (f64, f64),
    pub samples: usize,
}

impl PowerLawFit {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.amplitude * lambda.powf(-self.exponent)
    }
}

pub const MIN_FIT_SAMPLES: usize = 4;

/// Fits ln|W| = ln|c| − γ ln Λ. Requires at least four points with
/// strictly increasing Λ > 0 and nonzero W of a single sign.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_FIT_SAMPLES, got: points.len() });
    }
    if points.windows(2).any(|w| !(w[0].0 < w[1].0)) || points[0].0 <= 0.0 {
        return Err(Error::Domain("Λ samples must be positive and strictly increasing".into()));
    }
    let sign = points[0].1.signum();
    if points.iter().any(|&(_, w)| w == 0.0 || !w.is_finite()) {
        return Err(Error::Domain("power-law fit needs finite nonzero W".into()));
    }
    if points.iter().any(|&(_, w)| w.signum() != sign) {
        return Err(Error::MixedSign);
    }

    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();

    Ok(PowerLawFit {
        amplitude: sign * intercept.exp(),
        exponent: -slope,
        exponent_err: (ss / (n - 2.0) / sxx).sqrt(),
        residual: (ss / n).sqrt(),
        lambda_range: (points[0].0, points[points.len() - 1].0),
        samples: points.len(),
    })
}

/// `points` values from `min` to `max` inclusive, evenly spaced in ln Λ.
pub fn geometric_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && min < max) {
        return Err(Error::Domain(format!("need 0 < min < max, got [{min}, {max}]")));
    }
    if points < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    let step = (max / min).ln() / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => min * (step * i as f64).exp(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Richardson {
    pub value: f64,
    /// Spread between the last two extrapolants (or the raw difference
    /// when only two levels exist).
    pub error: f64,
}

/// Extrapolates f(R) = f∞ + a·R^(−order) + … to R → ∞ from values at
/// increasing radii.
pub fn richardson(radii: &[f64], values: &[f64], order: f64) -> Result<Richardson> {
    if radii.len() < 2 || radii.len() != values.len() {
        return Err(Error::InvalidConfig("Richardson needs ≥ 2 matched levels".into()));
    }
    let pair = |i: usize| {
        let (r0, r1) = (radii[i], radii[i + 1]);
        let w = (r1 / r0).powf(order);
        (w * values[i + 1] - values[i]) / (w - 1.0)
    };
    let n = radii.len();
    let last = pair(n - 2);
    let error = if n >= 3 {
        (last - pair(n - 3)).abs()
    } else {
        (values[1] - values[0]).abs()
    };
    Ok(Richardson { value: last, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_inverse_law() {
        let fit = fit_power_law(&[(1.0, 2.0), (2.0, 1.0), (4.0, 0.5), (8.0, 0.25)]).unwrap();
        assert!((fit.amplitude - 2.0).abs() < 1e-12);
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.lambda_range, (1.0, 8.0));
    }

    #[test]
    fn exact_negative_square_law() {
        let pts = [(1.0, -3.0), (10.0, -0.03), (100.0, -3e-4), (1000.0, -3e-6)];
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.amplitude + 3.0).abs() < 1e-10);
        assert!((fit.exponent - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert_eq!(
            fit_power_law(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]),
            Err(Error::InsufficientSamples { needed: 4, got: 3 })
        );
        assert_eq!(
            fit_power_law(&[(1.0, 1.0), (2.0, -0.5), (4.0, 0.25), (8.0, 0.1)]),
            Err(Error::MixedSign)
        );
        assert!(fit_power_law(&[(1.0, 1.0), (1.0, 0.5), (4.0, 0.25), (8.0, 0.1)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (4.0, 0.25), (8.0, 0.1)]).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(10.0, 1000.0, 17).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!((g[0], g[16]), (10.0, 1000.0));
        assert!((g[8] - 100.0).abs() < 1e-10);
        assert!(geometric_grid(10.0, 1.0, 4).is_err());
    }

    #[test]
    fn richardson_removes_leading_term() {
        let f = |r: f64| 3.0 + 2.0 / (r * r) + 5.0 / r.powi(4);
        let radii = [10.0, 20.0, 40.0];
        let vals: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
        let ex = richardson(&radii, &vals, 2.0).unwrap();
        assert!((ex.value - 3.0).abs() < 1e-5);
        assert!((ex.value - 3.0).abs() <= ex.error);
    }

    proptest! {
        #[test]
        fn recovers_synthetic_laws(
            c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3],
            gamma in 0.2f64..3.0,
            lmin in 0.5f64..20.0,
            n in 4usize..12,
        ) {
            let grid = geometric_grid(lmin, lmin * 50.0, n).unwrap();
            let pts: Vec<(f64, f64)> = grid.iter().map(|&l| (l, c * l.powf(-gamma))).collect();
            let fit = fit_power_law(&pts).unwrap();
            prop_assert!(fit.residual < 1e-10);
            prop_assert!((fit.exponent - gamma).abs() < 1e-10);
            prop_assert!(((fit.amplitude - c) / c).abs() < 1e-10);
        }
    }
}
