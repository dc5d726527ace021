//! Modified-Bessel ratios and Bessel-function zeros.

use std::f64::consts::PI;

use super::tridiag::SymTridiagonal;

/// I_{ν+1}(x)/I_ν(x) for ν ≥ 0, x > 0, by the modified Lentz evaluation of
/// 1/(2(ν+1)/x + 1/(2(ν+2)/x + …)). Needs O(x) terms when x ≫ ν.
pub fn ratio_i(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x > 0.0);
    const TINY: f64 = 1e-300;
    let cap = 20 * (x as usize + nu as usize) + 1000;
    let inv_x = 1.0 / x;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..=cap {
        let b = 2.0 * (nu + k as f64) * inv_x;
        d += b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// I_{ℓ+3/2}(x)/I_{ℓ+1/2}(x). Upward recursion from coth x − 1/x when
/// x > ℓ² + 20 (errors grow like e^{ℓ²/x} there), continued fraction
/// otherwise.
pub fn spherical_ratio(ell: u32, x: f64) -> f64 {
    let l = ell as f64;
    if x > l * l + 20.0 {
        // coth x − 1/x loses digits only for small x, excluded here
        let mut rho = 1.0 / x.tanh() - 1.0 / x;
        for l in 1..=ell {
            let nu = l as f64 + 0.5;
            rho = 1.0 / rho - 2.0 * nu / x;
        }
        rho
    } else {
        ratio_i(ell as f64 + 0.5, x)
    }
}

/// d/dx of I_{ν+1}(x)/I_ν(x), from the ratio itself:
/// ρ' = 1 − (2ν+1)ρ/x − ρ².
pub fn ratio_i_derivative(nu: f64, x: f64, rho: f64) -> f64 {
    1.0 - (2.0 * nu + 1.0) * rho / x - rho * rho
}

/// First `count` positive zeros of J_ν, ν ≥ 0, as reciprocals of the
/// largest eigenvalues of the truncated tridiagonal matrix with zero
/// diagonal and off-diagonal 1/(2√((ν+k)(ν+k+1))).
pub fn bessel_j_zeros(nu: f64, count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    let n = 4 * count + 2 * nu.ceil() as usize + 100;
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            0.5 / ((nu + k) * (nu + k + 1.0)).sqrt()
        })
        .collect();
    let m = SymTridiagonal::new(vec![0.0; n], off);
    // eigenvalues in ascending order; the largest `count` are 1/j₁ > 1/j₂ > …
    m.eigenvalues_range(n - count, n)
        .into_iter()
        .rev()
        .map(|mu| 1.0 / mu)
        .collect()
}

/// McMahon's large-n form z_{ν,n} ≈ β − (4ν²−1)/(8β), β = π(n + ν/2 − ¼).
pub fn mcmahon_zero(nu: f64, n: usize) -> f64 {
    let beta = PI * (n as f64 + 0.5 * nu - 0.25);
    beta - (4.0 * nu * nu - 1.0) / (8.0 * beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// I_ν by the power series, adequate for moderate x.
    fn bessel_i_series(nu: f64, x: f64) -> f64 {
        let mut term = (0.5 * x).powf(nu) / libm_gamma(nu + 1.0);
        let mut sum = term;
        for k in 1..400 {
            let k = k as f64;
            term *= 0.25 * x * x / (k * (k + nu));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    /// Γ via Lanczos (g = 7), enough for ratios in tests.
    fn libm_gamma(x: f64) -> f64 {
        const C: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if x < 0.5 {
            return PI / ((PI * x).sin() * libm_gamma(1.0 - x));
        }
        let x = x - 1.0;
        let t = x + 7.5;
        let mut a = C[0];
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }

    #[test]
    fn ratio_matches_series() {
        for (nu, x) in [(0.0, 1.0), (0.5, 3.0), (2.5, 0.1), (10.0125, 7.0), (3.3, 25.0)] {
            let exact = bessel_i_series(nu + 1.0, x) / bessel_i_series(nu, x);
            let r = ratio_i(nu, x);
            assert!(((r - exact) / exact).abs() < 1e-12, "ν={nu} x={x}: {r} vs {exact}");
        }
    }

    #[test]
    fn ratio_large_argument_asymptotics() {
        // ρ ≈ 1 − (2ν+1)/(2x) + (4ν²−1)/(8x²) + O(x⁻³)
        let (nu, x) = (3.0, 4.0e4);
        let approx = 1.0 - (2.0 * nu + 1.0) / (2.0 * x) + (4.0 * nu * nu - 1.0) / (8.0 * x * x);
        assert!((ratio_i(nu, x) - approx).abs() < 1e-12);
    }

    #[test]
    fn spherical_ratio_branches_agree() {
        for ell in [0u32, 1, 5, 30] {
            for x in [0.01, 0.7, 5.0, (ell * ell) as f64 + 21.0, 2000.0] {
                let a = spherical_ratio(ell, x);
                let b = ratio_i(ell as f64 + 0.5, x);
                assert!(((a - b) / b).abs() < 1e-12, "ℓ={ell} x={x}: {a} vs {b}");
            }
        }
        // I_{3/2}/I_{1/2} = coth x − 1/x
        let x: f64 = 2.0;
        assert!((spherical_ratio(0, x) - (1.0 / x.tanh() - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn derivative_identity() {
        let (nu, x, h) = (2.7, 3.1, 1e-5);
        let fd = (ratio_i(nu, x + h) - ratio_i(nu, x - h)) / (2.0 * h);
        let an = ratio_i_derivative(nu, x, ratio_i(nu, x));
        assert!((fd - an).abs() < 1e-9);
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let z = bessel_j_zeros(0.5, 50);
        for (i, z) in z.iter().enumerate() {
            assert!((z / (PI * (i + 1) as f64) - 1.0).abs() < 1e-13, "{i}: {z}");
        }
    }

    #[test]
    fn integer_order_zeros() {
        let z0 = bessel_j_zeros(0.0, 3);
        for (z, e) in z0.iter().zip([2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013]) {
            assert!((z - e).abs() < 1e-12);
        }
        let z10 = bessel_j_zeros(10.0, 1);
        assert!((z10[0] - 14.475_500_686_554_54).abs() < 1e-11);
    }

    #[test]
    fn mcmahon_approaches_zeros() {
        let z = bessel_j_zeros(2.0, 200);
        let err = (mcmahon_zero(2.0, 200) - z[199]).abs();
        assert!(err < 1e-6, "{err}");
        assert!((mcmahon_zero(0.5, 7) - 7.0 * PI).abs() < 1e-14);
    }
}
