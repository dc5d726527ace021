//! Nonperturbative w(Λ) from radial channels in a spherical box.
//!
//! Each channel ℓ contributes t_ℓ = (2ℓ+1)·ΔQ_ℓ − S_ℓ, where
//! ΔQ_ℓ = Σ_n [(Λ+E_n)⁻¹ − (Λ+E⁰_n)⁻¹] is the quantum trace relative to the
//! free box and S_ℓ is the classical phase-space integral relative to the
//! free one over the angular-momentum shell ħℓ ≤ L ≤ ħ(ℓ+1). The shells
//! tile phase space exactly, so Σ_ℓ t_ℓ is w(Λ) at radius R; the sum over
//! ℓ is closed with a fitted power-law tail and R → ∞ by Richardson
//! extrapolation.
//!
//! ΔQ_ℓ is taken from the Mittag-Leffler sum over Bessel zeros for the
//! inverse-square family and from a Gel'fand–Yaglom (log-derivative) ODE
//! for the others. Both require Λ + U(r) > 0 for all r, so attractive
//! singular potentials are out of scope.

pub mod bessel;
pub mod ode;
pub mod tridiag;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perturbation::{Source, TraceSample, TraceSamples};
use crate::potentials::{Family, PotentialSpec, UnitSystem};
use crate::quadrature::{fit_power_law, integrate_adaptive, richardson, Interval, QuadratureBudget};

use bessel::{bessel_j_zeros, mcmahon_zero, ratio_i, ratio_i_derivative, spherical_ratio};
use ode::OdeTolerance;
use tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    box_radius: f64,
    ell_max: u32,
    levels_per_channel: usize,
    grid_points: usize,
    richardson_radii: Vec<f64>,
}

impl OracleConfig {
    pub fn new(
        box_radius: f64,
        ell_max: u32,
        levels_per_channel: usize,
        grid_points: usize,
        richardson_radii: Vec<f64>,
    ) -> Result<Self> {
        if !(box_radius > 0.0 && box_radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("box radius must be positive, got {box_radius}")));
        }
        if ell_max < 10 {
            return Err(Error::InvalidConfig(format!("ell_max must be ≥ 10, got {ell_max}")));
        }
        if levels_per_channel == 0 {
            return Err(Error::InvalidConfig("levels_per_channel must be ≥ 1".into()));
        }
        if grid_points < 200 {
            return Err(Error::InvalidConfig(format!("grid_points must be ≥ 200, got {grid_points}")));
        }
        if richardson_radii.len() < 2
            || richardson_radii[0] <= 0.0
            || richardson_radii.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::InvalidConfig(
                "need at least two positive, strictly increasing Richardson radii".into(),
            ));
        }
        Ok(Self { box_radius, ell_max, levels_per_channel, grid_points, richardson_radii })
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn ell_max(&self) -> u32 {
        self.ell_max
    }

    pub fn levels_per_channel(&self) -> usize {
        self.levels_per_channel
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn richardson_radii(&self) -> &[f64] {
        &self.richardson_radii
    }

    pub fn with_ell_max(mut self, ell_max: u32) -> Result<Self> {
        self.ell_max = ell_max;
        Self::new(self.box_radius, self.ell_max, self.levels_per_channel, self.grid_points, self.richardson_radii)
    }

    pub fn with_box_radius(mut self, r: f64) -> Result<Self> {
        self.box_radius = r;
        Self::new(self.box_radius, self.ell_max, self.levels_per_channel, self.grid_points, self.richardson_radii)
    }

    pub fn with_richardson_radii(mut self, radii: Vec<f64>) -> Result<Self> {
        self.richardson_radii = radii;
        Self::new(self.box_radius, self.ell_max, self.levels_per_channel, self.grid_points, self.richardson_radii)
    }

    pub fn with_grid_points(mut self, n: usize) -> Result<Self> {
        self.grid_points = n;
        Self::new(self.box_radius, self.ell_max, self.levels_per_channel, self.grid_points, self.richardson_radii)
    }

    pub fn with_levels(mut self, n: usize) -> Result<Self> {
        self.levels_per_channel = n;
        Self::new(self.box_radius, self.ell_max, self.levels_per_channel, self.grid_points, self.richardson_radii)
    }
}

impl Default for OracleConfig {
    /// R = 40, ℓ ≤ 60, 400 levels, 2000 grid points, Richardson radii
    /// {1000, 2000, 4000}.
    fn default() -> Self {
        Self {
            box_radius: 40.0,
            ell_max: 60,
            levels_per_channel: 400,
            grid_points: 2000,
            richardson_radii: vec![1000.0, 2000.0, 4000.0],
        }
    }
}

/// Asymptotic data for levels beyond the computed ones: E_n ≈ s·z_n² with
/// z_n from McMahon's formula and s = ħ²/(2mR²).
#[derive(Debug, Clone, Copy, PartialEq)]
struct LevelTail {
    energy_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectrum {
    ell: u32,
    nu: f64,
    eigenvalues: Vec<f64>,
    tail: Option<LevelTail>,
    discretization_warning: bool,
}

impl ChannelSpectrum {
    /// A spectrum without an asymptotic tail; traces are plain finite sums.
    pub fn new(ell: u32, nu: f64, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("eigenvalues must be strictly increasing".into()));
        }
        Ok(Self { ell, nu, eigenvalues, tail: None, discretization_warning: false })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Set when doubling the grid moved a retained level by more than 1e-6
    /// relative.
    pub fn discretization_warning(&self) -> bool {
        self.discretization_warning
    }
}

fn langer(ell: u32) -> f64 {
    ell as f64 + 0.5
}

/// ν = √(2mα/ħ² + (ℓ+½)²); ℓ+½ for potentials without an r⁻² core.
pub fn effective_order(spec: &PotentialSpec, units: &UnitSystem, ell: u32) -> f64 {
    let nu0 = langer(ell);
    match spec.alpha() {
        Some(alpha) => {
            let g = 2.0 * units.mass() * alpha / (units.hbar() * units.hbar());
            (g + nu0 * nu0).sqrt()
        }
        None => nu0,
    }
}

fn bessel_spectrum(nu: f64, ell: u32, units: &UnitSystem, config: &OracleConfig) -> ChannelSpectrum {
    let s = units.hbar().powi(2) / (2.0 * units.mass() * config.box_radius.powi(2));
    let eigenvalues = bessel_j_zeros(nu, config.levels_per_channel)
        .into_iter()
        .map(|z| s * z * z)
        .collect();
    ChannelSpectrum {
        ell,
        nu,
        eigenvalues,
        tail: Some(LevelTail { energy_scale: s }),
        discretization_warning: false,
    }
}

/// Free-particle spectrum of channel ℓ in the box (zeros of J_{ℓ+½}).
pub fn free_channel_spectrum(units: &UnitSystem, ell: u32, config: &OracleConfig) -> ChannelSpectrum {
    bessel_spectrum(langer(ell), ell, units, config)
}

fn fd_levels(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    radius: f64,
    n: usize,
    count: usize,
) -> Vec<f64> {
    let h = radius / (n + 1) as f64;
    let kin = units.hbar().powi(2) / (2.0 * units.mass());
    let cent = kin * (ell as f64) * (ell as f64 + 1.0);
    let diag = (1..=n)
        .map(|i| {
            let r = i as f64 * h;
            2.0 * kin / (h * h) + cent / (r * r) + spec.potential(units, r)
        })
        .collect();
    let off = vec![-kin / (h * h); n - 1];
    SymTridiagonal::new(diag, off).eigenvalues_range(0, count)
}

/// Bound levels of channel ℓ in a box of radius `config.box_radius()` with
/// Dirichlet walls. Inverse-square cores use the exact Bessel-zero levels;
/// other families use a three-point finite-difference grid with
/// `grid_points` interior nodes, refined once by doubling and combined by
/// h² extrapolation.
pub fn channel_spectrum(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    config: &OracleConfig,
) -> Result<ChannelSpectrum> {
    let nu = effective_order(spec, units, ell);
    if spec.family() == Family::InverseSquare {
        return Ok(bessel_spectrum(nu, ell, units, config));
    }
    let n = config.grid_points;
    let count = config.levels_per_channel.min(n / 10).max(1);
    let coarse = fd_levels(spec, units, ell, config.box_radius, n, count);
    let fine = fd_levels(spec, units, ell, config.box_radius, 2 * n + 1, count);
    let warning = coarse
        .iter()
        .zip(&fine)
        .any(|(a, b)| (a - b).abs() > 1e-6 * b.abs().max(f64::MIN_POSITIVE));
    // grids with n+1 and 2n+2 intervals: h halves exactly
    let eigenvalues: Vec<f64> = coarse.iter().zip(&fine).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    let s = units.hbar().powi(2) / (2.0 * units.mass() * config.box_radius.powi(2));
    Ok(ChannelSpectrum {
        ell,
        nu,
        eigenvalues,
        tail: Some(LevelTail { energy_scale: s }),
        discretization_warning: warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumTrace {
    /// (2ℓ+1)·Σ_n (Λ+E_n)⁻¹ including the tail.
    pub value: f64,
    /// Tail contribution beyond the computed levels.
    pub tail: f64,
    /// Tail above 1% of the explicit sum.
    pub precision_warning: bool,
}

/// Σ_{n>N} 1/(Λ + s·z_n²) with McMahon zeros: explicit for the next 2000
/// terms, then the midpoint integral of the leading form.
fn mcmahon_tail(nu: f64, first: usize, s: f64, lambda: f64) -> f64 {
    const EXPLICIT: usize = 2000;
    let explicit: f64 = (first..first + EXPLICIT)
        .map(|n| {
            let z = mcmahon_zero(nu, n);
            1.0 / (lambda + s * z * z)
        })
        .sum();
    let start = (first + EXPLICIT) as f64 - 0.5 + 0.5 * nu - 0.25;
    let a = PI * (s / lambda).sqrt();
    explicit + (0.5 * PI - (a * start).atan()) / (PI * (s * lambda).sqrt())
}

pub fn quantum_channel_trace(ch: &ChannelSpectrum, lambda: f64) -> Result<QuantumTrace> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("Λ must be positive, got {lambda}")));
    }
    if ch.eigenvalues.first().is_some_and(|&e| lambda + e <= 0.0) {
        return Err(Error::Domain("Λ + E_n must be positive for every level".into()));
    }
    let partial: f64 = ch.eigenvalues.iter().map(|e| 1.0 / (lambda + e)).sum();
    let tail = match ch.tail {
        Some(t) => mcmahon_tail(ch.nu, ch.eigenvalues.len() + 1, t.energy_scale, lambda),
        None => 0.0,
    };
    let deg = (2 * ch.ell + 1) as f64;
    Ok(QuantumTrace {
        value: deg * (partial + tail),
        tail: deg * tail,
        precision_warning: tail > 0.01 * partial,
    })
}

/// Exact box channel sum for an inverse-square core of order ν:
/// Σ_n (Λ + ħ²z²_{ν,n}/2mR²)⁻¹ = y·I_{ν+1}(y)/(2Λ·I_ν(y)), y = R√(2mΛ)/ħ.
pub fn bessel_box_trace(nu: f64, units: &UnitSystem, radius: f64, lambda: f64) -> f64 {
    let y = radius * units.momentum_scale(lambda) / units.hbar();
    y * ratio_i(nu, y) / (2.0 * lambda)
}

fn min_potential(spec: &PotentialSpec, units: &UnitSystem) -> f64 {
    // all profiles are monotone in r, so the attractive minimum sits at r → 0
    match spec.sign() {
        crate::potentials::Sign::Repulsive => 0.0,
        crate::potentials::Sign::Attractive => spec.potential(units, f64::MIN_POSITIVE),
    }
}

fn check_positive_shift(spec: &PotentialSpec, units: &UnitSystem, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("Λ must be positive, got {lambda}")));
    }
    if lambda + min_potential(spec, units) <= 0.0 {
        return Err(Error::Unsupported(format!(
            "Λ + U(r) must stay positive; {spec} reaches {} at Λ = {lambda}",
            lambda + min_potential(spec, units)
        )));
    }
    Ok(())
}

/// Geometric breakpoints r₀·2ᵏ up to `radius` (plus the cutoff radius), so
/// that localized features are seen by the first quadrature pass.
fn breakpoints(spec: &PotentialSpec, units: &UnitSystem, lambda: f64, radius: f64) -> Vec<f64> {
    let mut scale = units.hbar() / units.momentum_scale(lambda);
    if let Some(k) = spec.kappa() {
        scale = scale.min(1.0 / k);
    }
    if let Some(rc) = spec.r_cut() {
        scale = scale.min(rc);
    }
    let mut pts = vec![0.0];
    let mut r = 1e-4 * scale;
    while r < radius {
        pts.push(r);
        r *= 2.0;
    }
    if let Some(rc) = spec.r_cut() {
        if rc < radius {
            pts.push(rc);
        }
    }
    pts.push(radius);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Sums adaptive quadratures over consecutive breakpoints. Individual
/// pieces may stop short of their own target as long as the combined error
/// is small against the total.
fn integrate_pieces(f: impl Fn(f64) -> f64, pts: &[f64], budget: &QuadratureBudget) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut error = 0.0;
    for w in pts.windows(2) {
        match integrate_adaptive(&f, Interval::Finite(w[0], w[1]), budget) {
            Ok(q) => {
                value += q.value;
                error += q.error;
            }
            Err(Error::Unconverged { value: v, error_estimate: e }) => {
                value += v;
                error += e;
            }
            Err(other) => return Err(other),
        }
    }
    if error > 1e-8 * value.abs() + 1e3 * budget.abs_tol() {
        return Err(Error::Unconverged { value, error_estimate: error });
    }
    Ok((value, error))
}

/// Langer-form classical value of channel ℓ inside the box:
/// (2ℓ+1)·(1/πħ)·∫₀^R dr ∫₀^∞ dp_r (Λ + p_r²/2m + ħ²(ℓ+½)²/2mr² + U)⁻¹.
/// The p_r integral is done in closed form, which is the shared-cutoff
/// expression with its asymptotic remainder already added.
pub fn classical_channel_trace(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    lambda: f64,
    config: &OracleConfig,
) -> Result<f64> {
    check_positive_shift(spec, units, lambda)?;
    let m = units.mass();
    let hbar = units.hbar();
    let nu0 = langer(ell);
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let b = lambda + spec.potential(units, r) + hbar * hbar * nu0 * nu0 / (2.0 * m * r * r);
        1.0 / b.sqrt()
    };
    let pts = breakpoints(spec, units, lambda, config.box_radius);
    let (v, _) = integrate_pieces(f, &pts, &QuadratureBudget::default())?;
    Ok((2 * ell + 1) as f64 * (2.0 * m).sqrt() / (2.0 * hbar) * v)
}

/// Free-particle value of [`classical_channel_trace`] in closed form:
/// (2ℓ+1)(√(y²+ν₀²) − ν₀)/(2Λ).
pub fn free_classical_channel_trace(units: &UnitSystem, ell: u32, lambda: f64, radius: f64) -> f64 {
    let y = radius * units.momentum_scale(lambda) / units.hbar();
    let nu0 = langer(ell);
    (2 * ell + 1) as f64 * ((y * y + nu0 * nu0).sqrt() - nu0) / (2.0 * lambda)
}

/// Classical shell term S_ℓ(R) relative to the free one:
/// (2m)^{3/2}/ħ³ ∫₀^R dr r²U [g(ℓ+1) − g(ℓ)],
/// g(L) = 1/(√(Λ+U+cL²) + √(Λ+cL²)), c = ħ²/2mr².
/// With `beyond_first` the part linear in U is removed analytically:
/// g − g|_{U=0} = −U/(2√(Λ+cL²)(√(Λ+U+cL²) + √(Λ+cL²))²).
fn classical_shell(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    lambda: f64,
    radius: f64,
    beyond_first: bool,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let m = units.mass();
    let hbar = units.hbar();
    let (a, b) = ((ell as f64).powi(2), (ell as f64 + 1.0).powi(2));
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let u = spec.potential(units, r);
        let c = hbar * hbar / (2.0 * m * r * r);
        if beyond_first {
            let h = |l2: f64| {
                let free = (lambda + c * l2).sqrt();
                let sum = (lambda + u + c * l2).sqrt() + free;
                1.0 / (free * sum * sum)
            };
            -0.5 * r * r * u * u * (h(b) - h(a))
        } else {
            let g = |l2: f64| 1.0 / ((lambda + u + c * l2).sqrt() + (lambda + c * l2).sqrt());
            r * r * u * (g(b) - g(a))
        }
    };
    let pts = breakpoints(spec, units, lambda, radius);
    let (v, e) = integrate_pieces(f, &pts, budget)?;
    let k = (2.0 * m).powf(1.5) / hbar.powi(3);
    Ok((k * v, k * e))
}

/// ΔQ_ℓ at one radius: the full value and the part beyond first order in U.
#[derive(Debug, Clone, Copy, PartialEq)]
struct JostTrace {
    full: f64,
    beyond_first: f64,
}

/// ΔQ_ℓ at each radius from the log-derivative of the regular solution at
/// energy −Λ. With v = 2mU/ħ², κ² = 2mΛ/ħ² and y₀ the free log-derivative,
/// d = y − y₀ obeys d' = v − d(2y₀ + d), e = ∂d/∂κ² obeys
/// e' = −2(y₀e + d·z₀ + d·e), and ΔQ_ℓ(R) = (2m/ħ²)∫₀^R e dr.
/// y₀ and z₀ = ∂y₀/∂κ² are carried along through their own Riccati
/// equations, which are stable in the outward direction. The parts of d
/// and e beyond first order in v, δd' = −2y₀δd − d² and
/// δe' = −2(y₀δe + δd·z₀ + d·e), are integrated alongside.
fn jost_delta_q(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    lambda: f64,
    radii: &[f64],
) -> Result<Vec<JostTrace>> {
    let m = units.mass();
    let hbar2 = units.hbar().powi(2);
    let kappa = units.momentum_scale(lambda) / units.hbar();
    let k2 = kappa * kappa;
    let nu0 = langer(ell);
    let l1 = ell as f64 + 1.0;
    let cent = ell as f64 * l1;
    let rhs = |r: f64, s: &[f64; 8]| {
        let (y0, z0, d, e, dd, de) = (s[0], s[1], s[2], s[3], s[4], s[5]);
        let v = 2.0 * m * spec.potential(units, r) / hbar2;
        [
            k2 + cent / (r * r) - y0 * y0,
            1.0 - 2.0 * y0 * z0,
            v - d * (2.0 * y0 + d),
            -2.0 * (y0 * e + d * z0 + d * e),
            -2.0 * y0 * dd - d * d,
            -2.0 * (y0 * de + dd * z0 + d * e),
            e,
            de,
        ]
    };
    let mut scale = 1.0 / kappa;
    if let Some(k) = spec.kappa() {
        scale = scale.min(1.0 / k);
    }
    if let Some(rc) = spec.r_cut() {
        scale = scale.min(rc);
    }
    let r0 = 1e-7 * scale;
    let x0 = kappa * r0;
    let rho = spherical_ratio(ell, x0);
    let y0 = l1 / r0 + kappa * rho;
    let z0 = (rho + x0 * ratio_i_derivative(nu0, x0, rho)) / (2.0 * kappa);
    let v0 = 2.0 * m * spec.potential(units, r0) / hbar2;
    let mut state = [y0, z0, r0 * v0 / (2.0 * l1), 0.0, 0.0, 0.0, 0.0, 0.0];
    let tol = OdeTolerance { abs: 1e-16, rel: 1e-11, max_steps: 5_000_000 };
    let mut out = Vec::with_capacity(radii.len());
    let mut r = r0;
    for &radius in radii {
        // a kink at the cutoff radius is split off explicitly
        if let Some(rc) = spec.r_cut() {
            if r < rc && rc < radius {
                state = ode::integrate(rhs, r, rc, state, 1e-3 * r, &tol)?;
                r = rc;
            }
        }
        state = ode::integrate(rhs, r, radius, state, 1e-3 * r, &tol)?;
        r = radius;
        let k = 2.0 * m / hbar2;
        out.push(JostTrace { full: k * state[6], beyond_first: k * state[7] });
    }
    Ok(out)
}

/// t_ℓ at each radius. Inverse-square cores give the full term; the other
/// families give only the part beyond first order in U, whose ℓ-sum
/// converges much faster (the first-order part sums to w₁ exactly).
fn channel_term(
    spec: &PotentialSpec,
    units: &UnitSystem,
    ell: u32,
    lambda: f64,
    radii: &[f64],
    budget: &QuadratureBudget,
) -> Result<(Vec<f64>, f64)> {
    let deg = (2 * ell + 1) as f64;
    let inverse_square = spec.family() == Family::InverseSquare;
    let dq: Vec<f64> = if inverse_square {
        let nu = effective_order(spec, units, ell);
        let nu0 = langer(ell);
        radii
            .iter()
            .map(|&r| bessel_box_trace(nu, units, r, lambda) - bessel_box_trace(nu0, units, r, lambda))
            .collect()
    } else {
        jost_delta_q(spec, units, ell, lambda, radii)?.iter().map(|j| j.beyond_first).collect()
    };
    let mut t = Vec::with_capacity(radii.len());
    let mut quad_err = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let (s, e) = classical_shell(spec, units, ell, lambda, r, !inverse_square, budget)?;
        t.push(deg * dq[i] - s);
        quad_err = quad_err.max(e);
    }
    Ok((t, quad_err))
}

/// Reduced w(Λ) with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Combined Richardson, tail and quadrature error.
    pub error: f64,
    /// The exactly summed first-order part (zero for screened tails and
    /// for the inverse-square family, whose channels are kept whole).
    pub first_order: f64,
    /// Extrapolated Σ_{ℓ ≤ ℓmax} t_ℓ.
    pub channel_sum: f64,
    /// Fitted Σ_{ℓ > ℓmax} t_ℓ.
    pub tail: f64,
    pub extrapolation_error: f64,
    pub tail_error: f64,
}

const TAIL_WINDOW: usize = 8;

/// Σ_{ℓ>ℓmax} A·ℓ^{−p} ≈ A(ℓmax+½)^{1−p}/(p−1) from a fit to the last
/// channel terms, with the spread of two overlapping fits as its error.
fn channel_tail(terms: &[f64]) -> Result<(f64, f64)> {
    let n = terms.len();
    let total: f64 = terms.iter().map(|t| t.abs()).sum();
    let window = &terms[n - TAIL_WINDOW..];
    let biggest = window.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    if biggest <= 1e-13 * total || total == 0.0 {
        // terms already at round-off level
        return Ok((0.0, window.iter().map(|t| t.abs()).sum()));
    }
    let fit_from = |lo: usize| -> Result<(f64, f64)> {
        let pts: Vec<(f64, f64)> = (lo..lo + TAIL_WINDOW).map(|l| (l as f64, terms[l])).collect();
        let fit = fit_power_law(&pts).map_err(|_| Error::TailDivergent)?;
        if fit.exponent <= 1.05 {
            return Err(Error::TailDivergent);
        }
        let lmax = (n - 1) as f64;
        Ok((fit.amplitude * (lmax + 0.5).powf(1.0 - fit.exponent) / (fit.exponent - 1.0), fit.exponent))
    };
    if window.windows(2).any(|w| w[1].abs() >= w[0].abs()) {
        return Err(Error::TailDivergent);
    }
    let (a, _) = fit_from(n - TAIL_WINDOW)?;
    let (b, _) = fit_from(n - TAIL_WINDOW - TAIL_WINDOW / 2)?;
    Ok((a, (a - b).abs().max(0.02 * a.abs())))
}

/// w(Λ) = Σ_ℓ t_ℓ, extrapolated to an infinite box and closed in ℓ.
pub fn oracle_w(spec: &PotentialSpec, units: &UnitSystem, lambda: f64, config: &OracleConfig) -> Result<OracleValue> {
    check_positive_shift(spec, units, lambda)?;
    let radii = &config.richardson_radii;
    let budget = QuadratureBudget::default();
    let per_channel = (0..=config.ell_max)
        .into_par_iter()
        .map(|ell| -> Result<(f64, f64)> {
            let (t, quad_err) = channel_term(spec, units, ell, lambda, radii, &budget)?;
            let ex = richardson(radii, &t, 2.0)?;
            Ok((ex.value, ex.error + quad_err))
        })
        .collect::<Result<Vec<_>>>()?;
    let first_order = if spec.family() == Family::InverseSquare {
        0.0
    } else {
        crate::perturbation::compute_w1(spec, units, lambda, &budget)?.value
    };
    let terms: Vec<f64> = per_channel.iter().map(|c| c.0).collect();
    let extrapolation_error: f64 = per_channel.iter().map(|c| c.1).sum();
    let channel_sum: f64 = terms.iter().sum();
    let (tail, tail_error) = channel_tail(&terms)?;
    Ok(OracleValue {
        value: first_order + channel_sum + tail,
        error: extrapolation_error + tail_error,
        first_order,
        channel_sum,
        tail,
        extrapolation_error,
        tail_error,
    })
}

/// [`oracle_w`] over a Λ grid. Grid points run in order; each one is
/// parallel over channels internally.
pub fn sample_oracle(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda_grid: &[f64],
    config: &OracleConfig,
) -> Result<TraceSamples> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let entries = lambda_grid
        .iter()
        .map(|&lambda| {
            let v = oracle_w(spec, units, lambda, config)?;
            Ok(TraceSample { lambda, w: v.value, err: v.error })
        })
        .collect::<Result<Vec<_>>>()?;
    TraceSamples::new(entries, Source::Oracle, *spec, *units)
}

/// The per-channel terms t_ℓ at a single radius, without extrapolation
/// (beyond first order in U except for inverse-square cores).
pub fn channel_terms(
    spec: &PotentialSpec,
    units: &UnitSystem,
    lambda: f64,
    radius: f64,
    ell_max: u32,
) -> Result<Vec<f64>> {
    check_positive_shift(spec, units, lambda)?;
    let budget = QuadratureBudget::default();
    (0..=ell_max)
        .into_par_iter()
        .map(|ell| Ok(channel_term(spec, units, ell, lambda, &[radius], &budget)?.0[0]))
        .collect()
}
