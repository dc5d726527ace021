//! Radial potential families, their momentum-space transforms and the
//! small-distance singularity classification that decides which
//! perturbative orders survive the Λ → ∞ limit.
//!
//! Transform convention: U(k) = ∫d³x e^{-i k·x/ħ} U(x) with k a momentum,
//! so the Coulomb profile maps to 4πZe²ħ²/k². [`PotentialSpec::fourier_transform_at`]
//! returns the transform of the unsigned profile; multiply by
//! [`Sign::factor`] for the signed U(k).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Values of ħ, m and e². The Bohr radius is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    hbar: f64,
    mass: f64,
    e2: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64, e2: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("e2", e2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { hbar, mass, e2 })
    }

    /// ħ = m = e² = 1.
    pub const fn atomic() -> Self {
        Self { hbar: 1.0, mass: 1.0, e2: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    /// a₀ = ħ²/(m e²).
    pub fn a0(&self) -> f64 {
        self.hbar * self.hbar / (self.mass * self.e2)
    }

    /// (2πħ)³, the phase-space cell that converts Tr into tr.
    pub fn phase_cell(&self) -> f64 {
        (2.0 * PI * self.hbar).powi(3)
    }

    /// Momentum scale √(2mΛ) of the free resolvent at regulator Λ.
    pub fn momentum_scale(&self, lambda: f64) -> f64 {
        (2.0 * self.mass * lambda).sqrt()
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::atomic()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Attractive,
    Repulsive,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Attractive => -1.0,
            Sign::Repulsive => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Coulomb,
    InverseSquare,
    Yukawa,
    CutoffCoulomb,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Coulomb => "coulomb",
            Family::InverseSquare => "inverse-square",
            Family::Yukawa => "yukawa",
            Family::CutoffCoulomb => "cutoff-coulomb",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    Coulomb { z: f64 },
    InverseSquare { alpha: f64 },
    Yukawa { z: f64, kappa: f64 },
    CutoffCoulomb { z: f64, r_cut: f64 },
}

/// A radial potential U(r). Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    profile: Profile,
    sign: Sign,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
    }
}

impl PotentialSpec {
    /// Attractive −Z e²/r.
    pub fn coulomb(z: f64) -> Result<Self> {
        Ok(Self {
            profile: Profile::Coulomb { z: positive("Z", z)? },
            sign: Sign::Attractive,
        })
    }

    /// Repulsive +α/r². Attractive inverse-square cores need a
    /// self-adjoint extension and are rejected.
    pub fn inverse_square(alpha: f64) -> Result<Self> {
        Ok(Self {
            profile: Profile::InverseSquare {
                alpha: positive("alpha", alpha)?,
            },
            sign: Sign::Repulsive,
        })
    }

    /// Attractive −Z e² e^{−κr}/r.
    pub fn yukawa(z: f64, kappa: f64) -> Result<Self> {
        Ok(Self {
            profile: Profile::Yukawa {
                z: positive("Z", z)?,
                kappa: positive("kappa", kappa)?,
            },
            sign: Sign::Attractive,
        })
    }

    /// Attractive Coulomb flattened to −Z e²/r_cut inside r_cut.
    pub fn cutoff_coulomb(z: f64, r_cut: f64) -> Result<Self> {
        Ok(Self {
            profile: Profile::CutoffCoulomb {
                z: positive("Z", z)?,
                r_cut: positive("rcut", r_cut)?,
            },
            sign: Sign::Attractive,
        })
    }

    pub fn with_sign(mut self, sign: Sign) -> Result<Self> {
        if matches!(self.profile, Profile::InverseSquare { .. }) && sign == Sign::Attractive {
            return Err(Error::InvalidSpec(
                "inverse-square potentials must be repulsive".into(),
            ));
        }
        self.sign = sign;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        match self.profile {
            Profile::Coulomb { .. } => Family::Coulomb,
            Profile::InverseSquare { .. } => Family::InverseSquare,
            Profile::Yukawa { .. } => Family::Yukawa,
            Profile::CutoffCoulomb { .. } => Family::CutoffCoulomb,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Charge Z for the Coulomb-type families.
    pub fn charge(&self) -> Option<f64> {
        match self.profile {
            Profile::Coulomb { z } | Profile::Yukawa { z, .. } | Profile::CutoffCoulomb { z, .. } => {
                Some(z)
            }
            Profile::InverseSquare { .. } => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.profile {
            Profile::InverseSquare { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.profile {
            Profile::Yukawa { kappa, .. } => Some(kappa),
            _ => None,
        }
    }

    pub fn r_cut(&self) -> Option<f64> {
        match self.profile {
            Profile::CutoffCoulomb { r_cut, .. } => Some(r_cut),
            _ => None,
        }
    }

    /// Same family with the charge replaced; used for Z-scaling checks.
    pub fn with_charge(&self, z: f64) -> Result<Self> {
        let z = positive("Z", z)?;
        let profile = match self.profile {
            Profile::Coulomb { .. } => Profile::Coulomb { z },
            Profile::Yukawa { kappa, .. } => Profile::Yukawa { z, kappa },
            Profile::CutoffCoulomb { r_cut, .. } => Profile::CutoffCoulomb { z, r_cut },
            Profile::InverseSquare { .. } => {
                return Err(Error::InvalidSpec("inverse-square has no charge".into()))
            }
        };
        Ok(Self { profile, sign: self.sign })
    }

    /// U(r).
    pub fn evaluate(&self, units: &UnitSystem, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        Ok(self.potential(units, r))
    }

    /// U(r) without the domain check, for inner loops.
    pub(crate) fn potential(&self, units: &UnitSystem, r: f64) -> f64 {
        let e2 = units.e2();
        let profile = match self.profile {
            Profile::Coulomb { z } => z * e2 / r,
            Profile::InverseSquare { alpha } => alpha / (r * r),
            Profile::Yukawa { z, kappa } => z * e2 * (-kappa * r).exp() / r,
            Profile::CutoffCoulomb { z, r_cut } => z * e2 / r.max(r_cut),
        };
        self.sign.factor() * profile
    }

    /// Transform of the unsigned profile at momentum k > 0.
    pub fn fourier_transform_at(&self, units: &UnitSystem, k: f64) -> Result<f64> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("momentum must be positive, got {k}")));
        }
        if let Profile::InverseSquare { .. } = self.profile {
            return Err(Error::NotRepresentable("inverse-square"));
        }
        Ok(self.k2_transform(units, k) / (k * k))
    }

    /// k²·U(k) for the unsigned profile; finite as k → 0. Zero for the
    /// inverse-square profile, whose transform is not used.
    pub(crate) fn k2_transform(&self, units: &UnitSystem, k: f64) -> f64 {
        let hbar = units.hbar();
        let c = 4.0 * PI * units.e2() * hbar * hbar;
        match self.profile {
            Profile::Coulomb { z } => c * z,
            Profile::Yukawa { z, kappa } => {
                let hk = hbar * kappa;
                c * z * k * k / (k * k + hk * hk)
            }
            Profile::CutoffCoulomb { z, r_cut } => {
                let x = k * r_cut / hbar;
                let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                c * z * sinc
            }
            Profile::InverseSquare { .. } => 0.0,
        }
    }

    pub fn classify(&self) -> SingularityClass {
        let (s, tail) = match self.profile {
            Profile::InverseSquare { .. } => (2.0, TailKind::Screened),
            Profile::Coulomb { .. } => (1.0, TailKind::CoulombTail),
            Profile::Yukawa { .. } => (1.0, TailKind::Screened),
            // bounded core, but the exterior is an unscreened Coulomb field
            Profile::CutoffCoulomb { .. } => (0.0, TailKind::CoulombTail),
        };
        SingularityClass {
            small_x_exponent: s,
            large_x_tail: tail,
            case_label: CaseLabel::from_exponent(s),
        }
    }

    /// C = lim_{k→0} k²·U(k) (unsigned), nonzero only for a Coulomb tail.
    pub fn coulomb_tail_coefficient(&self, units: &UnitSystem) -> f64 {
        match self.classify().large_x_tail {
            TailKind::CoulombTail => self.k2_transform(units, 0.0),
            TailKind::Screened => 0.0,
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.profile {
            Profile::Coulomb { z } => write!(f, "coulomb:Z={z}")?,
            Profile::InverseSquare { alpha } => return write!(f, "inverse-square:alpha={alpha}"),
            Profile::Yukawa { z, kappa } => write!(f, "yukawa:Z={z},kappa={kappa}")?,
            Profile::CutoffCoulomb { z, r_cut } => write!(f, "cutoff-coulomb:Z={z},rcut={r_cut}")?,
        }
        if self.sign == Sign::Repulsive {
            f.write_str(",sign=repulsive")?;
        }
        Ok(())
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// `coulomb:Z=<f>`, `inverse-square:alpha=<f>`, `yukawa:Z=<f>,kappa=<f>`,
    /// `cutoff-coulomb:Z=<f>,rcut=<f>`; Coulomb-type families also take
    /// `sign=attractive|repulsive`. Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, params) = lower
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("missing ':' in {s:?}")))?;

        let allowed: &[&str] = match name {
            "coulomb" => &["z", "sign"],
            "inverse-square" => &["alpha"],
            "yukawa" => &["z", "kappa", "sign"],
            "cutoff-coulomb" => &["z", "rcut", "sign"],
            _ => return Err(Error::InvalidSpec(format!("unknown family {name:?}"))),
        };

        let mut values: Vec<(&str, &str)> = Vec::new();
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {item:?}")))?;
            let key = key.trim();
            if !allowed.contains(&key) {
                return Err(Error::InvalidSpec(format!("unknown key {key:?} for {name}")));
            }
            if values.iter().any(|(k, _)| *k == key) {
                return Err(Error::InvalidSpec(format!("duplicate key {key:?}")));
            }
            values.push((key, value.trim()));
        }

        let number = |key: &str| -> Result<f64> {
            let raw = values
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::InvalidSpec(format!("missing {key} for {name}")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("{key}={raw:?} is not a number")))
        };

        let spec = match name {
            "coulomb" => Self::coulomb(number("z")?)?,
            "inverse-square" => Self::inverse_square(number("alpha")?)?,
            "yukawa" => Self::yukawa(number("z")?, number("kappa")?)?,
            _ => Self::cutoff_coulomb(number("z")?, number("rcut")?)?,
        };
        match values.iter().find(|(k, _)| *k == "sign").map(|(_, v)| *v) {
            None => Ok(spec),
            Some("attractive") => spec.with_sign(Sign::Attractive),
            Some("repulsive") => spec.with_sign(Sign::Repulsive),
            Some(other) => Err(Error::InvalidSpec(format!("bad sign {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailKind {
    CoulombTail,
    Screened,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// x⁻² core: every perturbative order contributes, W ∝ Λ⁻¹.
    A,
    /// Coulomb core: first and second orders, W ∝ Λ⁻³ᐟ² and Λ⁻².
    B,
    /// Weaker than Coulomb: at most first order.
    C,
    Unsupported,
}

impl CaseLabel {
    pub fn from_exponent(s: f64) -> Self {
        if s == 2.0 {
            CaseLabel::A
        } else if s == 1.0 {
            CaseLabel::B
        } else if (0.0..1.0).contains(&s) {
            CaseLabel::C
        } else {
            CaseLabel::Unsupported
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::A => "A",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
            CaseLabel::Unsupported => "unsupported",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityClass {
    /// s in U ~ x^(−s) as x → 0.
    pub small_x_exponent: f64,
    pub large_x_tail: TailKind,
    pub case_label: CaseLabel,
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = match self.large_x_tail {
            TailKind::CoulombTail => "Coulomb tail",
            TailKind::Screened => "screened tail",
        };
        write!(f, "case {}, {}", self.case_label, tail)
    }
}
