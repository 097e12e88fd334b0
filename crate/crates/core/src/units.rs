//! Atomic-physics inputs and their reduction to the length-scaled detector
//! parameters consumed by every observable.
//!
//! All quantities are SI. The reduced set keeps lengths in metres:
//! `t_bar = c_s·T`, `omega_bar = Ω/c_s` (m⁻¹), `lambda_bar_sq = ḡ_ab²/(g_bb·ħ·c_s)` (m²).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, HarvestError, Result};

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub bohr_radius: f64,
    pub atomic_mass_unit: f64,
}

pub const CODATA: PhysicalConstants =
    PhysicalConstants { hbar: 1.054571817e-34, bohr_radius: 5.29177210903e-11, atomic_mass_unit: 1.66053906660e-27 };

pub const HBAR: f64 = CODATA.hbar;
pub const BOHR_RADIUS: f64 = CODATA.bohr_radius;
pub const AMU: f64 = CODATA.atomic_mass_unit;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boson (condensate) species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensateSpec {
    pub m_b: f64,
    pub a_bb: f64,
    pub rho0: f64,
}

impl CondensateSpec {
    /// ⁸⁷Rb with a_bb = 100 a0 at ρ0 = 5×10¹⁴ cm⁻³.
    pub fn rubidium87() -> Self {
        CondensateSpec { m_b: 87.0 * AMU, a_bb: 100.0 * BOHR_RADIUS, rho0: 5e20 }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("m_b", self.m_b)?;
        ensure_positive("a_bb", self.a_bb)?;
        ensure_positive("rho0", self.rho0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCondensate {
    pub m_b: f64,
    pub rho0: f64,
    pub g_bb: f64,
    pub c_s: f64,
    pub xi: f64,
}

/// Impurity (detector) species and protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub m_a: f64,
    pub omega_trap: f64,
    pub a_ab_bar: f64,
    pub t_switch: f64,
    /// Intraspecies scattering length, recorded but unused at leading order.
    pub a_aa: f64,
}

impl DetectorSpec {
    /// ³⁹K impurity with the default protocol: Ω = 35 krad/s, T = 0.065 ms, ā_ab = 1000 a0.
    pub fn potassium39() -> Self {
        DetectorSpec {
            m_a: 39.0 * AMU,
            omega_trap: 35e3,
            a_ab_bar: 1000.0 * BOHR_RADIUS,
            t_switch: 0.065e-3,
            a_aa: 4.0 * BOHR_RADIUS,
        }
    }

    /// Width of the trap ground state, σ = √(ħ/(m_a Ω)).
    pub fn sigma(&self) -> f64 {
        (HBAR / (self.m_a * self.omega_trap)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("m_a", self.m_a)?;
        ensure_positive("omega_trap", self.omega_trap)?;
        ensure_positive("T_switch", self.t_switch)?;
        if !self.a_ab_bar.is_finite() {
            return Err(HarvestError::Domain("a_ab must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Separation {
    /// Fixed distance in metres.
    Fixed(f64),
    /// L = ratio · c_s · T.
    SoundCone(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub separation: Separation,
}

impl PairGeometry {
    pub fn fixed(l: f64) -> Self {
        PairGeometry { separation: Separation::Fixed(l) }
    }

    pub fn sound_cone(ratio: f64) -> Self {
        PairGeometry { separation: Separation::SoundCone(ratio) }
    }

    pub fn resolve(&self, t_bar: f64) -> Result<f64> {
        let l = match self.separation {
            Separation::Fixed(l) => l,
            Separation::SoundCone(r) => r * t_bar,
        };
        if l.is_finite() && l >= 0.0 {
            Ok(l)
        } else {
            Err(HarvestError::Domain(format!("separation must be >= 0, got {l}")))
        }
    }
}

/// The reduced parameter set every observable is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// λ̄², m².
    pub lambda_bar_sq: f64,
    /// c_s·T, m.
    pub t_bar: f64,
    /// Ω/c_s, m⁻¹.
    pub omega_bar: f64,
    /// Smearing width, m.
    pub sigma: f64,
    /// Detector separation, m.
    pub separation: f64,
}

impl DimensionlessParams {
    /// σ_eff² = σ² + T̄².
    pub fn width_sq(&self) -> f64 {
        self.sigma * self.sigma + self.t_bar * self.t_bar
    }

    pub fn with_separation(mut self, l: f64) -> Self {
        self.separation = l;
        self
    }

    pub fn with_coupling(mut self, lambda_bar_sq: f64) -> Self {
        self.lambda_bar_sq = lambda_bar_sq;
        self
    }

    /// Rescale every length by `s` (λ̄² by s², Ω̄ by 1/s). Observables are invariant.
    pub fn rescale_lengths(&self, s: f64) -> Self {
        DimensionlessParams {
            lambda_bar_sq: self.lambda_bar_sq * s * s,
            t_bar: self.t_bar * s,
            omega_bar: self.omega_bar / s,
            sigma: self.sigma * s,
            separation: self.separation * s,
        }
    }

    pub(crate) fn check_widths(&self) -> Result<()> {
        ensure_positive("T_bar", self.t_bar)?;
        ensure_positive("sigma", self.sigma)?;
        if !self.omega_bar.is_finite() || !self.lambda_bar_sq.is_finite() || self.lambda_bar_sq < 0.0 {
            return Err(HarvestError::Domain("omega_bar and lambda_bar_sq must be finite, lambda_bar_sq >= 0".into()));
        }
        Ok(())
    }

    pub(crate) fn check_separation(&self) -> Result<()> {
        if self.separation.is_finite() && self.separation >= 0.0 {
            Ok(())
        } else {
            Err(HarvestError::DegenerateGeometry(format!(
                "separation must be finite and >= 0, got {}",
                self.separation
            )))
        }
    }
}

pub fn reduced_mass(m_a: f64, m_b: f64) -> Result<f64> {
    ensure_positive("m_a", m_a)?;
    ensure_positive("m_b", m_b)?;
    Ok(m_a * m_b / (m_a + m_b))
}

/// g_bb = 4πħ²a_bb/m_b.
pub fn coupling_bb(a_bb: f64, m_b: f64) -> Result<f64> {
    if !(a_bb.is_finite() && a_bb >= 0.0) {
        return Err(HarvestError::Domain(format!("a_bb must be >= 0, got {a_bb}")));
    }
    ensure_positive("m_b", m_b)?;
    Ok(4.0 * PI * HBAR * HBAR * a_bb / m_b)
}

/// ḡ_ab = 2πħ²a_ab/μ_ab; carries the sign of a_ab.
pub fn coupling_ab(a_ab: f64, mu_ab: f64) -> Result<f64> {
    ensure_positive("mu_ab", mu_ab)?;
    if !a_ab.is_finite() {
        return Err(HarvestError::Domain("a_ab must be finite".into()));
    }
    Ok(2.0 * PI * HBAR * HBAR * a_ab / mu_ab)
}

pub fn derive_condensate(spec: &CondensateSpec) -> Result<DerivedCondensate> {
    spec.validate()?;
    let g_bb = coupling_bb(spec.a_bb, spec.m_b)?;
    let c_s = (g_bb * spec.rho0 / spec.m_b).sqrt();
    let xi = HBAR / (std::f64::consts::SQRT_2 * spec.m_b * c_s);
    Ok(DerivedCondensate { m_b: spec.m_b, rho0: spec.rho0, g_bb, c_s, xi })
}

/// λ̄² = ḡ_ab²/(g_bb ħ c_s).
pub fn lambda_bar_sq(g_ab: f64, cond: &DerivedCondensate) -> f64 {
    g_ab * g_ab / (cond.g_bb * HBAR * cond.c_s)
}

pub fn to_dimensionless(
    cond: &DerivedCondensate,
    det: &DetectorSpec,
    geom: &PairGeometry,
) -> Result<DimensionlessParams> {
    det.validate()?;
    let mu = reduced_mass(det.m_a, cond.m_b)?;
    let g_ab = coupling_ab(det.a_ab_bar, mu)?;
    let t_bar = cond.c_s * det.t_switch;
    Ok(DimensionlessParams {
        lambda_bar_sq: lambda_bar_sq(g_ab, cond),
        t_bar,
        omega_bar: det.omega_trap / cond.c_s,
        sigma: det.sigma(),
        separation: geom.resolve(t_bar)?,
    })
}

/// Parameters of the equivalent momentum-coupled detector in a medium with wave speed `light_speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UdwEquivalent {
    /// λ in units of √(J·s·m³/s)... i.e. √(ħ c λ̄²).
    pub lambda: f64,
    pub omega: f64,
    pub switching_time: f64,
    pub light_speed: f64,
    pub sigma: f64,
    pub separation: f64,
}

pub fn udw_equivalent(params: &DimensionlessParams, cond: &DerivedCondensate, light_speed: f64) -> UdwEquivalent {
    let ratio = light_speed / cond.c_s;
    let g_ab = (params.lambda_bar_sq * cond.g_bb * HBAR * cond.c_s).sqrt();
    let omega = params.omega_bar * cond.c_s;
    let t = params.t_bar / cond.c_s;
    UdwEquivalent {
        lambda: ratio.sqrt() * g_ab / cond.g_bb.sqrt(),
        omega: ratio * omega,
        switching_time: t / ratio,
        light_speed,
        sigma: params.sigma,
        separation: params.separation,
    }
}

impl UdwEquivalent {
    /// Inverse map: λ̄ = λ/√(ħc), T̄ = c·T, Ω̄ = Ω/c.
    pub fn to_dimensionless(&self) -> DimensionlessParams {
        DimensionlessParams {
            lambda_bar_sq: self.lambda * self.lambda / (HBAR * self.light_speed),
            t_bar: self.light_speed * self.switching_time,
            omega_bar: self.omega / self.light_speed,
            sigma: self.sigma,
            separation: self.separation,
        }
    }
}
