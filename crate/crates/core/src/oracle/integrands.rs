//! Radial momentum integrands of ℒ, ℒ_AB, 𝓜⁺ and Im 𝓜⁻.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::special::dawson;
use crate::units::DimensionlessParams;

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Gaussian tail cut: the integrand is below e^{-TAIL_WIDTHS²} of its scale past k_up.
const TAIL_WIDTHS: f64 = 10.0;

/// Cap on the number of oscillation-resolving subintervals.
const MAX_PIECES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntegrandKind {
    L,
    LCross,
    MPlus,
    MMinus,
}

impl IntegrandKind {
    pub const ALL: [IntegrandKind; 4] =
        [IntegrandKind::L, IntegrandKind::LCross, IntegrandKind::MPlus, IntegrandKind::MMinus];

    pub fn name(self) -> &'static str {
        match self {
            IntegrandKind::L => "L",
            IntegrandKind::LCross => "L_cross",
            IntegrandKind::MPlus => "M_plus",
            IntegrandKind::MMinus => "M_minus",
        }
    }

    fn oscillates(self) -> bool {
        !matches!(self, IntegrandKind::L)
    }
}

/// sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// sinc(k·l) with the rounding error of the product k·l carried into the phase.
/// At kL ~ 10² a plain product shifts the phase by ~1e-14, which dominates the
/// error budget of strongly cancelling oscillatory integrals.
pub fn sinc_product(k: f64, l: f64) -> f64 {
    sinc_split(k, 0.0, l)
}

/// sinc((base + offset)·l) without rounding base + offset first.
pub fn sinc_split(base: f64, offset: f64, l: f64) -> f64 {
    let hi = base * l;
    let lo = base.mul_add(l, -hi) + offset * l;
    let x = hi + lo;
    if x.abs() < 1e-4 {
        return sinc(x);
    }
    let (s, c) = hi.sin_cos();
    let (sl, cl) = if lo.abs() < 1e-8 { (lo, 1.0) } else { lo.sin_cos() };
    (s * cl + c * sl) / x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrand {
    pub kind: IntegrandKind,
    pub params: DimensionlessParams,
}

impl Integrand {
    pub fn new(kind: IntegrandKind, params: DimensionlessParams) -> Self {
        Integrand { kind, params }
    }

    /// dX/d|k| so that X = ∫₀^∞ evaluate(k) dk.
    pub fn evaluate(&self, k: f64) -> f64 {
        self.evaluate_split(k, 0.0)
    }

    /// The integrand at k = base + offset, with the oscillating phase taken from the unrounded sum.
    pub fn evaluate_split(&self, base: f64, offset: f64) -> f64 {
        let p = &self.params;
        let k = base + offset;
        let sinc_kl = || sinc_split(base, offset, p.separation);
        let pref = p.lambda_bar_sq * p.t_bar * p.t_bar / (2.0 * PI) * k * k * k;
        let sig2k2 = (p.sigma * k).powi(2);
        match self.kind {
            IntegrandKind::L => pref * (-(p.t_bar * (k + p.omega_bar)).powi(2) - sig2k2).exp(),
            IntegrandKind::LCross => pref * sinc_kl() * (-(p.t_bar * (k + p.omega_bar)).powi(2) - sig2k2).exp(),
            IntegrandKind::MPlus => {
                let ex = -(p.omega_bar * p.omega_bar + k * k) * p.t_bar * p.t_bar - sig2k2;
                -pref * sinc_kl() * ex.exp()
            }
            IntegrandKind::MMinus => {
                let ex = -(p.omega_bar * p.t_bar).powi(2) - sig2k2;
                pref * sinc_kl() * ex.exp() * TWO_OVER_SQRT_PI * dawson(k * p.t_bar)
            }
        }
    }

    /// Width of the Gaussian envelope that controls the large-k decay.
    pub fn decay_width(&self) -> f64 {
        match self.kind {
            IntegrandKind::MMinus => self.params.sigma,
            _ => self.params.width_sq().sqrt(),
        }
    }

    /// Location of the envelope maximum of e^{-T̄²(k+Ω̄)²-σ²k²} (zero unless Ω̄ < 0).
    fn envelope_centre(&self) -> f64 {
        let p = &self.params;
        match self.kind {
            IntegrandKind::L | IntegrandKind::LCross => (-p.t_bar * p.t_bar * p.omega_bar / p.width_sq()).max(0.0),
            _ => 0.0,
        }
    }

    /// Truncation point of the radial integral.
    pub fn k_upper(&self) -> f64 {
        self.envelope_centre() + TAIL_WIDTHS / self.decay_width()
    }

    /// Breakpoints on [0, k_upper]; oscillatory kinds get pieces no longer than π/(4L).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints_between(0.0, self.k_upper())
    }

    pub fn breakpoints_between(&self, a: f64, b: f64) -> Vec<f64> {
        let w = self.decay_width();
        let mut max_len = w.recip();
        let l = self.params.separation;
        if self.kind.oscillates() && l > 0.0 {
            max_len = max_len.min(PI / (4.0 * l));
        }
        super::quad::uniform_breakpoints(a, b, max_len, MAX_PIECES)
    }

    pub fn samples(&self, ks: &[f64]) -> Vec<(f64, f64)> {
        ks.iter().map(|&k| (k, self.evaluate(k))).collect()
    }
}
