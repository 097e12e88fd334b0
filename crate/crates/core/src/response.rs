//! Closed-form observables for Gaussian switching and Gaussian smearing, the
//! two-detector density matrix, negativity and the signaling estimator.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};
use crate::oracle;
use crate::special::{dawson, dawson_over_x, erf_over_x, erfcx};
use crate::units::DimensionlessParams;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Switch point for the large-argument asymptotic branches.
const ASYMPTOTIC_MIN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvestResult {
    pub l_term: f64,
    pub l_cross: f64,
    pub m_plus: f64,
    /// Imaginary part of 𝓜⁻ (𝓜⁻ is purely imaginary).
    pub m_minus_im: f64,
    pub m_abs: f64,
    pub negativity: f64,
    pub signaling: f64,
}

impl HarvestResult {
    pub const NAN: HarvestResult = HarvestResult {
        l_term: f64::NAN,
        l_cross: f64::NAN,
        m_plus: f64::NAN,
        m_minus_im: f64::NAN,
        m_abs: f64::NAN,
        negativity: f64::NAN,
        signaling: f64::NAN,
    };

    pub fn m(&self) -> Complex64 {
        Complex64::new(self.m_plus, self.m_minus_im)
    }

    /// Assemble from the four primitive observables.
    pub fn from_parts(l_term: f64, l_cross: f64, m_plus: f64, m_minus_im: f64) -> Self {
        let m_abs = m_plus.hypot(m_minus_im);
        let n = negativity(l_term, m_abs);
        let n_minus = (m_minus_im.abs() - l_term).max(0.0);
        HarvestResult {
            l_term,
            l_cross,
            m_plus,
            m_minus_im,
            m_abs,
            negativity: n,
            signaling: signaling_estimator(n_minus, n),
        }
    }
}

/// 2(1+a²) − √π·a·erfcx(a)·(2a²+3) for a ≥ 0.
fn l_bracket(a: f64) -> f64 {
    if a > ASYMPTOTIC_MIN {
        l_bracket_asymptotic(a)
    } else if a >= 1.0 {
        l_bracket_cf(a)
    } else {
        let a2 = a * a;
        2.0 * (1.0 + a2) - SQRT_PI * a * erfcx(a) * (2.0 * a2 + 3.0)
    }
}

/// With the erfc continued-fraction tails t_j = (j/2)/(a + t_{j+1}) the bracket
/// is t₃/((a+t₁)(a+t₂)(a+t₃)), free of the cancellation in the direct form.
fn l_bracket_cf(a: f64) -> f64 {
    let depth = (40.0 + 700.0 / (a * a)) as usize;
    let mut t = 0.0;
    let mut denom = 1.0;
    let mut t3 = 0.0;
    for j in (1..=depth).rev() {
        t = 0.5 * j as f64 / (a + t);
        if j == 3 {
            t3 = t;
        }
        if j <= 3 {
            denom *= a + t;
        }
    }
    t3 / denom
}

fn l_bracket_asymptotic(a: f64) -> f64 {
    // −Σ_{n≥2} (2c_{n+1} + 3c_n) a^{-2n},  c_n = (−1)^n (2n−1)!!/2^n
    let inv = 1.0 / (a * a);
    let mut c_n = 0.75; // c_2
    let mut pow = inv * inv;
    let mut sum = 0.0;
    for n in 2..60 {
        let c_next = -c_n * (2 * n + 1) as f64 / 2.0;
        let term = (2.0 * c_next + 3.0 * c_n) * pow;
        sum -= term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        c_n = c_next;
        pow *= inv;
    }
    sum
}

/// ℒ, the single-detector excitation probability.
pub fn l_term_closed(p: &DimensionlessParams) -> Result<f64> {
    p.check_widths()?;
    let t = p.t_bar;
    let s2 = p.width_sq();
    let s = s2.sqrt();
    let a = t * t * p.omega_bar / s;
    let to2 = (t * p.omega_bar).powi(2);
    let mut bracket = (-to2).exp() * l_bracket(a.abs());
    if a < 0.0 {
        // erfcx(−|a|) = 2e^{a²} − erfcx(|a|); a² − T̄²Ω̄² = −T̄²Ω̄²σ²/s²
        let a2 = a * a;
        bracket += 2.0 * SQRT_PI * a.abs() * (2.0 * a2 + 3.0) * (-to2 * p.sigma * p.sigma / s2).exp();
    }
    Ok((p.lambda_bar_sq * t * t * bracket / (8.0 * PI * s2 * s2)).max(0.0))
}

/// Q_β(k) = π e^{−Ω̄²T̄²}[e^{−k²T̄²} − i·(2/√π)·D(kT̄)] for Gaussian switching.
pub fn q_beta_closed(k: f64, p: &DimensionlessParams) -> Result<Complex64> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(HarvestError::Domain(format!("k must be >= 0, got {k}")));
    }
    let kt = k * p.t_bar;
    let damp = (-(p.omega_bar * p.t_bar).powi(2)).exp();
    Ok(Complex64::new(PI * damp * (-kt * kt).exp(), -PI * damp * 2.0 / SQRT_PI * dawson(kt)))
}

/// (2x²−1)·D(x)/x − 1, with limit −2 at x = 0.
fn m_plus_shape(x: f64) -> f64 {
    if x > ASYMPTOTIC_MIN {
        m_plus_shape_asymptotic(x)
    } else if x >= 1.0 {
        m_plus_shape_cf(x)
    } else {
        (2.0 * x * x - 1.0) * dawson_over_x(x) - 1.0
    }
}

/// Dawson's J-fraction D(x) = x/f₀, f_n = 2n+1+2x² − 4(n+1)x²/f_{n+1}. Unrolling
/// three levels gives (4x² − 30 + 72x²/f₃)/(f₀f₁f₂) with no cancellation at large x.
fn m_plus_shape_cf(x: f64) -> f64 {
    let x2 = x * x;
    let depth = (60.0 + 4.0 * x2) as usize;
    let mut f = (2 * depth + 1) as f64 + 2.0 * x2;
    let mut f3 = 0.0;
    let mut denom = 1.0;
    for n in (0..depth).rev() {
        if n == 2 {
            f3 = f;
        }
        f = (2 * n + 1) as f64 + 2.0 * x2 - 4.0 * (n + 1) as f64 * x2 / f;
        if n <= 2 {
            denom *= f;
        }
    }
    (4.0 * x2 - 30.0 + 72.0 * x2 / f3) / denom
}

fn m_plus_shape_asymptotic(x: f64) -> f64 {
    // Σ_{n≥1} (2d_{n+1} − d_n) x^{-(2n+2)},  d_n = (2n−1)!!/2^{n+1}
    let inv = 1.0 / (x * x);
    let mut d_n = 0.25; // d_1
    let mut pow = inv * inv;
    let mut sum = 0.0;
    for n in 1..60 {
        let d_next = d_n * (2 * n + 1) as f64 / 2.0;
        let term = (2.0 * d_next - d_n) * pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        d_n = d_next;
        pow *= inv;
    }
    sum
}

/// 𝓜⁺, the vacuum-correlation part of the cross term (real).
pub fn m_plus_closed(p: &DimensionlessParams) -> Result<f64> {
    p.check_widths()?;
    p.check_separation()?;
    let l = p.separation;
    let t = p.t_bar;
    let s2 = p.width_sq();
    let x = l / (2.0 * s2.sqrt());
    let damp = (-(t * p.omega_bar).powi(2)).exp();
    Ok(p.lambda_bar_sq * t * t * damp * m_plus_shape(x) / (8.0 * PI * s2 * s2))
}

/// Im 𝓜⁻, the causal-propagation part of the cross term.
pub fn m_minus_closed(p: &DimensionlessParams) -> Result<f64> {
    p.check_widths()?;
    p.check_separation()?;
    let l = p.separation;
    let t = p.t_bar;
    let sig = p.sigma;
    let s2 = p.width_sq();
    let s = s2.sqrt();
    let to2 = (t * p.omega_bar).powi(2);
    let y = l * t / (2.0 * sig * s);
    let e_wide = (-to2 - l * l / (4.0 * s2)).exp();
    let e_narrow = (-to2 - l * l / (4.0 * sig * sig)).exp();
    let first = SQRT_PI * sig * sig * (l * l - 2.0 * s2) / (2.0 * s) * erf_over_x(y) * e_wide;
    let second = 2.0 * s * (2.0 * sig * sig + t * t) * e_narrow;
    Ok(-p.lambda_bar_sq * t * t * t * (first - second) / (16.0 * PI * sig * sig * sig * s2 * s2 * s))
}

/// max(|𝓜| − ℒ, 0).
pub fn negativity(l_term: f64, m_abs: f64) -> f64 {
    (m_abs - l_term).max(0.0)
}

/// ℒ_AB; no closed form, evaluated by quadrature. Equals ℒ at L = 0.
pub fn l_cross_closed_or_numeric(p: &DimensionlessParams) -> Result<f64> {
    if p.separation == 0.0 {
        return l_term_closed(p);
    }
    oracle::l_cross_numeric(p)
}

/// 𝓘 = N⁻/N clamped to [0, 1]; zero when N = 0.
pub fn signaling_estimator(n_minus: f64, n: f64) -> f64 {
    if n > 0.0 && n_minus.is_finite() {
        (n_minus / n).clamp(0.0, 1.0)
    } else if n.is_nan() || n_minus.is_nan() {
        f64::NAN
    } else {
        0.0
    }
}

/// All observables at one parameter point (closed forms plus quadrature for ℒ_AB).
pub fn evaluate(p: &DimensionlessParams) -> Result<HarvestResult> {
    let l = l_term_closed(p)?;
    let mp = m_plus_closed(p)?;
    let mm = m_minus_closed(p)?;
    let lc = l_cross_closed_or_numeric(p)?;
    Ok(HarvestResult::from_parts(l, lc, mp, mm))
}

/// Same as [`evaluate`] without the ℒ_AB quadrature (reported as NaN).
pub fn evaluate_fast(p: &DimensionlessParams) -> Result<HarvestResult> {
    let l = l_term_closed(p)?;
    let mp = m_plus_closed(p)?;
    let mm = m_minus_closed(p)?;
    Ok(HarvestResult::from_parts(l, f64::NAN, mp, mm))
}

/// Two-qubit state in the basis |gg⟩, |ge⟩, |eg⟩, |ee⟩ (first label is A).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDetectorState {
    pub rho: Matrix4<Complex64>,
}

pub fn assemble_state(l_aa: f64, l_bb: f64, l_ab: f64, m: Complex64) -> Result<TwoDetectorState> {
    let total = l_aa + l_bb;
    if total > 1.0 {
        return Err(HarvestError::Perturbative(total));
    }
    if !(l_aa >= 0.0 && l_bb >= 0.0) {
        return Err(HarvestError::Domain("excitation probabilities must be >= 0".into()));
    }
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    #[rustfmt::skip]
    let rho = Matrix4::new(
        r(1.0 - total), z,        z,        m.conj(),
        z,              r(l_bb),  r(l_ab),  z,
        z,              r(l_ab),  r(l_aa),  z,
        m,              z,        z,        z,
    );
    Ok(TwoDetectorState { rho })
}

impl TwoDetectorState {
    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.rho - self.rho.adjoint()).iter().all(|d| d.norm() <= tol)
    }

    /// Partial transpose on detector B.
    pub fn partial_transpose(&self) -> Matrix4<Complex64> {
        let mut out = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        out[(2 * a + b2, 2 * a2 + b)] = self.rho[(2 * a + b, 2 * a2 + b2)];
                    }
                }
            }
        }
        out
    }

    /// Ascending eigenvalues of the partial transpose.
    pub fn pt_spectrum(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.partial_transpose());
        let mut v = [0.0; 4];
        for (i, x) in eig.eigenvalues.iter().enumerate() {
            v[i] = *x;
        }
        v.sort_by(f64::total_cmp);
        v
    }

    /// Sum of |negative eigenvalues| of the partial transpose.
    pub fn pt_negativity(&self) -> f64 {
        self.pt_spectrum().iter().filter(|x| **x < 0.0).map(|x| -x).sum()
    }
}
