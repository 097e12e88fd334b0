//! Independent numerical evaluation of every observable, used to check the
//! closed forms, plus the diagnostics that bound the phonon picture's validity.

pub mod integrands;
pub mod quad;
pub mod switching;

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, HarvestError, Result};
use crate::exec::{map_ordered, ExecMode};
use crate::units::{DerivedCondensate, DimensionlessParams, HBAR};

pub use integrands::{Integrand, IntegrandKind};
pub use quad::{adaptive_quad, integrate_partitioned, integrate_partitioned_split, QuadEstimate, QuadOptions};
pub use switching::{SwitchingProfile, Tabulated};

pub const ORACLE_REL_TOL: f64 = 1e-10;
pub const SPECTRAL_REL_TOL: f64 = 1e-9;

/// Upper bound on the number of lattice modes in [`finite_volume_l`].
pub const MAX_MODES: u64 = 100_000_000;

/// ∫₀^∞ of the chosen integrand with an error estimate.
pub fn radial_estimate(kind: IntegrandKind, p: &DimensionlessParams, rel_tol: f64) -> Result<QuadEstimate<f64>> {
    p.check_widths()?;
    p.check_separation()?;
    let f = Integrand::new(kind, *p);
    integrate_partitioned_split(|a, d| f.evaluate_split(a, d), &f.breakpoints(), &QuadOptions::with_rel_tol(rel_tol))
}

pub fn l_term_numeric(p: &DimensionlessParams) -> Result<f64> {
    Ok(radial_estimate(IntegrandKind::L, p, ORACLE_REL_TOL)?.value)
}

pub fn l_cross_numeric(p: &DimensionlessParams) -> Result<f64> {
    Ok(radial_estimate(IntegrandKind::LCross, p, ORACLE_REL_TOL)?.value)
}

pub fn m_plus_numeric(p: &DimensionlessParams) -> Result<f64> {
    Ok(radial_estimate(IntegrandKind::MPlus, p, ORACLE_REL_TOL)?.value)
}

pub fn m_minus_numeric(p: &DimensionlessParams) -> Result<f64> {
    Ok(radial_estimate(IntegrandKind::MMinus, p, ORACLE_REL_TOL)?.value)
}

/// 𝓜 = 𝓜⁺ + 𝓜⁻ with 𝓜⁺ real and 𝓜⁻ imaginary.
pub fn m_numeric(p: &DimensionlessParams) -> Result<Complex64> {
    Ok(Complex64::new(m_plus_numeric(p)?, m_minus_numeric(p)?))
}

/// Q_β(k) by nested quadrature over the ordered region u > u′ of
/// β(u)β(u′)e^{iΩ̄T̄(u+u′)}e^{−ikT̄(u−u′)}, with u in units of T.
pub fn q_beta_numeric(k: f64, p: &DimensionlessParams, beta: &SwitchingProfile) -> Result<Complex64> {
    Ok(q_beta_estimate(k, p, beta, 1e-12)?.value)
}

pub fn q_beta_estimate(
    k: f64,
    p: &DimensionlessParams,
    beta: &SwitchingProfile,
    rel_tol: f64,
) -> Result<QuadEstimate<Complex64>> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(HarvestError::Domain(format!("k must be >= 0, got {k}")));
    }
    p.check_widths()?;
    beta.check_window()?;
    let a = (p.omega_bar - k) * p.t_bar;
    let b = (p.omega_bar + k) * p.t_bar;
    let (lo, hi) = beta.window();

    let freq = a.abs().max(b.abs());
    let piece = if freq > 0.0 { (std::f64::consts::PI / freq).min(1.0) } else { 1.0 };
    let mut grid = quad::uniform_breakpoints(lo, hi, piece, 50_000);
    grid.extend(beta.kinks().into_iter().filter(|x| *x > lo && *x < hi));
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let inner_f = |v: f64| Complex64::cis(b * v) * beta.eval(v);
    let inner_opts = QuadOptions { abs_tol: 1e-19, ..QuadOptions::with_rel_tol(1e-14) };

    // cumulative inner integral at every grid point
    let mut cumulative = Vec::with_capacity(grid.len());
    let mut acc = Complex64::new(0.0, 0.0);
    cumulative.push(acc);
    for w in grid.windows(2) {
        acc += integrate_partitioned(inner_f, w, &inner_opts)?.value;
        cumulative.push(acc);
    }

    let failure: RefCell<Option<HarvestError>> = RefCell::new(None);
    let outer = |u: f64| {
        let j = grid.partition_point(|&g| g <= u).saturating_sub(1);
        let partial = match integrate_partitioned(inner_f, &[grid[j], u], &inner_opts) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        Complex64::cis(a * u) * beta.eval(u) * (cumulative[j] + partial)
    };
    let opts = QuadOptions { abs_tol: 1e-18, ..QuadOptions::with_rel_tol(rel_tol) };
    let est = integrate_partitioned(outer, &grid, &opts)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub kind: IntegrandKind,
    /// Signed ∫₀^∞ of the integrand.
    pub total: f64,
    /// ∫_{k>k_cut}|f| / ∫₀^∞|f|.
    pub fraction_above_cutoff: f64,
    pub k_cut: f64,
    /// |∫_{k>k_cut} f| / |∫₀^∞ f|; informational, may exceed 1.
    pub signed_fraction: f64,
}

/// Share of an integrand's weight above `k_cut`.
pub fn spectral_report(f: &Integrand, k_cut: f64) -> Result<SpectralReport> {
    ensure_positive("k_cut", k_cut)?;
    f.params.check_widths()?;
    f.params.check_separation()?;
    let opts = QuadOptions::with_rel_tol(SPECTRAL_REL_TOL);
    let k_up = f.k_upper().max(k_cut);
    let below = f.breakpoints_between(0.0, k_cut.min(k_up));
    let above = f.breakpoints_between(k_cut, k_up);
    let g = |k: f64| f.evaluate(k);
    let g_abs = |k: f64| f.evaluate(k).abs();
    let signed_lo = integrate_partitioned(g, &below, &opts)?.value;
    let abs_lo = integrate_partitioned(g_abs, &below, &opts)?.value;
    let (signed_hi, abs_hi) = if k_up > k_cut {
        (integrate_partitioned(g, &above, &opts)?.value, integrate_partitioned(g_abs, &above, &opts)?.value)
    } else {
        (0.0, 0.0)
    };
    let total = signed_lo + signed_hi;
    let abs_total = abs_lo + abs_hi;
    let fraction_above_cutoff = if abs_total > 0.0 { (abs_hi / abs_total).clamp(0.0, 1.0) } else { 0.0 };
    let signed_fraction = if total != 0.0 { (signed_hi / total).abs() } else { 0.0 };
    Ok(SpectralReport { kind: f.kind, total, fraction_above_cutoff, k_cut, signed_fraction })
}

/// Integrand values on a k grid, for plotting.
pub fn integrand_samples(kind: IntegrandKind, p: &DimensionlessParams, ks: &[f64]) -> Vec<(f64, f64)> {
    Integrand::new(kind, *p).samples(ks)
}

/// ℒ as a lattice sum over k = (2π/box)·n, n ∈ ℤ³∖{0}, |k| ≤ k_max.
pub fn finite_volume_l(p: &DimensionlessParams, box_side: f64, k_max: f64) -> Result<f64> {
    finite_volume_l_with(ExecMode::default(), p, box_side, k_max)
}

pub fn finite_volume_l_with(mode: ExecMode, p: &DimensionlessParams, box_side: f64, k_max: f64) -> Result<f64> {
    ensure_positive("box_side", box_side)?;
    ensure_positive("k_max", k_max)?;
    p.check_widths()?;
    let dk = 2.0 * std::f64::consts::PI / box_side;
    let n_max = (k_max / dk).floor();
    let estimate = 4.0 / 3.0 * std::f64::consts::PI * n_max.powi(3);
    if !(estimate <= MAX_MODES as f64) {
        return Err(HarvestError::TooManyModes(estimate.min(u64::MAX as f64) as u64));
    }
    let n = n_max as i64;
    let kmax2 = k_max * k_max;
    let slabs: Vec<i64> = (-n..=n).collect();
    let sums = map_ordered(mode, &slabs, |&nx| {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for ny in -n..=n {
            for nz in -n..=n {
                if nx == 0 && ny == 0 && nz == 0 {
                    continue;
                }
                let k2 = dk * dk * (nx * nx + ny * ny + nz * nz) as f64;
                if k2 > kmax2 {
                    continue;
                }
                let k = k2.sqrt();
                let term = k * (-(p.t_bar * (k + p.omega_bar)).powi(2) - p.sigma * p.sigma * k2).exp();
                let t = sum + term;
                comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
                sum = t;
            }
        }
        sum + comp
    });
    let volume = box_side.powi(3);
    let total: f64 = sums.iter().sum();
    Ok(std::f64::consts::PI * p.lambda_bar_sq * p.t_bar * p.t_bar / volume * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPoint {
    pub k: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
    pub u: f64,
    /// Non-positive.
    pub v: f64,
}

/// Bogoliubov mode at wavenumber k.
pub fn bogoliubov_point(k: f64, cond: &DerivedCondensate) -> Result<BogoliubovPoint> {
    if k == 0.0 {
        return Err(HarvestError::Domain("k = 0 is the condensate mode".into()));
    }
    ensure_positive("k", k)?;
    let free = HBAR * k * k / (2.0 * cond.m_b);
    let omega = ((cond.c_s * k).powi(2) + free * free).sqrt();
    // (u+v)² = E_k/ħω, (u−v) = 1/(u+v)
    let plus = (free / omega).sqrt();
    let minus = plus.recip();
    Ok(BogoliubovPoint { k, omega, u: 0.5 * (plus + minus), v: 0.5 * (plus - minus) })
}

/// (ω_exact − c_s k)/ω_exact.
pub fn relativistic_error(k: f64, cond: &DerivedCondensate) -> Result<f64> {
    ensure_positive("k", k)?;
    let free = HBAR * k * k / (2.0 * cond.m_b);
    let ck = cond.c_s * k;
    let omega = (ck * ck + free * free).sqrt();
    Ok(free * free / ((omega + ck) * omega))
}
