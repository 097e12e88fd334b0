//! One-dimensional parameter scans, peak location and per-point validity checks.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};
use crate::exec::{map_ordered, ExecMode};
use crate::oracle::{spectral_report, Integrand, IntegrandKind};
use crate::response::{self, HarvestResult};
use crate::units::{
    derive_condensate, to_dimensionless, CondensateSpec, DerivedCondensate, DetectorSpec, DimensionlessParams,
    PairGeometry, Separation,
};

/// ℒ below which the leading-order expansion is trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.01;

/// Relative x-tolerance of the golden-section refinement.
pub const PEAK_X_TOL: f64 = 1e-4;

pub const CSV_COLUMNS: [&str; 12] = [
    "x",
    "L_term",
    "L_cross",
    "M_plus",
    "M_minus_im",
    "M_abs",
    "negativity",
    "signaling",
    "frac_L",
    "frac_Mp",
    "frac_Mm",
    "pert_flag",
];

/// Complete physical parameter record for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub condensate: CondensateSpec,
    pub detector: DetectorSpec,
    pub geometry: PairGeometry,
}

impl Setup {
    /// K-39 impurities in Rb-87 at L = 5.25·c_s·T.
    pub fn preset() -> Self {
        Setup {
            condensate: CondensateSpec::rubidium87(),
            detector: DetectorSpec::potassium39(),
            geometry: PairGeometry::sound_cone(5.25),
        }
    }

    pub fn resolve(&self) -> Result<(DerivedCondensate, DimensionlessParams)> {
        let cond = derive_condensate(&self.condensate)?;
        let p = to_dimensionless(&cond, &self.detector, &self.geometry)?;
        Ok((cond, p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Trap frequency, rad/s.
    Omega,
    /// Switching time, s.
    T,
    /// Separation, m.
    L,
    /// Interspecies scattering length, m.
    AAb,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Omega => "Omega",
            SweepVariable::T => "T",
            SweepVariable::L => "L",
            SweepVariable::AAb => "a_ab",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Omega" | "omega" => Some(SweepVariable::Omega),
            "T" | "t" => Some(SweepVariable::T),
            "L" | "l" => Some(SweepVariable::L),
            "a_ab" => Some(SweepVariable::AAb),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Strictly increasing scan values in SI units.
    pub grid: Vec<f64>,
    pub fixed: Setup,
    /// When set, L = ratio·c_s·T at every point.
    pub constraint: Option<f64>,
    pub refine_peak: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 {
            return Err(HarvestError::Domain("sweep grid needs at least two points".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) || self.grid.iter().any(|x| !x.is_finite()) {
            return Err(HarvestError::Domain("sweep grid must be finite and strictly increasing".into()));
        }
        if self.variable == SweepVariable::L && self.constraint.is_some() {
            return Err(HarvestError::Config("cannot scan L while a sound-cone constraint fixes it".into()));
        }
        Ok(())
    }

    /// The full parameter record at scan value `x`.
    pub fn setup_at(&self, x: f64) -> Setup {
        let mut s = self.fixed;
        match self.variable {
            SweepVariable::Omega => s.detector.omega_trap = x,
            SweepVariable::T => s.detector.t_switch = x,
            SweepVariable::L => s.geometry = PairGeometry::fixed(x),
            SweepVariable::AAb => s.detector.a_ab_bar = x,
        }
        if let Some(r) = self.constraint {
            s.geometry = PairGeometry { separation: Separation::SoundCone(r) };
        }
        s
    }

    pub fn params_at(&self, x: f64) -> Result<(DerivedCondensate, DimensionlessParams)> {
        self.setup_at(x).resolve()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub signaling: f64,
    pub frac_l: f64,
    pub frac_m_plus: f64,
    pub frac_m_minus: f64,
    /// ℒ < [`PERTURBATIVE_LIMIT`].
    pub perturbative: bool,
}

impl Validity {
    const NAN: Validity = Validity {
        signaling: f64::NAN,
        frac_l: f64::NAN,
        frac_m_plus: f64::NAN,
        frac_m_minus: f64::NAN,
        perturbative: false,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub result: HarvestResult,
    pub validity: Validity,
    /// Failure message when the point could not be evaluated.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(x: f64, e: HarvestError) -> Self {
        SweepRow { x, result: HarvestResult::NAN, validity: Validity::NAN, error: Some(e.to_string()) }
    }
}

/// Fill signaling, healing-length fractions (k_cut = 1/ξ) and the perturbativity flag.
pub fn validity_annotate(mut row: SweepRow, params: &DimensionlessParams, cond: &DerivedCondensate) -> SweepRow {
    let r = &row.result;
    let k_cut = 1.0 / cond.xi;
    let frac = |kind| spectral_report(&Integrand::new(kind, *params), k_cut).map(|s| s.fraction_above_cutoff);
    let fracs = (frac(IntegrandKind::L), frac(IntegrandKind::MPlus), frac(IntegrandKind::MMinus));
    let n_minus = (r.m_minus_im.abs() - r.l_term).max(0.0);
    row.validity = Validity {
        signaling: response::signaling_estimator(n_minus, r.negativity),
        frac_l: fracs.0.as_ref().copied().unwrap_or(f64::NAN),
        frac_m_plus: fracs.1.as_ref().copied().unwrap_or(f64::NAN),
        frac_m_minus: fracs.2.as_ref().copied().unwrap_or(f64::NAN),
        perturbative: r.l_term < PERTURBATIVE_LIMIT,
    };
    if let Some(e) = [fracs.0.err(), fracs.1.err(), fracs.2.err()].into_iter().flatten().next() {
        row.error.get_or_insert(e.to_string());
    }
    row
}

fn evaluate_row(spec: &SweepSpec, x: f64) -> SweepRow {
    let (cond, p) = match spec.params_at(x) {
        Ok(v) => v,
        Err(e) => return SweepRow::failed(x, e),
    };
    let result = match response::evaluate(&p) {
        Ok(r) => r,
        Err(e) => return SweepRow::failed(x, e),
    };
    let row = SweepRow { x, result, validity: Validity::NAN, error: None };
    validity_annotate(row, &p, &cond)
}

/// One row per grid point, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(ExecMode::default(), spec)
}

pub fn run_sweep_with(mode: ExecMode, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(map_ordered(mode, &spec.grid, |&x| evaluate_row(spec, x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResult {
    pub x_star: f64,
    pub n_star: f64,
    pub bracket: (f64, f64),
    pub refinement_iters: usize,
    /// The grid maximum sits on the first or last point.
    pub at_boundary: bool,
    /// Every grid negativity is zero (or undefined).
    pub no_peak: bool,
}

/// Grid argmax of `ys`, refined by golden-section search of `f` inside the
/// bracketing triple when `f` is given.
pub fn locate_peak(xs: &[f64], ys: &[f64], f: Option<&dyn Fn(f64) -> f64>) -> Result<PeakResult> {
    if xs.len() < 3 || xs.len() != ys.len() {
        return Err(HarvestError::Domain("peak search needs at least three points".into()));
    }
    let mut best: Option<usize> = None;
    for (i, y) in ys.iter().enumerate() {
        if y.is_finite() && best.is_none_or(|b| *y > ys[b]) {
            best = Some(i);
        }
    }
    let Some(i) = best.filter(|&i| ys[i] > 0.0) else {
        return Ok(PeakResult {
            x_star: xs[0],
            n_star: 0.0,
            bracket: (xs[0], xs[xs.len() - 1]),
            refinement_iters: 0,
            at_boundary: false,
            no_peak: true,
        });
    };
    if i == 0 || i == xs.len() - 1 {
        return Ok(PeakResult {
            x_star: xs[i],
            n_star: ys[i],
            bracket: (xs[i], xs[i]),
            refinement_iters: 0,
            at_boundary: true,
            no_peak: false,
        });
    }
    let bracket = (xs[i - 1], xs[i + 1]);
    let Some(f) = f else {
        return Ok(PeakResult {
            x_star: xs[i],
            n_star: ys[i],
            bracket,
            refinement_iters: 0,
            at_boundary: false,
            no_peak: false,
        });
    };
    let (x_g, y_g, iters) = golden_max(f, bracket.0, bracket.1, PEAK_X_TOL);
    let (x_star, n_star) = if y_g >= ys[i] { (x_g, y_g) } else { (xs[i], ys[i]) };
    Ok(PeakResult { x_star, n_star, bracket, refinement_iters: iters, at_boundary: false, no_peak: false })
}

/// Golden-section maximisation on [a, b] until the bracket is below `rel_tol`·|x|.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a) > rel_tol * 0.5 * (a.abs() + b.abs()) && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc >= fd {
        (c, fc, iters)
    } else {
        (d, fd, iters)
    }
}

/// Peak of the negativity column; refinement evaluates closed forms only.
pub fn find_peak(spec: &SweepSpec, rows: &[SweepRow], refine: bool) -> Result<PeakResult> {
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.result.negativity).collect();
    let objective = |x: f64| {
        spec.params_at(x)
            .and_then(|(_, p)| response::evaluate_fast(&p))
            .map(|r| r.negativity)
            .unwrap_or(f64::NEG_INFINITY)
    };
    locate_peak(&xs, &ys, if refine { Some(&objective) } else { None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionEstimate {
    pub events: u64,
    pub realizations: u64,
}

/// ceil, treating values within a few ulps of an integer as that integer.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 4.0 * f64::EPSILON * x.abs() {
        r
    } else {
        x.ceil()
    }
}

/// Detection events for a relative statistical error, and the realizations that yield them.
pub fn repetition_estimate(l_term: f64, target_rel_err: f64) -> Result<RepetitionEstimate> {
    if !(l_term > 0.0 && l_term < 1.0) {
        return Err(HarvestError::Domain(format!("excitation probability must lie in (0, 1), got {l_term}")));
    }
    if !(target_rel_err > 0.0 && target_rel_err.is_finite()) {
        return Err(HarvestError::Domain(format!("target error must be positive, got {target_rel_err}")));
    }
    let events = ceil_snapped(1.0 / (target_rel_err * target_rel_err));
    let realizations = ceil_snapped(events / l_term);
    Ok(RepetitionEstimate { events: events as u64, realizations: realizations as u64 })
}

/// Shortest representation carrying 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.16e}")
    }
}

/// CSV with a `# manifest_sha256=` comment line, a header row and one line per row.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow], manifest_hash: &str) -> std::io::Result<()> {
    writeln!(w, "# manifest_sha256={manifest_hash}")?;
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    for r in rows {
        let h = &r.result;
        let v = &r.validity;
        let cols = [
            r.x,
            h.l_term,
            h.l_cross,
            h.m_plus,
            h.m_minus_im,
            h.m_abs,
            h.negativity,
            v.signaling,
            v.frac_l,
            v.frac_m_plus,
            v.frac_m_minus,
        ];
        let mut line: Vec<String> = cols.iter().map(|x| fmt_num(*x)).collect();
        line.push(if v.perturbative { "1" } else { "0" }.into());
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    fn omega_spec(n: usize) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::Omega,
            grid: linspace(10e3, 50e3, n).unwrap(),
            fixed: Setup::preset(),
            constraint: Some(5.25),
            refine_peak: true,
        }
    }

    #[test]
    fn synthetic_gaussian_peak() {
        let f = |x: f64| (-(x - 3.0) * (x - 3.0)).exp();
        let xs = linspace(0.0, 6.5, 14).unwrap();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let p = locate_peak(&xs, &ys, Some(&f)).unwrap();
        assert!((p.x_star - 3.0).abs() < 1e-4, "{}", p.x_star);
        assert!(p.n_star >= ys.iter().cloned().fold(0.0, f64::max));
        assert!(p.bracket.0 <= p.x_star && p.x_star <= p.bracket.1);
    }

    #[test]
    fn boundary_and_empty_peaks() {
        let xs = linspace(0.0, 1.0, 5).unwrap();
        let p = locate_peak(&xs, &[5.0, 4.0, 3.0, 2.0, 1.0], None).unwrap();
        assert!(p.at_boundary && p.x_star == 0.0 && p.bracket == (0.0, 0.0));
        let p = locate_peak(&xs, &[0.0; 5], None).unwrap();
        assert!(p.no_peak);
        assert!(locate_peak(&xs[..2], &[1.0, 2.0], None).is_err());
    }

    #[test]
    fn repetition_examples() {
        assert_eq!(repetition_estimate(1e-3, 0.1).unwrap(), RepetitionEstimate { events: 100, realizations: 100_000 });
        assert_eq!(repetition_estimate(1e-3, 0.05).unwrap(), RepetitionEstimate { events: 400, realizations: 400_000 });
        assert_eq!(repetition_estimate(0.5, 0.1).unwrap().realizations, 200);
        assert_eq!(repetition_estimate(0.3, 0.1).unwrap().realizations, 334);
        assert!(repetition_estimate(1.0, 0.1).is_err());
    }

    #[test]
    fn grid_validation() {
        let mut s = omega_spec(5);
        s.grid = vec![1.0];
        assert!(run_sweep(&s).is_err());
        s.grid = vec![2.0, 1.0, 3.0];
        assert!(run_sweep(&s).is_err());
        let mut s = omega_spec(5);
        s.variable = SweepVariable::L;
        assert!(s.validate().is_err());
    }

    #[test]
    fn single_interior_peak_near_35_krad() {
        let spec = omega_spec(41);
        let rows = run_sweep(&spec).unwrap();
        assert!(rows.iter().all(|r| r.error.is_none()));
        let peak = find_peak(&spec, &rows, true).unwrap();
        assert!(!peak.at_boundary && !peak.no_peak);
        assert!((30e3..40e3).contains(&peak.x_star), "{}", peak.x_star);
        let grid_best = rows.iter().map(|r| r.result.negativity).fold(0.0, f64::max);
        assert!(peak.n_star >= grid_best);
        // single maximum: the negativity rises to the peak and falls after it
        let n: Vec<f64> = rows.iter().map(|r| r.result.negativity).collect();
        let i = n.iter().position(|&v| v == grid_best).unwrap();
        assert!(n[..=i].windows(2).all(|w| w[1] >= w[0]));
        assert!(n[i..].windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_coupling_sweep_is_zero() {
        let mut spec = omega_spec(5);
        spec.fixed.detector.a_ab_bar = 0.0;
        for r in run_sweep(&spec).unwrap() {
            assert_eq!(r.result.l_term, 0.0);
            assert_eq!(r.result.m_abs, 0.0);
            assert_eq!(r.result.negativity, 0.0);
            assert_eq!(r.validity.signaling, 0.0);
        }
    }

    #[test]
    fn csv_layout() {
        let spec = omega_spec(3);
        let rows = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows, "abc").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# manifest_sha256=abc");
        assert_eq!(lines[1].split(',').count(), 12);
        assert_eq!(lines.len(), 5);
        let first: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, 10e3);
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn failed_points_do_not_abort() {
        let mut spec = omega_spec(3);
        spec.variable = SweepVariable::T;
        spec.grid = vec![-1e-3, 0.05e-3, 0.065e-3];
        let rows = run_sweep(&spec).unwrap();
        assert!(rows[0].error.is_some() && rows[0].result.l_term.is_nan());
        assert!(rows[1].error.is_none() && rows[2].error.is_none());
    }
}
