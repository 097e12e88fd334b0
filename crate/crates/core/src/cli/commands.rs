//! The four subcommands. Each returns its outputs as text so the binary only
//! decides where they go.

use std::fmt::Write as _;
use std::time::Instant;

use super::config::{CommandName, Preset, RunConfig, Switching};
use super::manifest::{config_hash, RunManifest};
use crate::error::{HarvestError, Result};
use crate::exec::ExecMode;
use crate::grid::{linspace, logspace};
use crate::oracle::{
    self, finite_volume_l, integrand_samples, relativistic_error, spectral_report, Integrand, IntegrandKind,
    SwitchingProfile, Tabulated,
};
use crate::response::{self, HarvestResult};
use crate::sweep::{
    find_peak, fmt_num, run_sweep_with, write_sweep_csv, PeakResult, Setup, SweepRow, SweepSpec, SweepVariable,
};
use crate::units::{DimensionlessParams, Separation};

/// T family of the negativity/signaling figures, s.
pub const FIGURE_T_FAMILY: [f64; 3] = [0.05e-3, 0.065e-3, 0.08e-3];
/// Ω window of the negativity/signaling figures, rad/s.
pub const FIGURE_OMEGA_RANGE: (f64, f64, usize) = (10e3, 50e3, 81);
/// Separation of the figure configurations in units of c_s T.
pub const FIGURE_L_RATIO: f64 = 5.25;

#[derive(Debug, Clone, PartialEq)]
pub struct OutFile {
    /// Appended to the output stem; empty for the primary file.
    pub suffix: String,
    pub extension: &'static str,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<OutFile>,
    /// Human-readable summary for the terminal.
    pub summary: String,
    pub manifest: RunManifest,
    pub success: bool,
}

fn finish(
    cfg: &RunConfig,
    name: CommandName,
    start: Instant,
    files: Vec<OutFile>,
    summary: String,
    success: bool,
) -> Result<CommandOutput> {
    Ok(CommandOutput {
        files,
        summary,
        manifest: RunManifest::new(cfg, name.as_str(), start.elapsed().as_secs_f64())?,
        success,
    })
}

fn require_gaussian(cfg: &RunConfig, what: &str) -> Result<()> {
    match cfg.switching {
        Switching::Gaussian => Ok(()),
        Switching::Tabulated(_) => Err(HarvestError::Config(format!(
            "{what} uses the Gaussian-switching closed forms; tabulated switching is only available in validate"
        ))),
    }
}

/// Physical setup of the figure presets at trap frequency `omega` and switching time `t`.
pub fn figure_setup(base: &Setup, omega: f64, t: f64) -> Setup {
    let mut s = *base;
    s.detector.omega_trap = omega;
    s.detector.t_switch = t;
    s.geometry.separation = Separation::SoundCone(FIGURE_L_RATIO);
    s
}

pub fn cmd_derive(cfg: &RunConfig) -> Result<CommandOutput> {
    let start = Instant::now();
    let (cond, p) = cfg.setup.resolve()?;
    let d = &cfg.setup.detector;
    let mu = crate::units::reduced_mass(d.m_a, cond.m_b)?;
    let g_ab = crate::units::coupling_ab(d.a_ab_bar, mu)?;
    let rows: Vec<(&str, f64, &str)> = vec![
        ("m_b", cond.m_b, "kg"),
        ("rho0", cond.rho0, "m^-3"),
        ("g_bb", cond.g_bb, "J m^3"),
        ("c_s", cond.c_s * 1e3, "mm/s"),
        ("xi", cond.xi * 1e9, "nm"),
        ("m_a", d.m_a, "kg"),
        ("mu_ab", mu, "kg"),
        ("g_ab", g_ab, "J m^3"),
        ("omega", d.omega_trap, "rad/s"),
        ("T", d.t_switch, "s"),
        ("sigma", p.sigma * 1e9, "nm"),
        ("lambda_bar_sq", p.lambda_bar_sq, "m^2"),
        ("T_bar", p.t_bar, "m"),
        ("Omega_bar", p.omega_bar, "m^-1"),
        ("L", p.separation, "m"),
        ("sigma_over_csT", p.sigma / p.t_bar, "1"),
        ("L_over_csT", p.separation / p.t_bar, "1"),
    ];
    let mut table = String::from("# quantity value unit\n");
    for (name, v, unit) in rows {
        let _ = writeln!(table, "{name:<16} {} {unit}", fmt_num(v));
    }
    finish(
        cfg,
        CommandName::Derive,
        start,
        vec![OutFile { suffix: String::new(), extension: "txt", content: table.clone() }],
        table,
        true,
    )
}

const RESPONSE_COLUMNS: [&str; 7] = ["L_term", "L_cross", "M_plus", "M_minus_im", "M_abs", "negativity", "signaling"];

fn rel_dev(numeric: f64, closed: f64) -> f64 {
    if numeric == closed {
        0.0
    } else {
        (numeric - closed).abs() / closed.abs()
    }
}

pub fn cmd_response(cfg: &RunConfig) -> Result<CommandOutput> {
    let start = Instant::now();
    require_gaussian(cfg, "response")?;
    let (_, p) = cfg.setup.resolve()?;
    let r = response::evaluate(&p)?;
    let mut header: Vec<&str> = RESPONSE_COLUMNS.to_vec();
    let mut vals = vec![r.l_term, r.l_cross, r.m_plus, r.m_minus_im, r.m_abs, r.negativity, r.signaling];
    let mut success = true;
    if cfg.command.oracle {
        let l = oracle::l_term_numeric(&p)?;
        let m = oracle::m_numeric(&p)?;
        let dev = rel_dev(l, r.l_term).max(rel_dev(m.re, r.m_plus)).max(rel_dev(m.im, r.m_minus_im));
        header.extend(["L_term_oracle", "M_plus_oracle", "M_minus_im_oracle", "max_rel_dev"]);
        vals.extend([l, m.re, m.im, dev]);
        success = dev <= cfg.tolerances.oracle_rel;
    }
    let mut csv = format!("# manifest_sha256={}\n{}\n", config_hash(cfg), header.join(","));
    csv.push_str(&vals.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(","));
    csv.push('\n');
    let summary = format!(
        "negativity {} (L {}, |M| {}), signaling {}\n",
        fmt_num(r.negativity),
        fmt_num(r.l_term),
        fmt_num(r.m_abs),
        fmt_num(r.signaling)
    );
    finish(
        cfg,
        CommandName::Response,
        start,
        vec![OutFile { suffix: String::new(), extension: "csv", content: csv }],
        summary,
        success,
    )
}

fn describe_peak(label: &str, peak: &PeakResult, scale: f64, unit: &str) -> String {
    if peak.no_peak {
        format!("{label}: no negativity anywhere on the grid\n")
    } else {
        format!(
            "{label}: peak negativity {} at {} {unit}{}\n",
            fmt_num(peak.n_star),
            fmt_num(peak.x_star / scale),
            if peak.at_boundary { " (grid boundary)" } else { "" }
        )
    }
}

/// One switching time of the figure family.
#[derive(Debug, Clone)]
pub struct FigureSeries {
    pub t_switch: f64,
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub peak: PeakResult,
}

/// Negativity and signaling over the Ω window for every T in the figure family.
pub fn figure_sweeps(cfg: &RunConfig, mode: ExecMode) -> Result<Vec<FigureSeries>> {
    let (lo, hi, n) = FIGURE_OMEGA_RANGE;
    let mut out = Vec::new();
    for &t in &FIGURE_T_FAMILY {
        let spec = SweepSpec {
            variable: SweepVariable::Omega,
            grid: linspace(lo, hi, n)?,
            fixed: figure_setup(&cfg.setup, cfg.setup.detector.omega_trap, t),
            constraint: Some(FIGURE_L_RATIO),
            refine_peak: true,
        };
        let rows = run_sweep_with(mode, &spec)?;
        let peak = find_peak(&spec, &rows, true)?;
        out.push(FigureSeries { t_switch: t, spec, rows, peak });
    }
    Ok(out)
}

fn sweep_csv(rows: &[SweepRow], hash: &str) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, rows, hash).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn cmd_sweep(cfg: &RunConfig, mode: ExecMode) -> Result<CommandOutput> {
    let start = Instant::now();
    require_gaussian(cfg, "sweep")?;
    let hash = config_hash(cfg);
    match cfg.command.preset {
        Some(Preset::Fig4) => fig4(cfg, start),
        Some(preset @ (Preset::Fig2 | Preset::Fig3)) => {
            let series = figure_sweeps(cfg, mode)?;
            let mut files = Vec::new();
            let mut summary = String::new();
            let column = if preset == Preset::Fig2 { "negativity" } else { "signaling" };
            let mut dat = format!(
                "# Omega_krad_s {}\n",
                series.iter().map(|s| format!("{column}_T{:.3}ms", s.t_switch * 1e3)).collect::<Vec<_>>().join(" ")
            );
            let n = series[0].rows.len();
            for i in 0..n {
                let _ = write!(dat, "{}", fmt_num(series[0].rows[i].x / 1e3));
                for s in &series {
                    let r = &s.rows[i];
                    let v = if preset == Preset::Fig2 { r.result.negativity } else { r.validity.signaling };
                    let _ = write!(dat, " {}", fmt_num(v));
                }
                dat.push('\n');
            }
            for s in &series {
                let label = format!("T = {:.3} ms", s.t_switch * 1e3);
                summary.push_str(&describe_peak(&label, &s.peak, 1e3, "krad/s"));
                let max_i = s.rows.iter().map(|r| r.validity.signaling).fold(0.0, f64::max);
                let _ = writeln!(summary, "{label}: max signaling over the window {}", fmt_num(max_i));
                files.push(OutFile {
                    suffix: format!("_T{:.3}ms", s.t_switch * 1e3),
                    extension: "csv",
                    content: sweep_csv(&s.rows, &hash),
                });
            }
            files.push(OutFile { suffix: String::new(), extension: "dat", content: dat });
            let ok = series.iter().all(|s| s.rows.iter().all(|r| r.error.is_none()));
            finish(cfg, CommandName::Sweep, start, files, summary, ok)
        }
        None => {
            let sw = &cfg.command.sweep;
            let grid =
                if sw.log { logspace(sw.start, sw.stop, sw.points)? } else { linspace(sw.start, sw.stop, sw.points)? };
            let constraint = match (sw.variable, cfg.setup.geometry.separation) {
                (SweepVariable::L, _) => None,
                (_, Separation::SoundCone(r)) => Some(r),
                _ => None,
            };
            let spec =
                SweepSpec { variable: sw.variable, grid, fixed: cfg.setup, constraint, refine_peak: sw.refine_peak };
            let rows = run_sweep_with(mode, &spec)?;
            let mut summary = String::new();
            if rows.len() >= 3 {
                let peak = find_peak(&spec, &rows, sw.refine_peak)?;
                summary.push_str(&describe_peak(sw.variable.name(), &peak, 1.0, "(SI)"));
            }
            let failures = rows.iter().filter(|r| r.error.is_some()).count();
            if failures > 0 {
                let _ = writeln!(summary, "{failures} point(s) failed; see NaN rows");
            }
            let mut dat = format!("# {} negativity signaling L_term M_abs\n", sw.variable.name());
            for r in &rows {
                let _ = writeln!(
                    dat,
                    "{} {} {} {} {}",
                    fmt_num(r.x),
                    fmt_num(r.result.negativity),
                    fmt_num(r.validity.signaling),
                    fmt_num(r.result.l_term),
                    fmt_num(r.result.m_abs)
                );
            }
            let files = vec![
                OutFile { suffix: String::new(), extension: "csv", content: sweep_csv(&rows, &hash) },
                OutFile { suffix: String::new(), extension: "dat", content: dat },
            ];
            finish(cfg, CommandName::Sweep, start, files, summary, failures == 0)
        }
    }
}

/// Peak configuration of the integrand plot: Ω = 35 krad/s, T = 0.065 ms, L = 5.25·c_s T.
pub fn fig4_params(cfg: &RunConfig) -> Result<(crate::units::DerivedCondensate, DimensionlessParams)> {
    figure_setup(&cfg.setup, 35e3, 0.065e-3).resolve()
}

fn fig4(cfg: &RunConfig, start: Instant) -> Result<CommandOutput> {
    let (cond, p) = fig4_params(cfg)?;
    let k_cut = 1.0 / cond.xi;
    let k_hi = 4.0 * k_cut;
    let ks = linspace(0.0, k_hi, 401)?;
    let kinds = [IntegrandKind::L, IntegrandKind::LCross, IntegrandKind::MPlus, IntegrandKind::MMinus];
    let columns: Vec<Vec<(f64, f64)>> = kinds.iter().map(|&k| integrand_samples(k, &p, &ks)).collect();
    let mut text = format!(
        "# integrands d(X)/dk with k in nm^-1; 1/xi = {} nm^-1\n# k_nm^-1 L L_cross M_plus M_minus_im\n",
        fmt_num(k_cut * 1e-9)
    );
    for i in 0..ks.len() {
        let _ = write!(text, "{}", fmt_num(ks[i] * 1e-9));
        for c in &columns {
            // per nm^-1 rather than per m^-1
            let _ = write!(text, " {}", fmt_num(c[i].1 * 1e9));
        }
        text.push('\n');
    }
    let mut summary = String::new();
    for kind in [IntegrandKind::L, IntegrandKind::MPlus, IntegrandKind::MMinus] {
        let rep = spectral_report(&Integrand::new(kind, p), k_cut)?;
        let _ = writeln!(summary, "{:<8} fraction above 1/xi {}", kind.name(), fmt_num(rep.fraction_above_cutoff));
    }
    finish(
        cfg,
        CommandName::Sweep,
        start,
        vec![OutFile { suffix: String::new(), extension: "dat", content: text }],
        summary,
        true,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// None for informational lines.
    pub limit: Option<f64>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.limit.is_none_or(|l| self.value <= l)
    }
}

fn dev_abs_floor(numeric: f64, closed: f64, rel: f64, abs: f64) -> f64 {
    // deviation in units of rel, so the check compares against rel
    let allowed = (rel * closed.abs()).max(abs);
    if allowed == 0.0 {
        if numeric == closed {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (numeric - closed).abs() / allowed * rel
    }
}

pub fn validation_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let (cond, p) = cfg.setup.resolve()?;
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, limit: Option<f64>| checks.push(Check { name: name.into(), value, limit });

    let beta = match &cfg.switching {
        Switching::Gaussian => None,
        Switching::Tabulated(path) => {
            Some(SwitchingProfile::Tabulated(Tabulated::load(path, cfg.setup.detector.t_switch)?))
        }
    };
    let k_probe = 1.0 / p.width_sq().sqrt();
    match &beta {
        None => {
            let r: HarvestResult = response::evaluate(&p)?;
            let l = oracle::l_term_numeric(&p)?;
            let m = oracle::m_numeric(&p)?;
            let q_closed = response::q_beta_closed(k_probe, &p)?;
            let q_num = oracle::q_beta_numeric(k_probe, &p, &SwitchingProfile::gaussian())?;
            let rel = tol.oracle_rel;
            push("oracle_L_term", dev_abs_floor(l, r.l_term, rel, tol.oracle_abs), Some(rel));
            push("oracle_M_plus", dev_abs_floor(m.re, r.m_plus, rel, tol.oracle_abs), Some(rel));
            push("oracle_M_minus_im", dev_abs_floor(m.im, r.m_minus_im, rel, tol.oracle_abs), Some(rel));
            let q_allowed = (rel * q_closed.norm()).max(tol.oracle_abs);
            push("oracle_Q_beta", (q_num - q_closed).norm() / q_allowed * rel, Some(rel));
            push("perturbative_L_term", r.l_term, Some(crate::sweep::PERTURBATIVE_LIMIT));
            push("negativity", r.negativity, None);
            push("signaling", r.signaling, None);
        }
        Some(b) => {
            let q = oracle::q_beta_numeric(k_probe, &p, b)?;
            push("tabulated_Q_beta_re", q.re, None);
            push("tabulated_Q_beta_im", q.im, None);
        }
    }

    let k_cut = cfg.command.k_cut_factor / cond.xi;
    for (kind, limit) in [
        (IntegrandKind::L, tol.healing_local_max),
        (IntegrandKind::MPlus, tol.healing_local_max),
        (IntegrandKind::MMinus, tol.healing_max),
    ] {
        let rep = spectral_report(&Integrand::new(kind, p), k_cut)?;
        push(&format!("healing_fraction_{}", kind.name()), rep.fraction_above_cutoff, Some(limit));
    }

    push("relativistic_error_at_inverse_xi", relativistic_error(1.0 / cond.xi, &cond)?, None);
    push("relativistic_error_at_inverse_sigma", relativistic_error(1.0 / p.sigma, &cond)?, None);

    let box_side = tol.finite_volume_box * p.sigma.max(p.t_bar);
    let k_max = Integrand::new(IntegrandKind::L, p).k_upper();
    let continuum = oracle::l_term_numeric(&p)?;
    let fv = finite_volume_l(&p, box_side, k_max)?;
    let fv_dev = if continuum > 0.0 { (fv - continuum).abs() / continuum } else { (fv - continuum).abs() };
    push("finite_volume_L_rel_dev", fv_dev, Some(tol.finite_volume_rel));
    Ok(checks)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<CommandOutput> {
    let start = Instant::now();
    let checks = validation_checks(cfg)?;
    let mut report = format!("# manifest_sha256={}\n", config_hash(cfg));
    for c in &checks {
        let status = match c.limit {
            None => "INFO",
            Some(_) if c.passed() => "PASS",
            Some(_) => "FAIL",
        };
        let limit = c.limit.map(|l| format!(" (limit {})", fmt_num(l))).unwrap_or_default();
        let _ = writeln!(report, "{status} {} {}{limit}", c.name, fmt_num(c.value));
    }
    let ok = checks.iter().all(Check::passed);
    finish(
        cfg,
        CommandName::Validate,
        start,
        vec![OutFile { suffix: String::new(), extension: "txt", content: report.clone() }],
        report,
        ok,
    )
}

pub fn run_command(name: CommandName, cfg: &RunConfig, mode: ExecMode) -> Result<CommandOutput> {
    match name {
        CommandName::Derive => cmd_derive(cfg),
        CommandName::Response => cmd_response(cfg),
        CommandName::Sweep => cmd_sweep(cfg, mode),
        CommandName::Validate => cmd_validate(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line<'a>(text: &'a str, key: &str) -> &'a str {
        text.lines().find(|l| l.starts_with(key)).unwrap()
    }

    fn value(text: &str, key: &str) -> f64 {
        line(text, key).split_whitespace().nth(1).unwrap().parse().unwrap()
    }

    #[test]
    fn derive_reports_sound_speed_and_healing_length() {
        let out = cmd_derive(&RunConfig::default()).unwrap();
        let t = &out.files[0].content;
        assert!((value(t, "c_s ") - 4.4).abs() < 0.44);
        assert!((value(t, "xi ") - 120.0).abs() < 12.0);
        let mut cfg = RunConfig::default();
        cfg.setup.detector.omega_trap = 36e3;
        let out = cmd_derive(&cfg).unwrap();
        let ratio = value(&out.files[0].content, "sigma_over_csT");
        assert!((ratio - 0.74).abs() < 0.06);
    }

    #[test]
    fn response_peak_and_zero_coupling() {
        let mut cfg = RunConfig::default();
        cfg.command.oracle = true;
        let out = cmd_response(&cfg).unwrap();
        assert!(out.success);
        let csv = &out.files[0].content;
        let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
        assert!(col("negativity") > 0.0);
        assert_eq!(col("signaling"), 0.0);
        assert!(col("max_rel_dev") <= 1e-8);

        cfg.setup.detector.a_ab_bar = 0.0;
        let out = cmd_response(&cfg).unwrap();
        let row = out.files[0].content.lines().nth(2).unwrap().to_string();
        assert!(row.split(',').all(|v| v.parse::<f64>().unwrap() == 0.0), "{row}");
    }

    #[test]
    fn validate_defaults_pass_and_forced_cutoff_fails() {
        let cfg = RunConfig::default();
        let out = cmd_validate(&cfg).unwrap();
        assert!(out.success, "{}", out.summary);
        let mut forced = cfg.clone();
        forced.command.k_cut_factor = 0.1;
        let out = cmd_validate(&forced).unwrap();
        assert!(!out.success);
        assert!(out.summary.contains("FAIL healing_fraction_M_minus"));
    }

    #[test]
    fn tabulated_switching_only_in_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("beta.txt");
        let t = 0.065e-3;
        let mut text = String::new();
        for j in 0..=2000 {
            let u = -10.0 + 20.0 * j as f64 / 2000.0;
            text.push_str(&format!("{:e} {:e}\n", u * t, (-0.5 * u * u).exp()));
        }
        std::fs::write(&path, text).unwrap();
        let cfg = RunConfig { switching: Switching::Tabulated(path), ..RunConfig::default() };
        assert!(cmd_response(&cfg).is_err());
        let out = cmd_validate(&cfg).unwrap();
        assert!(out.summary.contains("INFO tabulated_Q_beta_re"));
    }
}
