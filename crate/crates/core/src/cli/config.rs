//! Line-oriented `key = value unit` configuration with `[section]` headers.
//!
//! Every physical quantity needs an explicit unit. Frequencies must be angular
//! (`rad/s`, `krad/s`); anything spelled with Hz is rejected as ambiguous.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{HarvestError, Result};
use crate::sweep::{Setup, SweepVariable};
use crate::units::{PairGeometry, Separation, AMU, BOHR_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Mass,
    Density,
    AngularFrequency,
}

impl Dimension {
    fn si_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::Mass => "kg",
            Dimension::Density => "m^-3",
            Dimension::AngularFrequency => "rad/s",
        }
    }

    fn of_variable(v: SweepVariable) -> Self {
        match v {
            SweepVariable::Omega => Dimension::AngularFrequency,
            SweepVariable::T => Dimension::Time,
            SweepVariable::L | SweepVariable::AAb => Dimension::Length,
        }
    }
}

/// Scale factor to SI and dimension of a unit symbol.
pub fn lookup_unit(key: &str, unit: &str) -> Result<(Dimension, f64)> {
    let unit_err = |msg: String| HarvestError::Unit { key: key.to_string(), msg };
    let lower = unit.to_ascii_lowercase();
    if lower.contains("hz") || unit.contains('π') || lower.contains("2pi") {
        return Err(unit_err(format!(
            "`{unit}` is ambiguous between cycles and radians; give angular frequency in rad/s or krad/s"
        )));
    }
    let v = match unit {
        "m" => (Dimension::Length, 1.0),
        "cm" => (Dimension::Length, 1e-2),
        "mm" => (Dimension::Length, 1e-3),
        "um" | "µm" | "μm" => (Dimension::Length, 1e-6),
        "nm" => (Dimension::Length, 1e-9),
        "a0" => (Dimension::Length, BOHR_RADIUS),
        "s" => (Dimension::Time, 1.0),
        "ms" => (Dimension::Time, 1e-3),
        "us" | "µs" | "μs" => (Dimension::Time, 1e-6),
        "kg" => (Dimension::Mass, 1.0),
        "u" => (Dimension::Mass, AMU),
        "m^-3" => (Dimension::Density, 1.0),
        "cm^-3" => (Dimension::Density, 1e6),
        "rad/s" => (Dimension::AngularFrequency, 1.0),
        "krad/s" => (Dimension::AngularFrequency, 1e3),
        _ => return Err(unit_err(format!("unknown unit `{unit}`"))),
    };
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommandName {
    Derive,
    Response,
    Sweep,
    Validate,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Derive => "derive",
            CommandName::Response => "response",
            CommandName::Sweep => "sweep",
            CommandName::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(HarvestError::Config(format!("unknown preset `{s}` (expected fig2, fig3 or fig4)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Switching {
    Gaussian,
    /// Two-column (t [s], β) file.
    Tabulated(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepBlock {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
    pub refine_peak: bool,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            variable: SweepVariable::Omega,
            start: 10e3,
            stop: 50e3,
            points: 81,
            log: false,
            refine_peak: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandBlock {
    pub name: Option<CommandName>,
    pub preset: Option<Preset>,
    pub oracle: bool,
    pub sweep: SweepBlock,
    /// Healing-length cutoff in units of 1/ξ.
    pub k_cut_factor: f64,
}

impl Default for CommandBlock {
    fn default() -> Self {
        CommandBlock { name: None, preset: None, oracle: false, sweep: SweepBlock::default(), k_cut_factor: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closed form vs quadrature, relative.
    pub oracle_rel: f64,
    /// Absolute floor for the closed-form comparison.
    pub oracle_abs: f64,
    /// Allowed 𝓜⁻ weight above the healing-length cutoff.
    pub healing_max: f64,
    /// Allowed ℒ and 𝓜⁺ weight above the cutoff.
    pub healing_local_max: f64,
    /// Finite-volume vs continuum ℒ, relative.
    pub finite_volume_rel: f64,
    /// Box side in units of max(σ, c_s T).
    pub finite_volume_box: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            oracle_rel: 1e-8,
            oracle_abs: 1e-16,
            healing_max: 0.07,
            healing_local_max: 0.01,
            finite_volume_rel: 0.01,
            finite_volume_box: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub setup: Setup,
    pub switching: Switching,
    pub command: CommandBlock,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            setup: Setup::preset(),
            switching: Switching::Gaussian,
            command: CommandBlock::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Quantity(Dimension),
    /// Quantity whose dimension depends on the sweep variable.
    ScanValue,
    Number,
    Integer,
    Bool,
    Text,
}

const KEYS: &[(&str, &str, Kind)] = &[
    ("condensate", "m_b", Kind::Quantity(Dimension::Mass)),
    ("condensate", "a_bb", Kind::Quantity(Dimension::Length)),
    ("condensate", "rho0", Kind::Quantity(Dimension::Density)),
    ("impurity", "m_a", Kind::Quantity(Dimension::Mass)),
    ("impurity", "omega", Kind::Quantity(Dimension::AngularFrequency)),
    ("impurity", "a_aa", Kind::Quantity(Dimension::Length)),
    ("protocol", "T", Kind::Quantity(Dimension::Time)),
    ("protocol", "a_ab", Kind::Quantity(Dimension::Length)),
    ("protocol", "switching", Kind::Text),
    ("protocol", "switching_file", Kind::Text),
    ("geometry", "L", Kind::Quantity(Dimension::Length)),
    ("geometry", "L_ratio", Kind::Number),
    ("command", "name", Kind::Text),
    ("command", "preset", Kind::Text),
    ("command", "oracle", Kind::Bool),
    ("command", "sweep_variable", Kind::Text),
    ("command", "sweep_start", Kind::ScanValue),
    ("command", "sweep_stop", Kind::ScanValue),
    ("command", "sweep_points", Kind::Integer),
    ("command", "sweep_log", Kind::Bool),
    ("command", "refine_peak", Kind::Bool),
    ("command", "k_cut_factor", Kind::Number),
    ("tolerances", "oracle_rel", Kind::Number),
    ("tolerances", "oracle_abs", Kind::Number),
    ("tolerances", "healing_max", Kind::Number),
    ("tolerances", "healing_local_max", Kind::Number),
    ("tolerances", "finite_volume_rel", Kind::Number),
    ("tolerances", "finite_volume_box", Kind::Number),
];

enum Value {
    Quantity(f64, Dimension),
    Number(f64),
    Integer(usize),
    Bool(bool),
    Text(String),
}

fn parse_number(key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| HarvestError::Config(format!("`{key}`: `{s}` is not a finite number")))
}

/// `num`·`scale`, correctly rounded when the scale is a power of ten.
fn scaled_number(key: &str, num: &str, scale: f64) -> Result<f64> {
    let shift = scale.log10().round();
    if 10f64.powi(shift as i32) != scale {
        return Ok(parse_number(key, num)? * scale);
    }
    let (mantissa, exp) = match num.split_once(['e', 'E']) {
        Some((m, e)) => {
            (m, e.parse::<i32>().map_err(|_| HarvestError::Config(format!("`{key}`: bad exponent in `{num}`")))?)
        }
        None => (num, 0),
    };
    parse_number(key, &format!("{mantissa}e{}", exp + shift as i32))
}

fn parse_value(key: &str, kind: Kind, raw: &str) -> Result<Value> {
    let (num, unit) = match raw.split_once(char::is_whitespace) {
        Some((n, u)) => (n, u.trim()),
        None => (raw, ""),
    };
    match kind {
        Kind::Quantity(_) | Kind::ScanValue => {
            if unit.is_empty() {
                return Err(HarvestError::Unit { key: key.into(), msg: "missing unit".into() });
            }
            let (dim, scale) = lookup_unit(key, unit)?;
            if let Kind::Quantity(want) = kind {
                if dim != want {
                    return Err(HarvestError::Unit {
                        key: key.into(),
                        msg: format!("`{unit}` is not a unit of {want:?}"),
                    });
                }
            }
            Ok(Value::Quantity(scaled_number(key, num, scale)?, dim))
        }
        Kind::Number | Kind::Integer | Kind::Bool if !unit.is_empty() => {
            Err(HarvestError::Unit { key: key.into(), msg: format!("dimensionless key takes no unit, got `{unit}`") })
        }
        Kind::Number => Ok(Value::Number(parse_number(key, num)?)),
        Kind::Integer => num
            .parse::<usize>()
            .map(Value::Integer)
            .map_err(|_| HarvestError::Config(format!("`{key}`: `{num}` is not a non-negative integer"))),
        Kind::Bool => match num {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(HarvestError::Config(format!("`{key}`: expected true or false, got `{num}`"))),
        },
        Kind::Text => Ok(Value::Text(raw.to_string())),
    }
}

/// Parse a configuration document; absent keys take the K-39/Rb-87 defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    let mut length: Option<f64> = None;
    let mut ratio: Option<f64> = None;
    let mut switching_kind: Option<String> = None;
    let mut switching_file: Option<String> = None;
    let mut scan_bounds: [Option<(f64, Dimension)>; 2] = [None, None];

    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| HarvestError::Config(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| at("unterminated section header".into()))?.trim();
            if !KEYS.iter().any(|(s, _, _)| *s == name) {
                return Err(at(format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, raw) = line.split_once('=').ok_or_else(|| at("expected `key = value`".into()))?;
        let (key, raw) = (key.trim(), raw.trim());
        let sec = section.as_deref().ok_or_else(|| at(format!("`{key}` appears before any [section]")))?;
        let Some(&(_, _, kind)) = KEYS.iter().find(|(s, k, _)| *s == sec && *k == key) else {
            return Err(at(format!("unknown key `{key}` in [{sec}]")));
        };
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(at(format!("duplicate key `{key}` in [{sec}]")));
        }
        seen.push((sec.to_string(), key.to_string()));

        let s = &mut cfg.setup;
        let c = &mut cfg.command;
        let t = &mut cfg.tolerances;
        match (key, parse_value(key, kind, raw)?) {
            ("m_b", Value::Quantity(v, _)) => s.condensate.m_b = v,
            ("a_bb", Value::Quantity(v, _)) => s.condensate.a_bb = v,
            ("rho0", Value::Quantity(v, _)) => s.condensate.rho0 = v,
            ("m_a", Value::Quantity(v, _)) => s.detector.m_a = v,
            ("omega", Value::Quantity(v, _)) => s.detector.omega_trap = v,
            ("a_aa", Value::Quantity(v, _)) => s.detector.a_aa = v,
            ("T", Value::Quantity(v, _)) => s.detector.t_switch = v,
            ("a_ab", Value::Quantity(v, _)) => s.detector.a_ab_bar = v,
            ("switching", Value::Text(v)) => switching_kind = Some(v),
            ("switching_file", Value::Text(v)) => switching_file = Some(v),
            ("L", Value::Quantity(v, _)) => length = Some(v),
            ("L_ratio", Value::Number(v)) => ratio = Some(v),
            ("name", Value::Text(v)) => {
                c.name = Some(match v.as_str() {
                    "derive" => CommandName::Derive,
                    "response" => CommandName::Response,
                    "sweep" => CommandName::Sweep,
                    "validate" => CommandName::Validate,
                    _ => return Err(at(format!("unknown command `{v}`"))),
                })
            }
            ("preset", Value::Text(v)) => c.preset = Some(Preset::parse(&v)?),
            ("oracle", Value::Bool(v)) => c.oracle = v,
            ("sweep_variable", Value::Text(v)) => {
                c.sweep.variable =
                    SweepVariable::parse(&v).ok_or_else(|| at(format!("unknown sweep variable `{v}`")))?
            }
            ("sweep_start", Value::Quantity(v, d)) => scan_bounds[0] = Some((v, d)),
            ("sweep_stop", Value::Quantity(v, d)) => scan_bounds[1] = Some((v, d)),
            ("sweep_points", Value::Integer(v)) => c.sweep.points = v,
            ("sweep_log", Value::Bool(v)) => c.sweep.log = v,
            ("refine_peak", Value::Bool(v)) => c.sweep.refine_peak = v,
            ("k_cut_factor", Value::Number(v)) => c.k_cut_factor = v,
            ("oracle_rel", Value::Number(v)) => t.oracle_rel = v,
            ("oracle_abs", Value::Number(v)) => t.oracle_abs = v,
            ("healing_max", Value::Number(v)) => t.healing_max = v,
            ("healing_local_max", Value::Number(v)) => t.healing_local_max = v,
            ("finite_volume_rel", Value::Number(v)) => t.finite_volume_rel = v,
            ("finite_volume_box", Value::Number(v)) => t.finite_volume_box = v,
            _ => unreachable!("key table and dispatch disagree on `{key}`"),
        }
    }

    cfg.setup.geometry = match (length, ratio) {
        (Some(_), Some(_)) => return Err(HarvestError::Config("give either L or L_ratio, not both".into())),
        (Some(l), None) => PairGeometry::fixed(l),
        (None, Some(r)) => PairGeometry::sound_cone(r),
        (None, None) => cfg.setup.geometry,
    };

    cfg.switching = match (switching_kind.as_deref(), switching_file) {
        (None | Some("gaussian"), None) => Switching::Gaussian,
        (Some("tabulated"), Some(f)) => Switching::Tabulated(PathBuf::from(f)),
        (Some("tabulated"), None) => {
            return Err(HarvestError::Config("switching = tabulated needs switching_file".into()))
        }
        (None | Some("gaussian"), Some(_)) => {
            return Err(HarvestError::Config("switching_file requires switching = tabulated".into()))
        }
        (Some(other), _) => return Err(HarvestError::Config(format!("unknown switching `{other}`"))),
    };

    let want = Dimension::of_variable(cfg.command.sweep.variable);
    for (slot, name) in scan_bounds.iter().zip(["sweep_start", "sweep_stop"]) {
        if let Some((v, d)) = slot {
            if *d != want {
                return Err(HarvestError::Unit {
                    key: name.into(),
                    msg: format!("sweep over {} needs a {want:?} unit", cfg.command.sweep.variable.name()),
                });
            }
            if name == "sweep_start" {
                cfg.command.sweep.start = *v;
            } else {
                cfg.command.sweep.stop = *v;
            }
        }
    }
    // a non-Omega scan without explicit bounds has no meaningful default
    if want != Dimension::AngularFrequency && (scan_bounds[0].is_none() || scan_bounds[1].is_none()) {
        return Err(HarvestError::Config(format!(
            "sweep over {} needs sweep_start and sweep_stop",
            cfg.command.sweep.variable.name()
        )));
    }

    validate_config(&cfg)?;
    Ok(cfg)
}

fn validate_config(cfg: &RunConfig) -> Result<()> {
    cfg.setup.condensate.validate()?;
    cfg.setup.detector.validate()?;
    let (Separation::SoundCone(r) | Separation::Fixed(r)) = cfg.setup.geometry.separation;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(HarvestError::Domain(format!("separation must be >= 0, got {r}")));
    }
    let sw = &cfg.command.sweep;
    if sw.points < 2 || !(sw.stop > sw.start) {
        return Err(HarvestError::Domain("sweep needs sweep_stop > sweep_start and at least 2 points".into()));
    }
    if sw.log && !(sw.start > 0.0) {
        return Err(HarvestError::Domain("logarithmic sweep needs a positive start".into()));
    }
    if !(cfg.command.k_cut_factor > 0.0) {
        return Err(HarvestError::Domain("k_cut_factor must be positive".into()));
    }
    let t = &cfg.tolerances;
    for (name, v) in [
        ("oracle_rel", t.oracle_rel),
        ("healing_max", t.healing_max),
        ("healing_local_max", t.healing_local_max),
        ("finite_volume_rel", t.finite_volume_rel),
        ("finite_volume_box", t.finite_volume_box),
    ] {
        if !(v > 0.0) {
            return Err(HarvestError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(t.oracle_abs >= 0.0) {
        return Err(HarvestError::Domain("oracle_abs must be >= 0".into()));
    }
    Ok(())
}

/// Canonical text: every key, SI units, shortest round-trip numbers.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let q = |out: &mut String, key: &str, v: f64, d: Dimension| {
        let _ = writeln!(out, "{key} = {v:e} {}", d.si_unit());
    };
    let s = &cfg.setup;
    out.push_str("[condensate]\n");
    q(&mut out, "m_b", s.condensate.m_b, Dimension::Mass);
    q(&mut out, "a_bb", s.condensate.a_bb, Dimension::Length);
    q(&mut out, "rho0", s.condensate.rho0, Dimension::Density);
    out.push_str("\n[impurity]\n");
    q(&mut out, "m_a", s.detector.m_a, Dimension::Mass);
    q(&mut out, "omega", s.detector.omega_trap, Dimension::AngularFrequency);
    q(&mut out, "a_aa", s.detector.a_aa, Dimension::Length);
    out.push_str("\n[protocol]\n");
    q(&mut out, "T", s.detector.t_switch, Dimension::Time);
    q(&mut out, "a_ab", s.detector.a_ab_bar, Dimension::Length);
    match &cfg.switching {
        Switching::Gaussian => out.push_str("switching = gaussian\n"),
        Switching::Tabulated(p) => {
            let _ = writeln!(out, "switching = tabulated\nswitching_file = {}", p.display());
        }
    }
    out.push_str("\n[geometry]\n");
    match s.geometry.separation {
        Separation::Fixed(l) => q(&mut out, "L", l, Dimension::Length),
        Separation::SoundCone(r) => {
            let _ = writeln!(out, "L_ratio = {r:e}");
        }
    }
    let c = &cfg.command;
    out.push_str("\n[command]\n");
    if let Some(n) = c.name {
        let _ = writeln!(out, "name = {}", n.as_str());
    }
    if let Some(p) = c.preset {
        let _ = writeln!(out, "preset = {}", p.as_str());
    }
    let _ = writeln!(out, "oracle = {}", c.oracle);
    let sw = &c.sweep;
    let dim = Dimension::of_variable(sw.variable);
    let _ = writeln!(out, "sweep_variable = {}", sw.variable.name());
    q(&mut out, "sweep_start", sw.start, dim);
    q(&mut out, "sweep_stop", sw.stop, dim);
    let _ = writeln!(out, "sweep_points = {}", sw.points);
    let _ = writeln!(out, "sweep_log = {}", sw.log);
    let _ = writeln!(out, "refine_peak = {}", sw.refine_peak);
    let _ = writeln!(out, "k_cut_factor = {:e}", c.k_cut_factor);
    let t = &cfg.tolerances;
    out.push_str("\n[tolerances]\n");
    for (k, v) in [
        ("oracle_rel", t.oracle_rel),
        ("oracle_abs", t.oracle_abs),
        ("healing_max", t.healing_max),
        ("healing_local_max", t.healing_local_max),
        ("finite_volume_rel", t.finite_volume_rel),
        ("finite_volume_box", t.finite_volume_box),
    ] {
        let _ = writeln!(out, "{k} = {v:e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gives_defaults() {
        let cfg = parse_config("[command]\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn density_in_per_cubic_centimetre() {
        let cfg = parse_config("[condensate]\nrho0 = 5e14 cm^-3\n").unwrap();
        assert_eq!(cfg.setup.condensate.rho0, 5e20);
    }

    #[test]
    fn decimal_prefixes_round_correctly() {
        let cfg =
            parse_config("[protocol]\nT = 0.065 ms\n[impurity]\nomega = 35.5 krad/s\n[geometry]\nL = 1.5E-1 um\n")
                .unwrap();
        assert_eq!(cfg.setup.detector.t_switch, 0.065e-3);
        assert_eq!(cfg.setup.detector.omega_trap, 35.5e3);
        assert_eq!(cfg.setup.geometry.separation, Separation::Fixed(1.5e-7));
        assert!(parse_config("[protocol]\nT = 1ex ms\n").is_err());
    }

    #[test]
    fn missing_unit_names_the_key() {
        match parse_config("[condensate]\nrho0 = 5e14\n") {
            Err(HarvestError::Unit { key, .. }) => assert_eq!(key, "rho0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ambiguous_frequencies_rejected() {
        for u in ["Hz", "kHz", "2π kHz", "2pi kHz"] {
            let text = format!("[impurity]\nomega = 35 {u}\n");
            assert!(matches!(parse_config(&text), Err(HarvestError::Unit { .. })), "{u}");
        }
        let cfg = parse_config("[impurity]\nomega = 35 krad/s\n").unwrap();
        assert_eq!(cfg.setup.detector.omega_trap, 35e3);
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        assert!(matches!(parse_config("[condensate]\nmass = 1 kg\n"), Err(HarvestError::Config(_))));
        assert!(matches!(parse_config("[extra]\n"), Err(HarvestError::Config(_))));
        assert!(matches!(parse_config("m_b = 1 kg\n"), Err(HarvestError::Config(_))));
        assert!(parse_config("[condensate]\nm_b = 87 u\nm_b = 87 u\n").is_err());
    }

    #[test]
    fn wrong_dimension_and_range() {
        assert!(matches!(parse_config("[protocol]\nT = 3 nm\n"), Err(HarvestError::Unit { .. })));
        assert!(matches!(parse_config("[protocol]\nT = -3 ms\n"), Err(HarvestError::Domain(_))));
        assert!(matches!(parse_config("[geometry]\nL_ratio = 5 m\n"), Err(HarvestError::Unit { .. })));
    }

    #[test]
    fn scan_units_follow_variable() {
        let ok = "[command]\nsweep_variable = T\nsweep_start = 0.03 ms\nsweep_stop = 0.1 ms\n";
        let cfg = parse_config(ok).unwrap();
        assert_eq!(cfg.command.sweep.start, 0.03e-3);
        let bad = "[command]\nsweep_variable = T\nsweep_start = 3 krad/s\nsweep_stop = 0.1 ms\n";
        assert!(parse_config(bad).is_err());
    }

    #[test]
    fn round_trip_examples() {
        let texts = [
            "[command]\n",
            "[geometry]\nL = 1.3 um\n[protocol]\nswitching = tabulated\nswitching_file = /tmp/beta.txt\n",
            "[command]\nname = sweep\npreset = fig3\nsweep_variable = a_ab\nsweep_start = 100 a0\nsweep_stop = 2000 a0\nsweep_log = true\n",
        ];
        for t in texts {
            let cfg = parse_config(t).unwrap();
            let again = parse_config(&emit_config(&cfg)).unwrap();
            assert_eq!(cfg, again);
            assert_eq!(emit_config(&cfg), emit_config(&again));
        }
    }
}
