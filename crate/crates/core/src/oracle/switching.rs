//! Switching profiles β(u), u = t/T, for the time-domain triangle integral.

use std::path::Path;

use crate::error::{HarvestError, Result};
use crate::special::erfc;

/// Largest tail mass tolerated outside the integration window.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum SwitchingProfile {
    /// β(u) = e^{-u²/2}, integrated over [-window, window].
    Gaussian { window: f64 },
    /// β(u) = 1 on [-half_width, half_width].
    TopHat { half_width: f64 },
    /// Piecewise-linear through the samples, zero outside them.
    Tabulated(Tabulated),
}

impl SwitchingProfile {
    pub fn gaussian() -> Self {
        SwitchingProfile::Gaussian { window: 10.0 }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            SwitchingProfile::Gaussian { window } => {
                if u.abs() <= *window {
                    (-0.5 * u * u).exp()
                } else {
                    0.0
                }
            }
            SwitchingProfile::TopHat { half_width } => {
                if u.abs() <= *half_width {
                    1.0
                } else {
                    0.0
                }
            }
            SwitchingProfile::Tabulated(t) => t.eval(u),
        }
    }

    /// Integration window [lo, hi].
    pub fn window(&self) -> (f64, f64) {
        match self {
            SwitchingProfile::Gaussian { window } => (-window, *window),
            SwitchingProfile::TopHat { half_width } => (-half_width, *half_width),
            SwitchingProfile::Tabulated(t) => (t.u[0], t.u[t.u.len() - 1]),
        }
    }

    /// Points where β is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            SwitchingProfile::Tabulated(t) => t.u.clone(),
            _ => {
                let (lo, hi) = self.window();
                vec![lo, hi]
            }
        }
    }

    /// Mass of |β| lying outside the window, or a proxy for it when unknown.
    pub fn tail_mass(&self) -> f64 {
        match self {
            SwitchingProfile::Gaussian { window } => {
                (2.0 * std::f64::consts::PI).sqrt() * erfc(window / std::f64::consts::SQRT_2)
            }
            SwitchingProfile::TopHat { .. } => 0.0,
            // truncated samples: the endpoint heights relative to the peak
            SwitchingProfile::Tabulated(t) => {
                let peak = t.beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
                let ends = t.beta[0].abs().max(t.beta[t.beta.len() - 1].abs());
                if peak > 0.0 {
                    ends / peak
                } else {
                    0.0
                }
            }
        }
    }

    pub fn check_window(&self) -> Result<()> {
        let (lo, hi) = self.window();
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(HarvestError::Domain(format!("invalid switching window [{lo}, {hi}]")));
        }
        let tail = self.tail_mass();
        if tail > TAIL_LIMIT {
            return Err(HarvestError::WindowTooSmall { tail });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    u: Vec<f64>,
    beta: Vec<f64>,
}

impl Tabulated {
    pub fn new(u: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if u.len() != beta.len() || u.len() < 2 {
            return Err(HarvestError::Config("switching table needs at least two (t, beta) rows".into()));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HarvestError::Config("switching table times must be strictly increasing".into()));
        }
        if u.iter().chain(beta.iter()).any(|x| !x.is_finite()) {
            return Err(HarvestError::Config("switching table has non-finite entries".into()));
        }
        Ok(Tabulated { u, beta })
    }

    /// Parse two whitespace-separated columns (t in seconds, β); `#` starts a comment.
    /// Times are divided by `t_switch` so the table is in units of the switching time.
    pub fn parse(text: &str, t_switch: f64) -> Result<Self> {
        let mut u = Vec::new();
        let mut beta = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(HarvestError::Config(format!("switching table line {}: expected 2 columns", i + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| HarvestError::Config(format!("switching table line {}: {e}", i + 1)))
            };
            u.push(parse(cols[0])? / t_switch);
            beta.push(parse(cols[1])?);
        }
        Tabulated::new(u, beta)
    }

    pub fn load(path: &Path, t_switch: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarvestError::Io(format!("{}: {e}", path.display())))?;
        Tabulated::parse(&text, t_switch)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.u.len();
        if x < self.u[0] || x > self.u[n - 1] {
            return 0.0;
        }
        let i = self.u.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (u0, u1) = (self.u[i - 1], self.u[i]);
        let w = (x - u0) / (u1 - u0);
        self.beta[i - 1] * (1.0 - w) + self.beta[i] * w
    }
}
