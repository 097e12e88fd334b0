use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{emit_config, RunConfig};
use crate::error::Result;
use crate::sweep::Setup;
use crate::units::{coupling_ab, reduced_mass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub g_bb: f64,
    pub c_s: f64,
    pub xi: f64,
    pub mu_ab: f64,
    pub g_ab: f64,
    pub lambda_bar_sq: f64,
    pub t_bar: f64,
    pub omega_bar: f64,
    pub sigma: f64,
    pub separation: f64,
}

impl DerivedQuantities {
    pub fn of(setup: &Setup) -> Result<Self> {
        let (cond, p) = setup.resolve()?;
        let mu_ab = reduced_mass(setup.detector.m_a, cond.m_b)?;
        Ok(DerivedQuantities {
            g_bb: cond.g_bb,
            c_s: cond.c_s,
            xi: cond.xi,
            mu_ab,
            g_ab: coupling_ab(setup.detector.a_ab_bar, mu_ab)?,
            lambda_bar_sq: p.lambda_bar_sq,
            t_bar: p.t_bar,
            omega_bar: p.omega_bar,
            sigma: p.sigma,
            separation: p.separation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of `config`.
    pub config_sha256: String,
    /// Canonical configuration text; parsing it reproduces the run.
    pub config: String,
    pub resolved: Setup,
    pub derived: DerivedQuantities,
    pub wall_time_s: f64,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    hex::encode(Sha256::digest(emit_config(cfg).as_bytes()))
}

impl RunManifest {
    pub fn new(cfg: &RunConfig, command: &str, wall_time_s: f64) -> Result<Self> {
        let config = emit_config(cfg);
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: hex::encode(Sha256::digest(config.as_bytes())),
            config,
            resolved: cfg.setup,
            derived: DerivedQuantities::of(&cfg.setup)?,
            wall_time_s,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
