//! Configuration, manifests and the subcommands behind the `harvest` binary.

pub mod commands;
pub mod config;
pub mod manifest;

pub use commands::{run_command, CommandOutput, OutFile};
pub use config::{emit_config, parse_config, CommandName, Preset, RunConfig};
pub use manifest::{config_hash, RunManifest};
