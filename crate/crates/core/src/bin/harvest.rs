use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polaron_harvest::cli::{config::Preset, parse_config, run_command, CommandName, CommandOutput, RunConfig};
use polaron_harvest::exec::{with_threads, ExecMode};

#[derive(Parser)]
#[command(name = "harvest", version, about = "Entanglement harvesting with bound Bose polarons")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Print the derived condensate and detector quantities.
    Derive,
    /// Evaluate ℒ, 𝓜, negativity and signaling at one configuration.
    Response,
    /// Scan one parameter, or reproduce a figure preset.
    Sweep,
    /// Run the oracle, healing-length and finite-volume checks.
    Validate,
}

#[derive(Args)]
struct Global {
    /// Configuration file; defaults to the built-in Rb/K setup.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["fig2", "fig3", "fig4"])]
    preset: Option<String>,
    /// Compare closed forms against quadrature.
    #[arg(long, global = true)]
    oracle: bool,
    /// Output stem; companion files and a JSON manifest are written next to it.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    #[arg(long, global = true, env = "HARVEST_THREADS", default_value_t = 0)]
    threads: usize,
}

fn out_path(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "harvest".into());
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn load(global: &Global) -> Result<RunConfig, String> {
    let mut cfg = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &global.preset {
        cfg.command.preset = Some(Preset::parse(p).map_err(|e| e.to_string())?);
    }
    cfg.command.oracle |= global.oracle;
    Ok(cfg)
}

fn emit(output: &CommandOutput, out: Option<&Path>) -> Result<(), String> {
    let Some(out) = out else {
        let mut stdout = std::io::stdout().lock();
        let primary = output.files.iter().find(|f| f.suffix.is_empty());
        let text = primary.map(|f| f.content.as_str()).unwrap_or(output.summary.as_str());
        stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
        if primary.is_some() && !text.eq(&output.summary) {
            eprint!("{}", output.summary);
        }
        return Ok(());
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let write =
        |path: PathBuf, content: &str| fs::write(&path, content).map_err(|e| format!("{}: {e}", path.display()));
    for f in &output.files {
        write(out_path(out, &f.suffix, f.extension), &f.content)?;
    }
    write(out_path(out, "", "manifest.json"), &output.manifest.to_json())?;
    print!("{}", output.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match cli.command {
        Cmd::Derive => CommandName::Derive,
        Cmd::Response => CommandName::Response,
        Cmd::Sweep => CommandName::Sweep,
        Cmd::Validate => CommandName::Validate,
    };
    let run = || -> Result<CommandOutput, String> {
        let cfg = load(&cli.global)?;
        run_command(name, &cfg, ExecMode::Parallel).map_err(|e| e.to_string())
    };
    let result = with_threads(cli.global.threads, run).and_then(|r| r);
    match result.and_then(|o| emit(&o, cli.global.out.as_deref()).map(|_| o.success)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
