use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbigraph_cli::{
    cmd_entanglement, cmd_parity, cmd_sweep, cmd_validate, CliError, Report, RunConfig,
};

/// Graph-state experiments on bipartite graphs.
///
/// Angles accept radians or pi fractions such as `pi/16` and `3pi/4`.
#[derive(Parser)]
#[command(name = "qbigraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and print its degree summary.
    Validate(Common),
    /// Entanglement distance of one qubit.
    Entanglement {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        qubit: Option<String>,
    },
    /// Evaluate a quantity over a grid of two angles and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Two of theta_U, phi_U, theta_V, phi_V, comma separated.
        #[arg(long)]
        axes: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<String>,
        #[arg(long)]
        step: Option<String>,
        /// `entanglement:<qubit>`, `cxx_all`, `cx_U`, `czz_all` or `cz_V`.
        #[arg(long)]
        target: Option<String>,
    },
    /// Global correlators and odd/even vertex counts.
    Parity(Common),
}

#[derive(Args)]
struct Common {
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi_v: Option<String>,
    /// Per-qubit angles, one "<theta> <phi>" line per qubit.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// ideal, default, or readout=..,x1=..,cnot=..,channel=..
    #[arg(long)]
    noise: Option<String>,
    /// analytic, exact or sampled.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Round count estimates and flag those more than 2 stderr off an integer.
    #[arg(long)]
    round: bool,
}

impl Common {
    fn settings(&self) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = [
            ("graph", &self.graph),
            ("theta_u", &self.theta_u),
            ("phi_u", &self.phi_u),
            ("theta_v", &self.theta_v),
            ("phi_v", &self.phi_v),
            ("params", &self.params),
            ("shots", &self.shots),
            ("seed", &self.seed),
            ("noise", &self.noise),
            ("method", &self.method),
            ("out", &self.out),
            ("format", &self.format),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
        if self.round {
            out.push(("round", "true".into()));
        }
        out
    }
}

fn build_config(
    common: &Common,
    extra: &[(&'static str, &Option<String>)],
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    for (k, v) in common.settings() {
        cfg.set(k, &v)?;
    }
    for (k, v) in extra {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    Ok(cfg)
}

type Handler = fn(&RunConfig) -> Result<Report, CliError>;

fn run(cli: Cli) -> Result<(RunConfig, Report), CliError> {
    let (cfg, cmd): (RunConfig, Handler) = match &cli.command {
        Command::Validate(c) => (build_config(c, &[])?, cmd_validate),
        Command::Entanglement { common, qubit } => {
            (build_config(common, &[("qubit", qubit)])?, cmd_entanglement)
        }
        Command::Sweep {
            common,
            axes,
            start,
            stop,
            step,
            target,
        } => (
            build_config(
                common,
                &[
                    ("axes", axes),
                    ("start", start),
                    ("stop", stop),
                    ("step", step),
                    ("target", target),
                ],
            )?,
            cmd_sweep,
        ),
        Command::Parity(c) => (build_config(c, &[])?, cmd_parity),
    };
    let report = cmd(&cfg)?;
    Ok((cfg, report))
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse()).and_then(|(cfg, report)| {
        emit(&cfg, &report.body)?;
        Ok(report.code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
