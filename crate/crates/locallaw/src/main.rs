//! Command-line entry point: run configured experiments and evaluate the
//! deterministic laws.

use clap::{Args, Parser, Subcommand};
use locallaw::laws::{
    classical_locations, control_psi, mp_stieltjes, sc_stieltjes, AspectRatio, SpectralPoint,
};
use locallaw::report;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "locallaw",
    version,
    about = "Spectral local-law laboratory: deterministic law evaluation and Monte Carlo verification runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file and write CSV + JSON reports.
    ///
    /// Config keys mirror these flags plus the experiment parameters; see
    /// the crate documentation of `locallaw::report` for the full key set.
    /// Exit status is 0 only when every enabled criterion passes.
    Run(RunArgs),
    /// Print deterministic law values with 15 significant digits.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the flat key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory override (config key: out).
    #[arg(long)]
    out: Option<String>,
    /// Master seed override (config key: seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count override (config key: jobs). The environment
    /// variable LOCALLAW_JOBS overrides the config; this flag overrides both.
    #[arg(long)]
    jobs: Option<usize>,
    /// Experiment id override (config key: experiment).
    #[arg(long)]
    experiment: Option<String>,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Marchenko-Pastur Stieltjes transform m_phi(z).
    Mp {
        #[arg(long)]
        phi: f64,
        /// Spectral parameter, e.g. 2+0.5i or 4.5 (eta = 0).
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Semicircle Stieltjes transform m(z).
    Sc {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Classical eigenvalue locations gamma_alpha (M = round(phi N)).
    Gamma {
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        n: usize,
        /// Comma separated list of 1-based indices.
        #[arg(long)]
        alpha: String,
    },
    /// Control parameter Psi(z) = sqrt(Im m/(N eta)) + 1/(N eta).
    Psi {
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

/// Parses "a", "bi", "a+bi", "a-bi" with scientific notation.
fn parse_complex(text: &str) -> Result<SpectralPoint, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |_| format!("cannot parse '{text}' as a complex number");
    if let Some(body) = s.strip_suffix('i') {
        // find the split between real and imaginary parts: a sign not at
        // position 0 and not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(bad)?;
                let im_str = &body[i..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(bad)?
                };
                (re, im)
            }
            None => {
                let im: f64 = if body.is_empty() { 1.0 } else { body.parse().map_err(bad)? };
                (0.0, im)
            }
        };
        SpectralPoint::new(re, im).map_err(|e| e.to_string())
    } else {
        let re: f64 = s.parse().map_err(bad)?;
        SpectralPoint::new(re, 0.0).map_err(|e| e.to_string())
    }
}

fn eval(cmd: EvalCommand) -> Result<(), String> {
    match cmd {
        EvalCommand::Mp { phi, z } => {
            let z = parse_complex(&z)?;
            let m = mp_stieltjes(&z, phi).map_err(|e| e.to_string())?;
            println!("m_phi(z) = {:.15e} + {:.15e}i", m.re, m.im);
        }
        EvalCommand::Sc { z } => {
            let z = parse_complex(&z)?;
            let m = sc_stieltjes(&z).map_err(|e| e.to_string())?;
            println!("m(z) = {:.15e} + {:.15e}i", m.re, m.im);
        }
        EvalCommand::Gamma { phi, n, alpha } => {
            let alphas: Vec<usize> = alpha
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad alpha '{t}'")))
                .collect::<Result<_, _>>()?;
            let m = ((phi * n as f64).round() as usize).max(1);
            let gammas = classical_locations(n, m, &alphas).map_err(|e| e.to_string())?;
            for (a, g) in alphas.iter().zip(&gammas) {
                println!("gamma_{a} = {g:.15e}");
            }
        }
        EvalCommand::Psi { phi, n, z } => {
            let z = parse_complex(&z)?;
            let m = ((phi * n as f64).round() as u64).max(1);
            let aspect = AspectRatio::new(m, n as u64).map_err(|e| e.to_string())?;
            let psi = control_psi(&z, &aspect, n).map_err(|e| e.to_string())?;
            println!("Psi(z) = {psi:.15e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let env_jobs = std::env::var("LOCALLAW_JOBS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok());
            let jobs = args.jobs.or(env_jobs);
            match report::run_from_path(
                &args.config,
                args.out.as_deref(),
                args.seed,
                jobs,
                args.experiment.as_deref(),
            ) {
                Ok(doc) => {
                    for c in &doc.criteria {
                        println!(
                            "[{}] {} - {}",
                            if c.pass { "PASS" } else { "FAIL" },
                            c.id,
                            c.detail
                        );
                    }
                    for w in &doc.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!(
                        "{}: {} criteria evaluated, wall clock {:.2}s",
                        doc.experiment,
                        doc.criteria.len(),
                        doc.wall_clock_seconds
                    );
                    if doc.all_pass() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Eval(cmd) => match eval(cmd) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
    }
}
