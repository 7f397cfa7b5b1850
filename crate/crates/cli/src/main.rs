//! `bsasym` — experiment runner for birth-and-spread growth simulations.
//!
//! ```text
//! bsasym <ex1|ex2|ex3|volcano|twin|tk|radial|invariants> [--config <path>] [--desk] [--out <dir>]
//! ```
//!
//! Exit codes: 0 success, 1 invariant failure, 2 solver blow-up, 3
//! configuration error.

mod config;
mod experiments;
mod output;

use config::Config;
use experiments::Verdict;
use output::OutputDir;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "usage: bsasym <ex1|ex2|ex3|volcano|twin|tk|radial|invariants> \
[--config <path>] [--desk] [--out <dir>]";

fn main() -> ExitCode {
    match run() {
        Ok(Verdict::Ok) => ExitCode::from(0),
        Ok(Verdict::InvariantFailure) => {
            eprintln!("invariant failure (see report)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                bsasym_core::Error::BlowUp { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run() -> bsasym_core::Result<Verdict> {
    let mut args = std::env::args().skip(1);
    let command = args
        .next()
        .ok_or_else(|| bsasym_core::Error::Config(USAGE.into()))?;
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir: Option<String> = None;
    let mut desk = false;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--config" => {
                let path = args
                    .next()
                    .ok_or_else(|| bsasym_core::Error::Config("--config needs a path".into()))?;
                config_path = Some(PathBuf::from(path));
            }
            "--out" => {
                let dir = args
                    .next()
                    .ok_or_else(|| bsasym_core::Error::Config("--out needs a directory".into()))?;
                out_dir = Some(dir);
            }
            "--desk" => desk = true,
            other => {
                return Err(bsasym_core::Error::Config(format!(
                    "unknown argument '{other}'\n{USAGE}"
                )));
            }
        }
    }

    let mut cfg = Config::defaults(&command)?;
    if let Some(path) = &config_path {
        cfg.apply_file(path)?;
    }
    if desk {
        cfg.apply_desk();
    }
    if let Some(dir) = out_dir {
        cfg.out_dir = dir;
    }
    cfg.validate()?;

    let out = OutputDir::new(&cfg.out_dir, cfg.echo())?;
    match command.as_str() {
        "ex1" => experiments::ex1(&cfg, &out),
        "ex2" => experiments::ex2(&cfg, &out),
        "ex3" => experiments::ex3(&cfg, &out),
        "volcano" => experiments::volcano(&cfg, &out),
        "twin" => experiments::twin_volcano(&cfg, &out),
        "tk" => experiments::tk_convergence(&cfg, &out),
        "radial" => experiments::radial_compare(&cfg, &out),
        "invariants" => experiments::invariants_suite(&cfg, &out),
        other => Err(bsasym_core::Error::Config(format!(
            "unknown experiment '{other}'\n{USAGE}"
        ))),
    }
}
