mod commands;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hminimal::Error;

use commands::{Command, Execution, Status};
use record::RunRecord;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

/// Numerical experiments on H-minimal surfaces in the Heisenberg group.
#[derive(Parser, Debug)]
#[command(name = "hminimal", version)]
struct Cli {
    /// Directory for output files and the run record.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand, Debug)]
enum Action {
    #[command(flatten)]
    Run(Command),
    /// Re-execute a run record and compare its outputs.
    Replay { record: PathBuf },
}

fn configure_pool() -> Result<()> {
    if let Ok(v) = std::env::var("HMINIMAL_WORKERS") {
        let n: usize = v.parse().with_context(|| format!("HMINIMAL_WORKERS={v:?} is not an integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cmd: &Command, out: &Path) -> Result<(Execution, RunRecord)> {
    let start = Instant::now();
    let exec = cmd.execute()?;
    let record = RunRecord {
        command: cmd.name().to_string(),
        parameters: serde_json::to_value(cmd)?,
        outputs: exec.outputs.clone(),
        quadrature: exec.quadrature,
        version: hminimal::VERSION.to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (name, text) in &exec.files {
        let path = out.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    record.write(&out.join(format!("{}.record.json", cmd.name())))?;
    Ok((exec, record))
}

fn report(cmd: &Command, exec: &Execution) {
    match cmd {
        Command::Identities(_) => {
            if let Ok(r) = serde_json::from_value::<hminimal::checks::SuiteReport>(exec.outputs.clone()) {
                println!("{:<12} {:<12} {:>8} {:>12} {:>6}", "identity", "surface", "samples", "max_resid", "pass");
                for i in &r.identities {
                    println!(
                        "{:<12} {:<12} {:>8} {:>12.3e} {:>6}",
                        i.identity, i.surface, i.samples, i.max_residual, i.passed
                    );
                }
                for l in &r.integration_by_parts {
                    println!(
                        "ibp {:<8} trial {:>3} residual {:>10.3e} bound {:>10.3e} {}",
                        l.lemma, l.trial, l.residual, l.bound, l.passed
                    );
                }
                if r.identities.iter().all(|i| i.samples == 0) {
                    eprintln!("warning: zero samples, identity checks pass vacuously");
                }
            }
        }
        Command::Instability(_) => {
            if let Some(rows) = exec.outputs.get("scan").and_then(|s| s.as_array()) {
                println!("{:>5} {:>24} {:>12} {:>9}", "k", "value", "error", "converged");
                for r in rows {
                    println!(
                        "{:>5} {:>24.16e} {:>12.3e} {:>9}",
                        r["k"],
                        r["value"].as_f64().unwrap_or(f64::NAN),
                        r["error"].as_f64().unwrap_or(f64::NAN),
                        r["converged"]
                    );
                }
            }
            if exec.status == Status::Ok {
                println!("certified at k = {}: value {} +- {}", exec.outputs["k"], exec.outputs["value"], exec.outputs["error"]);
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&exec.outputs).unwrap_or_default()),
    }
}

fn status_code(status: &Status) -> u8 {
    match status {
        Status::Ok => 0,
        Status::Failed(msg) => {
            eprintln!("check failed: {msg}");
            EXIT_FAILED
        }
        Status::Exhausted => {
            eprintln!("no certificate found within the k range");
            EXIT_EXHAUSTED
        }
    }
}

fn replay(path: &Path, out: &Path) -> Result<u8> {
    let old = RunRecord::read(path)?;
    let cmd: Command = serde_json::from_value(old.parameters.clone())
        .with_context(|| format!("parameters in {} do not describe a command", path.display()))?;
    let (_, new) = run(&cmd, out)?;
    if new.outputs == old.outputs && new.quadrature == old.quadrature {
        println!("replay of {} reproduced all outputs", old.command);
        Ok(0)
    } else {
        eprintln!("replay of {} produced different outputs", old.command);
        Ok(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_pool() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match &cli.action {
        Action::Run(cmd) => run(cmd, &cli.out).map(|(exec, _)| {
            report(cmd, &exec);
            status_code(&exec.status)
        }),
        Action::Replay { record } => replay(record, &cli.out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::InvalidParameter { .. }) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_FAILED),
            }
        }
    }
}
