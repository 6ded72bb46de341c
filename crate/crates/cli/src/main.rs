use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ks_cli::{compare_suite, exit_code, load_manifest, load_suite, run_scenario, verify};

#[derive(Parser)]
#[command(
    name = "ks1d",
    version,
    about = "1-D chemotaxis with nonlinear diffusion: runs, suites and self-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one manifest. Exits 0 when finished, 3 on suspected blowup and
    /// 4 when the time step collapses.
    Simulate {
        config: PathBuf,
        /// Output directory; overrides `outputs`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        n_cells: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Run every `*.toml` in a directory and write `comparison.csv`.
    Suite {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the operator and identity self-checks.
    Verify,
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Simulate {
            config,
            out,
            n_cells,
            t_end,
        } => {
            let mut manifest = load_manifest(&config).map_err(usage)?;
            if let Some(n) = n_cells {
                manifest = manifest.with_n_cells(n).map_err(usage)?;
            }
            if let Some(t) = t_end {
                manifest = manifest.with_t_end(t).map_err(usage)?;
            }
            if let Some(dir) = out {
                manifest.outputs = dir;
            }
            let s = run_scenario(&manifest).map_err(runtime)?;
            println!(
                "{}: {} at t = {} after {} steps, max |u| = {:.6e}, max energy residual = {:.3e} ({:.1} s) -> {}",
                s.scenario,
                s.status,
                s.t_final,
                s.steps,
                s.max_u_linf,
                s.max_abs_energy_residual,
                s.wall_time_seconds,
                manifest.outputs.display()
            );
            Ok(exit_code(s.final_status()) as u8)
        }
        Command::Suite { dir, out } => {
            let manifests = load_suite(&dir, &out).map_err(usage)?;
            let report = compare_suite(&manifests).map_err(runtime)?;
            let table = report.to_csv();
            let path = out.join("comparison.csv");
            std::fs::write(&path, &table).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
            print!("{table}");
            Ok(0)
        }
        Command::Verify => {
            let checks = verify::run_checks();
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("{mark}  {:<width$}  {}", c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}
