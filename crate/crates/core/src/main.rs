use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jcsusy::driver::{self, Axis};
use jcsusy::phase_space::GridSpec;
use jcsusy::propagator::Fault;
use jcsusy::scenario::Scenario;
use jcsusy::verify::{self, Level};

/// Output directory; defaults to `./out`.
const OUT_ENV: &str = "JCSUSY_OUT";
const REPORT: &str = "verify_report.json";

#[derive(Parser)]
#[command(name = "jcsusy", version, about = "Counter-rotating and Kerr Jaynes-Cummings dynamics in closed form")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its time series and Wigner snapshots.
    Simulate { scenario: PathBuf },
    /// Run a scenario once per value of one parameter.
    Sweep {
        scenario: PathBuf,
        /// gamma, k, g, chi, delta or cutoff
        #[arg(long)]
        axis: String,
        /// Comma-separated list or inclusive range start:stop:step.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Write Wigner snapshots only.
    Wigner {
        scenario: PathBuf,
        /// Comma-separated times.
        #[arg(long, allow_hyphen_values = true)]
        times: String,
        /// re_min:re_max:n_re,im_min:im_max:n_im
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// series or displaced-parity
        #[arg(long)]
        method: Option<String>,
    },
    /// Run the self-check suite (N = 64, or N = 128 with --full).
    Verify {
        #[arg(long)]
        full: bool,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipGSign,
}

fn out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}

/// Runs are written to `$JCSUSY_OUT/<scenario file stem>`.
fn out_dir(scenario: &Path) -> PathBuf {
    let stem = scenario.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    out_root().join(stem)
}

fn report_files(files: &[PathBuf], warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    for f in files {
        println!("{}", f.display());
    }
}

fn run(cli: Cli) -> jcsusy::Result<ExitCode> {
    match cli.command {
        Command::Simulate { scenario } => {
            let s = Scenario::load(&scenario)?;
            let out = driver::run(&s, &out_dir(&scenario))?;
            report_files(&out.files, &out.warnings);
        }
        Command::Sweep { scenario, axis, values } => {
            let s = Scenario::load(&scenario)?;
            let axis: Axis = axis.parse()?;
            let values = driver::parse_values(&values)?;
            let dir = out_dir(&scenario);
            let points = driver::sweep(&s, axis, &values, &dir)?;
            for p in &points {
                for w in &p.warnings {
                    eprintln!("warning: {}: {w}", driver::sweep_dir_name(axis, p.value));
                }
            }
            println!("{}", dir.join(driver::SUMMARY).display());
        }
        Command::Wigner {
            scenario,
            times,
            grid,
            method,
        } => {
            let s = Scenario::load(&scenario)?;
            let grid: GridSpec = grid.parse()?;
            let times = driver::parse_values(&times)?;
            let s = driver::wigner_only(&s, times, grid, method);
            let out = driver::run(&s, &out_dir(&scenario))?;
            report_files(&out.files, &out.warnings);
        }
        Command::Verify { full, inject_fault } => {
            let level = if full { Level::Full } else { Level::Fast };
            let fault = match inject_fault {
                Some(FaultArg::FlipGSign) => Fault::FlipGSign,
                None => Fault::None,
            };
            let report = verify::verify(level, fault);
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} [{}] {}: observed {:.3e}, tolerance {:.0e}",
                    c.module, c.name, c.observed, c.tolerance
                );
                if let Some(e) = &c.error {
                    println!("     error: {e}");
                }
            }
            let root = out_root();
            std::fs::create_dir_all(&root)?;
            let path = root.join(REPORT);
            std::fs::write(&path, report.to_json())?;
            println!("report: {}", path.display());
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
