use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbeat_cli::pipeline::{
    run_kinematics, run_report, run_simulate, run_solve, run_verify, KinematicsOptions,
    SimulateOptions, SolveOptions, VerifyOptions,
};
use qbeat_cli::parse_policy;

#[derive(Parser)]
#[command(
    name = "qbeat",
    about = "Effective-potential reduction, realisation statistics, beat-process simulation, and causal kinematics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured system: reduction, roots, realisations, oracle check.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for CSV artifacts and the report.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Grouping policy override: elementary | cluster:<δ>
        #[arg(long)]
        policy: Option<String>,
        /// Also export every system matrix as CSV.
        #[arg(long)]
        export_matrices: bool,
    },
    /// Randomized oracle campaign over seeded systems.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Test hook: perturb one pole in the given trial, which must fail.
        #[arg(long, value_name = "TRIAL")]
        inject_fault: Option<usize>,
    },
    /// Solve, then run the realisation jump process on the resulting α.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Derived kinematic table for (m0, v); optional β-sweep CSV.
    Kinematics {
        /// Rest mass in kg.
        #[arg(long)]
        m0: f64,
        /// Speed in m/s.
        #[arg(long)]
        v: Option<f64>,
        /// Speed as a fraction of c (alternative to --v).
        #[arg(long)]
        beta: Option<f64>,
        /// Emit an N-point sweep over β ∈ [0.01, 0.999] as CSV (needs --out).
        #[arg(long, value_name = "N")]
        sweep: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the report of a previous run.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

/// Writes to stdout, tolerating a closed pipe (e.g. `qbeat ... | head`).
fn emit(text: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = std::io::stdout().write_fmt(text);
    let _ = std::io::stdout().write_all(b"\n");
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve {
            config,
            out,
            policy,
            export_matrices,
        } => {
            let policy_override = policy.as_deref().map(parse_policy).transpose()?;
            let summary = run_solve(&SolveOptions {
                config_path: config,
                out_dir: out,
                policy_override,
                export_matrices,
            })?;
            emit(format_args!(
                "solve: {} surviving roots / {} levels, max oracle deviation {:e} ({})",
                summary.root_count,
                summary.total_levels,
                summary.max_oracle_dev,
                if summary.oracle_pass { "pass" } else { "FAIL" }
            ));
            emit(format_args!("report: {}", summary.report_path.display()));
            Ok(if summary.oracle_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Verify {
            config,
            out,
            trials,
            seed,
            inject_fault,
        } => {
            let summary = run_verify(&VerifyOptions {
                config_path: config,
                out_dir: out,
                trials,
                seed,
                inject_fault,
            })?;
            emit(format_args!(
                "verify: {} trials, worst relative deviation {:e}",
                summary.trials.len(),
                summary.worst_dev
            ));
            if summary.all_passed() {
                emit(format_args!("verify: pass"));
                Ok(ExitCode::SUCCESS)
            } else {
                emit(format_args!("verify: FAIL (trials {:?})", summary.failed_trials()));
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Simulate {
            config,
            out,
            policy,
            seed,
            steps,
        } => {
            let policy_override = policy.as_deref().map(parse_policy).transpose()?;
            let summary = run_simulate(&SimulateOptions {
                config_path: config,
                out_dir: out,
                policy_override,
                seed,
                steps,
            })?;
            emit(format_args!(
                "simulate: {} steps (seed {}), drift {:e}, chi-square {:e} ({})",
                summary.steps,
                summary.seed,
                summary.drift,
                summary.chi_square,
                if summary.chi_square_pass { "pass" } else { "flagged" }
            ));
            emit(format_args!("report: {}", summary.report_path.display()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Kinematics {
            m0,
            v,
            beta,
            sweep,
            out,
        } => {
            let table = run_kinematics(&KinematicsOptions {
                m0,
                v,
                beta,
                sweep,
                out_dir: out,
            })?;
            emit(format_args!("{}", table.trim_end()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { out } => {
            let text = run_report(&out)?;
            emit(format_args!("{}", text.trim_end()));
            Ok(ExitCode::SUCCESS)
        }
    }
}
