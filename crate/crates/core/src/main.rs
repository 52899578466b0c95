use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ns_verify::cli::{self, FlagOverrides};

/// Residual certification of exact non-stationary Navier-Stokes solutions
/// on periodic cells.
#[derive(Parser)]
#[command(name = "ns-verify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the solution families with parameters, decay rates and claims.
    List,
    /// Run the residual suite and write a JSON report.
    Verify(RunArgs),
    /// Sample closed-form fields and export them as VTK/CSV.
    Sample(RunArgs),
    /// Evolve initial data with the heat/Duhamel operator and compare
    /// against the closed forms.
    Evolve(RunArgs),
    /// Grid- or panel-refinement study; emits a CSV table.
    Convergence(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated family tags (taylor2d, forced-taylor2d, abc3d,
    /// forced-abc3d, abc-exp-forced3d).
    #[arg(long)]
    family: Option<String>,
    /// Samples per axis (even, >= 4).
    #[arg(long)]
    grid: Option<usize>,
    /// Kinematic viscosity.
    #[arg(long)]
    kappa: Option<f64>,
    /// Fluid density.
    #[arg(long)]
    rho: Option<f64>,
    /// ABC coefficients as "a,b,c".
    #[arg(long)]
    abc: Option<String>,
    /// Forcing amplitude: matched | zero | const:C | exp:AMP,RATE |
    /// tab:t0:v0,t1:v1,...
    #[arg(long)]
    forcing: Option<String>,
    /// Comma-separated verification times.
    #[arg(long)]
    times: Option<String>,
    /// Simpson panels for the Duhamel integral.
    #[arg(long)]
    panels: Option<usize>,
    /// Operator backend: spectral | fd.
    #[arg(long)]
    backend: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Field export format: vtk | csv | both.
    #[arg(long)]
    format: Option<String>,
    /// JSON config file (flag-name keys); a previously written report is
    /// accepted and re-run from its embedded config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, hide = true)]
    corrupt_velocity: Option<f64>,
    /// Convergence study kind: spectral-gradient | fd-gradient |
    /// fd-laplacian | duhamel-panels.
    #[arg(long)]
    study: Option<String>,
    /// Comma-separated resolutions (or panel counts) for the study.
    #[arg(long)]
    resolutions: Option<String>,
}

impl From<RunArgs> for FlagOverrides {
    fn from(a: RunArgs) -> Self {
        FlagOverrides {
            family: a.family,
            grid: a.grid,
            kappa: a.kappa,
            rho: a.rho,
            abc: a.abc,
            forcing: a.forcing,
            times: a.times,
            panels: a.panels,
            backend: a.backend,
            out: a.out,
            format: a.format,
            config: a.config,
            corrupt_velocity: a.corrupt_velocity,
            study: a.study,
            resolutions: a.resolutions,
        }
    }
}

fn init_thread_pool() {
    if let Ok(spec) = std::env::var("NS_VERIFY_THREADS") {
        if let Ok(n) = spec.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn dispatch(command: &str, flags: FlagOverrides) -> ns_verify::Result<i32> {
    let cfg = cli::resolve_config(command, &flags)?;
    match command {
        "verify" => cli::run_verify(&cfg),
        "sample" => cli::run_sample(&cfg),
        "evolve" => cli::run_evolve(&cfg),
        "convergence" => cli::run_convergence(&cfg),
        _ => unreachable!(),
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => return ExitCode::from(cli::run_list() as u8),
        Command::Verify(args) => dispatch("verify", args.into()),
        Command::Sample(args) => dispatch("sample", args.into()),
        Command::Evolve(args) => dispatch("evolve", args.into()),
        Command::Convergence(args) => dispatch("convergence", args.into()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("ns-verify: {err}");
            ExitCode::from(1)
        }
    }
}
