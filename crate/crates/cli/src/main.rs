//! `schlicht` — univalence criteria and quasiconformal extensions of
//! harmonic mappings, from the command line.
//!
//! Exit codes: 0 when the check or certification passes, 2 when a criterion
//! or certification fails, 1 on usage or input errors.

mod commands;
mod output;
mod spec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{BuildInvocation, CheckInvocation};
use schlicht_core::Complex64;

#[derive(Parser)]
#[command(
    name = "schlicht",
    version,
    about = "Univalence criteria, quasiconformal extensions and Beltrami certification for harmonic maps of the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Map spec JSON file
    #[arg(long)]
    map: PathBuf,
    /// Weight spec: a JSON file path or inline JSON
    #[arg(long)]
    weight: Option<String>,
    /// Family parameter λ as `re,im` (overrides the map file)
    #[arg(long)]
    lambda: Option<String>,
    /// Teichmüller parameter α as `re,im` (overrides the map file)
    #[arg(long)]
    alpha: Option<String>,
    /// Sampling grid as `RxA` (radial x angular)
    #[arg(long)]
    grid: Option<String>,
    /// Output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a univalence criterion and write its report
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Criterion tag (becker, nehari, ahlfors_sigma, ahlfors_c,
        /// ahlfors_schwarzian_v, ahlfors_schwarzian_c, hm_harmonic, bravo_c,
        /// main_harmonic_sigma, corollary_v, corollary_c, teichmuller)
        #[arg(long)]
        criterion: String,
        /// Target margin k
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Criterion parameter c as `re,im`
        #[arg(long)]
        c: Option<String>,
    },
    /// Build a plane extension and tabulate it on interior/exterior grids
    Extend {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// Also write the boundary trace CSV here
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Measure Beltrami coefficients and certify against the K-bound
    Beltrami {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// Certification JSON path (defaults to the CSV path with
        /// extension `cert.json`)
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Render circle images and the boundary trace as SVG
    Render {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// Concentric circles per region
        #[arg(long, default_value_t = 8)]
        circles: usize,
        /// Samples per curve
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// Extension tag (ahlfors, ahlfors_weill, harmonic_lambda, teichmuller)
    #[arg(long, visible_alias = "tag")]
    criterion: String,
    /// Margin the build criterion is checked against
    #[arg(long, default_value_t = 1.0 - 1e-9)]
    k: f64,
}

fn parse_opt_complex(flag: &Option<String>) -> anyhow::Result<Option<Complex64>> {
    flag.as_deref().map(spec::parse_complex_flag).transpose()
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { common, criterion, k, c } => {
            let inv = CheckInvocation {
                map_path: common.map,
                weight: common.weight,
                criterion,
                k,
                lambda: parse_opt_complex(&common.lambda)?,
                alpha: parse_opt_complex(&common.alpha)?,
                c: parse_opt_complex(&c)?,
                grid: common.grid,
                out: common.out,
            };
            commands::cmd_check(&inv)
        }
        Command::Extend { common, build, trace_out } => {
            let inv = build_invocation(common, build, trace_out, None, 8, 1024)?;
            commands::cmd_extend(&inv)
        }
        Command::Beltrami { common, build, cert_out } => {
            let inv = build_invocation(common, build, None, cert_out, 8, 1024)?;
            commands::cmd_beltrami(&inv)
        }
        Command::Render { common, build, circles, samples } => {
            let inv = build_invocation(common, build, None, None, circles, samples)?;
            commands::cmd_render(&inv)
        }
    }
}

fn build_invocation(
    common: CommonArgs,
    build: BuildArgs,
    trace_out: Option<PathBuf>,
    cert_out: Option<PathBuf>,
    circles: usize,
    samples: usize,
) -> anyhow::Result<BuildInvocation> {
    Ok(BuildInvocation {
        map_path: common.map,
        weight: common.weight,
        tag: build.criterion,
        k: build.k,
        lambda: parse_opt_complex(&common.lambda)?,
        alpha: parse_opt_complex(&common.alpha)?,
        grid: common.grid,
        out: common.out,
        trace_out,
        cert_out,
        circles,
        samples,
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
