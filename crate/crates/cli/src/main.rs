//! Command-line front end.

mod commands;
mod output;
mod parse;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::parse::{Chunk, Resolution};

#[derive(Parser, Debug)]
#[command(name = "jouanolou", version, about = "Transversality checks, real flow and Julia-set pictures for the Jouanolou foliation")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "JOUANOLOU_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive exact check of the lattice condition C_N for J_2.
    VerifyPb(VerifyPbArgs),
    /// Combine the reports of a run split with --chunk.
    MergeReports(MergeArgs),
    /// Locate the singular points and check that all are hyperbolic sources of W.
    VerifyPs(VerifyPsArgs),
    /// Sampled maximum of the ℓᵖ transversality ratio over a grid of p.
    SweepRp(SweepArgs),
    /// Escape-time image of the Julia set on a sphere around a singular point.
    RenderJulia(RenderArgs),
    /// Check the order-21 symmetry group of J_2.
    SymmetryCheck(SymmetryArgs),
    /// Integrate W from one point and dump the trajectory.
    TraceW(TraceArgs),
    /// Quick summary of the checks that run in seconds.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Degree of the Jouanolou field.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=30))]
    degree: u32,
    /// Load the field from a JSON file instead.
    #[arg(long, conflicts_with = "degree")]
    field: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyPbArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100_000))]
    n: u32,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
    /// Only scan chunk i of n (0-based), e.g. 2/8.
    #[arg(long)]
    chunk: Option<Chunk>,
}

#[derive(Args, Debug)]
struct MergeArgs {
    #[arg(required = true)]
    reports: Vec<std::path::PathBuf>,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyPsArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=30))]
    degree: u32,
    #[arg(long, default_value_t = 2.0)]
    p_min: f64,
    #[arg(long, default_value_t = 6.0)]
    p_max: f64,
    #[arg(long, default_value_t = 9)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Maximum hill-climbing starts per exponent.
    #[arg(long, default_value_t = 32)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    singularity: usize,
    #[arg(long, default_value_t = 0.3)]
    radius: f64,
    /// meridian[:phase=φ,twist=k] or torus[:eta=η].
    #[arg(long, default_value = "meridian:phase=0")]
    slice: String,
    #[arg(long, default_value = "512x512")]
    resolution: Resolution,
    /// Integration time after which a point counts as Julia.
    #[arg(long, default_value_t = 200.0)]
    budget: f64,
    #[arg(long, default_value_t = 1e-7)]
    rtol: f64,
    #[arg(long)]
    out: std::path::PathBuf,
    /// Metadata path (default: the image path with a .json extension).
    #[arg(long)]
    meta: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct SymmetryArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Start point as three complex numbers, e.g. "1,0.5-0.2i,2i".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, default_value_t = 200.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt0: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_b: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_s: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Include a finished verify-pb JSON report.
    #[arg(long)]
    pb: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Violation = 1,
    Usage = 2,
    Failure = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            status: Status::Usage,
            message: msg.into(),
        }
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        CliError {
            status: Status::Failure,
            message: msg.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or(0);
    let result = jouanolou::par::with_threads(threads, || commands::dispatch(cli.command, threads));
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.status as u8)
        }
    }
}
