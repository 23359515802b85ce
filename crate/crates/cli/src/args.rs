use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Caps on user-supplied parameters. Values above them exit with the resource code.
pub mod caps {
    pub const ORACLE_LEVEL: usize = 5;
    pub const DYNAMICS_DEPTH: usize = 24;
    pub const BUDGET: usize = 20_000_000;
    pub const PROBE_K: usize = 40;
    pub const SHELLS: usize = 60;
    pub const SERIES_CAP: usize = 2_000;
    pub const MAX_ITER: usize = 10_000;
    pub const PRECISION_BITS: u32 = 106;
}

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Random walks, Green functions and spectra of symmetrically self-similar graphs")]
pub struct Cli {
    /// Working precision in bits for root finding (53 = double, up to 106 = double-double).
    #[arg(long, global = true, default_value_t = 53)]
    pub precision: u32,
    /// Seed for sampled checks; recorded in every output header.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write reports and CSV files into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms, the symmetry conditions and bounded geometry of a cell spec.
    Validate(SpecArg),
    /// Print the transfer functions d, f, h, h̃ with their pole and zero sets.
    Functions(SpecArg),
    /// Verify the n-cell identities and the series form of the functional equation exactly.
    Oracle(OracleArgs),
    /// Backward orbits of d: Julia set approximation and exceptional set, as CSV.
    Dynamics(DynamicsArgs),
    /// Inner and outer bounds for the reciprocal spectrum and their Laplacian form.
    Spectrum(DynamicsArgs),
    /// Evaluate G(x,y|z) with an error bound.
    Green(GreenArgs),
    /// Probe G(x,y|r) as r → 1 and count shell conductances.
    Probe(ProbeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SpecArg {
    /// Cell spec file (JSON); the names line2, sierpinski and vicsek select bundled specs.
    pub spec: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArg,
    /// Largest n for the n-cell identities.
    #[arg(long, default_value_t = 3)]
    pub level: usize,
    /// Series order for the coefficient-wise functional equation check.
    #[arg(long, default_value_t = 12)]
    pub order: usize,
    /// Number of random points |z| < 0.9 for a numeric functional equation check.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitMode {
    Julia,
    Exceptional,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct DynamicsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArg,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Which backward orbits to emit (dynamics only).
    #[arg(long, value_enum, default_value_t = OrbitMode::Both)]
    pub mode: OrbitMode,
    #[arg(long, default_value_t = 1e-9)]
    pub dedup_radius: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArg,
    /// Vertex as level:address:local[@branch], e.g. 0:ε:o or 2:0.1:v11.
    #[arg(long, default_value = "o")]
    pub x: String,
    #[arg(long, default_value = "o")]
    pub y: String,
    /// Point z, e.g. 0.6, 2+0.5i or -1.5-0.2i.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 1e-10)]
    pub acc: f64,
    #[arg(long, default_value_t = 0.5)]
    pub base_radius: f64,
    #[arg(long, default_value_t = 200)]
    pub series_cap: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub spec: SpecArg,
    #[arg(long, default_value = "o")]
    pub x: String,
    #[arg(long, default_value = "o")]
    pub y: String,
    /// Sample r = 1 − 2^-k for k = 1..=K.
    #[arg(long = "k", default_value_t = 20)]
    pub k_max: usize,
    /// Number of shells for the conductance count.
    #[arg(long, default_value_t = 8)]
    pub shells: usize,
}
