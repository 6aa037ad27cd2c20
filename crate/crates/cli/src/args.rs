use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "cylwave", version, about = "Guided modes of coaxial and hollow cylindrical waveguides")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryArg {
    Coax,
    Hollow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Tem,
    Tm,
    Te,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// TOML run configuration; flags given on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub geometry: Option<GeometryArg>,
    /// Inner (coax) or wall (hollow) radius, m
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Outer radius of the coax, m
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long = "epsilon-r", global = true)]
    pub epsilon_r: Option<f64>,
    #[arg(long = "mu-r", global = true)]
    pub mu_r: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Periodicity length, m
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Wave index, beta = 2 pi l / L
    #[arg(long = "l", global = true)]
    pub l: Option<i64>,
    #[arg(long = "X", global = true)]
    pub x: Option<f64>,
    #[arg(long = "Y", global = true)]
    pub y: Option<f64>,
    /// rad
    #[arg(long, global = true)]
    pub theta0: Option<f64>,
    /// rad
    #[arg(long, global = true)]
    pub phi0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// J s
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Operating frequency in Hz; rejected below cutoff
    #[arg(long, global = true)]
    pub freq: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cutoff wavenumbers and frequencies for m = 1..m_max
    Cutoffs {
        #[arg(long = "m-max", default_value_t = 3)]
        m_max: usize,
    },
    /// Dispersion, modal constants and quantization data of one mode
    Mode,
    /// E and B on an (r, theta) grid
    Fields {
        #[arg(long, default_value_t = 11)]
        nr: usize,
        #[arg(long, default_value_t = 12)]
        ntheta: usize,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Field amplitude in V/m; the single-quantum value when absent
        #[arg(long)]
        em: Option<f64>,
    },
    /// Surface charge and current densities on every electrode
    Currents {
        #[arg(long, default_value_t = 33)]
        ns: usize,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        em: Option<f64>,
    },
    /// Gap between the TE n=0 coax gauge profile and the virtual flux profile
    Fig3 {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.1, 1.5, 2.0])]
        ratios: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4])]
        ms: Vec<u32>,
        #[arg(long, default_value_t = 201)]
        nr: usize,
    },
    /// Run the verification suite
    Verify {
        /// Record per-check wall time (breaks byte-identical reports)
        #[arg(long)]
        timing: bool,
    },
}
