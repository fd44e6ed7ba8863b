use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vislat::numtheory::DEFAULT_PRIME_BOUND;
use vislat::{Lattice, PointFilter, SeriesKind};

#[derive(Debug, Parser)]
#[command(
    name = "vislat",
    version,
    about = "Visible lattice points, k-free integers and their diffraction"
)]
pub struct Cli {
    /// Worker threads for parallel scans.
    #[arg(long, global = true, env = "VISLAT_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// File to write the artifact to. Without it only the summary is printed.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    Visible,
    Kfree,
    /// Every lattice point.
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    TwoSided,
    OneSided,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List lattice points in a ball.
    Points(PointsArgs),
    /// List k-free integers in an interval.
    Kfree(KfreeArgs),
    /// Density estimates over a radius schedule.
    Density(DensityArgs),
    /// Autocorrelation weight at a shift over a radius schedule.
    Autocorr(AutocorrArgs),
    /// Fourier-Bohr coefficient at a frequency.
    Fourier(FourierArgs),
    /// Bragg peaks in a window.
    Peaks(PeaksArgs),
    /// Grayscale raster of the Bragg peaks in a window.
    Map(MapArgs),
    /// Translation emptying a block of lattice points of visible points.
    Holes(HolesArgs),
    /// Run of consecutive integers that are not k-free.
    Gaps(GapsArgs),
    /// Truncated zeta, 1/zeta or xi.
    Series(SeriesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArg {
    /// `In` for the integer lattice of dimension n, or basis vectors as
    /// comma-separated rows joined by `;`.
    #[arg(long, default_value = "I2", value_parser = parse_lattice)]
    pub lattice: Lattice,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long)]
    pub radius: f64,
    /// Ball center; defaults to the origin.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub center: Option<Vec<f64>>,
    /// `all`, `visible` or `content=m`.
    #[arg(long, default_value = "all", value_parser = parse_filter)]
    pub filter: PointFilter,
}

#[derive(Debug, Args)]
pub struct KfreeArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: i64,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value = "visible")]
    pub set: SetKind,
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// One or more radii, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub radius: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AutocorrArgs {
    #[arg(long, value_enum, default_value = "visible")]
    pub set: SetKind,
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Shift in lattice coordinates, or a single integer for k-free sets.
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub shift: Vec<i64>,
    #[arg(long, required = true, value_delimiter = ',')]
    pub radius: Vec<f64>,
    #[arg(long, value_enum, default_value = "two-sided")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct FourierArgs {
    #[arg(long, value_enum, default_value = "visible")]
    pub set: SetKind,
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Frequency in ambient coordinates.
    #[arg(
        long,
        required = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub x: Vec<f64>,
    #[arg(long)]
    pub radius: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PeaksArgs {
    #[arg(long, value_enum, default_value = "visible")]
    pub set: SetKind,
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub qmax: u64,
    /// Lower corner then upper corner, e.g. `0,0,1,1`; defaults to the unit cell.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Smallest intensity kept.
    #[arg(long, default_value_t = 0.0)]
    pub floor: f64,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub peaks: PeaksArgs,
    /// Pixels per unit length.
    #[arg(long, default_value_t = 256.0)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct HolesArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    /// Side length of the cubical block `{0..m-1}^n` to empty.
    #[arg(long, default_value_t = 3)]
    pub block: u32,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub len: usize,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, value_parser = parse_kind)]
    pub kind: SeriesKind,
    #[arg(long, allow_negative_numbers = true)]
    pub s: i64,
    #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
    pub prime_bound: u64,
    /// Sum the Dirichlet series over `m <= M` instead of the Euler product.
    #[arg(long)]
    pub term_bound: Option<usize>,
}

fn parse_kind(s: &str) -> Result<SeriesKind, String> {
    s.parse().map_err(|e: vislat::Error| e.to_string())
}

pub fn parse_lattice(s: &str) -> Result<Lattice, String> {
    let s = s.trim();
    if let Some(n) = s.strip_prefix(['I', 'Z']) {
        let n: usize = n.parse().map_err(|_| format!("bad dimension in `{s}`"))?;
        return Lattice::integer(n).map_err(|e| e.to_string());
    }
    let rows = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad number `{v}`"))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Lattice::from_columns(&rows).map_err(|e| e.to_string())
}

pub fn parse_filter(s: &str) -> Result<PointFilter, String> {
    match s {
        "all" => Ok(PointFilter::All),
        "visible" => Ok(PointFilter::Visible),
        _ => match s.strip_prefix("content=").map(str::parse::<u64>) {
            Some(Ok(m)) if m > 0 => Ok(PointFilter::Content(m)),
            _ => Err(format!("expected all, visible or content=m, got `{s}`")),
        },
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Points(_) => "points",
            Command::Kfree(_) => "kfree",
            Command::Density(_) => "density",
            Command::Autocorr(_) => "autocorr",
            Command::Fourier(_) => "fourier",
            Command::Peaks(_) => "peaks",
            Command::Map(_) => "map",
            Command::Holes(_) => "holes",
            Command::Gaps(_) => "gaps",
            Command::Series(_) => "series",
        }
    }
}
