//! Command-line flags, the optional `key = value` configuration file and the
//! validated [`RunConfig`] built from both.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fakemonster_core::eta::NamedSeries;
use ini::Ini;

pub const DEFAULT_PREC: i64 = 50;
pub const DEFAULT_ORDER: u32 = 3;
/// Above this height the untwisted product gets expensive.
pub const UNTWISTED_HEIGHT_WARNING: i64 = 4;

#[derive(Debug, Parser)]
#[command(name = "fakemonster", version, about = "Exact checks of the twisted denominator identities of the fake monster superalgebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one of the exact verifications.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Write a multiplicity table.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
    },
    /// Print the q-expansion of a named series (fake_c, c3, c7, a3, a7).
    Dump { series: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Even and odd trace generating functions agree (twisted Jacobi identity).
    Susy,
    /// Closed theta-coset formulas against coset enumeration.
    Theta,
    /// Spin representations of the twisting element: tables, orders, shapes, triality.
    Spin,
    /// Fixed sublattice and complement invariants.
    Lattice,
    /// Multiplicity formula against its closed form.
    Mult,
    /// Product side against sum side of the denominator identity.
    Denominator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Mult,
    #[value(name = "simple_roots")]
    SimpleRoots,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Order of the twisting element (1, 3 or 7).
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Height bound m + n for lattice computations.
    #[arg(long, global = true)]
    pub height: Option<i64>,
    /// q-expansion precision: exponents below this are compared.
    #[arg(long, global = true)]
    pub prec: Option<i64>,
    /// Only points with -α² at most this value (table mult).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub max_norm: Option<i64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for the product expansion.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// INI-style file of key = value defaults; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add a deliberate error to the computed side of a verification.
    #[arg(long, global = true, hide = true)]
    pub perturb: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UsageError {
    UnsupportedOrder(u32),
    BadValue { key: String, value: String },
    UnknownKey(String),
    Config(String),
    UnknownSeries(String),
    Format { command: &'static str, format: Format },
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UsageError::UnsupportedOrder(n) => write!(f, "unsupported twist order {n} (expected 1, 3 or 7)"),
            UsageError::BadValue { key, value } => write!(f, "invalid value `{value}` for {key}"),
            UsageError::UnknownKey(k) => write!(f, "unknown configuration key `{k}`"),
            UsageError::Config(e) => write!(f, "cannot read configuration: {e}"),
            UsageError::UnknownSeries(s) => write!(f, "unknown series `{s}` (expected fake_c, c3, c7, a3 or a7)"),
            UsageError::Format { command, format } => {
                let name = format.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
                write!(f, "{command} does not support --format {name}")
            }
        }
    }
}

impl std::error::Error for UsageError {}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub order: u32,
    pub height: i64,
    /// Set when the height came from a flag or the configuration file.
    pub height_given: bool,
    pub prec: i64,
    pub max_norm: Option<i64>,
    pub format: Format,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub perturb: bool,
}

pub fn default_height(order: u32) -> i64 {
    if order == 1 {
        4
    } else {
        6
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.trim().parse().map_err(|_| UsageError::BadValue { key: key.to_string(), value: value.to_string() })
}

/// Reads `key = value` pairs, in the general section or any named one.
fn read_config(path: &Path) -> Result<Flags, UsageError> {
    let ini = Ini::load_from_file(path).map_err(|e| UsageError::Config(e.to_string()))?;
    let mut f = Flags::default();
    for (_, props) in ini.iter() {
        for (key, value) in props.iter() {
            match key.trim().replace('_', "-").as_str() {
                "order" => f.order = Some(parse(key, value)?),
                "height" => f.height = Some(parse(key, value)?),
                "prec" => f.prec = Some(parse(key, value)?),
                "max-norm" => f.max_norm = Some(parse(key, value)?),
                "format" => f.format = Some(parse(key, value)?),
                "jobs" => f.jobs = Some(parse(key, value)?),
                "out" => f.out = Some(PathBuf::from(value.trim())),
                _ => return Err(UsageError::UnknownKey(key.to_string())),
            }
        }
    }
    Ok(f)
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, UsageError> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => Flags::default(),
        };
        let order = flags.order.or(file.order).unwrap_or(DEFAULT_ORDER);
        if !matches!(order, 1 | 3 | 7) {
            return Err(UsageError::UnsupportedOrder(order));
        }
        let height = flags.height.or(file.height);
        let prec = flags.prec.or(file.prec).unwrap_or(DEFAULT_PREC);
        let jobs = flags.jobs.or(file.jobs).unwrap_or(1);
        let bad = |key: &str, v: String| UsageError::BadValue { key: key.to_string(), value: v };
        if let Some(h) = height {
            if h < 1 {
                return Err(bad("height", h.to_string()));
            }
        }
        if prec < 1 {
            return Err(bad("prec", prec.to_string()));
        }
        if jobs < 1 {
            return Err(bad("jobs", jobs.to_string()));
        }
        Ok(RunConfig {
            order,
            height: height.unwrap_or_else(|| default_height(order)),
            height_given: height.is_some(),
            prec,
            max_norm: flags.max_norm.or(file.max_norm),
            format: flags.format.or(file.format).unwrap_or_default(),
            jobs,
            out: flags.out.clone().or(file.out),
            perturb: flags.perturb,
        })
    }
}

pub fn parse_series(name: &str) -> Result<NamedSeries, UsageError> {
    name.parse().map_err(|_| UsageError::UnknownSeries(name.to_string()))
}
