//! Command-line flags, the JSON config file, and their merge.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::grid;

#[derive(Debug, Parser)]
#[command(name = "lr-horizon", version, about = "Lieb-Robinson bounds and signaling times for power-law lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}


#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-hop constant lambda and its closed-form upper bound
    Lambda(Flags),
    /// Commutator bounds as a function of separation and time
    Bound(Flags),
    /// Signaling-time lower bounds
    Signaling(Flags),
    /// Scaling-law fits of signaling times
    Fit(Flags),
    /// Free-particle state-transfer protocol
    Protocol(Flags),
    /// Dense Ising commutator against its closed form
    IsingOracle(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lambda(_) => "lambda",
            Command::Bound(_) => "bound",
            Command::Signaling(_) => "signaling",
            Command::Fit(_) => "fit",
            Command::Protocol(_) => "protocol",
            Command::IsingOracle(_) => "ising-oracle",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Lambda(f)
            | Command::Bound(f)
            | Command::Signaling(f)
            | Command::Fit(f)
            | Command::Protocol(f)
            | Command::IsingOracle(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Power-law exponents, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// System sizes: integers, `1e4`, or `LO..HI:COUNT` for a log-spaced grid
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<String>,
    /// Separations: integers, `N/2`, `N/4`, or `all`
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<String>,
    /// Times: numbers or `X/lambda`
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<String>,
    /// Signaling threshold
    #[arg(long)]
    pub delta: Option<f64>,
    /// Method (analytic, numeric, exact_sum, free_particle, many_site, ising)
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the sweep
    #[arg(long, env = "LR_HORIZON_WORKERS")]
    pub workers: Option<usize>,
    /// Report times in Kac-normalized units (multiplied by lambda)
    #[arg(long)]
    pub kac: bool,
    /// Tidy `series,x,y` CSV for plotting
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Lattice dimension
    #[arg(long, short = 'D')]
    pub dimension: Option<usize>,
    /// Lattice boundary: periodic or open
    #[arg(long)]
    pub boundary: Option<String>,
    /// Source site for many-site and Ising signaling
    #[arg(long)]
    pub site: Option<usize>,
    /// Fit models (power_log, loglog_power, pure_power), comma separated
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Logarithm base inside the fit models: e, 2 or 10
    #[arg(long)]
    pub log_base: Option<String>,
    /// Signaling table to fit instead of computing one
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Site-occupation trajectory output for the protocol
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Time steps in the trajectory
    #[arg(long)]
    pub steps: Option<usize>,
}

/// A list entry in the config file: a number or a token string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Token {
    Number(f64),
    Text(String),
}

impl Token {
    fn into_string(self) -> String {
        match self {
            Token::Number(x) => format!("{x}"),
            Token::Text(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<OneOrMany<f64>>,
    #[serde(rename = "N")]
    n: Option<OneOrMany<Token>>,
    r: Option<OneOrMany<Token>>,
    t: Option<OneOrMany<Token>>,
    delta: Option<f64>,
    method: Option<String>,
    format: Option<Format>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    kac: Option<bool>,
    plot_data: Option<PathBuf>,
    dimension: Option<usize>,
    boundary: Option<String>,
    site: Option<usize>,
    model: Option<OneOrMany<String>>,
    log_base: Option<String>,
    input: Option<PathBuf>,
    trajectory: Option<PathBuf>,
    steps: Option<usize>,
}

fn tokens(v: Option<OneOrMany<Token>>) -> Vec<String> {
    v.map(|x| x.into_vec().into_iter().map(Token::into_string).collect()).unwrap_or_default()
}

/// Fully resolved sweep. Fields that affect results are hashed; output
/// routing and parallelism are not.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub command: String,
    pub alpha: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub r: Vec<String>,
    pub t: Vec<String>,
    pub delta: Option<f64>,
    pub method: Option<String>,
    pub kac: bool,
    pub dimension: usize,
    pub boundary: String,
    pub site: usize,
    pub model: Vec<String>,
    pub log_base: String,
    pub steps: usize,
    /// SHA-256 of the input table, when one is given.
    pub input_digest: Option<String>,
    #[serde(skip)]
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub plot_data: Option<PathBuf>,
    #[serde(skip)]
    pub trajectory: Option<PathBuf>,
}

impl SweepConfig {
    pub fn resolve(command: &str, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let pick = |flag: Vec<String>, file: Vec<String>| if flag.is_empty() { file } else { flag };

        let alpha = if flags.alpha.is_empty() {
            file.alpha.map(OneOrMany::into_vec).unwrap_or_default()
        } else {
            flags.alpha.clone()
        };
        let n_tokens = pick(flags.n.clone(), tokens(file.n));
        let n = grid::parse_sizes(&n_tokens)?;
        let input = flags.input.clone().or(file.input);
        let input_digest = match &input {
            Some(path) => {
                let bytes = fs::read(path)
                    .map_err(|e| CliError::Input(format!("cannot read input {}: {e}", path.display())))?;
                Some(hex::encode(Sha256::digest(bytes)))
            }
            None => None,
        };
        let workers = match flags.workers.or(file.workers) {
            Some(0) => return Err(CliError::Input("workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        let model = if flags.model.is_empty() {
            file.model.map(OneOrMany::into_vec).unwrap_or_default()
        } else {
            flags.model.clone()
        };
        let cfg = SweepConfig {
            command: command.to_string(),
            alpha,
            n,
            r: pick(flags.r.clone(), tokens(file.r)),
            t: pick(flags.t.clone(), tokens(file.t)),
            delta: flags.delta.or(file.delta),
            method: flags.method.clone().or(file.method),
            kac: flags.kac || file.kac.unwrap_or(false),
            dimension: flags.dimension.or(file.dimension).unwrap_or(1),
            boundary: flags.boundary.clone().or(file.boundary).unwrap_or_else(|| "periodic".into()),
            site: flags.site.or(file.site).unwrap_or(0),
            model,
            log_base: flags.log_base.clone().or(file.log_base).unwrap_or_else(|| "e".into()),
            steps: flags.steps.or(file.steps).unwrap_or(100),
            input_digest,
            input,
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
            workers,
            plot_data: flags.plot_data.clone().or(file.plot_data),
            trajectory: flags.trajectory.clone().or(file.trajectory),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(CliError::Input("alpha values must be finite and non-negative".into()));
        }
        if self.n.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Input("N grid must be strictly ascending".into()));
        }
        if self.dimension == 0 {
            return Err(CliError::Input("dimension must be at least 1".into()));
        }
        if !matches!(self.boundary.as_str(), "periodic" | "open") {
            return Err(CliError::Input(format!("boundary must be periodic or open, got {}", self.boundary)));
        }
        if self.steps == 0 {
            return Err(CliError::Input("steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn require_alpha(&self) -> Result<&[f64], CliError> {
        if self.alpha.is_empty() {
            return Err(CliError::Input("--alpha is required".into()));
        }
        Ok(&self.alpha)
    }

    pub fn require_n(&self) -> Result<&[usize], CliError> {
        if self.n.is_empty() {
            return Err(CliError::Input("--N is required".into()));
        }
        Ok(&self.n)
    }

    /// Short SHA-256 digest of the result-affecting fields.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }
}
