//! Command-line front end.
//!
//! Every subcommand builds one CSV report in memory and writes it to `--out`
//! (or stdout). Reports start with `#`-prefixed metadata lines followed by a
//! header row; numbers use the shortest representation that round-trips.
//!
//! Parameters come from flags or from a JSON object given with `--config`
//! whose keys are the flag names (`"max-order"`, `"targets"`, ...). Flags win.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::equivalence::{clayton_to_q, equivalence_report, multipliers_to_q, q_to_multipliers};
use crate::error::Error;
use crate::extbg::{
    bg_entropy, clayton_multipliers, ext_distribution, raw_moments, ClaytonParams, MomentVector,
    MultiplierVector,
};
use crate::maxent::{solve_multipliers, SolverOptions};
use crate::qstat::{cutoff_mask, escort_energy, q_distribution, tsallis_entropy, QParams};
use crate::spectrum::{Distribution, EnergySpectrum};

pub const TOOL: &str = concat!("tsallis-bg ", env!("CARGO_PKG_VERSION"));

const DEFAULT_INVERT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// q-exponential distribution on a spectrum
    DistQ,
    /// Extended Boltzmann-Gibbs distribution from a multiplier file
    DistExt,
    /// Multipliers β_n = (1-q)^{n-1} β^n / n
    Map,
    /// Recover (q, β) from a multiplier file
    InvertMap,
    /// Clayton multipliers (β, δβ²) and q = 1 - 2δ
    Clayton,
    /// Truncation distances between extended and q-distributions
    Equiv,
    /// Multipliers reproducing prescribed raw moments
    Solve,
    /// Entropies and energies of a distribution
    Entropy,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::DistQ => "dist-q",
            Command::DistExt => "dist-ext",
            Command::Map => "map",
            Command::InvertMap => "invert-map",
            Command::Clayton => "clayton",
            Command::Equiv => "equiv",
            Command::Solve => "solve",
            Command::Entropy => "entropy",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tsallis-bg",
    version,
    about = "Tsallis and extended Boltzmann-Gibbs statistics on discrete spectra"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Spectrum file, one "energy,degeneracy" per line
    #[arg(long, value_name = "PATH")]
    pub spectrum: Option<PathBuf>,
    /// Multiplier file, one "n,beta_n" per line
    #[arg(long, value_name = "PATH")]
    pub multipliers: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Comma-separated raw moments μ_1,...,μ_N
    #[arg(long, value_name = "CSV-LIST", allow_hyphen_values = true)]
    pub targets: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON file with any of the options above
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("--{0} is required for this command")]
    MissingArgument(&'static str),
    #[error("--{flag}: {message}")]
    InvalidArgument { flag: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Input { path: String, source: Error },
    #[error(transparent)]
    Module(#[from] Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::MissingArgument(_) => "MissingArgument",
            CliError::InvalidArgument { .. } => "InvalidArgument",
            CliError::Io { .. } => "IoError",
            CliError::Config { .. } => "ConfigError",
            CliError::Input { source, .. } | CliError::Module(source) => source.name(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    spectrum: Option<PathBuf>,
    multipliers: Option<PathBuf>,
    q: Option<f64>,
    beta: Option<f64>,
    delta: Option<f64>,
    order: Option<usize>,
    max_order: Option<usize>,
    targets: Option<TargetsField>,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TargetsField {
    List(Vec<f64>),
    Text(String),
}

/// Fully merged parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spectrum: Option<PathBuf>,
    pub multipliers: Option<PathBuf>,
    pub q: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub order: Option<usize>,
    pub max_order: Option<usize>,
    pub targets: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            spectrum: None,
            multipliers: None,
            q: None,
            beta: None,
            delta: None,
            order: None,
            max_order: None,
            targets: None,
            tol: None,
            out: None,
        }
    }

    /// Merges flags over the optional config file. Relative paths inside the
    /// config file are resolved against the file's directory.
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let base = args
            .config
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        let file_targets = match file.targets {
            Some(TargetsField::List(v)) => Some(v),
            Some(TargetsField::Text(s)) => Some(parse_targets(&s)?),
            None => None,
        };
        let targets = match args.targets {
            Some(s) => Some(parse_targets(&s)?),
            None => file_targets,
        };
        let cfg = Self {
            command: args.command,
            spectrum: args.spectrum.or(file.spectrum.map(resolve)),
            multipliers: args.multipliers.or(file.multipliers.map(resolve)),
            q: args.q.or(file.q),
            beta: args.beta.or(file.beta),
            delta: args.delta.or(file.delta),
            order: args.order.or(file.order),
            max_order: args.max_order.or(file.max_order),
            targets,
            tol: args.tol.or(file.tol),
            out: args.out.or(file.out.map(resolve)),
        };
        cfg.check_finite()?;
        Ok(cfg)
    }

    fn check_finite(&self) -> Result<(), CliError> {
        let scalars = [
            ("q", self.q),
            ("beta", self.beta),
            ("delta", self.delta),
            ("tol", self.tol),
        ];
        for (flag, value) in scalars {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(CliError::InvalidArgument {
                        flag,
                        message: format!("{v} is not finite"),
                    });
                }
            }
        }
        if let Some(t) = &self.targets {
            if t.iter().any(|v| !v.is_finite()) {
                return Err(CliError::InvalidArgument {
                    flag: "targets",
                    message: "every target must be finite".into(),
                });
            }
        }
        Ok(())
    }
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_targets(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|field| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::InvalidArgument {
                    flag: "targets",
                    message: format!("invalid number {:?}", field.trim()),
                })
        })
        .collect()
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_spectrum(cfg: &RunConfig) -> Result<EnergySpectrum, CliError> {
    let path = cfg
        .spectrum
        .as_deref()
        .ok_or(CliError::MissingArgument("spectrum"))?;
    EnergySpectrum::parse(&read_file(path)?).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn load_multipliers(cfg: &RunConfig) -> Result<MultiplierVector, CliError> {
    let path = cfg
        .multipliers
        .as_deref()
        .ok_or(CliError::MissingArgument("multipliers"))?;
    MultiplierVector::parse(&read_file(path)?).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn require<T: Copy>(value: Option<T>, flag: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::MissingArgument(flag))
}

fn q_params(cfg: &RunConfig) -> Result<QParams, CliError> {
    Ok(QParams::new(
        require(cfg.q, "q")?,
        require(cfg.beta, "beta")?,
    )?)
}

/// Shortest round-trip rendering; scientific notation outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(command: Command) -> Self {
        let mut csv = Self {
            text: String::new(),
        };
        csv.meta("tool", TOOL);
        csv.meta("command", command.name());
        csv
    }

    fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "# {key}={value}");
    }

    fn meta_num(&mut self, key: &str, value: f64) {
        self.meta(key, format_number(value));
    }

    fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    fn multipliers(&mut self, m: &MultiplierVector) {
        self.row(&["n", "beta_n"]);
        for (i, b) in m.coeffs().iter().enumerate() {
            self.row(&[(i + 1).to_string(), format_number(*b)]);
        }
    }

    fn levels(&mut self, spectrum: &EnergySpectrum, dist: &Distribution, cutoff: Option<&[bool]>) {
        let mut header = vec!["level", "energy", "degeneracy", "probability"];
        if cutoff.is_some() {
            header.push("cutoff");
        }
        self.row(&header);
        for i in 0..spectrum.len() {
            let mut fields = vec![
                i.to_string(),
                format_number(spectrum.levels()[i]),
                spectrum.degeneracies()[i].to_string(),
                format_number(dist.probs()[i]),
            ];
            if let Some(mask) = cutoff {
                fields.push(mask[i].to_string());
            }
            self.row(&fields);
        }
    }
}

/// Runs one subcommand and returns the CSV report.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let mut csv = Csv::new(cfg.command);
    match cfg.command {
        Command::DistQ => {
            let spectrum = load_spectrum(cfg)?;
            let params = q_params(cfg)?;
            let (dist, log_z) = q_distribution(&spectrum, &params)?;
            csv.meta_num("q", params.q());
            csv.meta_num("beta", params.beta());
            csv.meta_num("log_partition", log_z);
            let mask = cutoff_mask(&spectrum, &params);
            csv.levels(&spectrum, &dist, Some(&mask));
        }
        Command::DistExt => {
            let spectrum = load_spectrum(cfg)?;
            let m = load_multipliers(cfg)?;
            let (dist, log_z) = ext_distribution(&spectrum, &m)?;
            csv.meta("order", m.order());
            csv.meta_num("log_partition", log_z);
            csv.levels(&spectrum, &dist, None);
        }
        Command::Map => {
            let params = q_params(cfg)?;
            let order = require(cfg.order, "order")?;
            let m = q_to_multipliers(&params, order)?;
            csv.meta_num("q", params.q());
            csv.meta_num("beta", params.beta());
            csv.meta("order", order);
            csv.multipliers(&m);
        }
        Command::InvertMap => {
            let m = load_multipliers(cfg)?;
            let tol = cfg.tol.unwrap_or(DEFAULT_INVERT_TOL);
            let found = multipliers_to_q(&m, tol)?;
            csv.meta("order", m.order());
            csv.meta_num("tol", tol);
            csv.meta("consistent", found.is_some());
            csv.row(&["q", "beta"]);
            if let Some(p) = found {
                csv.row(&[format_number(p.q()), format_number(p.beta())]);
            }
        }
        Command::Clayton => {
            let params =
                ClaytonParams::new(require(cfg.beta, "beta")?, require(cfg.delta, "delta")?)?;
            let m = clayton_multipliers(&params);
            csv.meta_num("beta", params.beta());
            csv.meta_num("delta", params.delta());
            csv.meta_num("q", clayton_to_q(params.delta()));
            csv.multipliers(&m);
        }
        Command::Equiv => {
            let spectrum = load_spectrum(cfg)?;
            let params = q_params(cfg)?;
            let max_order = require(cfg.max_order, "max-order")?;
            let report = equivalence_report(&spectrum, &params, max_order)?;
            csv.meta_num("q", params.q());
            csv.meta_num("beta", params.beta());
            csv.meta("max_order", max_order);
            csv.meta("levels", spectrum.len());
            csv.meta_num("domain_ratio", report.domain_ratio);
            csv.row(&["N", "sup_distance"]);
            for (n, d) in report.rows() {
                csv.row(&[n.to_string(), format_number(d)]);
            }
        }
        Command::Solve => {
            let spectrum = load_spectrum(cfg)?;
            let targets = cfg
                .targets
                .clone()
                .ok_or(CliError::MissingArgument("targets"))?;
            if let Some(order) = cfg.order {
                if order != targets.len() {
                    return Err(CliError::InvalidArgument {
                        flag: "order",
                        message: format!("{order} does not match {} targets", targets.len()),
                    });
                }
            }
            let targets = MomentVector::new(targets)?;
            let mut opts = SolverOptions::default();
            if let Some(tol) = cfg.tol {
                opts.tol = tol;
            }
            let (m, report) = solve_multipliers(&spectrum, &targets, &opts)?;
            csv.meta("order", targets.order());
            csv.meta_num("tol", opts.tol);
            csv.meta("converged", report.converged);
            csv.meta("iterations", report.iterations);
            csv.meta_num("residual_norm", report.residual_norm);
            csv.meta_num("final_step_size", report.final_step_size);
            csv.meta_num("rescale_factor", report.rescale_factor);
            csv.meta_num("rescale_center", report.rescale_center);
            csv.multipliers(&m);
        }
        Command::Entropy => {
            let spectrum = load_spectrum(cfg)?;
            let q = require(cfg.q, "q")?;
            let dist = if cfg.multipliers.is_some() {
                let m = load_multipliers(cfg)?;
                csv.meta("distribution", "ext");
                ext_distribution(&spectrum, &m)?.0
            } else {
                let params = q_params(cfg)?;
                csv.meta("distribution", "q");
                csv.meta_num("beta", params.beta());
                q_distribution(&spectrum, &params)?.0
            };
            csv.meta_num("q", q);
            let mean = raw_moments(&dist, &spectrum, 1)?.values()[0];
            csv.row(&["quantity", "value"]);
            csv.row(&["tsallis_entropy", &format_number(tsallis_entropy(&dist, q))]);
            csv.row(&["bg_entropy", &format_number(bg_entropy(&dist))]);
            csv.row(&["mean_energy", &format_number(mean)]);
            csv.row(&[
                "escort_energy",
                &format_number(escort_energy(&dist, &spectrum, q)?),
            ]);
        }
    }
    Ok(csv.text)
}

/// Writes `contents` to `path` through a sibling temporary file, so a failed
/// write never leaves a partial report behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

/// Runs and writes the report to `cfg.out`, or stdout when unset.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let report = run(cfg)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &report),
        None => std::io::stdout()
            .write_all(report.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

pub fn main_with(args: Args) -> Result<(), CliError> {
    execute(&RunConfig::from_args(args)?)
}
