//! Command-line experiment runner for `lacuna`.
//!
//! Every run writes `manifest.json`, the command's tables and `summary.txt`
//! into the output directory. The manifest holds the fully resolved
//! configuration; `lacuna run --config manifest.json` reproduces the same
//! files byte for byte.

mod commands;
mod output;

pub use commands::execute;
pub use output::{Artifacts, Format, Table};

use clap::{Parser, Subcommand};
use lacuna::experiments::RNG_ALGORITHM;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const DEFAULT_OUT: &str = "lacuna-out";
pub const DEFAULT_MAX_M: u64 = 1_000_000;
pub const DEFAULT_MAX_SAMPLES: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "lacuna",
    version,
    about = "Exact continued-fraction and shifted-approximation experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub settings: SettingsArgs,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; unset flags fall back to the config file,
/// then to the defaults.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct SettingsArgs {
    /// Precision cap for undecided comparisons, in decimal digits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "max-n", global = true)]
    pub max_n: Option<u64>,
    #[arg(long = "max-m", global = true)]
    pub max_m: Option<u64>,
    #[arg(long = "max-samples", global = true)]
    pub max_samples: Option<u64>,
    /// Comma-separated checkpoints.
    #[arg(long, global = true, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Settings {
    pub precision: u32,
    pub seed: u64,
    pub max_n: u64,
    pub max_m: u64,
    pub max_samples: u64,
    pub checkpoints: Vec<u64>,
    pub format: Format,
}

impl SettingsArgs {
    pub fn resolve(&self) -> Settings {
        Settings {
            precision: self
                .precision
                .unwrap_or(lacuna::exact::DEFAULT_PRECISION_DIGITS),
            seed: self.seed.unwrap_or(0),
            max_n: self.max_n.unwrap_or(lacuna::experiments::DEFAULT_MAX_N),
            max_m: self.max_m.unwrap_or(DEFAULT_MAX_M),
            max_samples: self.max_samples.unwrap_or(DEFAULT_MAX_SAMPLES),
            checkpoints: self.checkpoints.clone().unwrap_or_default(),
            format: self.format.unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(
    tag = "command",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case"
)]
pub enum Command {
    /// Continued fraction and convergents of a number.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Growth constant sup ln(q_t)/t to a depth.
    Kconst {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 100)]
        depth: usize,
    },
    /// Gap lengths of {alpha}, ..., {m alpha} on the circle.
    Threegap {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        m: u64,
    },
    /// Ostrowski digits of gamma, and optionally a certified shift at index k.
    Ostrowski {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    /// Shifted lacunary sequence n_1, ..., n_T with independent verification.
    Shiftseq {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long = "T")]
        #[serde(rename = "T")]
        t: usize,
        #[arg(long, default_value_t = lacuna::lacunary::DEFAULT_SPACING)]
        spacing: usize,
    },
    /// Littlewood-type count over n in [2, N].
    Count {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        n: u64,
    },
    /// Hits ||n_t beta - delta|| <= 1/(8 ln n_t) along the lacunary sequence.
    Shifthits {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long = "T")]
        #[serde(rename = "T")]
        t: usize,
    },
    /// T_k sequence at the uniform rate, with the chain check at every hit.
    Uniform {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long = "T")]
        #[serde(rename = "T")]
        t: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "1/2")]
        eps: String,
        /// Constant B for T_k; defaults to the computed B*.
        #[arg(long = "B", allow_hyphen_values = true)]
        #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
        b: Option<String>,
        #[arg(long = "k-max", default_value_t = 5)]
        k_max: usize,
    },
    /// Periodic samples from F_M.
    Sample {
        #[arg(long = "M")]
        #[serde(rename = "M")]
        m: u64,
        #[arg(long = "block-len", default_value_t = 8)]
        block_len: usize,
        #[arg(long, default_value = "gauss-kuzmin")]
        weights: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Running minimum of n ||n beta - delta|| over n in [1, N].
    Badness {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        n: u64,
    },
    /// Monte Carlo characteristic function of a digit-sampled measure on F_M.
    Fourier {
        #[arg(long = "M")]
        #[serde(rename = "M")]
        m: u64,
        #[arg(long, default_value = "uniform")]
        weights: String,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Comma list of integers and half-open ranges `a..b`.
        #[arg(long, allow_hyphen_values = true, default_value = "0..16")]
        freqs: String,
    },
    /// Runs the command described by a JSON config or manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cf { .. } => "cf",
            Command::Kconst { .. } => "kconst",
            Command::Threegap { .. } => "threegap",
            Command::Ostrowski { .. } => "ostrowski",
            Command::Shiftseq { .. } => "shiftseq",
            Command::Count { .. } => "count",
            Command::Shifthits { .. } => "shifthits",
            Command::Uniform { .. } => "uniform",
            Command::Sample { .. } => "sample",
            Command::Badness { .. } => "badness",
            Command::Fourier { .. } => "fourier",
            Command::Run { .. } => "run",
        }
    }
}

/// A fully resolved experiment: settings plus one command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    #[serde(flatten)]
    pub settings: Settings,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub library: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub log_base: &'static str,
    pub config: &'a Config,
}

impl<'a> Manifest<'a> {
    pub fn new(config: &'a Config) -> Self {
        Manifest {
            library: "lacuna",
            version: env!("CARGO_PKG_VERSION"),
            rng: RNG_ALGORITHM,
            log_base: "natural",
            config,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] lacuna::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("resource cap: {0}")]
    Cap(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lacuna::Error as E;
        match self {
            CliError::Lib(E::ResourceCap { .. } | E::TooManyPoints { .. }) | CliError::Cap(_) => 3,
            CliError::Lib(E::SearchExhausted { .. }) => 4,
            CliError::Lib(_) | CliError::Invalid(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use lacuna::Error as E;
        match self {
            CliError::Lib(e) => match e {
                E::AmbiguousInterval => "AmbiguousInterval",
                E::IncompatibleFields(..) => "IncompatibleFields",
                E::InsufficientPrecision { .. } => "InsufficientPrecision",
                E::DepthExceedsDigits { .. } => "DepthExceedsDigits",
                E::InputNotIrrational => "InputNotIrrational",
                E::NotQuadratic => "NotQuadratic",
                E::TooManyPoints { .. } => "TooManyPoints",
                E::SearchExhausted { .. } => "SearchExhausted",
                E::ResourceCap { .. } => "ResourceCap",
                E::DomainTooSmall(_) => "DomainTooSmall",
                E::Parse(_) => "Parse",
                E::InvalidArgument(_) => "InvalidArgument",
            },
            CliError::Invalid(_) => "Validation",
            CliError::Cap(_) => "ResourceCap",
            CliError::Io(_) => "Io",
        }
    }

    /// Structured diagnostic, one JSON object.
    pub fn diagnostic(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

/// Turns a JSON config (or a manifest, via its `config` key) into argv, so
/// that files and flags share one parser and one set of defaults.
pub fn config_to_args(json: &serde_json::Value) -> Result<Vec<String>, CliError> {
    let obj = json
        .get("config")
        .unwrap_or(json)
        .as_object()
        .ok_or_else(|| CliError::Invalid("config must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| CliError::Invalid("config needs a \"command\" string".into()))?;
    if command == "run" {
        return Err(CliError::Invalid(
            "a config cannot run another config".into(),
        ));
    }
    const GLOBAL: [&str; 8] = [
        "precision",
        "seed",
        "max-n",
        "max-m",
        "max-samples",
        "checkpoints",
        "format",
        "out",
    ];
    let scalar = |k: &str, v: &serde_json::Value| -> Result<String, CliError> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            serde_json::Value::Array(items) if k == "checkpoints" => items
                .iter()
                .map(|i| match i {
                    serde_json::Value::Number(n) => Ok(n.to_string()),
                    serde_json::Value::String(s) => Ok(s.clone()),
                    _ => Err(CliError::Invalid(format!("bad checkpoint {i}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(|v| v.join(",")),
            _ => Err(CliError::Invalid(format!("unsupported value for {k}: {v}"))),
        }
    };
    let mut global = Vec::new();
    let mut local = Vec::new();
    for (k, v) in obj {
        if k == "command" || v.is_null() {
            continue;
        }
        if k == "checkpoints" && v.as_array().is_some_and(|a| a.is_empty()) {
            continue;
        }
        let target = if GLOBAL.contains(&k.as_str()) {
            &mut global
        } else {
            &mut local
        };
        target.push(format!("--{k}={}", scalar(k, v)?));
    }
    let mut args = vec!["lacuna".to_string()];
    args.extend(global);
    args.push(command.to_string());
    args.extend(local);
    Ok(args)
}

/// Resolves `run --config` into the settings and command it describes,
/// letting explicit flags on the outer command line win.
pub fn load_config(path: &Path, outer: &Cli) -> Result<(Config, Option<PathBuf>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let json: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let args = config_to_args(&json)?;
    let inner = Cli::try_parse_from(&args)
        .map_err(|e| CliError::Invalid(e.to_string().trim().to_string()))?;
    let pick = |o: &SettingsArgs, i: &SettingsArgs| SettingsArgs {
        precision: o.precision.or(i.precision),
        seed: o.seed.or(i.seed),
        max_n: o.max_n.or(i.max_n),
        max_m: o.max_m.or(i.max_m),
        max_samples: o.max_samples.or(i.max_samples),
        checkpoints: o.checkpoints.clone().or(i.checkpoints.clone()),
        format: o.format.or(i.format),
    };
    let settings = pick(&outer.settings, &inner.settings).resolve();
    let out = outer.out.clone().or(inner.out);
    Ok((
        Config {
            settings,
            command: inner.command,
        },
        out,
    ))
}

/// Files written by [`run`], relative to the output directory.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub artifacts: Artifacts,
}

/// Executes `config` and writes all outputs into `out`.
pub fn run(config: &Config, out: &Path) -> Result<RunOutput, CliError> {
    let artifacts = execute(&config.settings, &config.command)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(
        out.join("manifest.json"),
        output::pretty(&Manifest::new(config)),
    )?;
    let mut files = vec!["manifest.json".to_string()];
    files.extend(artifacts.write(out, config.settings.format)?);
    Ok(RunOutput {
        dir: out.to_path_buf(),
        files,
        artifacts,
    })
}

/// Parses argv and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::Invalid(e.to_string().trim().to_string());
            eprintln!("{}", err.diagnostic());
            return 2;
        }
    };
    let resolved = match &cli.command {
        Command::Run { config } => load_config(config, &cli),
        cmd => Ok((
            Config {
                settings: cli.settings.resolve(),
                command: cmd.clone(),
            },
            cli.out.clone(),
        )),
    };
    let result = resolved.and_then(|(config, out)| {
        let out = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        run(&config, &out)
    });
    match result {
        Ok(r) => {
            for line in &r.artifacts.summary {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}
