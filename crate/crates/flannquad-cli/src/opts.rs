//! Option resolution: command-line flags override config-file values,
//! which override corpus-entry values, which override the defaults.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use flannquad::expr::{parse, Integrand};
use flannquad::trainer::{BasisSpec, LearningRate, TrainingConfig, WeightInit};

use crate::corpus;
use crate::error::CliError;

/// Relative tolerance for the reference-integrator columns.
pub const REF_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleOpt {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitOpt {
    /// Uniform samples in [-0.5, 0.5) from the seeded generator.
    Uniform,
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainerKind {
    /// Full-batch gradient descent.
    Gd,
    /// Exact least-squares solve of the same loss.
    Ls,
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    /// Integrand expression in x, e.g. "sqrt(1+x^2)"
    #[arg(long = "f", value_name = "EXPR")]
    pub function: Option<String>,

    /// Use a built-in corpus entry (see `corpus list`) for the function
    /// and interval
    #[arg(long, conflicts_with = "function")]
    pub name: Option<String>,

    /// Lower integration limit
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Upper integration limit
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,

    /// JSON config file; flags given here override its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Number of interior training points
    #[arg(long)]
    pub k: Option<usize>,

    /// Learning rate: a positive number, or "auto" for 1.8/lambda_max
    #[arg(long)]
    pub eta: Option<String>,

    /// Number of links (the highest monomial power)
    #[arg(long)]
    pub degree: Option<usize>,

    /// Iteration budget
    #[arg(long)]
    pub iters: Option<usize>,

    /// Stop once the training error reaches this value
    #[arg(long)]
    pub tol: Option<f64>,

    /// Remap the training interval onto (0,1) inside each link
    #[arg(long, value_enum)]
    pub scale: Option<ScaleOpt>,

    /// Seed for the weight initialization
    #[arg(long)]
    pub seed: Option<u64>,

    /// Weight initialization scheme
    #[arg(long, value_enum)]
    pub init: Option<InitOpt>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write results here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Save the trained model as JSON
    #[arg(long = "save-model", value_name = "PATH")]
    pub save_model: Option<PathBuf>,

    /// Load a previously saved model instead of training
    #[arg(long = "load-model", value_name = "PATH")]
    pub load_model: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    function: Option<String>,
    a: Option<f64>,
    b: Option<f64>,
    training: Option<FileTraining>,
    output: Option<PathBuf>,
    format: Option<FileFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTraining {
    k: Option<usize>,
    eta: Option<FileEta>,
    degree: Option<usize>,
    scale: Option<bool>,
    max_iterations: Option<usize>,
    tolerance: Option<f64>,
    seed: Option<u64>,
    init: Option<FileInit>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FileEta {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FileInit {
    Zeros,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FileFormat {
    Csv,
    Json,
}

/// Everything a command needs, after merging all the sources.
pub struct ResolvedRun {
    pub integrand: Option<Integrand>,
    pub a: f64,
    pub b: f64,
    pub training: TrainingConfig,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub save_model: Option<PathBuf>,
    pub load_model: Option<PathBuf>,
}

pub fn resolve(opts: &CommonOpts) -> Result<ResolvedRun, CliError> {
    let file: FileConfig = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config file: {e}")))?
        }
        None => FileConfig::default(),
    };
    let file_training = file.training.unwrap_or_default();

    let entry = match &opts.name {
        Some(name) => Some(corpus::find(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown corpus entry `{name}`; run `flannquad corpus list`"
            ))
        })?),
        None => None,
    };

    let source = opts
        .function
        .clone()
        .or_else(|| entry.as_ref().map(|e| e.expression.to_string()))
        .or(file.function);
    let integrand = match &source {
        Some(text) => Some(parse(text)?),
        None => None,
    };

    let a = opts
        .a
        .or_else(|| entry.as_ref().map(|e| e.a))
        .or(file.a);
    let b = opts
        .b
        .or_else(|| entry.as_ref().map(|e| e.b))
        .or(file.b);

    // A loaded model carries its own domain; limits may then be omitted.
    let (a, b) = match (a, b, &opts.load_model) {
        (Some(a), Some(b), _) => (a, b),
        (None, None, Some(_)) => (f64::NAN, f64::NAN),
        _ => {
            return Err(CliError::Usage(
                "integration limits are required: pass --a and --b, or --name, \
                 or a config file that sets them"
                    .into(),
            ))
        }
    };
    if a.is_finite() && b.is_finite() && !(a < b) {
        return Err(CliError::Usage(format!(
            "interval must satisfy a < b, got a = {a}, b = {b}"
        )));
    }

    let eta = match opts.eta.as_deref() {
        Some("auto") => LearningRate::Auto,
        Some(text) => {
            let value: f64 = text.parse().map_err(|_| {
                CliError::Usage(format!("--eta must be a number or \"auto\", got `{text}`"))
            })?;
            LearningRate::Fixed(value)
        }
        None => match file_training.eta {
            Some(FileEta::Fixed(v)) => LearningRate::Fixed(v),
            Some(FileEta::Named(name)) if name == "auto" => LearningRate::Auto,
            Some(FileEta::Named(name)) => {
                return Err(CliError::Config(format!(
                    "training.eta must be a number or \"auto\", got `{name}`"
                )))
            }
            None => LearningRate::Auto,
        },
    };

    let init = match opts.init {
        Some(InitOpt::Zeros) => WeightInit::Zeros,
        Some(InitOpt::Uniform) => WeightInit::default(),
        None => match file_training.init {
            Some(FileInit::Zeros) => WeightInit::Zeros,
            Some(FileInit::Uniform { lo, hi }) => WeightInit::Uniform { lo, hi },
            None => WeightInit::default(),
        },
    };

    let defaults = TrainingConfig::default();
    let training = TrainingConfig {
        k: opts.k.or(file_training.k).unwrap_or(defaults.k),
        eta,
        max_iterations: opts
            .iters
            .or(file_training.max_iterations)
            .unwrap_or(defaults.max_iterations),
        tolerance: opts
            .tol
            .or(file_training.tolerance)
            .unwrap_or(defaults.tolerance),
        init,
        seed: opts.seed.or(file_training.seed).unwrap_or(defaults.seed),
        basis: BasisSpec {
            degree: opts
                .degree
                .or(file_training.degree)
                .unwrap_or(defaults.basis.degree),
            scale_to_domain: match opts.scale {
                Some(ScaleOpt::On) => true,
                Some(ScaleOpt::Off) => false,
                None => file_training
                    .scale
                    .unwrap_or(defaults.basis.scale_to_domain),
            },
        },
    };
    training.validate()?;

    let format = opts.format.unwrap_or(match file.format {
        Some(FileFormat::Json) => OutputFormat::Json,
        _ => OutputFormat::Csv,
    });

    if opts.load_model.is_some() && opts.save_model.is_some() {
        return Err(CliError::Usage(
            "--load-model and --save-model cannot be combined".into(),
        ));
    }

    Ok(ResolvedRun {
        integrand,
        a,
        b,
        training,
        format,
        output: opts.output.clone().or(file.output),
        save_model: opts.save_model.clone(),
        load_model: opts.load_model.clone(),
    })
}
