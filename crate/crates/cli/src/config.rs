//! Run configuration: command-line flags merged over an optional JSON config
//! file (flags win), resolved into the gauge, level, tolerances, and input.

use std::path::PathBuf;

use clap::Args;
use haezendonck::{families, CoreError, OrliczFunction, QuantileRV, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// Gauge name: identity | power | exponential | square-exponential | kinked-linear
    #[arg(long)]
    pub phi: Option<String>,

    /// Power exponent (for --phi power)
    #[arg(long)]
    pub p: Option<f64>,

    /// Kink location in [0, 1) (for --phi kinked-linear)
    #[arg(long)]
    pub a: Option<f64>,

    /// Confidence level in (0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,

    /// CSV input: `value,prob` rows, or one `value` per row for equal weights
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Built-in quantile family: log-singular | power-tail | bounded-uniform
    #[arg(long)]
    pub quantile: Option<String>,

    /// Scale parameter of the quantile family
    #[arg(long)]
    pub scale: Option<f64>,

    /// Tail exponent of the power-tail family
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Lower endpoint of the bounded-uniform family
    #[arg(long)]
    pub lo: Option<f64>,

    /// Upper endpoint of the bounded-uniform family
    #[arg(long)]
    pub hi: Option<f64>,

    /// Sequence length for stability experiments
    #[arg(long)]
    pub n_max: Option<u32>,

    /// Seed for randomized verification (weak-duality sampling)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Directory for experiment reports
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Omit timestamps and runtimes so reports are byte-reproducible
    #[arg(long)]
    pub no_timestamp: bool,

    /// Relative tolerance of the norm bisection
    #[arg(long)]
    pub bisection_rel: Option<f64>,

    /// Absolute tolerance of the premium minimizer
    #[arg(long)]
    pub minimizer_abs: Option<f64>,

    /// Acceptable primal-dual gap for the dual command's exit status
    #[arg(long)]
    pub duality_gap: Option<f64>,

    /// JSON config file; explicit flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// JSON shape of the optional config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub phi: Option<PhiConfig>,
    pub alpha: Option<f64>,
    pub tolerances: Option<TolConfig>,
    pub input: Option<PathBuf>,
    pub quantile: Option<QuantileConfig>,
    pub n_max: Option<u32>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PhiConfig {
    pub name: String,
    pub p: Option<f64>,
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TolConfig {
    pub bisection_rel: Option<f64>,
    pub minimizer_abs: Option<f64>,
    pub duality_gap: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct QuantileConfig {
    pub family: String,
    pub scale: Option<f64>,
    pub gamma: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Fully resolved configuration.
pub struct RunConfig {
    pub phi: OrliczFunction,
    pub alpha: f64,
    pub tolerances: Tolerances,
    pub duality_gap: f64,
    pub input: Option<PathBuf>,
    pub quantile: Option<QuantileRV>,
    pub quantile_label: Option<String>,
    pub n_max: Option<u32>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub no_timestamp: bool,
}

/// Echo of the effective configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub alpha: f64,
    pub seed: u64,
    pub tolerances: ToleranceEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceEcho {
    pub bisection_rel: f64,
    pub minimizer_abs: f64,
    pub duality_gap: f64,
}

impl RunConfig {
    pub fn resolve(opts: &CommonOpts) -> Result<RunConfig, CliError> {
        let file: FileConfig = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Input(format!("malformed config {}: {e}", path.display()))
                })?
            }
            None => FileConfig::default(),
        };

        let phi_name = opts
            .phi
            .clone()
            .or_else(|| file.phi.as_ref().map(|p| p.name.clone()))
            .unwrap_or_else(|| "identity".to_string());
        let p = opts.p.or(file.phi.as_ref().and_then(|c| c.p));
        let a = opts.a.or(file.phi.as_ref().and_then(|c| c.a));
        let phi = OrliczFunction::by_name(&phi_name, p, a).map_err(CliError::from_config)?;

        let alpha = opts.alpha.or(file.alpha).unwrap_or(0.5);
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(CliError::Input(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }

        let defaults = Tolerances::default();
        let ft = file.tolerances.clone().unwrap_or(TolConfig {
            bisection_rel: None,
            minimizer_abs: None,
            duality_gap: None,
        });
        let bisection_rel = opts
            .bisection_rel
            .or(ft.bisection_rel)
            .unwrap_or(defaults.bisection_rel);
        let minimizer_abs = opts
            .minimizer_abs
            .or(ft.minimizer_abs)
            .unwrap_or(defaults.minimizer_abs);
        let duality_gap = opts.duality_gap.or(ft.duality_gap).unwrap_or(1e-3);
        for (name, v) in [
            ("bisection-rel", bisection_rel),
            ("minimizer-abs", minimizer_abs),
            ("duality-gap", duality_gap),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Input(format!("{name} must be positive, got {v}")));
            }
        }

        let input = opts.input.clone().or(file.input);
        let quantile_name = opts
            .quantile
            .clone()
            .or_else(|| file.quantile.as_ref().map(|q| q.family.clone()));
        if input.is_some() && quantile_name.is_some() {
            return Err(CliError::Input(
                "choose either --input or --quantile, not both".into(),
            ));
        }
        let (quantile, quantile_label) = match quantile_name {
            Some(name) => {
                let fq = file.quantile.as_ref();
                let rv = families::by_name(
                    &name,
                    opts.scale.or(fq.and_then(|q| q.scale)),
                    opts.gamma.or(fq.and_then(|q| q.gamma)),
                    opts.lo.or(fq.and_then(|q| q.lo)),
                    opts.hi.or(fq.and_then(|q| q.hi)),
                )
                .map_err(CliError::from_config)?;
                let label = rv.label().to_string();
                (Some(rv), Some(label))
            }
            None => (None, None),
        };

        Ok(RunConfig {
            phi,
            alpha,
            tolerances: Tolerances {
                bisection_rel,
                minimizer_abs,
            },
            duality_gap,
            input,
            quantile,
            quantile_label,
            n_max: opts.n_max.or(file.n_max),
            seed: opts.seed.or(file.seed).unwrap_or(0),
            out_dir: opts
                .out_dir
                .clone()
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            no_timestamp: opts.no_timestamp,
        })
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            alpha: self.alpha,
            seed: self.seed,
            tolerances: ToleranceEcho {
                bisection_rel: self.tolerances.bisection_rel,
                minimizer_abs: self.tolerances.minimizer_abs,
                duality_gap: self.duality_gap,
            },
        }
    }
}

pub fn core_error_is_domain(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::NotInLPhi
            | CoreError::DivergentTail
            | CoreError::Inconclusive { .. }
            | CoreError::YoungClassViolation(_)
    )
}
