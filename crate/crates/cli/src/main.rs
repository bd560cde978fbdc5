//! `hgp` — premium principles on Orlicz spaces from the command line.
//!
//! Commands: `catalog`, `norm`, `premium`, `es`, `dual`, `stability`.
//! Laws come from CSV files (`--input`) or built-in quantile families
//! (`--quantile`); gauges are addressed as `--phi power --p 2.0` and so on.
//!
//! Exit codes are a stable contract: 0 success/pass, 1 assertion failure,
//! 2 input or configuration error, 3 domain rejection (the law lies outside
//! the requested Orlicz space or an integral cannot be certified).

mod config;
mod data;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use haezendonck::stability::{self, PhiWeakVariant};
use haezendonck::{duality, families, CoreError, RandomVariable};
use serde::Serialize;

use config::{core_error_is_domain, CommonOpts, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration (exit 2).
    Input(String),
    /// The computation rejected the instance (exit 3).
    Domain(String),
    /// An experiment or gap check failed its assertions (exit 1).
    AssertionFailed(String),
    Internal(String),
}

impl CliError {
    fn from_core(e: CoreError) -> CliError {
        if core_error_is_domain(&e) {
            CliError::Domain(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }

    fn from_config(e: CoreError) -> CliError {
        CliError::Input(e.to_string())
    }

    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::AssertionFailed(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Domain(_) => ExitCode::from(3),
            CliError::Internal(_) => ExitCode::from(4),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "hgp",
    about = "Haezendonck-Goovaerts premium principles on Orlicz spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in Orlicz gauges
    Catalog {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Luxemburg norm of the input law (scaled norm when --alpha is given)
    Norm {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// The premium: inf over shifts m of m + N_alpha((X - m)^+)
    Premium {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Expected Shortfall at level --alpha
    Es {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Primal-dual report on a finite space (exit 1 when the gap exceeds --duality-gap)
    Dual {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a named stability experiment and write its JSON + CSV reports
    Stability {
        /// fatou | lebesgue-failure | phi-weak | dist-counterexample
        name: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog { opts } => cmd_catalog(&opts),
        Command::Norm { opts } => cmd_norm(&opts),
        Command::Premium { opts } => cmd_premium(&opts),
        Command::Es { opts } => cmd_es(&opts),
        Command::Dual { opts } => cmd_dual(&opts),
        Command::Stability { name, opts } => cmd_stability(&name, &opts),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(msg) => eprintln!("error (input): {msg}"),
                CliError::Domain(msg) => eprintln!("error (domain): {msg}"),
                CliError::AssertionFailed(msg) => eprintln!("failed: {msg}"),
                CliError::Internal(msg) => eprintln!("internal error: {msg}"),
            }
            e.exit_code()
        }
    }
}

/// The law selected by the configuration; `norm`/`premium`/`es`/`dual`
/// require one.
fn load_variable(cfg: &RunConfig) -> Result<(RandomVariable, String), CliError> {
    if let Some(path) = &cfg.input {
        let x = data::read_discrete_csv(path)?;
        return Ok((x.into(), path.display().to_string()));
    }
    if let Some(q) = &cfg.quantile {
        return Ok((
            RandomVariable::Quantile(q.clone()),
            cfg.quantile_label.clone().unwrap_or_default(),
        ));
    }
    Err(CliError::Input(
        "no input law: pass --input <csv> or --quantile <family>".into(),
    ))
}

fn cmd_catalog(opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    #[derive(Serialize)]
    struct Entry {
        name: String,
        #[serde(skip_serializing_if = "std::collections::BTreeMap::is_empty")]
        params: std::collections::BTreeMap<String, f64>,
        delta2: bool,
        finite_valued: bool,
        inverse_at_half: f64,
    }
    let entries: Vec<Entry> = haezendonck::OrliczFunction::catalog()
        .into_iter()
        .map(|f| {
            let d = f.descriptor();
            Entry {
                name: d.name,
                params: d.params,
                delta2: f.is_delta2(),
                finite_valued: f.finite_valued(),
                inverse_at_half: haezendonck::Gauge::generalized_inverse(&f, 0.5),
            }
        })
        .collect();
    let json = report::emit(
        "catalog",
        &cfg.phi,
        &cfg.echo(),
        None,
        !cfg.no_timestamp,
        entries,
    )?;
    println!("{json}");
    Ok(())
}

fn cmd_norm(opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    let (x, label) = load_variable(&cfg)?;
    let lux = haezendonck::luxemburg_norm_with(&x, &cfg.phi, cfg.tolerances.bisection_rel)
        .map_err(CliError::from_core)?;
    let scaled = haezendonck::n_alpha_with(&x, &cfg.phi, cfg.alpha, cfg.tolerances.bisection_rel)
        .map_err(CliError::from_core)?;
    #[derive(Serialize)]
    struct NormReport {
        luxemburg: haezendonck::NormResult,
        alpha: f64,
        scaled: haezendonck::NormResult,
    }
    let json = report::emit(
        "norm",
        &cfg.phi,
        &cfg.echo(),
        Some(&label),
        !cfg.no_timestamp,
        NormReport {
            luxemburg: lux,
            alpha: cfg.alpha,
            scaled,
        },
    )?;
    println!("{json}");
    Ok(())
}

fn cmd_premium(opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    let (x, label) = load_variable(&cfg)?;
    let result = haezendonck::premium_with(&x, &cfg.phi, cfg.alpha, cfg.tolerances)
        .map_err(CliError::from_core)?;
    #[derive(Serialize)]
    struct PremiumReport {
        value: f64,
        m_star: f64,
        inner_norm: f64,
        iterations: u32,
        alpha: f64,
    }
    let json = report::emit(
        "premium",
        &cfg.phi,
        &cfg.echo(),
        Some(&label),
        !cfg.no_timestamp,
        PremiumReport {
            value: result.value,
            m_star: result.m_star,
            inner_norm: result.inner_norm,
            iterations: result.iterations,
            alpha: cfg.alpha,
        },
    )?;
    println!("{json}");
    Ok(())
}

fn cmd_es(opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    let (x, label) = load_variable(&cfg)?;
    let value =
        haezendonck::expected_shortfall(&x, cfg.alpha).map_err(CliError::from_core)?;
    #[derive(Serialize)]
    struct EsReport {
        value: f64,
        alpha: f64,
    }
    let json = report::emit(
        "es",
        &cfg.phi,
        &cfg.echo(),
        Some(&label),
        !cfg.no_timestamp,
        EsReport {
            value,
            alpha: cfg.alpha,
        },
    )?;
    println!("{json}");
    Ok(())
}

fn cmd_dual(opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    let (x, label) = load_variable(&cfg)?;
    let discrete = match &x {
        RandomVariable::Discrete(d) => d.clone(),
        _ => {
            return Err(CliError::Input(
                "the dual command needs a discrete law (CSV input)".into(),
            ))
        }
    };
    let rep = duality::primal_dual_report(&discrete, &cfg.phi, cfg.alpha)
        .map_err(CliError::from_core)?;
    let gap_ok = rep.gap.abs() <= cfg.duality_gap;
    let json = report::emit(
        "dual",
        &cfg.phi,
        &cfg.echo(),
        Some(&label),
        !cfg.no_timestamp,
        &rep,
    )?;
    println!("{json}");
    if !gap_ok {
        return Err(CliError::AssertionFailed(format!(
            "primal-dual gap {} exceeds {}",
            rep.gap, cfg.duality_gap
        )));
    }
    Ok(())
}

fn default_quantile(cfg: &RunConfig) -> Result<haezendonck::QuantileRV, CliError> {
    match &cfg.quantile {
        Some(q) => Ok(q.clone()),
        None => families::log_singular(1.0).map_err(CliError::from_config),
    }
}

fn cmd_stability(name: &str, opts: &CommonOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(opts)?;
    // per-experiment defaults: the lsc runs need long schedules for their
    // convergence tolerances, the others stay short
    let n_max = cfg.n_max.unwrap_or(match name {
        "fatou" => 30,
        "phi-weak" => 4096,
        "dist-counterexample" => 100,
        _ => 20,
    });
    let mut reports: Vec<(String, stability::ExperimentReport)> = Vec::new();
    match name {
        "fatou" => {
            let base = default_quantile(&cfg)?;
            let spec = stability::truncation_spec(base, "truncations");
            let rep = stability::run_fatou(&spec, &cfg.phi, cfg.alpha, n_max)
                .map_err(CliError::from_core)?;
            reports.push(("fatou".into(), rep));
        }
        "lebesgue-failure" => {
            let rep = stability::run_lebesgue_failure(&cfg.phi, cfg.alpha, n_max)
                .map_err(CliError::from_core)?;
            reports.push(("lebesgue-failure".into(), rep));
        }
        "phi-weak" => {
            if cfg.phi.is_delta2() {
                let spec = stability::scaled_spec(default_quantile(&cfg)?, "scaled", 1);
                let rep =
                    stability::run_phi_weak(PhiWeakVariant::Lsc(spec), &cfg.phi, cfg.alpha, n_max)
                        .map_err(CliError::from_core)?;
                reports.push(("phi-weak-lsc".into(), rep));
            } else {
                let spec = stability::scaled_spec(
                    stability::normalized_log_singular().map_err(CliError::from_core)?,
                    "scaled-normalized-log",
                    2,
                );
                let lsc =
                    stability::run_phi_weak(PhiWeakVariant::Lsc(spec), &cfg.phi, cfg.alpha, n_max)
                        .map_err(CliError::from_core)?;
                reports.push(("phi-weak-lsc".into(), lsc));
                let failure = stability::run_phi_weak(
                    PhiWeakVariant::ContinuityFailure,
                    &cfg.phi,
                    cfg.alpha,
                    n_max.min(24),
                )
                .map_err(CliError::from_core)?;
                reports.push(("phi-weak-failure".into(), failure));
            }
        }
        "dist-counterexample" => {
            let rep = stability::run_dist_counterexample(&cfg.phi, cfg.alpha, n_max)
                .map_err(CliError::from_core)?;
            reports.push(("dist-counterexample".into(), rep));
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown experiment '{other}'; valid names: fatou, lebesgue-failure, phi-weak, \
                 dist-counterexample"
            )))
        }
    }

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create out-dir: {e}")))?;
    let mut all_passed = true;
    for (stem, mut rep) in reports {
        if cfg.no_timestamp {
            rep.runtime_ms = None;
        }
        all_passed &= rep.passed;
        let json = report::emit(
            "stability",
            &cfg.phi,
            &cfg.echo(),
            Some(&rep.name.clone()),
            !cfg.no_timestamp,
            &rep,
        )?;
        let json_path: PathBuf = cfg.out_dir.join(format!("{stem}.report.json"));
        std::fs::write(&json_path, &json)
            .map_err(|e| CliError::Internal(format!("cannot write report: {e}")))?;
        report::write_rows_csv(&cfg.out_dir.join(format!("{stem}.csv")), &rep.rows)?;
        if let Some(contrast) = &rep.contrast_rows {
            report::write_rows_csv(&cfg.out_dir.join(format!("{stem}-contrast.csv")), contrast)?;
        }
        println!("{json}");
    }
    if !all_passed {
        return Err(CliError::AssertionFailed(
            "one or more experiment assertions failed".into(),
        ));
    }
    Ok(())
}
