//! Command-line front end behind the `pfkit` binary.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 infeasible calibration,
//! 3 bad input, 4 transport cap exceeded.

pub mod analyze;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use analyze::{cmd_attribute_analysis, AnalysisConfig, AnalysisReport, DagwmRequest, OutputFormat};

use crate::error::{invalid, Error, Result};
use crate::mechanisms::{self, CalibratedMechanism, LaplaceTarget};
use crate::pabi::{self, Allocation, CurveMode, PabiSchedule, SgdParams};
use crate::types::{NoiseFamily, NoiseSpec, Norm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_CAP: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Numerical(_) => EXIT_NUMERICAL,
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::InfeasibleAllocation { .. }
        | Error::Unsupported(_)
        | Error::Format(_)
        | Error::Io(_) => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "pfkit", version, about = "Renyi Pufferfish privacy toolkit", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sensitivities of a released column against a secret column of a CSV.
    Analyze(AnalyzeArgs),
    /// Calibrate a mechanism to a privacy target.
    Calibrate(CalibrateArgs),
    /// Privacy loss against the number of noisy iterations.
    Pabi(PabiArgs),
    /// Add noise from a calibrated mechanism to a value.
    Apply(ApplyArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    value_col: String,
    #[arg(long)]
    secret_col: String,
    #[arg(long, default_value = "l2")]
    norm: Norm,
    /// Mass allowed to move beyond the threshold.
    #[arg(long)]
    delta: Option<f64>,
    /// Wasserstein orders, repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    wp: Vec<f64>,
    /// e.g. `cauchy:k=2,lambda=1,q=1,alpha=2`.
    #[arg(long)]
    dagwm: Option<DagwmRequest>,
    /// Declared range `lo:hi` of the released column.
    #[arg(long, value_parser = parse_range)]
    value_range: Option<(f64, f64)>,
    #[arg(long)]
    open_range: bool,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    #[arg(long)]
    no_header: bool,
    /// Missing-value token, repeatable.
    #[arg(long)]
    na: Vec<String>,
    /// e.g. `>50K=1,<=50K=0`.
    #[arg(long, value_delimiter = ',', value_parser = parse_map_entry)]
    value_map: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value = "json")]
    format: AnalyzeFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnalyzeFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismChoice {
    GwmGauss,
    GwmLaplace,
    GawmGauss,
    GawmLaplace,
    Cauchy,
}

#[derive(Debug, Args, Serialize)]
struct CalibrateArgs {
    #[arg(long, value_enum)]
    mechanism: MechanismChoice,
    #[arg(long, conflicts_with = "report")]
    sensitivity: Option<f64>,
    /// Analysis report to take the sensitivity from.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Laplace scale for a finite-order Laplace target.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RhoPreset {
    Const,
    First,
    InvT,
    InvT2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PabiMode {
    PerStep,
    Improved,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CurveFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PabiArgs {
    /// Correlation of each step's data with the secret.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["rho_preset", "shifts"])]
    rho: Vec<f64>,
    #[arg(long, value_enum, requires = "steps", conflicts_with = "shifts")]
    rho_preset: Option<RhoPreset>,
    #[arg(long)]
    steps: Option<usize>,
    /// Per-step shifts in parameter space, used as given.
    #[arg(long, value_delimiter = ',')]
    shifts: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    c_sup: f64,
    #[arg(long, default_value_t = 1.0)]
    diff_norm: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "improved")]
    mode: PabiMode,
    #[arg(long, value_enum, default_value = "csv")]
    format: CurveFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    /// JSON file holding a calibrated mechanism (bare or as written by
    /// `calibrate`).
    #[arg(long)]
    mechanism: PathBuf,
    /// Comma-separated query value.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    value: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
    if !(lo <= hi) {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

fn parse_delimiter(s: &str) -> std::result::Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got '{s}'")),
    }
}

fn parse_map_entry(p: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = p.rsplit_once('=').ok_or_else(|| format!("expected label=value, got '{p}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad number in '{p}'"))?;
    Ok((k.trim().to_string(), v))
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run_analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = AnalysisConfig::new(a.input, &a.value_col, &a.secret_col);
    cfg.norm = a.norm;
    cfg.delta = a.delta;
    cfg.p_list = a.wp;
    cfg.dagwm = a.dagwm;
    cfg.value_range = a.value_range;
    cfg.open_range = a.open_range;
    cfg.delimiter = a.delimiter;
    cfg.no_header = a.no_header;
    cfg.na_values = a.na;
    cfg.value_map = a.value_map;
    cfg.output = match a.format {
        AnalyzeFormat::Json => OutputFormat::Json,
        AnalyzeFormat::Table => OutputFormat::Table,
    };
    let report = cmd_attribute_analysis(&cfg)?;
    let text = match cfg.output {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Table => report.to_table(),
    };
    emit(out, a.out.as_ref(), &text)
}

/// Output of `pfkit calibrate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutput {
    pub mechanism: CalibratedMechanism,
    /// Per-coordinate noise variance, when finite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    pub inputs: serde_json::Value,
}

fn noise_variance(noise: &NoiseSpec) -> Option<f64> {
    match noise.family() {
        NoiseFamily::Gaussian { sigma } => Some(sigma * sigma),
        NoiseFamily::Laplace { scale } => Some(2.0 * scale * scale),
        NoiseFamily::GeneralizedCauchy { k, lambda } => {
            (k > 3.0).then(|| 1.0 / (lambda * lambda * (k - 3.0)))
        }
    }
}

fn report_sensitivity(path: &PathBuf, choice: MechanismChoice, order: Option<f64>) -> Result<f64> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read report '{}': {e}", path.display())))?;
    let report: AnalysisReport = serde_json::from_str(&text)?;
    let s = &report.sensitivities;
    match choice {
        MechanismChoice::GwmGauss | MechanismChoice::GwmLaplace => Ok(s.delta_g),
        MechanismChoice::GawmGauss | MechanismChoice::GawmLaplace => s
            .delta_g_delta
            .map(|d| d.value)
            .ok_or_else(|| invalid("report has no thresholded sensitivity; rerun analyze with --delta")),
        MechanismChoice::Cauchy => {
            let p = order.ok_or_else(|| invalid("cauchy needs --k and --alpha"))?;
            s.wp.iter().find(|w| (w.p - p).abs() < 1e-9).map(|w| w.value).ok_or_else(|| {
                invalid(format!("report has no W_{p} sensitivity; rerun analyze with --wp {p}"))
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_calibrate_value(
    choice: MechanismChoice,
    sensitivity: f64,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    delta: Option<f64>,
    dim: usize,
    scale: Option<f64>,
    k: Option<f64>,
    lambda: Option<f64>,
    q: f64,
) -> Result<CalibratedMechanism> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| invalid(format!("{choice:?} needs --{name}")));
    match choice {
        MechanismChoice::GwmGauss => {
            mechanisms::gwm_gaussian(sensitivity, need(alpha, "alpha")?, need(epsilon, "epsilon")?, dim)
        }
        MechanismChoice::GwmLaplace => {
            let target = match (scale, epsilon) {
                (Some(scale), _) => LaplaceTarget::Renyi { alpha: need(alpha, "alpha")?, scale },
                (None, Some(epsilon)) => LaplaceTarget::Pure { epsilon },
                (None, None) => return Err(invalid("gwm-laplace needs --epsilon, or --alpha with --scale")),
            };
            mechanisms::gwm_laplace(sensitivity, target, dim)
        }
        MechanismChoice::GawmGauss => mechanisms::gawm_gaussian(
            sensitivity,
            need(alpha, "alpha")?,
            need(epsilon, "epsilon")?,
            need(delta, "delta")?,
            dim,
        ),
        MechanismChoice::GawmLaplace => {
            mechanisms::gawm_laplace(sensitivity, need(epsilon, "epsilon")?, need(delta, "delta")?, dim)
        }
        MechanismChoice::Cauchy => mechanisms::cauchy_mechanism(
            sensitivity,
            dim,
            need(k, "k")?,
            need(lambda, "lambda")?,
            q,
            need(alpha, "alpha")?,
        ),
    }
}

fn run_calibrate(a: CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let sensitivity = match (a.sensitivity, &a.report) {
        (Some(s), _) => s,
        (None, Some(path)) => {
            let order = match (a.k, a.alpha) {
                (Some(k), Some(alpha)) => Some(a.dim as f64 * k * a.q * (alpha - 1.0)),
                _ => None,
            };
            report_sensitivity(path, a.mechanism, order)?
        }
        (None, None) => return Err(invalid("calibrate needs --sensitivity or --report")),
    };
    let mechanism = cmd_calibrate_value(
        a.mechanism,
        sensitivity,
        a.alpha,
        a.epsilon,
        a.delta,
        a.dim,
        a.scale,
        a.k,
        a.lambda,
        a.q,
    )?;
    let mut inputs = serde_json::to_value(&a)?;
    inputs["sensitivity"] = serde_json::json!(sensitivity);
    let output = CalibrationOutput { variance: noise_variance(&mechanism.noise), mechanism, inputs };
    emit(out, a.out.as_ref(), &to_json(&output)?)
}

fn preset_rho(preset: RhoPreset, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|t| {
            let t = t as f64;
            match preset {
                RhoPreset::Const => 1.0,
                RhoPreset::First => {
                    if t == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                RhoPreset::InvT => 1.0 / t,
                RhoPreset::InvT2 => 1.0 / (t * t),
            }
        })
        .collect()
}

/// Loss rows `(T, loss)` for explicit shifts under N(0, σ²) noise.
pub fn curve_from_shifts(
    shifts: &[f64],
    sigma: f64,
    alpha: f64,
    mode: CurveMode,
) -> Result<Vec<(usize, f64)>> {
    let noise = NoiseSpec::gaussian(sigma, 1)?;
    (1..=shifts.len())
        .map(|t| {
            let prefix = &shifts[..t];
            let loss = match mode {
                CurveMode::Improved => pabi::improved_uniform_bound(prefix, &noise, alpha)?,
                CurveMode::PerStep => {
                    let s = PabiSchedule::new(prefix.to_vec(), Allocation::Naive, vec![noise], alpha)?;
                    pabi::pabi_bound(&s)?.loss
                }
            };
            Ok((t, loss))
        })
        .collect()
}

#[derive(Serialize)]
struct CurveRow {
    t: usize,
    loss: f64,
}

fn run_pabi(a: PabiArgs, out: &mut dyn Write) -> Result<()> {
    let mode = match a.mode {
        PabiMode::PerStep => CurveMode::PerStep,
        PabiMode::Improved => CurveMode::Improved,
    };
    let curve = if !a.shifts.is_empty() {
        curve_from_shifts(&a.shifts, a.sigma, a.alpha, mode)?
    } else {
        let rho = match a.rho_preset {
            Some(p) => preset_rho(p, a.steps.unwrap_or(0)),
            None => a.rho,
        };
        if rho.is_empty() {
            return Err(invalid("pabi needs --rho, --rho-preset with --steps, or --shifts"));
        }
        let params = SgdParams {
            lipschitz: a.lipschitz,
            eta: a.eta,
            sigma: a.sigma,
            beta_smooth: a.beta,
            c_sup: a.c_sup,
            diff_ab: vec![a.diff_norm],
        };
        pabi::privacy_loss_curve(&rho, &params, a.alpha, mode)?
    };
    let text = match a.format {
        CurveFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "loss"])?;
            for (t, loss) in &curve {
                w.write_record([t.to_string(), loss.to_string()])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Format(e.to_string()))?)
                .map_err(|e| Error::Format(e.to_string()))?
        }
        CurveFormat::Json => {
            to_json(&curve.iter().map(|&(t, loss)| CurveRow { t, loss }).collect::<Vec<_>>())?
        }
    };
    emit(out, a.out.as_ref(), &text)
}

/// Reads a mechanism written either bare or wrapped in a calibration output.
pub fn read_mechanism(text: &str) -> Result<CalibratedMechanism> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let inner = match value.get("mechanism") {
        Some(m) if m.is_object() => m.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(|e| Error::Format(format!("malformed mechanism: {e}")))
}

fn run_apply(a: ApplyArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.mechanism)
        .map_err(|e| Error::Format(format!("cannot read '{}': {e}", a.mechanism.display())))?;
    let mech = read_mechanism(&text)?;
    let noised = mechanisms::apply(&mech, &a.value, a.seed)?;
    let mut s = serde_json::to_string(&noised)?;
    s.push('\n');
    emit(out, None, &s)
}

fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let args = config::expand(args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                err.write_all(text.as_bytes())?;
            } else {
                out.write_all(text.as_bytes())?;
            }
            return Ok(code);
        }
    };
    match cli.command {
        Command::Analyze(a) => run_analyze(a, out)?,
        Command::Calibrate(a) => run_calibrate(a, out)?,
        Command::Pabi(a) => run_pabi(a, out)?,
        Command::Apply(a) => run_apply(a, out)?,
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit
/// code; errors are reported on `err`.
pub fn main_with_args(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
