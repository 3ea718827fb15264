use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mzinet::estimation::sensitivity_report;
use mzinet::figures::{run_figure, FigureName, Scale};
use mzinet::gaussian_oracle::{equivalence_check, Oracle};
use mzinet::network_model::{CoefficientVector, ConfigDocument, SeparableConfig};
use mzinet::optimization::{
    bounds_emom, bounds_eqcr, gain, minimize, Constraint, Objective, OptimizationProblem, SolverOptions, Strategy,
};
use mzinet::spectra::{
    ensemble_heisenberg_saturation, ensemble_optimal_squeezing, ensemble_optimal_variance, fisher_spectrum,
    squeezing_spectrum, EnsembleStats, SpectrumObjective, SpectrumResult,
};
use mzinet::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_PARTIAL: u8 = 4;
const EXIT_ORACLE: u8 = 5;

#[derive(Parser)]
#[command(name = "mzinet", version, about = "Squeezed-light Mach-Zehnder sensor network calculator")]
struct Cli {
    /// Master seed for optimizer restarts and ensembles.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    C1,
    C2,
    C3,
    C4,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Entangled,
    Separable,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Emom,
    Eqcr,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleKind {
    /// Spectral optimum at fixed squeezing.
    Fixed,
    /// Moment optimum minimized over squeezing.
    Squeezing,
    /// Cramér–Rao optimum minimized over squeezing.
    Heisenberg,
}

#[derive(Subcommand)]
enum Command {
    /// Variances of a configuration document.
    Sensitivity {
        /// Entangled configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Separable configuration (JSON).
        #[arg(long)]
        separable: Option<PathBuf>,
        /// Comma-separated coefficients; rescaled to |v|^2 = 1/d.
        #[arg(long)]
        v: String,
    },
    /// Minimize a variance under a resource constraint.
    Optimize {
        #[command(flatten)]
        budget: Budget,
        #[arg(long, value_enum, default_value_t = StrategyArg::Entangled)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Emom)]
        objective: ObjectiveArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Gain factor under a resource constraint.
    Gain {
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Squeezing and Fisher spectra of a configuration document.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
    },
    /// Statistics over Haar-random circuits.
    Ensemble {
        #[arg(long, value_enum, default_value_t = EnsembleKind::Fixed)]
        kind: EnsembleKind,
        #[arg(long)]
        d: usize,
        #[arg(long = "n-t")]
        n_t: f64,
        /// Required for `fixed`.
        #[arg(long = "n-s")]
        n_s: Option<f64>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Emom)]
        objective: ObjectiveArg,
        /// Defaults to the scale's sample count.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Write the dataset behind one figure.
    Figure {
        name: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare the closed forms with the Gaussian-state oracle.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long = "d-max", default_value_t = 4)]
        d_max: usize,
        /// Relative perturbation injected into the oracle's second moments.
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb: f64,
    },
}

#[derive(Args)]
struct Budget {
    #[arg(long, value_enum)]
    constraint: ConstraintArg,
    #[arg(long)]
    v: String,
    #[arg(long = "n-t")]
    n_t: f64,
    /// Squeezed photons (C2-C4).
    #[arg(long = "n-s")]
    n_s: Option<f64>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long = "max-evals", default_value_t = 20_000)]
    max_evals: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long = "exhaustive-signs")]
    exhaustive_signs: bool,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> SolverOptions {
        SolverOptions {
            restarts: self.restarts,
            max_evals: self.max_evals,
            tolerance: self.tolerance,
            seed,
            exhaustive_signs: self.exhaustive_signs,
        }
    }
}

enum Failure {
    Parse(String),
    Domain(Error),
    Io(String),
    Partial(usize),
    Oracle(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(), Failure>;

fn parse_v(s: &str) -> Result<CoefficientVector, Failure> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Parse(format!("v: {e}")))?;
    CoefficientVector::new(xs).map_err(Failure::Domain)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn constraint(budget: &Budget) -> Result<Constraint, Failure> {
    let need = || budget.n_s.ok_or_else(|| Failure::Parse("--n-s is required for this constraint".into()));
    Ok(match budget.constraint {
        ConstraintArg::C1 => Constraint::C1,
        ConstraintArg::C2 => Constraint::C2 { squeezed_photons: need()? },
        ConstraintArg::C3 => Constraint::C3 { squeezed_photons: need()? },
        ConstraintArg::C4 => Constraint::C4 { squeezed_photons: need()? },
    })
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, Value>,
    master_seed: u64,
    tool_version: &'static str,
    started: f64,
    finished: f64,
    outputs: Vec<String>,
}

/// Writes `body` to `out/name` or stdout; returns the path written.
fn emit(out: &Option<PathBuf>, name: &str, body: &str) -> Result<Option<String>, Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Io(e.to_string()))?;
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            print!("{body}");
            Ok(None)
        }
    }
}

fn write_manifest(
    cli: &Cli,
    command: &str,
    parameters: BTreeMap<String, Value>,
    started: f64,
    outputs: Vec<String>,
) -> Outcome {
    let Some(dir) = &cli.out else { return Ok(()) };
    let m = RunManifest {
        command: command.into(),
        parameters,
        master_seed: cli.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        started,
        finished: now(),
        outputs,
    };
    let text = serde_json::to_string_pretty(&m).map_err(|e| Failure::Io(e.to_string()))?;
    fs::create_dir_all(dir).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(dir.join(format!("{command}.manifest.json")), text + "\n").map_err(|e| Failure::Io(e.to_string()))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn spectrum_json(s: &SpectrumResult) -> Value {
    let d = s.eigenvalues.len();
    let vectors: Vec<Vec<f64>> = (0..d).map(|k| s.eigenvectors.column(k).iter().copied().collect()).collect();
    json!({
        "eigenvalues": s.eigenvalues.as_slice(),
        "eigenvectors": vectors,
        "max_eigenvalue": s.max_eigenvalue,
        "optimal_v": s.optimal_v.entries(),
        "optimal_variance": 1.0 / (s.max_eigenvalue * d as f64),
        "degeneracy_classes": s.degeneracy_classes,
        "condition_number": s.condition_number,
    })
}

fn objective(o: ObjectiveArg) -> Objective {
    match o {
        ObjectiveArg::Emom => Objective::Emom,
        ObjectiveArg::Eqcr => Objective::Eqcr,
    }
}

fn run(cli: &Cli) -> Outcome {
    let started = now();
    match &cli.command {
        Command::Sensitivity { config, separable, v } => {
            let v = parse_v(v)?;
            if config.is_none() && separable.is_none() {
                return Err(Failure::Parse("give --config and/or --separable".into()));
            }
            let ent = match config {
                Some(p) => Some(read_json::<ConfigDocument>(p)?.to_config()?),
                None => None,
            };
            let sep = match separable {
                Some(p) => Some(read_json::<SeparableConfig>(p)?),
                None => None,
            };
            let report = sensitivity_report(ent.as_ref(), sep.as_ref(), &v)?;
            let mut value = serde_json::to_value(&report).expect("serializable");
            if let Some(c) = &ent {
                let d = c.d();
                let n_t = c.total_photons();
                let b = bounds_emom(&v, n_t, c.squeezed_photons);
                value["regime"] = json!({
                    "n_t": n_t,
                    "moment_bounds_valid": b.valid,
                    "moment_regime": b.regime,
                    "d": d,
                });
            }
            let outputs = emit(&cli.out, "sensitivity.json", &pretty(&value))?.into_iter().collect();
            write_manifest(cli, "sensitivity", BTreeMap::from([("v".into(), json!(v.entries()))]), started, outputs)
        }
        Command::Optimize { budget, strategy, objective: obj, solver } => {
            let v = parse_v(&budget.v)?;
            let strategy = match strategy {
                StrategyArg::Entangled => Strategy::Entangled,
                StrategyArg::Separable => Strategy::Separable,
            };
            let problem = OptimizationProblem::new(v.clone(), budget.n_t, constraint(budget)?, strategy)?;
            let options = solver.options(cli.seed);
            let result = minimize(&problem, objective(*obj), &options)?;
            let n_s = budget.n_s.unwrap_or(result.arg_squeezed_photons.iter().sum());
            let bounds = match obj {
                ObjectiveArg::Emom => bounds_emom(&v, budget.n_t, n_s),
                ObjectiveArg::Eqcr => bounds_eqcr(&v, budget.n_t, n_s),
            };
            let body = match cli.format {
                Format::Json => pretty(&json!({ "problem": problem, "result": result, "bounds": bounds })),
                Format::Csv => format!(
                    "minimum_variance,solver_status,restarts_used,evaluations,lower,upper,regime_valid\n{},{},{},{},{},{},{}\n",
                    result.minimum_variance,
                    serde_json::to_value(result.solver_status).expect("serializable").as_str().unwrap_or(""),
                    result.restarts_used,
                    result.evaluations,
                    bounds.lower,
                    bounds.upper,
                    bounds.valid
                ),
            };
            let ext = if matches!(cli.format, Format::Json) { "json" } else { "csv" };
            let outputs = emit(&cli.out, &format!("optimize.{ext}"), &body)?.into_iter().collect();
            write_manifest(cli, "optimize", BTreeMap::from([("problem".into(), json!(problem))]), started, outputs)
        }
        Command::Gain { budget, solver } => {
            let v = parse_v(&budget.v)?;
            let report = gain(constraint(budget)?, &v, budget.n_t, &solver.options(cli.seed))?;
            let outputs = emit(&cli.out, "gain.json", &pretty(&report))?.into_iter().collect();
            write_manifest(cli, "gain", BTreeMap::from([("v".into(), json!(v.entries()))]), started, outputs)
        }
        Command::Spectrum { config } => {
            let c = read_json::<ConfigDocument>(config)?.to_config()?;
            let m = squeezing_spectrum(&c)?;
            let f = fisher_spectrum(&c)?;
            let body = pretty(&json!({ "squeezing": spectrum_json(&m), "fisher": spectrum_json(&f) }));
            let outputs = emit(&cli.out, "spectrum.json", &body)?.into_iter().collect();
            write_manifest(cli, "spectrum", BTreeMap::new(), started, outputs)
        }
        Command::Ensemble { kind, d, n_t, n_s, objective: obj, samples } => {
            let samples = samples.unwrap_or(Scale::from(cli.scale).samples());
            let (stats, arg): (EnsembleStats, Option<EnsembleStats>) = match kind {
                EnsembleKind::Fixed => {
                    let n_s = n_s.ok_or_else(|| Failure::Parse("--n-s is required for a fixed ensemble".into()))?;
                    let o = match obj {
                        ObjectiveArg::Emom => SpectrumObjective::Emom,
                        ObjectiveArg::Eqcr => SpectrumObjective::Eqcr,
                    };
                    (ensemble_optimal_variance(*d, *n_t, n_s, samples, cli.seed, o)?, None)
                }
                EnsembleKind::Squeezing => {
                    let (a, b) = ensemble_optimal_squeezing(*d, *n_t, samples, cli.seed)?;
                    (a, Some(b))
                }
                EnsembleKind::Heisenberg => {
                    let (a, b) = ensemble_heisenberg_saturation(*d, *n_t, samples, cli.seed)?;
                    (a, Some(b))
                }
            };
            let (am, ar) = arg.as_ref().map(|a| (a.mean.to_string(), a.rms.to_string())).unwrap_or_default();
            let body = match cli.format {
                Format::Csv => format!(
                    "n_t,mean,rms,optimal_n_s_mean,optimal_n_s_rms,sample_count,seed\n{},{},{},{},{},{},{}\n",
                    n_t, stats.mean, stats.rms, am, ar, stats.sample_count, cli.seed
                ),
                Format::Json => pretty(&json!({ "n_t": n_t, "stats": stats, "optimal_n_s": arg })),
            };
            let ext = if matches!(cli.format, Format::Json) { "json" } else { "csv" };
            let outputs = emit(&cli.out, &format!("ensemble.{ext}"), &body)?.into_iter().collect();
            write_manifest(
                cli,
                "ensemble",
                BTreeMap::from([
                    ("d".into(), json!(d)),
                    ("n_t".into(), json!(n_t)),
                    ("samples".into(), json!(samples)),
                ]),
                started,
                outputs,
            )
        }
        Command::Figure { name, solver } => {
            let fig: FigureName = name.parse().map_err(|e: Error| Failure::Parse(e.to_string()))?;
            let output = run_figure(fig, cli.scale.into(), &solver.options(cli.seed));
            let mut outputs = Vec::new();
            for t in &output.tables {
                let body = match cli.format {
                    Format::Csv => t.to_csv(),
                    Format::Json => pretty(&json!({ "name": t.name, "header": t.header, "rows": t.rows })),
                };
                let ext = if matches!(cli.format, Format::Json) { "json" } else { "csv" };
                if let Some(p) = emit(&cli.out, &format!("{}.{ext}", t.name), &body)? {
                    outputs.push(p);
                }
            }
            write_manifest(cli, fig.as_str(), output.parameters.clone(), started, outputs)?;
            match output.failures() {
                0 => Ok(()),
                n => Err(Failure::Partial(n)),
            }
        }
        Command::OracleCheck { trials, d_max, perturb } => {
            let oracle = if *perturb == 0.0 { Oracle::exact() } else { Oracle::perturbed(*perturb) };
            let report = equivalence_check(*trials, *d_max, cli.seed, &oracle)?;
            let outputs = emit(&cli.out, "oracle_check.json", &pretty(&report))?.into_iter().collect();
            write_manifest(cli, "oracle-check", BTreeMap::from([("trials".into(), json!(trials))]), started, outputs)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Oracle(format!(
                    "max deviations {:e} (QFIM), {:e} (inverse moment matrix) exceed {:e}",
                    report.max_deviation_qfim, report.max_deviation_inverse_moment, report.tolerance
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::Partial(n)) => {
            eprintln!("{n} sweep rows failed or violated an invariant");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(Failure::Oracle(msg)) => {
            eprintln!("oracle breach: {msg}");
            ExitCode::from(EXIT_ORACLE)
        }
    }
}
