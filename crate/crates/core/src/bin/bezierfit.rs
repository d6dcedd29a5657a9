use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use bezierfit::experiment::{emit_report, run_experiment, write_report, ExperimentConfig, Method, ProblemKind, ReportFormat};
use bezierfit::fit::{fit_all_at_once, fit_inductive_skeleton, TrainingSet};
use bezierfit::problems::{birthwt, draw_training_set, GroupLasso, Med, Synthetic, DEFAULT_EPS};
use bezierfit::risk::{aao_risk, equal_allocation, isk_risk_coefficients, optimal_allocation};
use bezierfit::sample_csv::{load_training_set, save_training_set, write_training_set};
use bezierfit::{Error, Result};

#[derive(Parser)]
#[command(name = "bezierfit", version, about = "Bezier simplex fitting of Pareto fronts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic risks of both estimators and the optimal allocation.
    Risk {
        #[arg(long = "M")]
        dim: usize,
        #[arg(long = "D")]
        degree: u32,
        #[arg(long = "sigma2L", default_value_t = 1.0)]
        sigma2_l: f64,
        #[arg(long = "N", default_value_t = 1)]
        total: usize,
    },
    /// Per-level training sizes for the inductive skeleton estimator.
    Allocate {
        #[arg(long = "M")]
        dim: usize,
        #[arg(long = "D")]
        degree: u32,
        #[arg(long = "N")]
        total: usize,
        /// Equal split instead of the optimal one.
        #[arg(long)]
        equal: bool,
        /// With --equal, split over every level 1..=M.
        #[arg(long)]
        equal_split_all_levels: bool,
    },
    /// Fits a Bezier simplex to a sample CSV and prints it as JSON.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "D")]
        degree: u32,
        #[arg(long, value_enum, default_value_t = FitMethod::Aao)]
        method: FitMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs repeated fit-and-score trials.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long = "L")]
        ambient: Option<usize>,
        #[arg(long = "M")]
        dim: Option<usize>,
        #[arg(long = "D")]
        degree: Option<u32>,
        #[arg(long = "N")]
        total: Option<usize>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        test_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        equal_split_all_levels: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Samples a Pareto front (or the synthetic model) to a CSV.
    Frontgen {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long = "N")]
        total: usize,
        /// Skeleton-stratified sample split by the optimal allocation for --D.
        #[arg(long)]
        stratified: bool,
        #[arg(long = "D")]
        degree: Option<u32>,
        #[arg(long = "L")]
        ambient: Option<usize>,
        #[arg(long = "M")]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FitMethod {
    Aao,
    Isk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Synthetic,
    Med,
    Grouplasso,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Aao,
    IskOptimal,
    IskEqual,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Synthetic => ProblemKind::Synthetic,
            ProblemArg::Med => ProblemKind::Med,
            ProblemArg::Grouplasso => ProblemKind::Grouplasso,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Aao => Method::Aao,
            MethodArg::IskOptimal => Method::IskOptimal,
            MethodArg::IskEqual => Method::IskEqual,
        }
    }
}

fn print_text(text: &str) -> Result<()> {
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| Error::Io {
        path: "<stdout>".into(),
        source: e,
    })
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    print_text(&serde_json::to_string_pretty(value)?)
}

fn risk(dim: usize, degree: u32, sigma2_l: f64, total: usize) -> Result<()> {
    let aao = aao_risk(dim, degree, sigma2_l, total)?;
    let (coefficients, fractions, optimal) = match isk_risk_coefficients(dim, degree) {
        Ok(model) => {
            let alloc = optimal_allocation(&model, total.max(model.coefficients.len()))?;
            let optimal = model.coefficients.values().map(|c| c.sqrt()).sum::<f64>().powi(2) * sigma2_l / total as f64;
            let scaled: BTreeMap<usize, f64> = model.coefficients.iter().map(|(&m, &c)| (m, c * sigma2_l)).collect();
            (json!(scaled), json!(alloc.fractions), json!(optimal))
        }
        Err(Error::InvalidArgument(_)) if degree == 0 => (json!(null), json!(null), json!(null)),
        Err(e) => return Err(e),
    };
    print_json(&json!({
        "M": dim,
        "D": degree,
        "sigma2L": sigma2_l,
        "N": total,
        "aao": aao,
        "isk_coefficients": coefficients,
        "optimal_fractions": fractions,
        "optimal_risk": optimal,
    }))
}

fn allocate(dim: usize, degree: u32, total: usize, equal: bool, all_levels: bool) -> Result<()> {
    let model = isk_risk_coefficients(dim, degree)?;
    let alloc = if equal {
        equal_allocation(&model, total, all_levels)?
    } else {
        optimal_allocation(&model, total)?
    };
    print_json(&serde_json::to_value(alloc)?)
}

fn fit(input: PathBuf, degree: u32, method: FitMethod, out: Option<PathBuf>) -> Result<()> {
    let set = load_training_set(&input)?;
    let model = match (method, set) {
        (FitMethod::Aao, TrainingSet::Plain(s)) => fit_all_at_once(&s, degree)?,
        (FitMethod::Aao, TrainingSet::Stratified(s)) => fit_all_at_once(&s.flatten(), degree)?,
        (FitMethod::Isk, TrainingSet::Stratified(s)) => fit_inductive_skeleton(&s, degree)?,
        (FitMethod::Isk, TrainingSet::Plain(_)) => {
            return Err(Error::InvalidArgument(
                "inductive skeleton fitting needs a stratified sample (nonzero level column)".into(),
            ))
        }
    };
    let text = serde_json::to_string_pretty(&model)?;
    match out {
        Some(path) => std::fs::write(&path, text + "\n").map_err(|e| Error::Io { path, source: e }),
        None => print_text(&text),
    }
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<Format>,
    problem: Option<ProblemArg>,
    method: Option<MethodArg>,
    ambient: Option<usize>,
    dim: Option<usize>,
    degree: Option<u32>,
    total: Option<usize>,
    sigma: Option<f64>,
    trials: Option<usize>,
    test_size: Option<usize>,
    seed: Option<u64>,
    equal_split_all_levels: bool,
    eps: Option<f64>,
    workers: Option<usize>,
) -> Result<()> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => {
            let missing = |name: &str| Error::InvalidArgument(format!("--{name} is required without --config"));
            let problem: ProblemKind = problem.ok_or_else(|| missing("problem"))?.into();
            let method: Method = method.ok_or_else(|| missing("method"))?.into();
            let degree = degree.ok_or_else(|| missing("D"))?;
            let total = total.ok_or_else(|| missing("N"))?;
            match problem {
                ProblemKind::Synthetic => {
                    let dim = dim.ok_or_else(|| missing("M"))?;
                    ExperimentConfig::synthetic(ambient.unwrap_or(dim), dim, degree, total, 0.0, method)
                }
                _ => ExperimentConfig::front(problem, degree, total, method),
            }
        }
    };
    if let Some(p) = problem {
        cfg.problem = p.into();
    }
    if let Some(m) = method {
        cfg.method = m.into();
    }
    if ambient.is_some() {
        cfg.ambient = ambient;
    }
    if let Some(v) = dim {
        cfg.dim = v;
    }
    if let Some(v) = degree {
        cfg.degree = v;
    }
    if let Some(v) = total {
        cfg.total = v;
    }
    if let Some(v) = sigma {
        cfg.sigma = v;
    }
    if let Some(v) = trials {
        cfg.trials = v;
    }
    if test_size.is_some() {
        cfg.test_size = test_size;
    }
    if let Some(v) = seed {
        cfg.seed = v;
    }
    cfg.equal_split_all_levels |= equal_split_all_levels;
    if let Some(v) = eps {
        cfg.eps = v;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    if out.is_some() {
        cfg.output = out;
    }
    cfg.validate()?;

    let report = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => {
            let fmt = match format {
                Some(Format::Json) => ReportFormat::Json,
                Some(Format::Csv) => ReportFormat::Csv,
                None => ReportFormat::from_path(path),
            };
            emit_report(&report, fmt, path)
        }
        None => {
            let fmt = match format {
                Some(Format::Csv) => ReportFormat::Csv,
                _ => ReportFormat::Json,
            };
            write_report(&report, fmt, std::io::stdout().lock())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn frontgen(
    problem: ProblemArg,
    total: usize,
    stratified: bool,
    degree: Option<u32>,
    ambient: Option<usize>,
    dim: Option<usize>,
    sigma: f64,
    eps: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let (front, default_degree): (Box<dyn bezierfit::problems::FrontProblem>, u32) = match problem {
        ProblemArg::Synthetic => {
            let m = dim.ok_or_else(|| Error::InvalidArgument("--M is required for the synthetic problem".into()))?;
            let d = degree.unwrap_or(2);
            (Box::new(Synthetic::new(ambient.unwrap_or(m), m, d, sigma)?), d)
        }
        ProblemArg::Med => (Box::new(Med::new(sigma)?), 2),
        ProblemArg::Grouplasso => (Box::new(GroupLasso::new(&birthwt(), eps)?), 3),
    };
    let counts = if stratified {
        let model = isk_risk_coefficients(front.dim(), degree.unwrap_or(default_degree))?;
        optimal_allocation(&model, total)?.per_level
    } else {
        BTreeMap::from([(0, total)])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = draw_training_set(front.as_ref(), &counts, stratified, &mut rng)?;
    match out {
        Some(path) => save_training_set(path, &set),
        None => write_training_set(std::io::stdout().lock(), &set),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Risk {
            dim,
            degree,
            sigma2_l,
            total,
        } => risk(dim, degree, sigma2_l, total),
        Command::Allocate {
            dim,
            degree,
            total,
            equal,
            equal_split_all_levels,
        } => allocate(dim, degree, total, equal, equal_split_all_levels),
        Command::Fit {
            input,
            degree,
            method,
            out,
        } => fit(input, degree, method, out),
        Command::Experiment {
            config,
            out,
            format,
            problem,
            method,
            ambient,
            dim,
            degree,
            total,
            sigma,
            trials,
            test_size,
            seed,
            equal_split_all_levels,
            eps,
            workers,
        } => experiment(
            config,
            out,
            format,
            problem,
            method,
            ambient,
            dim,
            degree,
            total,
            sigma,
            trials,
            test_size,
            seed,
            equal_split_all_levels,
            eps,
            workers,
        ),
        Command::Frontgen {
            problem,
            total,
            stratified,
            degree,
            ambient,
            dim,
            sigma,
            eps,
            seed,
            out,
        } => frontgen(problem, total, stratified, degree, ambient, dim, sigma, eps, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_io() {
                4
            } else if e.is_numerical() {
                3
            } else {
                2
            };
            ExitCode::from(code)
        }
    }
}
