//! Repeated fit-and-score experiments with machine-readable reports.
//!
//! Trial `i` seeds its training draw with `seed + i` and its test points with
//! a second stream of the same seed, so runs that differ only in the method
//! are scored on identical test sets.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bezier::BezierSimplex;
use crate::error::{Error, Result};
use crate::fit::{fit_all_at_once, fit_inductive_skeleton};
use crate::problems::{birthwt, draw_sample, draw_stratified, FrontProblem, GroupLasso, Med, Synthetic, DEFAULT_EPS};
use crate::risk::{aao_risk, equal_allocation, isk_risk_coefficients, optimal_allocation};
use crate::simplex::{sample_uniform_simplex, SimplexPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Synthetic,
    Med,
    #[serde(alias = "group-lasso", alias = "group_lasso")]
    Grouplasso,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Aao,
    IskOptimal,
    IskEqual,
}

impl Method {
    pub fn is_inductive(self) -> bool {
        !matches!(self, Method::Aao)
    }
}

fn default_trials() -> usize {
    20
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub method: Method,
    /// Ambient dimension; fixed to 3 for the two optimization problems.
    #[serde(rename = "L", default)]
    pub ambient: Option<usize>,
    #[serde(rename = "M")]
    pub dim: usize,
    #[serde(rename = "D")]
    pub degree: u32,
    #[serde(rename = "N")]
    pub total: usize,
    /// Noise standard deviation added to training observations.
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Test points per trial; 10000, or 1000 for the group lasso, when unset.
    #[serde(default)]
    pub test_size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Splits `isk-equal` over every level `1..=M` instead of `1..=min(M, D)`.
    #[serde(default)]
    pub equal_split_all_levels: bool,
    /// Strong-convexity perturbation of the group lasso objectives.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Worker threads for the trials; the global pool when unset.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A synthetic run with the defaults for everything not given.
    pub fn synthetic(ambient: usize, dim: usize, degree: u32, total: usize, sigma: f64, method: Method) -> Self {
        ExperimentConfig {
            problem: ProblemKind::Synthetic,
            method,
            ambient: Some(ambient),
            dim,
            degree,
            total,
            sigma,
            trials: default_trials(),
            test_size: None,
            seed: 0,
            equal_split_all_levels: false,
            eps: DEFAULT_EPS,
            workers: None,
            output: None,
        }
    }

    /// A run on the location or group lasso problem (`M = L = 3`).
    pub fn front(problem: ProblemKind, degree: u32, total: usize, method: Method) -> Self {
        ExperimentConfig {
            problem,
            ambient: Some(3),
            dim: 3,
            ..Self::synthetic(3, 3, degree, total, 0.0, method)
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::invalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn ambient(&self) -> usize {
        match self.problem {
            ProblemKind::Synthetic => self.ambient.unwrap_or(self.dim),
            _ => 3,
        }
    }

    pub fn test_size(&self) -> usize {
        self.test_size.unwrap_or(match self.problem {
            ProblemKind::Grouplasso => 1000,
            _ => 10_000,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.test_size() == 0 {
            return Err(Error::invalid("test_size must be at least 1"));
        }
        if self.total == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        if self.method.is_inductive() && self.degree == 0 {
            return Err(Error::invalid("inductive skeleton methods need D >= 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        match self.problem {
            ProblemKind::Synthetic => {
                if self.degree == 0 {
                    return Err(Error::invalid("the synthetic problem needs D >= 1"));
                }
                if self.ambient() < self.dim {
                    return Err(Error::invalid("the synthetic problem needs L >= M"));
                }
            }
            ProblemKind::Med | ProblemKind::Grouplasso => {
                if self.dim != 3 || self.ambient.is_some_and(|l| l != 3) {
                    return Err(Error::invalid(format!(
                        "the {:?} problem has M = L = 3",
                        self.problem
                    )));
                }
                if self.problem == ProblemKind::Grouplasso && !(self.eps > 0.0) {
                    return Err(Error::invalid("eps must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Per-level training sizes for the inductive methods, `None` for `aao`.
    pub fn allocation(&self) -> Result<Option<BTreeMap<usize, usize>>> {
        let model = match self.method {
            Method::Aao => return Ok(None),
            _ => isk_risk_coefficients(self.dim, self.degree)?,
        };
        let alloc = match self.method {
            Method::IskOptimal => optimal_allocation(&model, self.total)?,
            _ => equal_allocation(&model, self.total, self.equal_split_all_levels)?,
        };
        Ok(Some(alloc.per_level))
    }

    /// Asymptotic risk of the configured run on the synthetic problem.
    pub fn theoretical_risk(&self) -> Result<Option<f64>> {
        if self.problem != ProblemKind::Synthetic {
            return Ok(None);
        }
        let scale = self.sigma * self.sigma * self.ambient() as f64;
        match self.allocation()? {
            None => aao_risk(self.dim, self.degree, scale, self.total).map(Some),
            Some(counts) => {
                let model = isk_risk_coefficients(self.dim, self.degree)?.with_scale(scale);
                Ok(Some(model.risk_at(&counts)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (0 for a single trial).
    pub sd: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Summary {
            mean,
            sd,
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        }
    }
}

/// Linear-interpolation quantile of sorted data (the usual "type 7").
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub mse: Vec<f64>,
    pub summary: Summary,
    pub theoretical_risk: Option<f64>,
    /// Training sizes per level for the inductive methods.
    pub allocation: Option<BTreeMap<usize, usize>>,
    pub wall_time_seconds: f64,
}

impl ExperimentReport {
    /// The report with the wall time zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> ExperimentReport {
        ExperimentReport {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
    }
}

/// Mean over `test` of `||truth(t) - model(t)||^2`.
pub fn evaluate_mse<F>(model: &BezierSimplex, truth: F, test: &[SimplexPoint]) -> Result<f64>
where
    F: Fn(&SimplexPoint) -> Result<Vec<f64>>,
{
    if test.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    let predicted = model.evaluate_many(test)?;
    let mut total = 0.0;
    for (n, t) in test.iter().enumerate() {
        let x = truth(t)?;
        if x.len() != model.ambient() {
            return Err(Error::invalid("truth and model differ in ambient dimension"));
        }
        total += x.iter().zip(predicted.row(n).iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(total / test.len() as f64)
}

/// MSE between two Bezier simplices; with a shared basis this is
/// `||Z (P - Q)||_F^2 / n` from a single design matrix.
pub fn model_mse(model: &BezierSimplex, truth: &BezierSimplex, test: &[SimplexPoint]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    if model.ambient() != truth.ambient() || model.dim() != truth.dim() {
        return Err(Error::invalid("models differ in dimensions"));
    }
    let diff = if model.degree() == truth.degree() {
        let z = model.basis().design_matrix(test)?;
        z * (model.control_points() - truth.control_points())
    } else {
        model.evaluate_many(test)? - truth.evaluate_many(test)?
    };
    Ok(diff.norm_squared() / test.len() as f64)
}

fn matrix_mse(predicted: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    (predicted - truth).norm_squared() / predicted.nrows() as f64
}

enum Problem {
    Synthetic(Synthetic),
    Med(Med),
    GroupLasso(Box<GroupLasso>),
}

impl Problem {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        Ok(match config.problem {
            ProblemKind::Synthetic => Problem::Synthetic(Synthetic::new(
                config.ambient(),
                config.dim,
                config.degree,
                config.sigma,
            )?),
            ProblemKind::Med => Problem::Med(Med::new(config.sigma)?),
            ProblemKind::Grouplasso => Problem::GroupLasso(Box::new(GroupLasso::new(&birthwt(), config.eps)?)),
        })
    }

    fn front(&self) -> &dyn FrontProblem {
        match self {
            Problem::Synthetic(p) => p,
            Problem::Med(p) => p,
            Problem::GroupLasso(p) => p.as_ref(),
        }
    }
}

/// Test parameters for trial `trial`; identical for every method.
pub fn test_points(config: &ExperimentConfig, trial: usize) -> Vec<SimplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(trial as u64));
    rng.set_stream(1);
    (0..config.test_size())
        .map(|_| sample_uniform_simplex(config.dim, &mut rng))
        .collect()
}

fn run_trial(
    config: &ExperimentConfig,
    problem: &Problem,
    allocation: Option<&BTreeMap<usize, usize>>,
    trial: usize,
) -> Result<f64> {
    let front = problem.front();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(trial as u64));
    let model = match allocation {
        None => fit_all_at_once(&draw_sample(front, config.total, &mut rng)?, config.degree)?,
        Some(counts) => fit_inductive_skeleton(&draw_stratified(front, counts, &mut rng)?, config.degree)?,
    };
    let test = test_points(config, trial);
    match problem {
        Problem::Synthetic(p) => model_mse(&model, p.truth_model(), &test),
        _ => Ok(matrix_mse(&model.evaluate_many(&test)?, &front.truth_many(&test)?)),
    }
}

/// Runs every trial of `config`. Trials run in parallel; the report does not
/// depend on the thread count. Any failing trial aborts the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let problem = Problem::new(config)?;
    let allocation = config.allocation()?;
    let run = || {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(config, &problem, allocation.as_ref(), trial).map_err(|e| Error::Trial {
                    trial,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<f64>>>()
    };
    let mse = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(ExperimentReport {
        summary: Summary::of(&mse),
        theoretical_risk: config.theoretical_risk()?,
        allocation,
        config: config.clone(),
        mse,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// `Csv` for a `.csv` extension, `Json` otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

/// Writes `report`. The CSV form has a `trial,mse` header, one row per
/// trial, then one `name,value` row per summary statistic.
pub fn write_report<W: Write>(report: &ExperimentReport, format: ReportFormat, mut writer: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut writer, report)?;
            writeln!(writer).map_err(|e| Error::io("<report>", e))?;
        }
        ReportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(writer);
            let mut rows: Vec<(String, f64)> = report
                .mse
                .iter()
                .enumerate()
                .map(|(i, v)| (i.to_string(), *v))
                .collect();
            let s = &report.summary;
            rows.extend(
                [
                    ("mean", s.mean),
                    ("sd", s.sd),
                    ("min", s.min),
                    ("q1", s.q1),
                    ("median", s.median),
                    ("q3", s.q3),
                    ("max", s.max),
                ]
                .map(|(k, v)| (k.to_string(), v)),
            );
            if let Some(r) = report.theoretical_risk {
                rows.push(("theoretical_risk".into(), r));
            }
            let result = (|| {
                csv.write_record(["trial", "mse"])?;
                for (k, v) in rows {
                    csv.write_record([k, format!("{v:?}")])?;
                }
                csv.flush().map_err(csv::Error::from)
            })();
            result.map_err(|e| Error::invalid(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    write_report(report, format, &mut writer)?;
    writer.flush().map_err(|e| Error::io(path, e))
}

/// One-sided Welch test of `mean(a) < mean(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

impl WelchTest {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub fn welch_one_sided(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("each group needs at least two values"));
    }
    let (sa, sb) = (Summary::of(a), Summary::of(b));
    let (va, vb) = (sa.sd.powi(2) / a.len() as f64, sb.sd.powi(2) / b.len() as f64);
    let se2 = va + vb;
    if se2 == 0.0 {
        let p = if sa.mean < sb.mean { 0.0 } else { 1.0 };
        return Ok(WelchTest {
            t: f64::NAN,
            df: f64::NAN,
            p_value: p,
        });
    }
    let t = (sa.mean - sb.mean) / se2.sqrt();
    let df = se2.powi(2) / (va.powi(2) / (a.len() - 1) as f64 + vb.powi(2) / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(WelchTest {
        t,
        df,
        p_value: dist.cdf(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_type_seven() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((s.q1, s.median, s.q3), (1.75, 2.5, 3.25));
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(Summary::of(&[2.0]).sd, 0.0);
    }

    #[test]
    fn mse_examples() {
        let truth = BezierSimplex::unit_simplex(3, 2, 4).unwrap();
        let test: Vec<SimplexPoint> = {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            (0..50).map(|_| sample_uniform_simplex(3, &mut rng)).collect()
        };
        assert_eq!(model_mse(&truth, &truth, &test).unwrap(), 0.0);
        let c = [0.5, -1.0, 0.0, 2.0];
        let mut p = truth.control_points().clone();
        for mut row in p.row_iter_mut() {
            for (l, v) in row.iter_mut().enumerate() {
                *v += c[l];
            }
        }
        let shifted = BezierSimplex::new(3, 2, p).unwrap();
        let expect: f64 = c.iter().map(|v| v * v).sum();
        assert!((model_mse(&shifted, &truth, &test).unwrap() - expect).abs() < 1e-12);
        let direct = evaluate_mse(&shifted, |t| truth.evaluate(t), &test).unwrap();
        assert!((direct - expect).abs() < 1e-12);
        assert!(evaluate_mse(&shifted, |t| truth.evaluate(t), &[]).is_err());
    }

    #[test]
    fn welch_direction() {
        let a = [1.0, 1.1, 0.9, 1.05];
        let b = [2.0, 2.1, 1.9, 2.05];
        assert!(welch_one_sided(&a, &b).unwrap().p_value < 0.001);
        assert!(welch_one_sided(&b, &a).unwrap().p_value > 0.999);
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::synthetic(5, 3, 2, 100, 0.1, Method::Aao);
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        let c = ExperimentConfig::synthetic(2, 3, 2, 100, 0.1, Method::Aao);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::front(ProblemKind::Med, 2, 50, Method::IskOptimal);
        assert!(c.validate().is_ok());
        c.dim = 4;
        assert!(c.validate().is_err());
        let json = r#"{"problem":"grouplasso","method":"isk-equal","M":3,"D":3,"N":30}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!((c.trials, c.test_size(), c.eps), (20, 1000, 1e-4));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"problem":"x"}"#).is_err());
    }

    #[test]
    fn small_run_is_reproducible() {
        let mut c = ExperimentConfig::synthetic(4, 3, 2, 60, 0.1, Method::IskOptimal);
        c.trials = 3;
        c.test_size = Some(200);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert_eq!(a.mse.len(), 3);
        let risk = c.theoretical_risk().unwrap().unwrap();
        assert_eq!(a.theoretical_risk, Some(risk));
    }
}
