//! Experiment harness: build or load an instance, run solver methods over
//! replicated scenario sets, and tabulate the results.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::benders::{solve_dep, solve_dep_lt, solve_sampling, CutFamily, SamplingConfig};
use crate::compact::solve_ltmip;
use crate::error::{Error, Result};
use crate::exact::{solve_exact, ExactConfig};
use crate::instance::{generate_paper_instance, CoverageModel, PpscInstance};
use crate::mip::Limits;
use crate::report::SolveReport;
use crate::scenario::{sample_scenarios, ScenarioSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    BendersSub,
    BendersNv,
    Dep,
    DepLt,
    Ltmip,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Exact,
        Method::BendersSub,
        Method::BendersNv,
        Method::Dep,
        Method::DepLt,
        Method::Ltmip,
    ];

    pub fn uses_scenarios(self) -> bool {
        !matches!(self, Method::Exact | Method::Ltmip)
    }

    pub fn needs_linear_threshold(self) -> bool {
        matches!(self, Method::DepLt | Method::Ltmip)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::BendersSub => "benders-sub",
            Method::BendersNv => "benders-nv",
            Method::Dep => "dep",
            Method::DepLt => "dep-lt",
            Method::Ltmip => "ltmip",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generate {
        model: CoverageModel,
        v: usize,
        bbar: f64,
        epsilon: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: InstanceSource,
    pub methods: Vec<Method>,
    pub kappa: u8,
    pub omega: usize,
    pub reps: usize,
    pub scenario_seed: u64,
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    pub save_scenarios: Option<PathBuf>,
    pub load_scenarios: Option<PathBuf>,
    /// Write measured times; off gives byte-identical tables across runs.
    pub record_times: bool,
}

impl RunConfig {
    pub fn new(source: InstanceSource, methods: Vec<Method>) -> Self {
        RunConfig {
            source,
            methods,
            kappa: 2,
            omega: 100,
            reps: 1,
            scenario_seed: 0,
            time_limit: None,
            node_limit: None,
            save_scenarios: None,
            load_scenarios: None,
            record_times: true,
        }
    }

    /// Loads or generates the instance.
    pub fn instance(&self) -> Result<PpscInstance> {
        match &self.source {
            InstanceSource::File(path) => PpscInstance::load(path),
            InstanceSource::Generate {
                model,
                v,
                bbar,
                epsilon,
                seed,
            } => generate_paper_instance(*model, *v, *bbar, *epsilon, *seed),
        }
    }

    /// Checks everything that can be checked before solving.
    pub fn validate(&self, instance: &PpscInstance) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no method selected".into()));
        }
        if self.kappa != 1 && self.kappa != 2 {
            return Err(Error::InvalidArgument(format!("kappa must be 1 or 2, got {}", self.kappa)));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("at least one replication is required".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| m.needs_linear_threshold()) {
            if instance.model() != CoverageModel::LinearThreshold {
                return Err(Error::Incompatible(format!(
                    "method {m} needs a linear_threshold instance, got {}",
                    instance.model()
                )));
            }
        }
        let sampled = self.methods.iter().any(|m| m.uses_scenarios());
        if sampled && self.load_scenarios.is_none() && self.omega == 0 {
            return Err(Error::InvalidArgument("scenario count must be at least 1".into()));
        }
        if self.load_scenarios.is_some() && self.reps != 1 {
            return Err(Error::InvalidArgument(
                "a loaded scenario file holds one scenario set; use a single replication".into(),
            ));
        }
        if let Some(t) = self.time_limit {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidArgument(format!("time limit must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub method: String,
    pub v: usize,
    pub bbar: Option<f64>,
    pub epsilon: f64,
    pub omega: usize,
    pub rep: usize,
    pub status: String,
    pub objective: Option<f64>,
    pub feasible_true: Option<u8>,
    pub time_master_s: f64,
    pub time_oracle_s: f64,
    pub master_cuts: usize,
    pub oracle_cuts: usize,
    pub nodes: usize,
    /// Optimum of the sampled problem before repair; not written to CSV.
    #[serde(skip)]
    pub master_objective: Option<f64>,
}

fn scenario_path(base: &Path, rep: usize, reps: usize) -> PathBuf {
    if reps == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.r{rep}.{}", ext.to_string_lossy()),
        None => format!("{stem}.r{rep}"),
    };
    base.with_file_name(name)
}

fn solve_one(
    method: Method,
    instance: &PpscInstance,
    scenarios: Option<&ScenarioSet>,
    config: &RunConfig,
) -> Result<SolveReport> {
    let time_limit = config.time_limit.map(Duration::from_secs_f64);
    let sampling = |family| -> Result<SamplingConfig> {
        let mut cfg = SamplingConfig::new(family, config.kappa)?;
        cfg.time_limit = time_limit;
        cfg.node_limit = config.node_limit;
        Ok(cfg)
    };
    let sc = || scenarios.expect("scenarios sampled for scenario methods");
    match method {
        Method::Exact => {
            let mut cfg = ExactConfig::new(config.kappa)?;
            cfg.time_limit = time_limit;
            cfg.node_limit = config.node_limit;
            solve_exact(instance, &cfg)
        }
        Method::BendersSub => solve_sampling(instance, sc(), &sampling(CutFamily::Submodular)?),
        Method::BendersNv => solve_sampling(instance, sc(), &sampling(CutFamily::NewValid)?),
        Method::Dep => solve_dep(instance, sc(), &sampling(CutFamily::NewValid)?),
        Method::DepLt => solve_dep_lt(instance, sc(), &sampling(CutFamily::NewValid)?),
        Method::Ltmip => solve_ltmip(
            instance,
            &Limits {
                node_limit: config.node_limit,
                time_limit,
                floor: None,
            },
        ),
    }
}

fn row(method: Method, instance: &PpscInstance, config: &RunConfig, omega: usize, rep: usize, r: &SolveReport) -> ResultRow {
    let (v, bbar) = match &config.source {
        InstanceSource::Generate { v, bbar, .. } => (*v, Some(*bbar)),
        InstanceSource::File(_) => (instance.n() + instance.m(), None),
    };
    let time = |t: f64| if config.record_times { t } else { 0.0 };
    ResultRow {
        method: method.to_string(),
        v,
        bbar,
        epsilon: instance.epsilon(),
        omega,
        rep,
        status: r.status.to_string(),
        objective: r.objective.is_finite().then_some(r.objective),
        feasible_true: r.feasible_true.map(u8::from),
        time_master_s: time(r.time_master),
        time_oracle_s: time(r.time_oracle),
        master_cuts: r.master_cuts(),
        oracle_cuts: r.oracle_cuts(),
        nodes: r.nodes,
        master_objective: r.master_objective,
    }
}

/// Runs every method on every replication. Replication `r` samples its
/// scenarios with seed `scenario_seed + r`; all scenario methods of one
/// replication share that set. Methods without scenarios are solved once and
/// their result repeated on each replication's row.
pub fn run(config: &RunConfig) -> Result<Vec<ResultRow>> {
    let instance = config.instance()?;
    config.validate(&instance)?;
    let sampled = config.methods.iter().any(|m| m.uses_scenarios());

    let mut fixed: Vec<(Method, SolveReport)> = Vec::new();
    for &m in config.methods.iter().filter(|m| !m.uses_scenarios()) {
        fixed.push((m, solve_one(m, &instance, None, config)?));
    }

    let mut rows = Vec::new();
    for rep in 0..config.reps {
        let scenarios = if !sampled {
            None
        } else if let Some(path) = &config.load_scenarios {
            Some(ScenarioSet::load(path, &instance)?)
        } else {
            let seed = config.scenario_seed.wrapping_add(rep as u64);
            Some(sample_scenarios(&instance, config.omega, seed)?)
        };
        if let (Some(sc), Some(base)) = (&scenarios, &config.save_scenarios) {
            sc.save(scenario_path(base, rep, config.reps))?;
        }
        let omega = scenarios.as_ref().map_or(0, ScenarioSet::len);
        for &m in &config.methods {
            if m.uses_scenarios() {
                let report = solve_one(m, &instance, scenarios.as_ref(), config)?;
                rows.push(row(m, &instance, config, omega, rep, &report));
            } else {
                let report = &fixed.iter().find(|(f, _)| *f == m).expect("solved above").1;
                rows.push(row(m, &instance, config, 0, rep, report));
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Replication-based optimality gap estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEstimate {
    pub master: Vec<f64>,
    pub feasible: Vec<f64>,
    /// Smallest sampled optimum.
    pub lb: f64,
    /// Smallest truly feasible objective.
    pub ub: f64,
    pub egap: f64,
    /// Probability that `lb` is a valid lower bound, `1 - 0.5^M`.
    pub confidence: f64,
    /// `omega * epsilon >= 5`, so the normal approximation behind
    /// `confidence` is reasonable.
    pub normal_ok: bool,
}

impl GapEstimate {
    /// The confidence level, suppressed when the normal approximation is
    /// not justified.
    pub fn stated_confidence(&self) -> Option<f64> {
        self.normal_ok.then_some(self.confidence)
    }

    /// Gap in percent with two decimals, starred when unflagged.
    pub fn egap_label(&self) -> String {
        let star = if self.normal_ok { "" } else { "*" };
        format!("{:.2}%{star}", 100.0 * self.egap)
    }
}

pub fn estimate_gap(master: &[f64], feasible: &[f64], omega: usize, epsilon: f64) -> Result<GapEstimate> {
    if master.is_empty() || feasible.is_empty() {
        return Err(Error::InvalidArgument("need at least one replication".into()));
    }
    if master.iter().chain(feasible).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("replication values must be finite".into()));
    }
    let lb = master.iter().copied().fold(f64::INFINITY, f64::min);
    let ub = feasible.iter().copied().fold(f64::INFINITY, f64::min);
    let egap = if ub == 0.0 { 0.0 } else { (ub - lb) / ub };
    Ok(GapEstimate {
        master: master.to_vec(),
        feasible: feasible.to_vec(),
        lb,
        ub,
        egap,
        confidence: 1.0 - 0.5f64.powi(master.len() as i32),
        normal_ok: omega as f64 * epsilon >= 5.0,
    })
}

/// Gap estimate for one scenario method from its rows, using the rows whose
/// master and repaired objectives are both known.
pub fn gap_from_rows(rows: &[ResultRow], method: Method) -> Option<GapEstimate> {
    let mine: Vec<&ResultRow> = rows
        .iter()
        .filter(|r| r.method == method.to_string() && r.master_objective.is_some() && r.objective.is_some())
        .collect();
    let first = mine.first()?;
    let master: Vec<f64> = mine.iter().filter_map(|r| r.master_objective).collect();
    let feasible: Vec<f64> = mine
        .iter()
        .filter(|r| r.feasible_true == Some(1))
        .filter_map(|r| r.objective)
        .collect();
    estimate_gap(&master, &feasible, first.omega, first.epsilon).ok()
}
