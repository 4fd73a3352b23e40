//! Synthetic pools and replicated experiments.
//!
//! Every replicate draws its seed from `derive_seed(master, index)`, so a
//! report depends only on its configuration, not on the number of worker
//! threads.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ensk_core::energy::best_subset_exhaustive;
use ensk_core::search::{search, SaSchedule, SearchConfig, SearchResult, Strategy, TerminatedBy, TracePoint};
use ensk_core::stats::{
    self, derive_stop_rule, fit_accuracy_distribution, fit_constraint_curve, EllEstimator, StopRule, StopRuleOptions,
    DEFAULT_SIGNIFICANCE,
};
use ensk_core::types::ConstraintCurve;
use ensk_core::{Budget, DecisionWeights, EnergyModel, Member, Pool};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::seed::derive_seed;
use crate::{AppError, TOOL_NAME, TOOL_VERSION};

/// Accuracies at or above `1 - P_MAX_GAP` are redrawn: the cost rate
/// `1 - p` would vanish.
pub const P_MAX_GAP: f64 = 1e-9;

pub const TABLE2_ALPHA: f64 = 17.0;
pub const TABLE2_BETA: f64 = 5.0;
pub const TABLE2_N30_FRACTION: f64 = 0.30;
pub const TABLE2_N100_FRACTION: f64 = 0.20;
/// `MAXSTEP` cap for the synthetic-pool stopping-rule runs; the
/// combinatorial bound is in the millions for these pools.
pub const TABLE2_MAXSTEP_CAP: u64 = 20_000;

pub const MC_VS_SA_N: usize = 15;
pub const MC_VS_SA_BETA: f64 = 0.1;
pub const MC_VS_SA_EPSILON: f64 = 0.05;
/// Steps given to each strategy in the Monte Carlo vs annealing comparison.
pub const MC_VS_SA_STEPS: u64 = 2_000;
/// Slower cooling than the library default, spread over the 2000 steps.
pub const MC_VS_SA_SCHEDULE: SaSchedule = SaSchedule { initial_temp: 2.0, cooling: 0.985, iters_per_temp: 20 };

pub const OD_FRACTION: f64 = 0.8;
/// Optic-disc detector pool: `(id, accuracy, cost)`.
pub const OD_POOL: [(&str, f64, f64); 8] = [
    ("od1", 0.220, 31.0),
    ("od2", 0.304, 38.0),
    ("od3", 0.319, 34.0),
    ("od4", 0.643, 69.0),
    ("od5", 0.754, 11.0),
    ("od6", 0.765, 7.0),
    ("od7", 0.958, 21.0),
    ("od8", 0.976, 90.0),
];
/// Measured `p_{8,k}` of the optic-disc pool.
pub const OD_WEIGHTS: [f64; 9] = [0.0, 0.11, 0.70, 0.93, 0.99, 1.0, 1.0, 1.0, 1.0];

pub const DEFAULT_REPLICATES: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeModel {
    /// Cost `~ Exp(1 - p)` given the accuracy `p`.
    #[default]
    ConditionalExponential,
    /// Every cost is `1`.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoolGeneratorSpec {
    pub n: usize,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub time_model: TimeModel,
    pub seed: u64,
}

pub fn generate_pool(spec: &PoolGeneratorSpec) -> Result<Pool, AppError> {
    if spec.n == 0 {
        return Err(AppError::input("pool size must be at least 1"));
    }
    let beta = Beta::new(spec.alpha_p, spec.beta_p).map_err(|e| AppError::input(format!("accuracy distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut members = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let (p, t) = draw_member(&beta, spec.time_model, &mut rng);
        members.push(Member::new(format!("m{}", i + 1), p, t));
    }
    Ok(Pool::new(members)?)
}

/// One `(accuracy, cost)` draw.
pub fn draw_member<R: rand::Rng>(beta: &Beta<f64>, time_model: TimeModel, rng: &mut R) -> (f64, f64) {
    let mut p = beta.sample(rng);
    while p >= 1.0 - P_MAX_GAP {
        p = beta.sample(rng);
    }
    let t = match time_model {
        TimeModel::None => 1.0,
        TimeModel::ConditionalExponential => loop {
            let t = Exp::new(1.0 - p).expect("positive rate").sample(rng);
            if t > 0.0 {
                break t;
            }
        },
    };
    (p, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Ends at `STOP` or `MAXSTEP`.
    Stop,
    /// Ignores `STOP`.
    MaxStep,
}

impl RunMode {
    fn as_str(self) -> &'static str {
        match self {
            RunMode::Stop => "stop",
            RunMode::MaxStep => "maxstep",
        }
    }
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::GreedyForward => "greedy-forward",
        Strategy::GreedyBackward => "greedy-backward",
        Strategy::MonteCarlo => "monte-carlo",
        Strategy::SimulatedAnnealing => "simulated-annealing",
        Strategy::Sherlock => "sherlock",
    }
}

fn termination_name(t: TerminatedBy) -> &'static str {
    match t {
        TerminatedBy::StopThreshold => "stop_threshold",
        TerminatedBy::MaxStep => "max_step",
        TerminatedBy::Exhausted => "exhausted",
    }
}

/// One search run inside an experiment.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub replicate: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub mode: RunMode,
    pub energy: f64,
    pub steps: u64,
    pub terminated_by: TerminatedBy,
    /// Whether the result attains the exhaustive optimum, when known.
    pub optimal: Option<bool>,
    pub wall_time_secs: f64,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TerminationCounts {
    pub stop_threshold: usize,
    pub max_step: usize,
    pub exhausted: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub strategy: Strategy,
    pub mode: RunMode,
    pub runs: usize,
    pub energy_mean: f64,
    pub energy_std: f64,
    pub energy_min: f64,
    pub steps_mean: f64,
    pub wall_time_mean_secs: f64,
    pub terminated: TerminationCounts,
    /// Fraction of runs reaching the exhaustive optimum, when known.
    pub precision: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub master_seed: u64,
    pub replicates: usize,
    pub config: serde_json::Value,
    pub cells: Vec<CellSummary>,
    pub details: serde_json::Value,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    fn new(experiment: &str, master_seed: u64, replicates: usize, config: serde_json::Value, records: Vec<RunRecord>, details: serde_json::Value) -> Self {
        let mut keys: Vec<(Strategy, RunMode)> = Vec::new();
        for r in &records {
            if !keys.contains(&(r.strategy, r.mode)) {
                keys.push((r.strategy, r.mode));
            }
        }
        let cells = keys.into_iter().map(|(s, m)| summarize(s, m, records.iter().filter(|r| r.strategy == s && r.mode == m))).collect();
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            experiment: experiment.to_string(),
            master_seed,
            replicates,
            config,
            cells,
            details,
            records,
        }
    }

    pub fn cell(&self, strategy: Strategy, mode: RunMode) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.strategy == strategy && c.mode == mode)
    }

    /// Per-run rows: `replicate,seed,strategy,mode,energy,steps,terminated_by,optimal`.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("replicate,seed,strategy,mode,energy,steps,terminated_by,optimal\n");
        for r in &self.records {
            let optimal = r.optimal.map(|o| o.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.replicate,
                r.seed,
                strategy_name(r.strategy),
                r.mode.as_str(),
                r.energy,
                r.steps,
                termination_name(r.terminated_by),
                optimal
            );
        }
        out
    }

    /// Best-so-far traces: `replicate,strategy,mode,step,energy`.
    pub fn traces_csv(&self) -> String {
        let mut out = String::from("replicate,strategy,mode,step,energy\n");
        for r in &self.records {
            for p in &r.trace {
                let _ = writeln!(out, "{},{},{},{},{}", r.replicate, strategy_name(r.strategy), r.mode.as_str(), p.step, p.energy);
            }
        }
        out
    }

    /// Writes `<name>.json`, `<name>_runs.csv` and `<name>_traces.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, AppError> {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let json_path = dir.join(format!("{}.json", self.experiment));
        crate::io::write_json(self, Some(&json_path))?;
        let runs = dir.join(format!("{}_runs.csv", self.experiment));
        std::fs::write(&runs, self.runs_csv()).map_err(|e| AppError::io(&runs, e))?;
        let traces = dir.join(format!("{}_traces.csv", self.experiment));
        std::fs::write(&traces, self.traces_csv()).map_err(|e| AppError::io(&traces, e))?;
        Ok(vec![json_path, runs, traces])
    }
}

fn summarize<'a>(strategy: Strategy, mode: RunMode, runs: impl Iterator<Item = &'a RunRecord>) -> CellSummary {
    let runs: Vec<&RunRecord> = runs.collect();
    let n = runs.len() as f64;
    let energy_mean = runs.iter().map(|r| r.energy).sum::<f64>() / n;
    let ss: f64 = runs.iter().map(|r| (r.energy - energy_mean).powi(2)).sum();
    let energy_std = if runs.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
    let mut terminated = TerminationCounts::default();
    for r in &runs {
        match r.terminated_by {
            TerminatedBy::StopThreshold => terminated.stop_threshold += 1,
            TerminatedBy::MaxStep => terminated.max_step += 1,
            TerminatedBy::Exhausted => terminated.exhausted += 1,
        }
    }
    let precision = runs.iter().all(|r| r.optimal.is_some()).then(|| runs.iter().filter(|r| r.optimal == Some(true)).count() as f64 / n);
    CellSummary {
        strategy,
        mode,
        runs: runs.len(),
        energy_mean,
        energy_std,
        energy_min: runs.iter().map(|r| r.energy).fold(f64::INFINITY, f64::min),
        steps_mean: runs.iter().map(|r| r.steps as f64).sum::<f64>() / n,
        wall_time_mean_secs: runs.iter().map(|r| r.wall_time_secs).sum::<f64>() / n,
        terminated,
        precision,
    }
}

fn record(replicate: usize, seed: u64, strategy: Strategy, mode: RunMode, res: SearchResult, optimum: Option<f64>) -> RunRecord {
    RunRecord {
        replicate,
        seed,
        strategy,
        mode,
        energy: res.best.energy(),
        steps: res.steps_executed,
        terminated_by: res.terminated_by,
        optimal: optimum.map(|o| (res.best.energy() - o).abs() <= 1e-12),
        wall_time_secs: res.wall_time.as_secs_f64(),
        trace: res.trace.unwrap_or_default(),
    }
}

fn check_replicates(replicates: usize) -> Result<(), AppError> {
    if replicates == 0 {
        Err(AppError::input("replicates must be at least 1"))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table2Config {
    pub n: usize,
    pub budget_fraction: f64,
    pub replicates: usize,
    pub seed: u64,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub maxstep_cap: u64,
    pub record_traces: bool,
}

impl Table2Config {
    /// Pool size `n` with the canonical budget fraction for 30 and 100.
    pub fn canonical(n: usize, seed: u64) -> Self {
        let budget_fraction = if n >= 100 { TABLE2_N100_FRACTION } else { TABLE2_N30_FRACTION };
        Self {
            n,
            budget_fraction,
            replicates: DEFAULT_REPLICATES,
            seed,
            alpha_p: TABLE2_ALPHA,
            beta_p: TABLE2_BETA,
            maxstep_cap: TABLE2_MAXSTEP_CAP,
            record_traces: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct RuleSummary {
    ell_hat: usize,
    stop: f64,
    maxstep: u64,
    beta_branch: bool,
    beta_fit: bool,
}

fn rule_summary(rule: &StopRule) -> RuleSummary {
    let d = rule.derivation.as_ref().expect("derived rule");
    RuleSummary {
        ell_hat: d.energy.ell_hat,
        stop: rule.stop,
        maxstep: rule.maxstep,
        beta_branch: matches!(d.energy.shape, stats::EnergyShape::Beta { .. }),
        beta_fit: d.accuracy.is_beta(),
    }
}

/// Synthetic Beta pools with conditional-exponential costs; annealing and
/// efficiency sampling, each run once honoring `STOP` and once until
/// `MAXSTEP`.
pub fn run_table2_experiment(cfg: &Table2Config) -> Result<ExperimentReport, AppError> {
    check_replicates(cfg.replicates)?;
    if !(cfg.budget_fraction > 0.0 && cfg.budget_fraction <= 1.0) {
        return Err(AppError::input("budget fraction must lie in (0, 1]"));
    }
    let per_rep: Vec<(Vec<RunRecord>, RuleSummary)> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| -> Result<_, AppError> {
            let rep_seed = derive_seed(cfg.seed, r as u64);
            let spec = PoolGeneratorSpec {
                n: cfg.n,
                alpha_p: cfg.alpha_p,
                beta_p: cfg.beta_p,
                time_model: TimeModel::ConditionalExponential,
                seed: rep_seed,
            };
            let pool = generate_pool(&spec)?;
            let budget = Budget::new(cfg.budget_fraction * pool.total_cost())?;
            let dist = fit_accuracy_distribution(&pool.accuracies(), DEFAULT_SIGNIFICANCE)?;
            let opts = StopRuleOptions { maxstep_cap: cfg.maxstep_cap, ..StopRuleOptions::default() };
            let rule = derive_stop_rule(&dist, pool.len(), Some(budget), Some(&pool.costs()), &opts)?;
            let model = EnergyModel::PlainMajority;
            let mut records = Vec::with_capacity(4);
            for (k, strategy) in [Strategy::SimulatedAnnealing, Strategy::Sherlock].into_iter().enumerate() {
                let run_seed = derive_seed(rep_seed, k as u64 + 1);
                for mode in [RunMode::Stop, RunMode::MaxStep] {
                    let mut sc = SearchConfig::new(strategy, rule.clone(), run_seed).with_trace(cfg.record_traces);
                    if mode == RunMode::MaxStep {
                        sc = sc.ignoring_stop();
                    }
                    let res = search(&pool, budget, &model, &sc)?;
                    records.push(record(r, run_seed, strategy, mode, res, None));
                }
            }
            Ok((records, rule_summary(&rule)))
        })
        .collect::<Result<_, _>>()?;

    let rules: Vec<&RuleSummary> = per_rep.iter().map(|p| &p.1).collect();
    let n = rules.len() as f64;
    let details = json!({
        "stop_mean": rules.iter().map(|r| r.stop).sum::<f64>() / n,
        "stop_min": rules.iter().map(|r| r.stop).fold(f64::INFINITY, f64::min),
        "stop_max": rules.iter().map(|r| r.stop).fold(f64::NEG_INFINITY, f64::max),
        "ell_hat_mean": rules.iter().map(|r| r.ell_hat as f64).sum::<f64>() / n,
        "maxstep_mean": rules.iter().map(|r| r.maxstep as f64).sum::<f64>() / n,
        "beta_branch_count": rules.iter().filter(|r| r.beta_branch).count(),
        "beta_fit_count": rules.iter().filter(|r| r.beta_fit).count(),
    });
    let records = per_rep.into_iter().flat_map(|p| p.0).collect();
    let name = format!("table2-n{}", cfg.n);
    Ok(ExperimentReport::new(&name, cfg.seed, cfg.replicates, serde_json::to_value(cfg).expect("config"), records, details))
}

/// Adversarial pool: one member of accuracy `1 - beta` costing the whole
/// budget `1`, and `n - 1` members of accuracy `1/2 + epsilon` costing
/// `1/n` each.
pub fn adversarial_pool(n: usize, beta: f64, epsilon: f64) -> Result<(Pool, Budget), AppError> {
    if n < 2 {
        return Err(AppError::input("adversarial pool needs n >= 2"));
    }
    if !(beta > 0.0 && beta < 0.5 && epsilon > 0.0 && epsilon < 0.5) {
        return Err(AppError::input("beta and epsilon must lie in (0, 1/2)"));
    }
    let t = 1.0;
    let mut members = vec![Member::new("d1", 1.0 - beta, t)];
    members.extend((2..=n).map(|i| Member::new(format!("d{i}"), 0.5 + epsilon, t / n as f64)));
    Ok((Pool::new(members)?, Budget::new(t)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McVsSaConfig {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Steps each strategy gets; `STOP` is not used.
    pub steps: u64,
    pub sa_schedule: SaSchedule,
    pub record_traces: bool,
}

impl McVsSaConfig {
    pub fn canonical(seed: u64) -> Self {
        Self {
            n: MC_VS_SA_N,
            beta: MC_VS_SA_BETA,
            epsilon: MC_VS_SA_EPSILON,
            replicates: DEFAULT_REPLICATES,
            seed,
            steps: MC_VS_SA_STEPS,
            sa_schedule: MC_VS_SA_SCHEDULE,
            record_traces: false,
        }
    }
}

/// Monte Carlo and annealing with equal step budgets on the adversarial
/// pool; precision is the share of runs that reach the exhaustive optimum.
pub fn run_mc_vs_sa_experiment(cfg: &McVsSaConfig) -> Result<ExperimentReport, AppError> {
    check_replicates(cfg.replicates)?;
    let (pool, budget) = adversarial_pool(cfg.n, cfg.beta, cfg.epsilon)?;
    let model = EnergyModel::PlainMajority;
    let optimum = best_subset_exhaustive(&pool, budget, &model)?;
    let rule = StopRule::fixed(1.0, cfg.steps)?;
    let per_rep: Vec<Vec<RunRecord>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| -> Result<_, AppError> {
            let rep_seed = derive_seed(cfg.seed, r as u64);
            let mut out = Vec::with_capacity(2);
            for (k, strategy) in [Strategy::MonteCarlo, Strategy::SimulatedAnnealing].into_iter().enumerate() {
                let run_seed = derive_seed(rep_seed, k as u64 + 1);
                let sc = SearchConfig::new(strategy, rule.clone(), run_seed)
                    .ignoring_stop()
                    .with_schedule(cfg.sa_schedule)
                    .with_trace(cfg.record_traces);
                let res = search(&pool, budget, &model, &sc)?;
                out.push(record(r, run_seed, strategy, RunMode::MaxStep, res, Some(optimum.energy())));
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let details = json!({
        "optimum_ids": optimum.ids(&pool),
        "optimum_energy": optimum.energy(),
    });
    Ok(ExperimentReport::new(
        "mc-vs-sa",
        cfg.seed,
        cfg.replicates,
        serde_json::to_value(cfg).expect("config"),
        per_rep.into_iter().flatten().collect(),
        details,
    ))
}

pub fn od_pool() -> Pool {
    Pool::new(OD_POOL.iter().map(|&(id, p, t)| Member::new(id, p, t)).collect()).expect("valid fixture")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdConfig {
    pub budget_fraction: f64,
    pub replicates: usize,
    pub seed: u64,
    pub record_traces: bool,
}

impl OdConfig {
    pub fn canonical(seed: u64) -> Self {
        Self { budget_fraction: OD_FRACTION, replicates: DEFAULT_REPLICATES, seed, record_traces: false }
    }
}

/// Stopping rule and decision weights of the optic-disc scenario.
#[derive(Clone, Debug)]
pub struct OdSetup {
    pub pool: Pool,
    pub budget: Budget,
    pub curve: ConstraintCurve,
    pub model: EnergyModel,
    pub rule: StopRule,
    pub constrained_mean: f64,
}

/// The measured table serves the 8-member ensemble, the fitted curve every
/// other size; the ensemble size comes from the mean cost.
pub fn od_setup(budget_fraction: f64) -> Result<OdSetup, AppError> {
    if !(budget_fraction > 0.0 && budget_fraction <= 1.0) {
        return Err(AppError::input("budget fraction must lie in (0, 1]"));
    }
    let pool = od_pool();
    let budget = Budget::new(budget_fraction * pool.total_cost())?;
    let curve = fit_constraint_curve(&OD_WEIGHTS)?;
    let weights = DecisionWeights::from_table(OD_WEIGHTS.to_vec())?.with_curve(curve);
    let dist = fit_accuracy_distribution(&pool.accuracies(), DEFAULT_SIGNIFICANCE)?;
    let opts = StopRuleOptions { ell_estimator: EllEstimator::MeanCost, weights: Some(weights.clone()), ..StopRuleOptions::default() };
    let rule = derive_stop_rule(&dist, pool.len(), Some(budget), Some(&pool.costs()), &opts)?;
    let ell_hat = rule.derivation.as_ref().expect("derived").energy.ell_hat;
    let constrained_mean = stats::constrained_mean_q(curve, dist.mean, ell_hat)?;
    Ok(OdSetup { pool, budget, curve, model: EnergyModel::ConstrainedMajority(weights), rule, constrained_mean })
}

/// Efficiency sampling and annealing under constrained majority voting on
/// the optic-disc pool, both honoring `STOP`.
pub fn run_od_experiment(cfg: &OdConfig) -> Result<ExperimentReport, AppError> {
    check_replicates(cfg.replicates)?;
    let setup = od_setup(cfg.budget_fraction)?;
    let optimum = best_subset_exhaustive(&setup.pool, setup.budget, &setup.model)?;
    let per_rep: Vec<Vec<RunRecord>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| -> Result<_, AppError> {
            let rep_seed = derive_seed(cfg.seed, r as u64);
            let mut out = Vec::with_capacity(2);
            for (k, strategy) in [Strategy::Sherlock, Strategy::SimulatedAnnealing].into_iter().enumerate() {
                let run_seed = derive_seed(rep_seed, k as u64 + 1);
                let sc = SearchConfig::new(strategy, setup.rule.clone(), run_seed).with_trace(cfg.record_traces);
                let res = search(&setup.pool, setup.budget, &setup.model, &sc)?;
                out.push(record(r, run_seed, strategy, RunMode::Stop, res, Some(optimum.energy())));
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let d = setup.rule.derivation.as_ref().expect("derived");
    let details = json!({
        "budget": setup.budget.total(),
        "ell_hat": d.energy.ell_hat,
        "ell_source": d.ell_source,
        "curve": { "a": setup.curve.a, "b": setup.curve.b },
        "constrained_mean": setup.constrained_mean,
        "energy_variance": d.energy.variance,
        "energy_shape": d.energy.shape,
        "stop": setup.rule.stop,
        "maxstep": setup.rule.maxstep,
        "optimum_ids": optimum.ids(&setup.pool),
        "optimum_energy": optimum.energy(),
    });
    Ok(ExperimentReport::new(
        "od",
        cfg.seed,
        cfg.replicates,
        serde_json::to_value(cfg).expect("config"),
        per_rep.into_iter().flatten().collect(),
        details,
    ))
}
