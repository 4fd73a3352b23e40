//! The `solve`, `stats`, `oracle` and `reproduce` commands.

use std::path::{Path, PathBuf};

use ensk_core::energy::{best_subset_exhaustive, EXHAUSTIVE_LIMIT};
use ensk_core::search::{search, GreedyKey, SearchConfig, Strategy, TerminatedBy, TracePoint};
use ensk_core::stats::{
    self, derive_stop_rule, fit_accuracy_distribution, fit_constraint_curve, AccuracyDistribution, EllEstimator,
    StopRule, StopRuleOptions, DEFAULT_SIGNIFICANCE, MAXSTEP_CAP,
};
use ensk_core::types::ConstraintCurve;
use ensk_core::{Budget, DecisionWeights, EnergyModel, Error as CoreError, Pool, Selection};
use serde::{Deserialize, Serialize};

use crate::io::{read_pool, read_weights, PoolFile};
use crate::simulation::{
    run_mc_vs_sa_experiment, run_od_experiment, run_table2_experiment, ExperimentReport, McVsSaConfig, OdConfig,
    Table2Config,
};
use crate::{AppError, TOOL_NAME, TOOL_VERSION};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Plain,
    Constrained,
}

/// Energy model assembled from command-line flags.
#[derive(Clone, Debug, Default)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub weights_file: Option<PathBuf>,
}

struct BuiltModel {
    model: EnergyModel,
    weights: Option<DecisionWeights>,
    curve: Option<ConstraintCurve>,
}

fn build_model(spec: &ModelSpec) -> Result<BuiltModel, AppError> {
    match spec.kind {
        ModelKind::Plain => Ok(BuiltModel { model: EnergyModel::PlainMajority, weights: None, curve: None }),
        ModelKind::Constrained => {
            let path = spec.weights_file.as_deref().ok_or_else(|| AppError::input("--model constrained requires --weights"))?;
            let table = read_weights(path)?;
            let mut weights = DecisionWeights::from_table(table.clone())
                .map_err(|e| AppError::input(format!("{}: {e}", path.display())))?;
            // the curve extends the table to other sizes when it can be fitted
            let curve = fit_constraint_curve(&table).ok();
            if let Some(c) = curve {
                weights = weights.with_curve(c);
            }
            Ok(BuiltModel { model: EnergyModel::ConstrainedMajority(weights.clone()), weights: Some(weights), curve })
        }
    }
}

fn fit_or_point(pool: &Pool) -> Result<AccuracyDistribution, AppError> {
    let accs = pool.accuracies();
    if accs.len() == 1 {
        return Ok(AccuracyDistribution::empirical(accs[0], 0.0)?);
    }
    Ok(fit_accuracy_distribution(&accs, DEFAULT_SIGNIFICANCE)?)
}

fn resolve_budget(pool: &Pool, budget: Option<f64>) -> Result<Budget, AppError> {
    match budget {
        Some(b) => Budget::new(b).map_err(|_| AppError::input(format!("--budget must be positive and finite, got {b}"))),
        None => Ok(Budget::unconstrained(pool)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub pool_file: String,
    pub pool_size: usize,
    pub has_cost_column: bool,
    /// `null` when no budget was given.
    pub budget: Option<f64>,
    pub model: ModelKind,
    pub weights_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strategy: Option<Strategy>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub key: Option<GreedyKey>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ell_estimator: Option<EllEstimator>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub maxstep_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub literal_eq5: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionDoc {
    pub ids: Vec<String>,
    pub indices: Vec<usize>,
    pub total_cost: f64,
    pub energy: f64,
}

impl SelectionDoc {
    fn new(sel: &Selection, pool: &Pool) -> Self {
        Self {
            ids: sel.ids(pool).into_iter().map(String::from).collect(),
            indices: sel.indices().to_vec(),
            total_cost: sel.total_cost(),
            energy: sel.energy(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub strategy: Strategy,
    pub steps_executed: u64,
    pub terminated_by: TerminatedBy,
    pub wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TracePoint>>,
}

/// Output of `solve` and `oracle`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub input: InputEcho,
    pub selection: SelectionDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stop_rule: Option<StopRule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_curve: Option<ConstraintCurve>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchDoc>,
}

impl ResultDocument {
    /// Recomputes cost and energy of the recorded ids against `pool`.
    pub fn verify(&self, pool: &Pool, model: &EnergyModel) -> Result<bool, AppError> {
        let indices: Option<Vec<usize>> = self.selection.ids.iter().map(|id| pool.index_of(id)).collect();
        let Some(indices) = indices else { return Ok(false) };
        let fresh = Selection::evaluate(pool, model, &indices)?;
        Ok((fresh.energy() - self.selection.energy).abs() <= 1e-12
            && (fresh.total_cost() - self.selection.total_cost).abs() <= 1e-12 * fresh.total_cost().max(1.0))
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub pool_file: PathBuf,
    pub budget: Option<f64>,
    pub strategy: Strategy,
    pub key: GreedyKey,
    pub seed: u64,
    pub model: ModelSpec,
    pub ell_estimator: EllEstimator,
    pub maxstep_cap: Option<u64>,
    pub trace: bool,
    pub literal_eq5: bool,
}

impl SolveOptions {
    pub fn new(pool_file: impl Into<PathBuf>) -> Self {
        Self {
            pool_file: pool_file.into(),
            budget: None,
            strategy: Strategy::Sherlock,
            key: GreedyKey::Accuracy,
            seed: 1,
            model: ModelSpec::default(),
            ell_estimator: EllEstimator::Auto,
            maxstep_cap: None,
            trace: false,
            literal_eq5: false,
        }
    }
}

fn echo(path: &Path, pf: &PoolFile, budget: Option<f64>, model: &ModelSpec) -> InputEcho {
    InputEcho {
        pool_file: path.display().to_string(),
        pool_size: pf.pool.len(),
        has_cost_column: pf.has_cost,
        budget,
        model: model.kind,
        weights_file: model.weights_file.as_ref().map(|p| p.display().to_string()),
        strategy: None,
        key: None,
        ell_estimator: None,
        maxstep_cap: None,
        literal_eq5: None,
    }
}

fn ensure_any_fits(pool: &Pool, budget: Budget) -> Result<(), AppError> {
    if pool.members().iter().any(|m| budget.admits(m.cost)) {
        Ok(())
    } else {
        Err(CoreError::NoFeasibleSubset.into())
    }
}

fn stop_options(estimator: EllEstimator, cap: Option<u64>, weights: Option<DecisionWeights>) -> StopRuleOptions {
    StopRuleOptions { ell_estimator: estimator, maxstep_cap: cap.unwrap_or(MAXSTEP_CAP).max(1), weights, ..StopRuleOptions::default() }
}

/// Fit, ensemble-size estimate, stopping rule, then the chosen search.
pub fn cmd_solve(opts: &SolveOptions) -> Result<ResultDocument, AppError> {
    let pf = read_pool(&opts.pool_file)?;
    let pool = &pf.pool;
    let built = build_model(&opts.model)?;
    let budget = resolve_budget(pool, opts.budget)?;
    ensure_any_fits(pool, budget)?;

    let dist = fit_or_point(pool)?;
    let costs = pool.costs();
    let given = opts.budget.map(|_| budget);
    let rule = derive_stop_rule(
        &dist,
        pool.len(),
        given,
        given.map(|_| costs.as_slice()),
        &stop_options(opts.ell_estimator, opts.maxstep_cap, built.weights.clone()),
    )?;

    let config = SearchConfig::new(opts.strategy, rule.clone(), opts.seed)
        .with_key(opts.key)
        .with_trace(opts.trace)
        .with_literal_eq5(opts.literal_eq5);
    let res = search(pool, budget, &built.model, &config)?;

    let mut input = echo(&opts.pool_file, &pf, opts.budget, &opts.model);
    input.strategy = Some(opts.strategy);
    input.key = matches!(opts.strategy, Strategy::GreedyForward | Strategy::GreedyBackward).then_some(opts.key);
    input.ell_estimator = Some(opts.ell_estimator);
    input.maxstep_cap = opts.maxstep_cap;
    input.literal_eq5 = Some(opts.literal_eq5);
    Ok(ResultDocument {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "solve".into(),
        seed: Some(opts.seed),
        input,
        selection: SelectionDoc::new(&res.best, pool),
        stop_rule: Some(rule),
        fitted_curve: built.curve,
        search: Some(SearchDoc {
            strategy: opts.strategy,
            steps_executed: res.steps_executed,
            terminated_by: res.terminated_by,
            wall_time_secs: res.wall_time.as_secs_f64(),
            trace: res.trace,
        }),
    })
}

/// Ensemble-size estimates under every rule; `None` where a rule does not
/// apply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllEstimates {
    pub beta: Option<usize>,
    pub mean_cost: Option<usize>,
    pub poisson_quantile: Option<usize>,
    /// `beta T / (alpha + beta)`, for comparison.
    pub shared_rate_expectation: Option<f64>,
}

/// Output of `stats`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputEcho,
    pub ell_estimates: EllEstimates,
    pub stop_rule: StopRule,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_curve: Option<ConstraintCurve>,
}

#[derive(Clone, Debug)]
pub struct StatsOptions {
    pub pool_file: PathBuf,
    pub budget: Option<f64>,
    pub model: ModelSpec,
    pub ell_estimator: EllEstimator,
    pub maxstep_cap: Option<u64>,
}

pub fn cmd_stats(opts: &StatsOptions) -> Result<StatsDocument, AppError> {
    let pf = read_pool(&opts.pool_file)?;
    let pool = &pf.pool;
    let built = build_model(&opts.model)?;
    let budget = opts.budget.map(|_| resolve_budget(pool, opts.budget)).transpose()?;
    let dist = fit_or_point(pool)?;
    let costs = pool.costs();
    let n = pool.len();

    let beta_params = match dist.source {
        stats::AccuracySource::BetaFit { alpha, beta } => Some((alpha, beta)),
        stats::AccuracySource::Empirical => stats::q_beta_params(dist.mean, dist.variance).ok(),
    };
    let ell_estimates = match budget {
        None => EllEstimates { beta: None, mean_cost: None, poisson_quantile: None, shared_rate_expectation: None },
        Some(b) => EllEstimates {
            beta: beta_params.and_then(|(a, bt)| stats::estimate_ell_beta(a, bt, b.total()).ok()).map(|l| l.min(n)),
            mean_cost: Some(stats::estimate_ell_mean_cost(&costs, b.total())),
            poisson_quantile: Some(stats::estimate_ell_poisson_quantile(&costs, b.total())),
            shared_rate_expectation: beta_params.map(|(a, bt)| stats::expected_ell_shared_rate(a, bt, b.total())),
        },
    };
    let stop_rule = derive_stop_rule(
        &dist,
        n,
        budget,
        budget.map(|_| costs.as_slice()),
        &stop_options(opts.ell_estimator, opts.maxstep_cap, built.weights),
    )?;
    let mut input = echo(&opts.pool_file, &pf, opts.budget, &opts.model);
    input.ell_estimator = Some(opts.ell_estimator);
    input.maxstep_cap = opts.maxstep_cap;
    Ok(StatsDocument {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "stats".into(),
        input,
        ell_estimates,
        stop_rule,
        fitted_curve: built.curve,
    })
}

/// Exhaustive optimum; pools above [`EXHAUSTIVE_LIMIT`] are refused.
pub fn cmd_oracle(pool_file: &Path, budget: Option<f64>, model: &ModelSpec) -> Result<ResultDocument, AppError> {
    let pf = read_pool(pool_file)?;
    let pool = &pf.pool;
    if pool.len() > EXHAUSTIVE_LIMIT {
        return Err(CoreError::TooLarge { size: pool.len(), limit: EXHAUSTIVE_LIMIT }.into());
    }
    let built = build_model(model)?;
    let b = resolve_budget(pool, budget)?;
    let best = best_subset_exhaustive(pool, b, &built.model)?;
    Ok(ResultDocument {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "oracle".into(),
        seed: None,
        input: echo(pool_file, &pf, budget, model),
        selection: SelectionDoc::new(&best, pool),
        stop_rule: None,
        fitted_curve: built.curve,
        search: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Table2N30,
    Table2N100,
    McVsSa,
    Od,
}

impl std::str::FromStr for Experiment {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        match s {
            "table2-n30" => Ok(Experiment::Table2N30),
            "table2-n100" => Ok(Experiment::Table2N100),
            "mc-vs-sa" => Ok(Experiment::McVsSa),
            "od" => Ok(Experiment::Od),
            other => Err(AppError::input(format!("unknown experiment `{other}`"))),
        }
    }
}

pub fn run_experiment(exp: Experiment, replicates: usize, seed: u64, traces: bool) -> Result<ExperimentReport, AppError> {
    match exp {
        Experiment::Table2N30 | Experiment::Table2N100 => {
            let n = if exp == Experiment::Table2N30 { 30 } else { 100 };
            let cfg = Table2Config { replicates, record_traces: traces, ..Table2Config::canonical(n, seed) };
            run_table2_experiment(&cfg)
        }
        Experiment::McVsSa => {
            run_mc_vs_sa_experiment(&McVsSaConfig { replicates, record_traces: traces, ..McVsSaConfig::canonical(seed) })
        }
        Experiment::Od => run_od_experiment(&OdConfig { replicates, record_traces: traces, ..OdConfig::canonical(seed) }),
    }
}

/// Runs an experiment and writes its report and CSV files into `out_dir`.
pub fn cmd_reproduce(exp: Experiment, replicates: usize, seed: u64, out_dir: &Path, traces: bool) -> Result<(ExperimentReport, Vec<PathBuf>), AppError> {
    let report = run_experiment(exp, replicates, seed, traces)?;
    let files = report.write_to(out_dir)?;
    Ok((report, files))
}
