//! Subset search under a budget.
//!
//! Deterministic greedy strategies run to convergence. The stochastic ones
//! (Monte Carlo, simulated annealing and efficiency sampling) share one
//! termination contract: stop once the best energy reaches `STOP`, or after
//! `MAXSTEP` steps.

mod annealing;
mod efficiency;
mod greedy;
mod monte_carlo;
mod sherlock;

use alloc::vec::Vec;
use core::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stats::StopRule;
use crate::{Budget, EnergyModel, Error, Pool, Result, Selection};

pub use annealing::simulated_annealing;
pub use efficiency::{item_efficiency, item_efficiency_literal, selection_distribution};
pub use greedy::{greedy_backward, greedy_forward};
pub use monte_carlo::monte_carlo_search;
pub use sherlock::sherlock;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Strategy {
    GreedyForward,
    GreedyBackward,
    MonteCarlo,
    SimulatedAnnealing,
    #[default]
    Sherlock,
}

/// Ranking used by the greedy strategies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GreedyKey {
    /// Resulting ensemble energy.
    #[default]
    Accuracy,
    /// Accuracy per unit cost.
    Usefulness,
}

/// Geometric cooling: `temp = initial_temp * cooling^(step / iters_per_temp)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaSchedule {
    pub initial_temp: f64,
    pub cooling: f64,
    pub iters_per_temp: u64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self { initial_temp: 1.0, cooling: 0.95, iters_per_temp: 20 }
    }
}

impl SaSchedule {
    /// Default start and cooling rate, with plateaus stretched so that
    /// about 300 coolings fit into `maxstep` steps.
    pub fn spanning(maxstep: u64) -> Self {
        let base = Self::default();
        Self { iters_per_temp: (maxstep / 300).max(base.iters_per_temp), ..base }
    }

    pub fn temperature(&self, step: u64) -> f64 {
        self.initial_temp * libm::pow(self.cooling, (step / self.iters_per_temp) as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub key: GreedyKey,
    pub seed: u64,
    pub stop_rule: StopRule,
    pub sa_schedule: SaSchedule,
    /// When `false` only `MAXSTEP` ends a stochastic search.
    pub honor_stop: bool,
    /// Use the printed efficiency formula (a full binomial sum, always 1).
    pub literal_eq5: bool,
    /// Record the best-so-far energy at each improvement.
    pub record_trace: bool,
}

impl SearchConfig {
    pub fn new(strategy: Strategy, stop_rule: StopRule, seed: u64) -> Self {
        Self {
            strategy,
            key: GreedyKey::default(),
            seed,
            stop_rule,
            sa_schedule: SaSchedule::default(),
            honor_stop: true,
            literal_eq5: false,
            record_trace: false,
        }
    }

    pub fn with_key(mut self, key: GreedyKey) -> Self {
        self.key = key;
        self
    }

    pub fn with_schedule(mut self, schedule: SaSchedule) -> Self {
        self.sa_schedule = schedule;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn ignoring_stop(mut self) -> Self {
        self.honor_stop = false;
        self
    }

    pub fn with_literal_eq5(mut self, on: bool) -> Self {
        self.literal_eq5 = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sa_schedule;
        if !(s.cooling > 0.0 && s.cooling < 1.0) {
            return Err(Error::InvalidConfig("cooling must lie in (0, 1)"));
        }
        if !(s.initial_temp > 0.0 && s.initial_temp.is_finite()) {
            return Err(Error::InvalidConfig("initial temperature must be positive"));
        }
        if s.iters_per_temp == 0 {
            return Err(Error::InvalidConfig("iters_per_temp must be at least 1"));
        }
        if self.stop_rule.maxstep == 0 {
            return Err(Error::InvalidConfig("MAXSTEP must be at least 1"));
        }
        Ok(())
    }

    fn stop_threshold(&self) -> Option<f64> {
        self.honor_stop.then_some(self.stop_rule.stop)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TerminatedBy {
    StopThreshold,
    MaxStep,
    Exhausted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TracePoint {
    pub step: u64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchResult {
    pub best: Selection,
    pub steps_executed: u64,
    pub terminated_by: TerminatedBy,
    /// Zero without the `std` feature.
    pub wall_time: Duration,
    pub trace: Option<Vec<TracePoint>>,
}

/// Runs the strategy named in `config`.
pub fn search(pool: &Pool, budget: Budget, model: &EnergyModel, config: &SearchConfig) -> Result<SearchResult> {
    match config.strategy {
        Strategy::GreedyForward => greedy_forward(pool, budget, model, config.key),
        Strategy::GreedyBackward => greedy_backward(pool, budget, model, config.key),
        Strategy::MonteCarlo => monte_carlo_search(pool, budget, model, config),
        Strategy::SimulatedAnnealing => simulated_annealing(pool, budget, model, config),
        Strategy::Sherlock => sherlock(pool, budget, model, config),
    }
}

fn ensure_feasible(pool: &Pool, budget: Budget) -> Result<()> {
    if pool.members().iter().any(|m| budget.admits(m.cost)) {
        Ok(())
    } else {
        Err(Error::NoFeasibleSubset)
    }
}

struct Clock {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Duration {
        #[cfg(feature = "std")]
        {
            self.start.elapsed()
        }
        #[cfg(not(feature = "std"))]
        {
            Duration::ZERO
        }
    }
}

/// Best-so-far bookkeeping shared by the stochastic strategies.
struct Tracker {
    clock: Clock,
    best_energy: f64,
    best: Option<Vec<usize>>,
    trace: Option<Vec<TracePoint>>,
    stop: Option<f64>,
}

impl Tracker {
    fn new(config: &SearchConfig) -> Self {
        Self {
            clock: Clock::start(),
            best_energy: f64::NEG_INFINITY,
            best: None,
            trace: config.record_trace.then(Vec::new),
            stop: config.stop_threshold(),
        }
    }

    /// Records a candidate; returns `true` once the best reaches `STOP`.
    fn offer(&mut self, step: u64, energy: f64, indices: impl FnOnce() -> Vec<usize>) -> bool {
        if self.best.is_none() || energy > self.best_energy {
            self.best_energy = energy;
            self.best = Some(indices());
            if let Some(t) = &mut self.trace {
                t.push(TracePoint { step, energy });
            }
        }
        self.reached_stop()
    }

    fn reached_stop(&self) -> bool {
        self.best.is_some() && self.stop.is_some_and(|s| self.best_energy >= s)
    }

    fn finish(self, pool: &Pool, model: &EnergyModel, steps: u64, terminated_by: TerminatedBy) -> Result<SearchResult> {
        let indices = self.best.ok_or(Error::NoFeasibleSubset)?;
        let best = Selection::evaluate(pool, model, &indices)?;
        Ok(SearchResult { best, steps_executed: steps, terminated_by, wall_time: self.clock.elapsed(), trace: self.trace })
    }
}
