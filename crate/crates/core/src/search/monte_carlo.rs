use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ensure_feasible, SearchConfig, SearchResult, TerminatedBy, Tracker};
use crate::{Budget, EnergyModel, Pool, Result};

const REJECTION_TRIES: usize = 1_000;

/// Draws a non-empty feasible subset: uniform over feasible subsets by
/// rejection, or a random fill in shuffled order if rejection keeps failing.
pub(crate) fn random_feasible_subset<R: Rng>(pool: &Pool, budget: Budget, rng: &mut R, out: &mut Vec<usize>) {
    let members = pool.members();
    for _ in 0..REJECTION_TRIES {
        out.clear();
        let mut cost = 0.0;
        for (i, m) in members.iter().enumerate() {
            if rng.random_bool(0.5) {
                out.push(i);
                cost += m.cost;
            }
        }
        if !out.is_empty() && budget.admits(cost) {
            return;
        }
    }
    shuffle_fill(pool, budget, rng, out);
}

pub(crate) fn shuffle_fill<R: Rng>(pool: &Pool, budget: Budget, rng: &mut R, out: &mut Vec<usize>) {
    let members = pool.members();
    out.clear();
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(rng);
    let mut cost = 0.0;
    for i in order {
        if budget.admits(cost + members[i].cost) {
            out.push(i);
            cost += members[i].cost;
        }
    }
    out.sort_unstable();
}

/// Monte Carlo search: evaluates one random feasible subset per step.
pub fn monte_carlo_search(pool: &Pool, budget: Budget, model: &EnergyModel, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    ensure_feasible(pool, budget)?;
    let mut rng = config.rng();
    let mut tracker = Tracker::new(config);
    let mut subset = Vec::with_capacity(pool.len());
    let mut accs = Vec::with_capacity(pool.len());
    let maxstep = config.stop_rule.maxstep;
    for step in 1..=maxstep {
        random_feasible_subset(pool, budget, &mut rng, &mut subset);
        accs.clear();
        accs.extend(subset.iter().map(|&i| pool.members()[i].accuracy));
        let energy = model.energy(&accs)?;
        if tracker.offer(step, energy, || subset.clone()) {
            return tracker.finish(pool, model, step, TerminatedBy::StopThreshold);
        }
    }
    tracker.finish(pool, model, maxstep, TerminatedBy::MaxStep)
}
