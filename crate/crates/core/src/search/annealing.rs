use alloc::vec::Vec;

use rand::Rng;

use super::monte_carlo::shuffle_fill;
use super::{ensure_feasible, SearchConfig, SearchResult, TerminatedBy, Tracker};
use crate::math::exp;
use crate::{Budget, EnergyModel, Pool, Result};

#[derive(Clone, Copy)]
enum Move {
    Add,
    Remove,
    Swap,
}

/// Simulated annealing over feasible subsets.
///
/// A step proposes one of: add a feasible non-member, remove a member (never
/// the last one), or swap a member for a non-member that fits in its place.
/// Improvements are always accepted, worse states with probability
/// `exp(delta / temperature)`.
pub fn simulated_annealing(pool: &Pool, budget: Budget, model: &EnergyModel, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    ensure_feasible(pool, budget)?;
    let members = pool.members();
    let mut rng = config.rng();
    let mut tracker = Tracker::new(config);
    let maxstep = config.stop_rule.maxstep;

    let mut state = Vec::with_capacity(pool.len());
    shuffle_fill(pool, budget, &mut rng, &mut state);
    let mut in_state = alloc::vec![false; pool.len()];
    for &i in &state {
        in_state[i] = true;
    }
    let mut cost: f64 = state.iter().map(|&i| members[i].cost).sum();
    let mut accs = Vec::with_capacity(pool.len());
    let mut energy_of = |set: &[usize]| {
        accs.clear();
        accs.extend(set.iter().map(|&i| members[i].accuracy));
        model.energy(&accs)
    };
    let mut energy = energy_of(&state)?;
    if tracker.offer(1, energy, || state.clone()) {
        return tracker.finish(pool, model, 1, TerminatedBy::StopThreshold);
    }

    let mut candidates = Vec::with_capacity(pool.len());
    let mut proposal = Vec::with_capacity(pool.len());
    for step in 2..=maxstep {
        let can_remove = state.len() > 1;
        candidates.clear();
        candidates.extend((0..pool.len()).filter(|&i| !in_state[i] && budget.admits(cost + members[i].cost)));
        let can_add = !candidates.is_empty();
        let can_swap = state.len() < pool.len();
        let moves: Vec<Move> = [(can_add, Move::Add), (can_remove, Move::Remove), (can_swap, Move::Swap)]
            .into_iter()
            .filter_map(|(ok, m)| ok.then_some(m))
            .collect();
        if moves.is_empty() {
            continue;
        }
        proposal.clear();
        proposal.extend_from_slice(&state);
        match moves[rng.random_range(0..moves.len())] {
            Move::Add => {
                let i = candidates[rng.random_range(0..candidates.len())];
                proposal.push(i);
            }
            Move::Remove => {
                let pos = rng.random_range(0..proposal.len());
                proposal.swap_remove(pos);
            }
            Move::Swap => {
                let pos = rng.random_range(0..proposal.len());
                let out = proposal[pos];
                let base = cost - members[out].cost;
                candidates.clear();
                candidates.extend((0..pool.len()).filter(|&i| !in_state[i] && budget.admits(base + members[i].cost)));
                if candidates.is_empty() {
                    continue;
                }
                let i = candidates[rng.random_range(0..candidates.len())];
                proposal[pos] = i;
            }
        }
        let new_energy = energy_of(&proposal)?;
        let delta = new_energy - energy;
        let accept = delta >= 0.0 || {
            let t = config.sa_schedule.temperature(step);
            rng.random::<f64>() < exp(delta / t)
        };
        if accept {
            for &i in &state {
                in_state[i] = false;
            }
            core::mem::swap(&mut state, &mut proposal);
            for &i in &state {
                in_state[i] = true;
            }
            cost = state.iter().map(|&i| members[i].cost).sum();
            energy = new_energy;
            if tracker.offer(step, energy, || {
                let mut s = state.clone();
                s.sort_unstable();
                s
            }) {
                return tracker.finish(pool, model, step, TerminatedBy::StopThreshold);
            }
        }
    }
    tracker.finish(pool, model, maxstep, TerminatedBy::MaxStep)
}
