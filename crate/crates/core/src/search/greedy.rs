use alloc::vec::Vec;

use super::{ensure_feasible, Clock, GreedyKey, SearchResult, TerminatedBy, TracePoint};
use crate::energy::PmfBuilder;
use crate::{Budget, EnergyModel, Pool, Result, Selection};

fn energy_of(pool: &Pool, model: &EnergyModel, indices: &[usize]) -> Result<f64> {
    let mut b = PmfBuilder::new();
    for &i in indices {
        b.push(pool.members()[i].accuracy);
    }
    model.energy_from_pmf(b.probs())
}

fn cost_of(pool: &Pool, indices: &[usize]) -> f64 {
    indices.iter().map(|&i| pool.members()[i].cost).sum()
}

fn finish(pool: &Pool, model: &EnergyModel, chosen: &[usize], steps: u64, trace: Vec<TracePoint>, clock: Clock) -> Result<SearchResult> {
    Ok(SearchResult {
        best: Selection::evaluate(pool, model, chosen)?,
        steps_executed: steps,
        terminated_by: TerminatedBy::Exhausted,
        wall_time: clock.elapsed(),
        trace: Some(trace),
    })
}

/// Forward selection: start from the best feasible single member and add
/// the best pair of remaining members while that improves the energy.
pub fn greedy_forward(pool: &Pool, budget: Budget, model: &EnergyModel, key: GreedyKey) -> Result<SearchResult> {
    ensure_feasible(pool, budget)?;
    let clock = Clock::start();
    let members = pool.members();
    let score = |i: usize| match key {
        GreedyKey::Accuracy => members[i].accuracy,
        GreedyKey::Usefulness => members[i].usefulness(),
    };

    let mut seed = None;
    for (i, m) in members.iter().enumerate() {
        if budget.admits(m.cost) && seed.is_none_or(|s| score(i) > score(s)) {
            seed = Some(i);
        }
    }
    let seed = seed.expect("feasibility checked");
    let mut chosen = alloc::vec![seed];
    let mut pmf = PmfBuilder::new();
    pmf.push(members[seed].accuracy);
    let mut energy = model.energy_from_pmf(pmf.probs())?;
    let mut cost = members[seed].cost;
    let mut steps = 1;
    let mut trace = alloc::vec![TracePoint { step: steps, energy }];

    loop {
        let mut best: Option<(f64, usize, usize, PmfBuilder)> = None;
        for i in 0..pool.len() {
            if chosen.contains(&i) {
                continue;
            }
            for j in i + 1..pool.len() {
                if chosen.contains(&j) || !budget.admits(cost + members[i].cost + members[j].cost) {
                    continue;
                }
                let mut cand = pmf.clone();
                cand.push(members[i].accuracy);
                cand.push(members[j].accuracy);
                let value = match key {
                    GreedyKey::Accuracy => model.energy_from_pmf(cand.probs())?,
                    GreedyKey::Usefulness => score(i) + score(j),
                };
                if best.as_ref().is_none_or(|b| value > b.0) {
                    best = Some((value, i, j, cand));
                }
            }
        }
        let Some((_, i, j, cand)) = best else { break };
        steps += 1;
        let new_energy = model.energy_from_pmf(cand.probs())?;
        if new_energy <= energy {
            break;
        }
        chosen.extend([i, j]);
        cost += members[i].cost + members[j].cost;
        pmf = cand;
        energy = new_energy;
        trace.push(TracePoint { step: steps, energy });
    }
    finish(pool, model, &chosen, steps, trace, clock)
}

/// Backward selection: start from the whole pool, drop single members until
/// the budget holds, then drop pairs (single members from an even-sized
/// ensemble) while that improves the energy.
pub fn greedy_backward(pool: &Pool, budget: Budget, model: &EnergyModel, key: GreedyKey) -> Result<SearchResult> {
    ensure_feasible(pool, budget)?;
    let clock = Clock::start();
    let members = pool.members();
    let mut chosen: Vec<usize> = (0..pool.len()).collect();
    let mut steps = 0;
    let mut trace = Vec::new();

    // index into `chosen` of the next member to drop
    let pick_single = |chosen: &[usize]| -> Result<usize> {
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..chosen.len() {
            let value = match key {
                GreedyKey::Accuracy => {
                    let rest: Vec<usize> = chosen.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &i)| i).collect();
                    energy_of(pool, model, &rest)?
                }
                GreedyKey::Usefulness => -members[chosen[pos]].usefulness(),
            };
            if best.is_none_or(|b| value > b.0) {
                best = Some((value, pos));
            }
        }
        Ok(best.expect("non-empty ensemble").1)
    };

    while chosen.len() > 1 && !budget.admits(cost_of(pool, &chosen)) {
        let pos = pick_single(&chosen)?;
        chosen.remove(pos);
        steps += 1;
    }
    if !budget.admits(cost_of(pool, &chosen)) {
        // the last survivor does not fit; fall back to the best feasible single
        let best = (0..pool.len())
            .filter(|&i| budget.admits(members[i].cost))
            .fold(None, |b: Option<usize>, i| match b {
                Some(j) if members[j].accuracy >= members[i].accuracy => Some(j),
                _ => Some(i),
            })
            .expect("feasibility checked");
        chosen = alloc::vec![best];
    }
    let mut energy = energy_of(pool, model, &chosen)?;
    trace.push(TracePoint { step: steps, energy });

    loop {
        let drop = if chosen.len() % 2 == 1 { 2 } else { 1 };
        if chosen.len() <= drop {
            break;
        }
        let candidate: Vec<usize> = match key {
            GreedyKey::Accuracy => {
                let mut best: Option<(f64, Vec<usize>)> = None;
                for a in 0..chosen.len() {
                    let range = if drop == 2 { a + 1..chosen.len() } else { a..a + 1 };
                    for b in range {
                        let rest: Vec<usize> =
                            chosen.iter().enumerate().filter(|&(q, _)| q != a && q != b).map(|(_, &i)| i).collect();
                        let e = energy_of(pool, model, &rest)?;
                        if best.as_ref().is_none_or(|x| e > x.0) {
                            best = Some((e, rest));
                        }
                    }
                }
                best.expect("at least one candidate").1
            }
            GreedyKey::Usefulness => {
                let mut order: Vec<usize> = (0..chosen.len()).collect();
                // least useful first, ties to the lowest pool index
                order.sort_by(|&x, &y| {
                    members[chosen[x]].usefulness().total_cmp(&members[chosen[y]].usefulness()).then(chosen[x].cmp(&chosen[y]))
                });
                let removed = &order[..drop];
                chosen.iter().enumerate().filter(|(q, _)| !removed.contains(q)).map(|(_, &i)| i).collect()
            }
        };
        steps += 1;
        let e = energy_of(pool, model, &candidate)?;
        if e <= energy {
            break;
        }
        chosen = candidate;
        energy = e;
        trace.push(TracePoint { step: steps, energy });
    }
    finish(pool, model, &chosen, steps, trace, clock)
}
