use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::efficiency::majority_of_copies;
use super::{ensure_feasible, SearchConfig, SearchResult, TerminatedBy, Tracker};
use crate::energy::PmfBuilder;
use crate::math::floor;
use crate::{Budget, EnergyModel, Pool, Result};

const DENSE_MEMO: usize = 1024;

/// Efficiency-sampling search with restarts.
///
/// Each restart builds an ensemble from scratch: members are drawn with
/// probability proportional to their efficiency against the remaining
/// budget and admitted while they fit. The energy is evaluated at every odd
/// size. One restart is one step.
pub fn sherlock(pool: &Pool, budget: Budget, model: &EnergyModel, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    ensure_feasible(pool, budget)?;
    let members = pool.members();
    let n = pool.len();
    let mut rng = config.rng();
    let mut tracker = Tracker::new(config);
    let maxstep = config.stop_rule.maxstep;

    // efficiency depends only on (member, copies that fit)
    let mut dense: Vec<Vec<f64>> = members
        .iter()
        .map(|m| alloc::vec![f64::NAN; (copies(m.cost, budget.total()) as usize).saturating_add(1).min(DENSE_MEMO)])
        .collect();
    let mut sparse: BTreeMap<(usize, u64), f64> = BTreeMap::new();
    let mut efficiency = |i: usize, remaining: f64| -> f64 {
        let t = members[i].cost;
        if !budget.admits_within(t, remaining) {
            return 0.0;
        }
        if config.literal_eq5 {
            return 1.0;
        }
        let m = copies(t, remaining);
        let p = members[i].accuracy;
        match dense[i].get_mut(m as usize) {
            Some(slot) => {
                if slot.is_nan() {
                    *slot = majority_of_copies(p, m);
                }
                *slot
            }
            None => *sparse.entry((i, m)).or_insert_with(|| majority_of_copies(p, m)),
        }
    };

    let mut ens = Vec::with_capacity(n);
    let mut available = alloc::vec![true; n];
    let mut eff = alloc::vec![0.0; n];
    let mut pmf = PmfBuilder::new();
    for step in 1..=maxstep {
        ens.clear();
        available.fill(true);
        pmf.clear();
        let mut remaining = budget.total();
        loop {
            let mut total = 0.0;
            for i in 0..n {
                eff[i] = if available[i] { efficiency(i, remaining) } else { 0.0 };
                total += eff[i];
            }
            if !(total > 0.0) {
                break;
            }
            let pick = sample(&eff, total, &mut rng);
            available[pick] = false;
            ens.push(pick);
            remaining -= members[pick].cost;
            pmf.push(members[pick].accuracy);
            if ens.len() % 2 == 1 {
                let energy = model.energy_from_pmf(pmf.probs())?;
                if tracker.offer(step, energy, || {
                    let mut s = ens.clone();
                    s.sort_unstable();
                    s
                }) {
                    return tracker.finish(pool, model, step, TerminatedBy::StopThreshold);
                }
            }
        }
    }
    tracker.finish(pool, model, maxstep, TerminatedBy::MaxStep)
}

fn copies(t: f64, remaining: f64) -> u64 {
    let m = floor(remaining / t + 1e-12);
    if m < 1.0 {
        1
    } else if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        m as u64
    }
}

fn sample<R: Rng>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return i;
            }
            u -= w;
            last = i;
        }
    }
    last
}
