//! Exact ensemble energies.
//!
//! The number of correct votes in an ensemble of independent members is
//! Poisson-binomial; both the plain majority energy and the constrained
//! variant are linear functionals of that distribution. Brute-force
//! enumeration and an exhaustive subset search serve as ground truth.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::types::check_weight_table;
use crate::{Budget, EnergyModel, Error, Pool, Result, Selection};

/// Largest ensemble [`brute_force_accuracy`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 25;
/// Largest pool [`best_subset_exhaustive`] will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 22;

/// Energies closer than this are treated as equal by the exhaustive search.
const TIE_EPS: f64 = 1e-14;

/// Distribution of the number of correct members: entry `k` is
/// `P(exactly k correct)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessCountPmf {
    probs: Vec<f64>,
}

impl SuccessCountPmf {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of members the distribution was built from.
    pub fn ensemble_size(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Incrementally built success-count distribution; adding a member is
/// `O(l)`.
#[derive(Clone, Debug)]
pub struct PmfBuilder {
    probs: Vec<f64>,
}

impl Default for PmfBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl PmfBuilder {
    pub fn new() -> Self {
        let mut probs = Vec::with_capacity(16);
        probs.push(1.0);
        Self { probs }
    }

    pub fn push(&mut self, p: f64) {
        let q = 1.0 - p;
        self.probs.push(0.0);
        for k in (1..self.probs.len()).rev() {
            self.probs[k] = self.probs[k] * q + self.probs[k - 1] * p;
        }
        self.probs[0] *= q;
    }

    pub fn clear(&mut self) {
        self.probs.clear();
        self.probs.push(1.0);
    }

    pub fn len(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Poisson-binomial distribution of correct votes, by the `O(l^2)`
/// convolution recurrence.
pub fn success_count_pmf(accuracies: &[f64]) -> Result<SuccessCountPmf> {
    if accuracies.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut b = PmfBuilder::new();
    for &p in accuracies {
        b.push(p);
    }
    Ok(SuccessCountPmf { probs: b.probs })
}

/// `sum_{k > l/2} pmf[k]`; an exact tie on even `l` is a failure.
pub(crate) fn majority_tail(pmf: &[f64]) -> f64 {
    let ell = pmf.len() - 1;
    math::kahan_sum(pmf[ell / 2 + 1..].iter().copied())
}

pub(crate) fn weighted_sum(pmf: &[f64], weights: &[f64]) -> f64 {
    math::kahan_sum(pmf.iter().zip(weights).map(|(p, w)| p * w))
}

/// Plain majority-voting accuracy `q_l` of independent members.
pub fn majority_accuracy(accuracies: &[f64]) -> Result<f64> {
    let pmf = success_count_pmf(accuracies)?;
    Ok(majority_tail(pmf.probs()))
}

/// Constrained majority-voting accuracy `sum_k p_{l,k} P(k correct)`.
pub fn constrained_accuracy(accuracies: &[f64], weights: &[f64]) -> Result<f64> {
    let pmf = success_count_pmf(accuracies)?;
    if weights.len() != accuracies.len() + 1 {
        return Err(Error::WeightsLengthMismatch { expected: accuracies.len() + 1, got: weights.len() });
    }
    check_weight_table(weights)?;
    Ok(weighted_sum(pmf.probs(), weights))
}

/// Sums the model's decision probability over all `2^l` vote outcomes.
pub fn brute_force_accuracy(accuracies: &[f64], model: &EnergyModel) -> Result<f64> {
    let ell = accuracies.len();
    if ell == 0 {
        return Err(Error::EmptyInput);
    }
    if ell > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { size: ell, limit: BRUTE_FORCE_LIMIT });
    }
    let weights: Vec<f64> = match model {
        EnergyModel::PlainMajority => (0..=ell).map(|k| if k > ell / 2 { 1.0 } else { 0.0 }).collect(),
        EnergyModel::ConstrainedMajority(w) => w.weights_for(ell)?.into_owned(),
    };
    let mut acc = KahanSum::default();
    for outcome in 0u32..(1u32 << ell) {
        let mut prob = 1.0;
        for (i, &p) in accuracies.iter().enumerate() {
            prob *= if outcome >> i & 1 == 1 { p } else { 1.0 - p };
        }
        acc.add(prob * weights[outcome.count_ones() as usize]);
    }
    Ok(acc.value())
}

/// Exhaustive optimum over every non-empty subset within the budget.
///
/// Ties (within `1e-14`) go to the smaller subset, then to the
/// lexicographically smallest index list.
pub fn best_subset_exhaustive(pool: &Pool, budget: Budget, model: &EnergyModel) -> Result<Selection> {
    let n = pool.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { size: n, limit: EXHAUSTIVE_LIMIT });
    }
    if !pool.members().iter().any(|m| budget.admits(m.cost)) {
        return Err(Error::NoFeasibleSubset);
    }
    let mut search = Exhaustive {
        pool,
        budget,
        model,
        current: Vec::with_capacity(n),
        stack: vec![PmfBuilder::new()],
        best: None,
    };
    search.visit(0, 0.0)?;
    let (_, indices) = search.best.expect("a feasible singleton exists");
    Selection::evaluate(pool, model, &indices)
}

struct Exhaustive<'a> {
    pool: &'a Pool,
    budget: Budget,
    model: &'a EnergyModel,
    current: Vec<usize>,
    stack: Vec<PmfBuilder>,
    best: Option<(f64, Vec<usize>)>,
}

impl Exhaustive<'_> {
    fn visit(&mut self, next: usize, cost: f64) -> Result<()> {
        for i in next..self.pool.len() {
            let m = &self.pool.members()[i];
            let new_cost = cost + m.cost;
            if !self.budget.admits(new_cost) {
                continue;
            }
            let mut pmf = self.stack.last().unwrap().clone();
            pmf.push(m.accuracy);
            let energy = self.model.energy_from_pmf(pmf.probs())?;
            self.current.push(i);
            self.offer(energy);
            self.stack.push(pmf);
            self.visit(i + 1, new_cost)?;
            self.stack.pop();
            self.current.pop();
        }
        Ok(())
    }

    fn offer(&mut self, energy: f64) {
        let better = match &self.best {
            None => true,
            Some((e, idx)) => {
                if energy > e + TIE_EPS {
                    true
                } else if (energy - e).abs() <= TIE_EPS {
                    (self.current.len(), &self.current) < (idx.len(), idx)
                } else {
                    false
                }
            }
        };
        if better {
            self.best = Some((energy, self.current.clone()));
        }
    }
}
