//! Domain types shared by every module: members, pools, budgets, energy
//! models and checked selections.

use alloc::borrow::Cow;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::energy;
use crate::math;
use crate::{Error, Result};

/// One candidate voter: accuracy `p` in `[0, 1]` and a positive cost `t`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Member {
    pub id: String,
    pub accuracy: f64,
    pub cost: f64,
}

impl Member {
    pub fn new(id: impl Into<String>, accuracy: f64, cost: f64) -> Self {
        Self { id: id.into(), accuracy, cost }
    }

    /// Classic price-to-value key `p / t`.
    pub fn usefulness(&self) -> f64 {
        self.accuracy / self.cost
    }
}

/// Ordered, validated collection of members with unique ids.
///
/// Input order is preserved; every tie-break in the crate refers to the
/// lowest pool index.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Pool {
    members: Vec<Member>,
}

impl Pool {
    pub fn new(members: Vec<Member>) -> Result<Self> {
        let mut errors = Vec::new();
        if members.is_empty() {
            errors.push(Error::EmptyPool);
        }
        let mut seen = BTreeSet::new();
        let mut reported = BTreeSet::new();
        for m in &members {
            if !seen.insert(m.id.as_str()) && reported.insert(m.id.as_str()) {
                errors.push(Error::DuplicateId(m.id.clone()));
            }
            if !(0.0..=1.0).contains(&m.accuracy) {
                errors.push(Error::AccuracyOutOfRange(m.id.clone()));
            }
            if !(m.cost > 0.0 && m.cost.is_finite()) {
                errors.push(Error::NonPositiveCost(m.id.clone()));
            }
        }
        match errors.len() {
            0 => Ok(Self { members }),
            1 => Err(errors.pop().unwrap()),
            _ => Err(Error::InvalidPool(errors)),
        }
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Member> {
        self.members.get(index)
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.accuracy).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.cost).collect()
    }

    pub fn total_cost(&self) -> f64 {
        math::kahan_sum(self.members.iter().map(|m| m.cost))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.members.iter().position(|m| m.id == id)
    }

    pub fn into_members(self) -> Vec<Member> {
        self.members
    }
}

/// Validates raw `(id, accuracy, cost)` rows into a [`Pool`].
///
/// A single violation is reported as its specific error; several are
/// collected into [`Error::InvalidPool`].
pub fn validate_pool<S: Into<String>>(raw: impl IntoIterator<Item = (S, f64, f64)>) -> Result<Pool> {
    Pool::new(raw.into_iter().map(|(id, p, t)| Member::new(id, p, t)).collect())
}

/// Total allowed cost `T`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budget(f64);

impl Budget {
    pub fn new(total: f64) -> Result<Self> {
        if total > 0.0 && total.is_finite() {
            Ok(Self(total))
        } else {
            Err(Error::InvalidBudget(total))
        }
    }

    /// A budget that admits the whole pool.
    pub fn unconstrained(pool: &Pool) -> Self {
        Self(pool.total_cost())
    }

    pub fn total(self) -> f64 {
        self.0
    }

    /// Cost comparison with a relative slack for accumulated rounding.
    pub fn admits(self, cost: f64) -> bool {
        cost <= self.0 * (1.0 + 1e-12)
    }

    /// Whether `cost` fits in `remaining`, a part of this budget.
    pub fn admits_within(self, cost: f64, remaining: f64) -> bool {
        cost <= remaining + self.0 * 1e-12
    }
}

/// Logistic-type curve `F(x) = b / (b + (x / (1 - x))^a)` used to extend
/// constrained decision weights to any ensemble size via `p_{l,k} = F(k/l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintCurve {
    pub a: f64,
    pub b: f64,
}

impl ConstraintCurve {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > 0.0) {
            return Err(Error::DomainError("curve needs finite a and b > 0"));
        }
        Ok(Self { a, b })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        if x <= 0.0 || x >= 1.0 {
            // limits of (x/(1-x))^a at the ends of the interval
            let odds_pow = match (x <= 0.0, a.partial_cmp(&0.0)) {
                (_, Some(core::cmp::Ordering::Equal)) => 1.0,
                (true, Some(core::cmp::Ordering::Less)) | (false, Some(core::cmp::Ordering::Greater)) => {
                    f64::INFINITY
                }
                _ => 0.0,
            };
            return if odds_pow.is_infinite() { 0.0 } else { b / (b + odds_pow) };
        }
        let odds_pow = math::exp(a * math::ln(x / (1.0 - x)));
        if odds_pow.is_infinite() {
            0.0
        } else {
            b / (b + odds_pow)
        }
    }

    /// Weights `F(k/l)` for `k = 0..=l`.
    pub fn weights(&self, ell: usize) -> Vec<f64> {
        (0..=ell).map(|k| self.eval(k as f64 / ell as f64)).collect()
    }
}

/// Decision probabilities `p_{l,k}` of constrained majority voting: the
/// chance of a correct aggregate decision given `k` correct votes out of `l`.
///
/// An explicit table applies to the one size it was measured for; a fitted
/// curve covers every other size.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionWeights {
    table: Option<Vec<f64>>,
    curve: Option<ConstraintCurve>,
}

impl DecisionWeights {
    pub fn from_table(table: Vec<f64>) -> Result<Self> {
        check_weight_table(&table)?;
        Ok(Self { table: Some(table), curve: None })
    }

    pub fn from_curve(curve: ConstraintCurve) -> Self {
        Self { table: None, curve: Some(curve) }
    }

    pub fn with_curve(mut self, curve: ConstraintCurve) -> Self {
        self.curve = Some(curve);
        self
    }

    pub fn table(&self) -> Option<&[f64]> {
        self.table.as_deref()
    }

    pub fn curve(&self) -> Option<ConstraintCurve> {
        self.curve
    }

    /// Weights for an ensemble of `ell` members, `ell + 1` entries.
    pub fn weights_for(&self, ell: usize) -> Result<Cow<'_, [f64]>> {
        match (&self.table, &self.curve) {
            (Some(t), _) if t.len() == ell + 1 => Ok(Cow::Borrowed(t.as_slice())),
            (_, Some(c)) => Ok(Cow::Owned(c.weights(ell))),
            _ => Err(Error::MissingWeights(ell)),
        }
    }
}

pub(crate) fn check_weight_table(table: &[f64]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyInput);
    }
    let in_range = table.iter().all(|w| (0.0..=1.0).contains(w));
    let monotone = table.windows(2).all(|w| w[0] <= w[1]);
    if in_range && monotone {
        Ok(())
    } else {
        Err(Error::WeightsNotMonotone)
    }
}

/// Aggregation rule whose success probability is the knapsack objective.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EnergyModel {
    /// Correct iff strictly more than half of the members are correct.
    #[default]
    PlainMajority,
    /// Success-count distribution weighted by `p_{l,k}`.
    ConstrainedMajority(DecisionWeights),
}

impl EnergyModel {
    /// Energy of an ensemble with the given member accuracies; `0` when empty.
    pub fn energy(&self, accuracies: &[f64]) -> Result<f64> {
        if accuracies.is_empty() {
            return Ok(0.0);
        }
        let pmf = energy::success_count_pmf(accuracies)?;
        self.energy_from_pmf(pmf.probs())
    }

    /// Energy given the success-count distribution of the ensemble.
    pub fn energy_from_pmf(&self, pmf: &[f64]) -> Result<f64> {
        let ell = pmf.len().saturating_sub(1);
        if ell == 0 {
            return Ok(0.0);
        }
        match self {
            EnergyModel::PlainMajority => Ok(energy::majority_tail(pmf)),
            EnergyModel::ConstrainedMajority(w) => {
                let weights = w.weights_for(ell)?;
                Ok(energy::weighted_sum(pmf, &weights))
            }
        }
    }
}

/// A subset of pool indices with its cached total cost and energy.
///
/// Built only through [`Selection::evaluate`], so the cached values always
/// agree with a recomputation from the pool.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Selection {
    indices: Vec<usize>,
    total_cost: f64,
    energy: f64,
}

impl Selection {
    pub fn evaluate(pool: &Pool, model: &EnergyModel, indices: &[usize]) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSelection("duplicate index"));
        }
        if sorted.last().is_some_and(|&i| i >= pool.len()) {
            return Err(Error::InvalidSelection("index out of range"));
        }
        let members = pool.members();
        let total_cost = math::kahan_sum(sorted.iter().map(|&i| members[i].cost));
        let accs: Vec<f64> = sorted.iter().map(|&i| members[i].accuracy).collect();
        let energy = model.energy(&accs)?;
        Ok(Self { indices: sorted, total_cost, energy })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn ids<'a>(&self, pool: &'a Pool) -> Vec<&'a str> {
        self.indices.iter().map(|&i| pool.members()[i].id.as_str()).collect()
    }

    /// Recomputes cost and energy and compares with the cached values.
    pub fn verify(&self, pool: &Pool, model: &EnergyModel) -> bool {
        match Selection::evaluate(pool, model, &self.indices) {
            Ok(fresh) => {
                let cost_tol = 1e-12 * fresh.total_cost.abs().max(1.0);
                (fresh.total_cost - self.total_cost).abs() <= cost_tol
                    && (fresh.energy - self.energy).abs() <= 1e-12
            }
            Err(_) => false,
        }
    }
}

impl core::fmt::Display for Member {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} (p={}, t={})", self.id, self.accuracy, self.cost)
    }
}

impl From<(&str, f64, f64)> for Member {
    fn from((id, p, t): (&str, f64, f64)) -> Self {
        Member::new(id.to_string(), p, t)
    }
}
