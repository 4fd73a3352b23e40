//! Stochastic characterization of the ensemble energy.
//!
//! Member accuracies are modeled as i.i.d. draws with mean `mu_p` and
//! variance `var_p` (a method-of-moments beta fit when a goodness-of-fit
//! test accepts it, sample moments otherwise). From those moments follow the
//! mean and variance of the energy of an ensemble of `l` members, a beta or
//! normal model for that energy, and from it the early-termination threshold
//! `STOP` together with the escape bound `MAXSTEP`.

use alloc::vec::Vec;

use crate::math::{self, ceil, exp, ln, pow, sqrt, KahanSum};
use crate::special::{self, ln_gamma_unchecked};
use crate::types::ConstraintCurve;
use crate::{Budget, DecisionWeights, Error, Result};

/// Default significance of the goodness-of-fit test.
pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;
/// Lower bound applied to `MAXSTEP`; the combinatorial estimate is tiny for
/// small pools.
pub const MAXSTEP_FLOOR: u64 = 1_000;
/// Upper bound applied to `MAXSTEP`.
pub const MAXSTEP_CAP: u64 = 1_000_000_000;
/// Largest `l / n` for which `n^l / l!` replaces the exact binomial.
pub const STIRLING_RATIO: f64 = 0.25;
/// Quantile level of the normal-branch threshold.
pub const NORMAL_STOP_LEVEL: f64 = 0.9;

/// How the accuracy moments were obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum AccuracySource {
    BetaFit { alpha: f64, beta: f64 },
    Empirical,
}

/// Distribution of member accuracies, summarized by its first two moments.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AccuracyDistribution {
    pub source: AccuracySource,
    pub mean: f64,
    pub variance: f64,
}

impl AccuracyDistribution {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::DomainError("beta parameters must be positive"));
        }
        let (mean, variance) = beta_moments(alpha, beta);
        Ok(Self { source: AccuracySource::BetaFit { alpha, beta }, mean, variance })
    }

    pub fn empirical(mean: f64, variance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) || !(variance >= 0.0) || variance > mean * (1.0 - mean) + 1e-12 {
            return Err(Error::InvalidMoments { mean, var: variance });
        }
        Ok(Self { source: AccuracySource::Empirical, mean, variance })
    }

    pub fn is_beta(&self) -> bool {
        matches!(self.source, AccuracySource::BetaFit { .. })
    }
}

/// Mean and variance of Beta(alpha, beta).
pub fn beta_moments(alpha: f64, beta: f64) -> (f64, f64) {
    let s = alpha + beta;
    (alpha / s, alpha * beta / (s * s * (s + 1.0)))
}

/// Sample mean and unbiased sample variance.
pub fn sample_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = math::kahan_sum(values.iter().copied()) / n;
    let ss = math::kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, if values.len() > 1 { ss / (n - 1.0) } else { 0.0 })
}

/// Fits the accuracy distribution: method-of-moments beta when every value
/// is strictly inside `(0, 1)` and a Kolmogorov–Smirnov test at
/// `significance` does not reject, sample moments otherwise.
pub fn fit_accuracy_distribution(accuracies: &[f64], significance: f64) -> Result<AccuracyDistribution> {
    let n = accuracies.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::DomainError("significance must lie in (0, 1)"));
    }
    let (mean, var) = sample_moments(accuracies);
    let interior = accuracies.iter().all(|&p| p > 0.0 && p < 1.0);
    if n >= 5 && interior {
        if let Ok((alpha, beta)) = q_beta_params(mean, var) {
            let mut sorted = accuracies.to_vec();
            sorted.sort_by(f64::total_cmp);
            let d = special::ks_statistic(&sorted, |x| special::reg_inc_beta(alpha, beta, x).unwrap_or(f64::NAN))?;
            if d <= special::ks_critical_value(n, significance) {
                return AccuracyDistribution::beta(alpha, beta);
            }
        }
    }
    // the unbiased estimator can exceed the Bernoulli bound for boundary-heavy samples
    AccuracyDistribution::empirical(mean, var.min(mean * (1.0 - mean)))
}

/// Mean energy of `l` i.i.d. members with mean accuracy `mu_p`: the
/// binomial majority tail.
pub fn mean_q(mu_p: f64, ell: usize) -> f64 {
    if mu_p == 0.5 && ell % 2 == 1 {
        return 0.5;
    }
    let k_min = ell / 2 + 1;
    if mu_p > 0.5 {
        // the small lower tail keeps full relative precision
        return 1.0 - binomial_mix(mu_p, ell, |k| if k < k_min { 1.0 } else { 0.0 });
    }
    binomial_mix(mu_p, ell, |k| if k >= k_min { 1.0 } else { 0.0 })
}

fn binomial_mix(mu: f64, ell: usize, weight: impl Fn(usize) -> f64) -> f64 {
    if ell == 0 {
        return 0.0;
    }
    if mu <= 0.0 {
        return weight(0);
    }
    if mu >= 1.0 {
        return weight(ell);
    }
    let ln_fact = ln_factorials(ell);
    let (lm, lq) = (ln(mu), math::log1p(-mu));
    let mut acc = KahanSum::default();
    for k in 0..=ell {
        let w = weight(k);
        if w == 0.0 {
            continue;
        }
        let ln_c = ln_fact[ell] - ln_fact[k] - ln_fact[ell - k];
        acc.add(w * exp(ln_c + k as f64 * lm + (ell - k) as f64 * lq));
    }
    acc.value()
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        if i < 32 {
            acc += ln(i as f64);
            out.push(acc);
        } else {
            out.push(ln_gamma_unchecked(i as f64 + 1.0));
        }
    }
    out
}

fn check_moments(mu_p: f64, var_p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu_p) || !(var_p >= 0.0) || var_p > mu_p * (1.0 - mu_p) + 1e-12 {
        return Err(Error::InvalidMoments { mean: mu_p, var: var_p });
    }
    Ok(())
}

// Second-moment building blocks: both voters right, both wrong, one of each.
fn pair_moments(mu_p: f64, var_p: f64) -> (f64, f64, f64) {
    let s_t = var_p + mu_p * mu_p;
    let s_f = var_p + (1.0 - mu_p) * (1.0 - mu_p);
    let s_tf = (mu_p * (1.0 - mu_p) - var_p).max(0.0);
    (s_t, s_f, s_tf)
}

/// Variance of the majority energy of `l` members whose accuracies are
/// i.i.d. with mean `mu_p` and variance `var_p`.
///
/// `E[q^2]` counts pairs of independent vote outcomes sharing the same
/// accuracies: `m` members right in both, `k` right in the first,
/// `h` right only in the second.
pub fn var_q(mu_p: f64, var_p: f64, ell: usize) -> Result<f64> {
    check_moments(mu_p, var_p)?;
    match ell {
        1 => return Ok(var_p),
        _ if ell == 0 || var_p == 0.0 => return Ok(0.0),
        _ => {}
    }
    let (s_t, s_f, s_tf) = pair_moments(mu_p, var_p);
    let k_min = ell / 2 + 1;
    let ln_fact = ln_factorials(ell);
    let ln_choose = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
    let mut second = KahanSum::default();
    for k in k_min..=ell {
        for m in 1..=k {
            let h_min = k_min.saturating_sub(m);
            if h_min > ell - k {
                continue;
            }
            for h in h_min..=ell - k {
                let coef = exp(ln_choose(ell, k) + ln_choose(k, m) + ln_choose(ell - k, h));
                let term = pow(s_t, m as f64) * pow(s_tf, (k - m + h) as f64) * pow(s_f, (ell - k - h) as f64);
                second.add(coef * term);
            }
        }
    }
    let mean = mean_q(mu_p, ell);
    Ok(clamp_variance(second.value() - mean * mean))
}

fn clamp_variance(v: f64) -> f64 {
    if (-1e-10..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Mean energy under decision weights `w[k]`, `k = 0..=l`.
pub fn mean_q_weighted(mu_p: f64, weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ell = weights.len() - 1;
    Ok(binomial_mix(mu_p, ell, |k| weights[k]))
}

/// Variance of the energy under decision weights `w[k]`; reduces to
/// [`var_q`] for the majority step weights.
pub fn var_q_weighted(mu_p: f64, var_p: f64, weights: &[f64]) -> Result<f64> {
    check_moments(mu_p, var_p)?;
    if weights.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ell = weights.len() - 1;
    if ell == 0 {
        return Ok(0.0);
    }
    let (s_t, s_f, s_tf) = pair_moments(mu_p, var_p);
    let ln_fact = ln_factorials(ell);
    let mut second = KahanSum::default();
    // m: right in both, j: right only in the first, h: right only in the second
    for m in 0..=ell {
        for j in 0..=ell - m {
            let wa = weights[m + j];
            if wa == 0.0 {
                continue;
            }
            for h in 0..=ell - m - j {
                let wb = weights[m + h];
                if wb == 0.0 {
                    continue;
                }
                let r = ell - m - j - h;
                let coef = exp(ln_fact[ell] - ln_fact[m] - ln_fact[j] - ln_fact[h] - ln_fact[r]);
                let term = pow(s_t, m as f64) * pow(s_tf, (j + h) as f64) * pow(s_f, r as f64);
                second.add(coef * term * wa * wb);
            }
        }
    }
    let mean = mean_q_weighted(mu_p, weights)?;
    Ok(clamp_variance(second.value() - mean * mean))
}

// ceil that ignores rounding noise just above an integer
fn ceil_exact(x: f64) -> f64 {
    ceil(x - 1e-12 * x.abs().max(1.0))
}

fn clamp_size(x: f64, n: usize) -> usize {
    let v = ceil_exact(x);
    if !(v >= 1.0) {
        1
    } else if v >= n as f64 {
        n
    } else {
        v as usize
    }
}

/// Expected ensemble size under the conditional-exponential cost model,
/// `ceil(T (beta - 1) / (alpha + beta - 1))`, at least `1`.
pub fn estimate_ell_beta(alpha_p: f64, beta_p: f64, budget: f64) -> Result<usize> {
    if !(beta_p > 1.0) || !(alpha_p > 0.0) {
        return Err(Error::DomainError("estimate_ell_beta requires beta > 1 and alpha > 0"));
    }
    if !(budget > 0.0) {
        return Err(Error::InvalidBudget(budget));
    }
    Ok(clamp_size(budget * (beta_p - 1.0) / (alpha_p + beta_p - 1.0), usize::MAX))
}

/// The alternative expectation `beta T / (alpha + beta)` of the ensemble
/// size when cost rates are drawn once per budget; informational only.
pub fn expected_ell_shared_rate(alpha_p: f64, beta_p: f64, budget: f64) -> f64 {
    beta_p * budget / (alpha_p + beta_p)
}

/// `ceil(T / mean cost)`, clamped to `[1, n]`.
pub fn estimate_ell_mean_cost(costs: &[f64], budget: f64) -> usize {
    let n = costs.len().max(1);
    let total = math::kahan_sum(costs.iter().copied());
    clamp_size(budget * costs.len() as f64 / total, n)
}

/// Upper 5% Poisson-quantile size estimate
/// `ceil(T/Σt + 0.5 + 1.64 sqrt(T/Σt))`, clamped to `[1, n]`.
pub fn estimate_ell_poisson_quantile(costs: &[f64], budget: f64) -> usize {
    let n = costs.len().max(1);
    let rate = budget / math::kahan_sum(costs.iter().copied());
    clamp_size(rate + 0.5 + 1.64 * sqrt(rate), n)
}

/// Beta parameters matching an energy mean and variance.
pub fn q_beta_params(mu_q: f64, var_q: f64) -> Result<(f64, f64)> {
    if !(mu_q > 0.0 && mu_q < 1.0 && var_q > 0.0 && var_q < mu_q * (1.0 - mu_q)) {
        return Err(Error::DegenerateVariance { mean: mu_q, var: var_q });
    }
    let alpha = ((1.0 - mu_q) / var_q - 1.0 / mu_q) * mu_q * mu_q;
    let beta = alpha * (1.0 / mu_q - 1.0);
    Ok((alpha, beta))
}

/// Mode of Beta(alpha, beta) and the skewness `(1 - mode) / sigma`.
pub fn mode_and_skewness(alpha_q: f64, beta_q: f64, sigma_q: f64) -> Result<(f64, f64)> {
    if !(alpha_q > 1.0 && beta_q > 1.0) {
        return Err(Error::DomainError("mode needs alpha > 1 and beta > 1"));
    }
    if !(sigma_q > 0.0) {
        return Err(Error::DomainError("skewness needs sigma > 0"));
    }
    let mode = (alpha_q - 1.0) / (alpha_q + beta_q - 2.0);
    Ok((mode, (1.0 - mode) / sigma_q))
}

/// Quantile level of the beta-branch threshold for a given skewness.
pub fn stop_probability(gamma: f64) -> f64 {
    if gamma <= 1.0 {
        0.6
    } else if gamma <= 2.5 {
        0.8
    } else if gamma <= 3.5 {
        0.9
    } else {
        0.95
    }
}

/// Least-squares fit of `F(x) = b / (b + (x/(1-x))^a)` to the interior
/// entries of a decision-weight table, linear in
/// `ln(1/F - 1) = a ln(x/(1-x)) - ln b` with `x = k/l`.
pub fn fit_constraint_curve(weights: &[f64]) -> Result<ConstraintCurve> {
    if weights.len() < 2 {
        return Err(Error::TooFewInteriorPoints(0));
    }
    let ell = (weights.len() - 1) as f64;
    let points: Vec<(f64, f64)> = weights
        .iter()
        .enumerate()
        .filter(|&(k, &w)| k > 0 && (k as f64) < ell && w > 0.0 && w < 1.0)
        .map(|(k, &w)| {
            let x = k as f64 / ell;
            (ln(x / (1.0 - x)), ln(1.0 / w - 1.0))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewInteriorPoints(points.len()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let a = sxy / sxx;
    let intercept = my - a * mx;
    ConstraintCurve::new(a, exp(-intercept))
}

/// Mean constrained energy of `l` i.i.d. members with mean accuracy `mu_p`
/// when the decision weights follow the fitted curve:
/// `sum_k F(k/l) C(l,k) mu^k (1-mu)^(l-k)`.
pub fn constrained_mean_q(curve: ConstraintCurve, mu_p: f64, ell: usize) -> Result<f64> {
    if !(mu_p > 0.0 && mu_p < 1.0) {
        return Err(Error::DomainError("constrained_mean_q requires mu_p in (0, 1)"));
    }
    if ell == 0 {
        return Err(Error::DomainError("constrained_mean_q requires l >= 1"));
    }
    mean_q_weighted(mu_p, &curve.weights(ell))
}

/// Rule used to estimate the ensemble size reachable within the budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EllEstimator {
    /// Beta-model estimate for beta-fitted accuracies, mean cost otherwise.
    #[default]
    Auto,
    Beta,
    MeanCost,
    PoissonQuantile,
}

/// Which estimate produced the ensemble size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EllSource {
    /// No budget: the whole pool.
    PoolSize,
    Beta,
    MeanCost,
    PoissonQuantile,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum EnergyShape {
    Beta { alpha: f64, beta: f64, mode: f64, skewness: f64, stop_probability: f64 },
    Normal,
}

/// Model of the energy of an ensemble of the estimated size.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyDistribution {
    pub ell_hat: usize,
    pub mean: f64,
    pub variance: f64,
    pub shape: EnergyShape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MaxStepMethod {
    Stirling,
    ExactBinomial,
}

/// Provenance of a derived [`StopRule`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StopDerivation {
    pub accuracy: AccuracyDistribution,
    pub ell_source: EllSource,
    pub energy: EnergyDistribution,
    /// Decision weights used for the energy moments, when constrained.
    pub constrained: bool,
    pub maxstep_method: MaxStepMethod,
    /// Combinatorial estimate before the floor and cap.
    pub maxstep_raw: f64,
}

/// Early-termination threshold and escape bound for the searches.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StopRule {
    pub stop: f64,
    pub maxstep: u64,
    /// `None` when the rule was given by hand.
    pub derivation: Option<StopDerivation>,
}

impl StopRule {
    pub fn fixed(stop: f64, maxstep: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&stop) {
            return Err(Error::DomainError("STOP must lie in [0, 1]"));
        }
        if maxstep == 0 {
            return Err(Error::DomainError("MAXSTEP must be at least 1"));
        }
        Ok(Self { stop, maxstep, derivation: None })
    }

    pub fn with_maxstep(mut self, maxstep: u64) -> Self {
        self.maxstep = maxstep.max(1);
        self
    }
}

/// Knobs of [`derive_stop_rule`].
#[derive(Clone, Debug, PartialEq)]
pub struct StopRuleOptions {
    pub ell_estimator: EllEstimator,
    pub maxstep_floor: u64,
    pub maxstep_cap: u64,
    /// Constrained decision weights; energy moments then use `p_{l,k}`.
    pub weights: Option<DecisionWeights>,
}

impl Default for StopRuleOptions {
    fn default() -> Self {
        Self { ell_estimator: EllEstimator::Auto, maxstep_floor: MAXSTEP_FLOOR, maxstep_cap: MAXSTEP_CAP, weights: None }
    }
}

/// Derives `STOP` and `MAXSTEP` for a pool of `n` members.
///
/// Without a budget the estimated ensemble is the whole pool. The energy of
/// an ensemble of the estimated size is modeled as Beta when its moment
/// parameters satisfy `1 < beta_q < alpha_q`, and `STOP` is the quantile
/// selected by the skewness; otherwise `STOP = mu + z_0.9 sigma / sqrt(l)`,
/// capped at `1`.
pub fn derive_stop_rule(
    dist: &AccuracyDistribution,
    n: usize,
    budget: Option<Budget>,
    costs: Option<&[f64]>,
    opts: &StopRuleOptions,
) -> Result<StopRule> {
    if n == 0 {
        return Err(Error::EmptyPool);
    }
    let (ell_hat, ell_source) = estimate_size(dist, n, budget, costs, opts.ell_estimator)?;

    let (mean, variance) = match &opts.weights {
        None => (mean_q(dist.mean, ell_hat), var_q(dist.mean, dist.variance, ell_hat)?),
        Some(w) => {
            let w = w.weights_for(ell_hat)?;
            (mean_q_weighted(dist.mean, &w)?, var_q_weighted(dist.mean, dist.variance, &w)?)
        }
    };
    let sigma = sqrt(variance);

    let (shape, stop) = match q_beta_params(mean, variance) {
        Ok((alpha, beta)) if 1.0 < beta && beta < alpha => {
            let (mode, skewness) = mode_and_skewness(alpha, beta, sigma)?;
            let rho = stop_probability(skewness);
            let stop = special::inv_reg_inc_beta(alpha, beta, rho)?;
            (EnergyShape::Beta { alpha, beta, mode, skewness, stop_probability: rho }, stop)
        }
        _ => {
            let z = special::normal_quantile(NORMAL_STOP_LEVEL)?;
            let stop = (z * sigma / sqrt(ell_hat as f64) + mean).min(1.0);
            (EnergyShape::Normal, stop)
        }
    };

    let (maxstep_method, maxstep_raw) = maxstep_estimate(n, ell_hat);
    let capped = if maxstep_raw.is_finite() { math::round(maxstep_raw) } else { f64::INFINITY };
    let maxstep = if capped >= opts.maxstep_cap as f64 { opts.maxstep_cap } else { capped as u64 };
    let maxstep = maxstep.max(opts.maxstep_floor).min(opts.maxstep_cap).max(1);

    Ok(StopRule {
        stop,
        maxstep,
        derivation: Some(StopDerivation {
            accuracy: *dist,
            ell_source,
            energy: EnergyDistribution { ell_hat, mean, variance, shape },
            constrained: opts.weights.is_some(),
            maxstep_method,
            maxstep_raw,
        }),
    })
}

fn estimate_size(
    dist: &AccuracyDistribution,
    n: usize,
    budget: Option<Budget>,
    costs: Option<&[f64]>,
    estimator: EllEstimator,
) -> Result<(usize, EllSource)> {
    let Some(budget) = budget else {
        return Ok((n, EllSource::PoolSize));
    };
    let costs = costs.ok_or(Error::DomainError("a budget requires member costs"))?;
    if costs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let t = budget.total();
    let estimator = match estimator {
        EllEstimator::Auto if dist.is_beta() => EllEstimator::Beta,
        EllEstimator::Auto => EllEstimator::MeanCost,
        other => other,
    };
    Ok(match estimator {
        EllEstimator::Beta => {
            let (alpha, beta) = match dist.source {
                AccuracySource::BetaFit { alpha, beta } => (alpha, beta),
                AccuracySource::Empirical => q_beta_params(dist.mean, dist.variance)?,
            };
            (estimate_ell_beta(alpha, beta, t)?.min(n), EllSource::Beta)
        }
        EllEstimator::PoissonQuantile => (estimate_ell_poisson_quantile(costs, t).min(n), EllSource::PoissonQuantile),
        _ => (estimate_ell_mean_cost(costs, t).min(n), EllSource::MeanCost),
    })
}

/// `C(n, l)`: `n^l / l!` when `l / n` is small, the exact binomial
/// otherwise.
pub fn maxstep_estimate(n: usize, ell: usize) -> (MaxStepMethod, f64) {
    if (ell as f64) / (n as f64) <= STIRLING_RATIO {
        let v = exp(ell as f64 * ln(n as f64) - ln_gamma_unchecked(ell as f64 + 1.0));
        (MaxStepMethod::Stirling, v)
    } else {
        (MaxStepMethod::ExactBinomial, exact_binomial(n, ell))
    }
}

fn exact_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut c: u128 = 1;
    for i in 0..k {
        match c.checked_mul((n - i) as u128) {
            Some(v) => c = v / (i as u128 + 1),
            None => return exp(special::ln_choose(n as u64, k as u64)),
        }
    }
    c as f64
}
