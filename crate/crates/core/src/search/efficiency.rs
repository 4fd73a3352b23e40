use alloc::vec::Vec;

use crate::energy::PmfBuilder;
use crate::math::{floor, KahanSum};
use crate::{special, Error, Result};

// beyond this many copies the tail comes from the incomplete beta function
const DIRECT_LIMIT: u64 = 64;

fn copies(t: f64, remaining: f64) -> u64 {
    if !(t > 0.0) || !(remaining >= 0.0) {
        return 0;
    }
    let m = floor(remaining / t + 1e-12);
    if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        m as u64
    }
}

/// Energy of an ensemble made of as many copies of the item as fit in
/// `remaining`: the majority tail of `Binomial(m, p)`, `m = floor(remaining / t)`.
/// `0` when not even one copy fits.
pub fn item_efficiency(p: f64, t: f64, remaining: f64) -> f64 {
    majority_of_copies(p, copies(t, remaining))
}

/// The printed efficiency: the full binomial sum, `1` whenever a copy fits.
pub fn item_efficiency_literal(t: f64, remaining: f64) -> f64 {
    if copies(t, remaining) >= 1 {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn majority_of_copies(p: f64, m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    if m <= DIRECT_LIMIT {
        let mut b = PmfBuilder::new();
        for _ in 0..m {
            b.push(p);
        }
        let pmf = b.probs();
        return pmf[(m / 2 + 1) as usize..].iter().copied().collect::<KahanSum>().value();
    }
    // P(X >= k) = I_p(k, m - k + 1)
    let k = (m / 2 + 1) as f64;
    special::reg_inc_beta(k, m as f64 - k + 1.0, p).unwrap_or(0.0)
}

/// Normalizes efficiencies into selection probabilities.
pub fn selection_distribution(efficiencies: &[f64]) -> Result<Vec<f64>> {
    if efficiencies.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::DomainError("efficiencies must be non-negative"));
    }
    let total = efficiencies.iter().copied().collect::<KahanSum>().value();
    if !(total > 0.0) {
        return Err(Error::AllZero);
    }
    Ok(efficiencies.iter().map(|e| e / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn efficiency_examples() {
        assert!((item_efficiency(0.7, 2.0, 3.0) - 0.7).abs() < 1e-15);
        assert!((item_efficiency(0.6, 1.0, 3.5) - 0.648).abs() < 1e-15);
        assert_eq!(item_efficiency(0.9, 2.0, 1.9), 0.0);
        assert_eq!(item_efficiency(0.6, 0.1, 0.3), item_efficiency(0.6, 1.0, 3.0));
        assert_eq!(item_efficiency_literal(1.0, 5.0), 1.0);
        assert_eq!(item_efficiency_literal(6.0, 5.0), 0.0);
    }

    #[test]
    fn beta_tail_matches_direct_sum() {
        for &p in &[0.3, 0.5, 0.55, 0.8] {
            for m in [65u64, 101, 200] {
                let mut b = PmfBuilder::new();
                for _ in 0..m {
                    b.push(p);
                }
                let direct: f64 = b.probs()[(m / 2 + 1) as usize..].iter().sum();
                assert!((majority_of_copies(p, m) - direct).abs() < 1e-12, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn distribution_examples() {
        assert_eq!(selection_distribution(&[1.0; 4]).unwrap(), [0.25; 4]);
        assert_eq!(selection_distribution(&[0.8, 0.2]).unwrap(), [0.8, 0.2]);
        let d = selection_distribution(&[0.648, 0.648, 0.216]).unwrap();
        assert!((d[0] - 3.0 / 7.0).abs() < 1e-15 && (d[2] - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(selection_distribution(&[0.0, 0.0]).unwrap_err(), Error::AllZero);
    }
}
