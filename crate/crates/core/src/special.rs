//! Scalar special functions used by the statistics pipeline.

#![allow(clippy::excessive_precision)]

use crate::math::{abs, exp, ln, log1p, pow, sqrt};
use crate::{Error, Result};

const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, `g = 671/128`, 14 terms).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError("ln_gamma requires x > 0"));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    let mut y = x;
    let tmp = x + 5.242_187_5;
    let tmp = (x + 0.5) * ln(tmp) - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    tmp + ln(2.506_628_274_631_000_5 * ser / x)
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
}

/// `ln C(n, k)`.
pub(crate) fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma_unchecked(n as f64 + 1.0) - ln_gamma_unchecked(k as f64 + 1.0) - ln_gamma_unchecked((n - k) as f64 + 1.0)
}

fn check_shape(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError("beta shape parameters must be positive"))
    }
}

/// Regularized incomplete beta `I_x(a, b)`, the Beta(a, b) cdf.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    check_shape(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError("reg_inc_beta requires x in [0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * ln(x) + b * log1p(-x) - ln_beta(a, b);
    let front = exp(ln_front);
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cont_frac(a, b, x)? / a
    } else {
        1.0 - front * beta_cont_frac(b, a, 1.0 - x)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Beta(a, b) density.
pub fn beta_pdf(a: f64, b: f64, x: f64) -> Result<f64> {
    check_shape(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Ok(0.0);
    }
    if x == 0.0 || x == 1.0 {
        let edge_exp = if x == 0.0 { a } else { b };
        return Ok(if edge_exp < 1.0 {
            f64::INFINITY
        } else if edge_exp == 1.0 {
            exp(-ln_beta(a, b))
        } else {
            0.0
        });
    }
    Ok(exp((a - 1.0) * ln(x) + (b - 1.0) * log1p(-x) - ln_beta(a, b)))
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cont_frac(a: f64, b: f64, x: f64) -> Result<f64> {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if abs(d) < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if abs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if abs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if abs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if abs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if abs(del - 1.0) <= EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence("incomplete beta continued fraction"))
}

/// Inverse of [`reg_inc_beta`] in `x`: safeguarded Newton inside a
/// shrinking bracket, bisecting whenever a step leaves it.
pub fn inv_reg_inc_beta(a: f64, b: f64, q: f64) -> Result<f64> {
    check_shape(a, b)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::DomainError("inv_reg_inc_beta requires q in (0, 1)"));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = initial_beta_quantile(a, b, q).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let ln_b = ln_beta(a, b);
    for _ in 0..200 {
        let f = reg_inc_beta(a, b, x)? - q;
        if abs(f) <= 1e-14 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(x);
        }
        let pdf = exp((a - 1.0) * ln(x) + (b - 1.0) * log1p(-x) - ln_b);
        let newton = x - f / pdf;
        x = if pdf.is_finite() && pdf > 0.0 && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 && hi / lo > 4.0 {
            sqrt(lo * hi)
        } else if lo == 0.0 && hi < 1e-3 {
            hi * 1e-3
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence("inverse incomplete beta"))
}

fn initial_beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    if a >= 1.0 && b >= 1.0 {
        let pp = if q < 0.5 { q } else { 1.0 - q };
        let t = sqrt(-2.0 * ln(pp));
        let mut x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if q < 0.5 {
            x = -x;
        }
        let al = (x * x - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = x * sqrt(al + h) / h - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * exp(2.0 * w))
    } else {
        let lna = ln(a / (a + b));
        let lnb = ln(b / (a + b));
        let t = exp(a * lna) / a;
        let u = exp(b * lnb) / b;
        let w = t + u;
        if q < t / w {
            pow(a * w * q, 1.0 / a)
        } else {
            1.0 - pow(b * w * (1.0 - q), 1.0 / b)
        }
    }
}

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile `Φ⁻¹(q)`: rational initial approximation
/// followed by two Halley corrections against `erfc`.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::DomainError("normal_quantile requires q in (0, 1)"));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let r = sqrt(-2.0 * ln(p));
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let mut x = if q < P_LOW {
        tail(q)
    } else if q > 1.0 - P_LOW {
        -tail(1.0 - q)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let root_two_pi = sqrt(2.0 * core::f64::consts::PI);
    for _ in 0..2 {
        let e = normal_cdf(x) - q;
        let u = e * root_two_pi * exp(x * x / 2.0);
        x -= u / (1.0 + x * u / 2.0);
    }
    Ok(x)
}

/// Kolmogorov–Smirnov distance between the empirical cdf of an ascending
/// sample and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted_sample: &[f64], cdf: F) -> Result<f64> {
    let n = sorted_sample.len();
    if n < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: n });
    }
    if sorted_sample.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::DomainError("ks_statistic requires an ascending sample"));
    }
    let nf = n as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted_sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    Ok(d)
}

/// Asymptotic KS critical value `sqrt(-ln(alpha/2)/2) / sqrt(n)`;
/// `1.358/√n` at `alpha = 0.05`.
pub fn ks_critical_value(n: usize, significance: f64) -> f64 {
    sqrt(-ln(significance / 2.0) / 2.0) / sqrt(n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((ln_gamma(5.0).unwrap() - 24.0_f64.ln()).abs() < 1e-13);
        // Γ(1/2) = √π
        let half = 0.5 * core::f64::consts::PI.ln();
        assert!((ln_gamma(0.5).unwrap() - half).abs() < 1e-13);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn ln_gamma_large_argument_relative_accuracy() {
        // Stirling series with three correction terms is exact to double precision here
        for &x in &[1e3_f64, 1e4, 1e5, 1e6] {
            let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * core::f64::consts::PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x * x * x);
            let got = ln_gamma(x).unwrap();
            assert!((got - stirling).abs() <= 1e-15 * stirling.abs() * 8.0, "x={x}");
        }
    }

    #[test]
    fn inc_beta_simple_cases() {
        assert!((reg_inc_beta(1.0, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-14);
        assert!((reg_inc_beta(2.0, 2.0, 0.5).unwrap() - 0.5).abs() < 1e-14);
        // I_x(2, 1) = x^2
        assert!((reg_inc_beta(2.0, 1.0, 0.7).unwrap() - 0.49).abs() < 1e-14);
        assert_eq!(reg_inc_beta(3.0, 4.0, 0.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(3.0, 4.0, 1.0).unwrap(), 1.0);
        assert!(reg_inc_beta(0.0, 1.0, 0.5).is_err());
        assert!(reg_inc_beta(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn inverse_simple_cases() {
        assert!((inv_reg_inc_beta(1.0, 1.0, 0.9).unwrap() - 0.9).abs() < 1e-12);
        assert!((inv_reg_inc_beta(2.0, 2.0, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(inv_reg_inc_beta(2.0, 2.0, 0.0).is_err());
        assert!(inv_reg_inc_beta(2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn normal_quantile_values() {
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-15);
        assert!((normal_quantile(0.9).unwrap() - 1.281_551_565_544_600_4).abs() < 1e-12);
        assert!((normal_quantile(0.95).unwrap() - 1.644_853_626_951_472_2).abs() < 1e-12);
        assert!((normal_quantile(1e-10).unwrap() + 6.361_340_902_404_056).abs() < 1e-9);
        assert!(normal_quantile(0.0).is_err());
    }

    #[test]
    fn ks_edge_cases() {
        let n = 9;
        let sample: alloc::vec::Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let d = ks_statistic(&sample, |x| x).unwrap();
        assert!(d <= 1.0 / (n + 1) as f64 + 1e-12);
        let d = ks_statistic(&[0.5; 6], |x| x).unwrap();
        assert!(d >= 0.5);
        assert_eq!(ks_statistic(&[0.1, 0.2], |x| x).unwrap_err(), Error::TooFewSamples { needed: 5, got: 2 });
        assert!((ks_critical_value(1, 0.05) - 1.358).abs() < 1e-3);
    }
}
