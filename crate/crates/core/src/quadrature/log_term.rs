//! The integrand `f(t) = -ln(1 - e^{-t})`, its second derivative `rho`, and
//! its improper integrals through the dilogarithm `Li2(e^{-s})`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

pub const ZETA_2: f64 = PI * PI / 6.0;

/// `-ln(1 - e^{-t})` for `t > 0`.
pub fn neg_log_one_minus_exp(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("t", t, "(0, inf)"));
    }
    Ok(if t < LN_2 {
        -(-(-t).exp_m1()).ln()
    } else {
        -(-(-t).exp()).ln_1p()
    })
}

/// `rho(t) = 1/(e^t + e^{-t} - 2)`, the second derivative of
/// [`neg_log_one_minus_exp`].
pub fn rho(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("t", t, "(0, inf)"));
    }
    Ok(rho_unchecked(t))
}

pub(crate) fn rho_unchecked(t: f64) -> f64 {
    if t < 1.0 {
        let s = (0.5 * t).sinh();
        0.25 / (s * s)
    } else {
        let e = (-t).exp();
        let d = -(-t).exp_m1();
        e / (d * d)
    }
}

// B_2, B_4, ..., B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

/// `Li2(e^{-s}) = sum_k e^{-ks}/k^2` for `s >= 0`.
///
/// Small `s` uses the expansion around `s = 0`
/// `pi^2/6 - s + s ln s - s^2/4 + sum_n B_{2n} s^{2n+1} / (2n (2n+1)!)`;
/// larger `s` sums the defining series.
pub fn dilog_exp_neg(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain("s", s, "[0, inf)"));
    }
    if s == 0.0 {
        return Ok(ZETA_2);
    }
    if s.is_infinite() {
        return Ok(0.0);
    }
    if s < 0.5 {
        let mut value = ZETA_2 - s + s * s.ln() - 0.25 * s * s;
        // s^{2n+1}/(2n+1)!
        let mut power = s;
        for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
            let n = (i + 1) as f64;
            power *= s * s / ((2.0 * n) * (2.0 * n + 1.0));
            let term = b * power / (2.0 * n);
            value += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        return Ok(value);
    }
    let ratio = (-s).exp();
    let mut value = 0.0;
    let mut power = ratio;
    let mut k = 1.0;
    loop {
        let term = power / (k * k);
        value += term;
        if term < 1e-18 * value {
            return Ok(value);
        }
        power *= ratio;
        k += 1.0;
    }
}

/// `int_S^inf f(t) dt = Li2(e^{-S})` for `S >= 0`.
pub fn tail_integral(s: f64) -> Result<f64> {
    dilog_exp_neg(s)
}

/// `int_0^T f(t) dt = pi^2/6 - Li2(e^{-T})`.
pub fn head_integral(t: f64) -> Result<f64> {
    Ok(ZETA_2 - dilog_exp_neg(t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dilog_series_oracle(s: f64) -> f64 {
        let r = (-s).exp();
        (1..2_000_000)
            .map(|k| r.powi(k) / (k as f64 * k as f64))
            .sum()
    }

    #[test]
    fn dilog_branches_agree_with_series() {
        for &s in &[0.05, 0.2, 0.49, 0.5, 0.51, 1.0, 3.0] {
            let oracle = dilog_series_oracle(s);
            let v = dilog_exp_neg(s).unwrap();
            assert!((v - oracle).abs() < 1e-12, "s={s}: {v} vs {oracle}");
        }
    }

    #[test]
    fn dilog_at_zero_is_zeta2() {
        assert_eq!(dilog_exp_neg(0.0).unwrap(), ZETA_2);
        assert!((dilog_exp_neg(1e-12).unwrap() - ZETA_2).abs() < 1e-10);
    }

    #[test]
    fn rho_examples() {
        assert!((rho(LN_2).unwrap() - 2.0).abs() < 1e-14);
        assert!(rho(0.0).is_err());
        // both branches meet at t = 1
        let below = 0.25 / (0.5f64.sinh().powi(2));
        let above = rho(1.0).unwrap();
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn rho_is_second_derivative() {
        let h = 1e-4;
        for &t in &[0.3, 1.0, 2.5] {
            let f = |x| neg_log_one_minus_exp(x).unwrap();
            let fd = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            assert!((fd - rho(t).unwrap()).abs() / rho(t).unwrap() < 1e-6);
        }
    }

    #[test]
    fn integrand_small_and_large_arguments() {
        let small = neg_log_one_minus_exp(1e-10).unwrap();
        assert!((small - (-(1e-10f64).ln())).abs() < 1e-9);
        let large = neg_log_one_minus_exp(50.0).unwrap();
        assert!((large / (-50.0f64).exp() - 1.0).abs() < 1e-15);
    }
}
