use serde::Serialize;

use crate::qseries::QParam;

/// `r^j = q^m` with `gcd(j, m) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerRelation {
    pub j: u32,
    pub m: u32,
    /// `|j ln r - m ln q|`
    pub residual: f64,
}

pub const DEFAULT_MAX_EXPONENT: u32 = 64;
pub const DEFAULT_RELATION_TOL: f64 = 1e-9;

/// Look for `r^j = q^m` among the continued-fraction convergents `m/j` of
/// `ln r / ln q`.
///
/// Returns the first convergent with `j, m <= max_exponent` and
/// `|j ln r - m ln q| < tol * |ln q|`.
pub fn detect_power_relation(
    q: QParam,
    r: QParam,
    max_exponent: u32,
    tol: f64,
) -> Option<PowerRelation> {
    let (lq, lr) = (q.value().ln(), r.value().ln());
    let target = lr / lq;
    let max = max_exponent as u64;

    // convergents h_n / k_n
    let (mut h_prev, mut h) = (1u64, target.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut rest = target - target.floor();
    loop {
        if h >= 1 && h <= max && k <= max {
            let residual = (k as f64 * lr - h as f64 * lq).abs();
            if residual < tol * lq.abs() {
                return Some(PowerRelation {
                    j: k as u32,
                    m: h as u32,
                    residual,
                });
            }
        }
        if rest.abs() < 1e-15 || h > max || k > max {
            return None;
        }
        let inv = 1.0 / rest;
        let a = inv.floor();
        rest = inv - a;
        if a > max as f64 {
            return None;
        }
        let a = a as u64;
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
    }
}
