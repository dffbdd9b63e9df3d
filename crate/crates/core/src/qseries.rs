//! q-Pochhammer symbols and the weights `p_k(q;x) = x^k (x;q)_inf / (q;q)_k`.
//!
//! Near `x = 1` the weights spread over roughly `1/(1-x)` indices, so an
//! explicit sum cannot reach a `1e-14` tail at `x = 1 - 1e-8`. Every
//! [`WeightSeries`] therefore stops once the factors `(q^{k+1};q)_inf` have
//! converged and accounts for the remaining indices with a closed form:
//!
//! ```text
//! sum_{k>K} p_k = (x;q)_inf/(q;q)_inf * sum_{k>K} x^k (q^{k+1};q)_inf
//! ```
//!
//! where `1 - q^{k+1}/(1-q) <= (q^{k+1};q)_inf <= 1` brackets the tail by two
//! geometric series. The tail is never derived from the normalisation
//! `sum p_k = 1`, so checking that identity stays meaningful.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// A deformation parameter strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `q^m`, which is again a valid parameter for `m >= 1` unless it underflows.
    pub fn pow(self, m: u32) -> Result<Self> {
        Self::new(self.0.powi(m as i32))
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QParam> for f64 {
    fn from(q: QParam) -> f64 {
        q.0
    }
}

/// Budget for truncating infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    /// Absolute budget for every omitted tail.
    pub eps_tail: f64,
    /// Hard cap on the number of factors or terms.
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            eps_tail: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(eps_tail: f64, max_terms: usize) -> Result<Self> {
        if !(eps_tail > 0.0) || !eps_tail.is_finite() {
            return Err(Error::InvalidPolicy(format!(
                "eps_tail must be positive, got {eps_tail}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidPolicy("max_terms must be at least 1".into()));
        }
        Ok(Self {
            eps_tail,
            max_terms,
        })
    }

    /// Budget for products that only enter as relative factors of a series
    /// already held to `eps_tail`. Their truncation is cheap, so it is pushed
    /// well below the outer budget.
    pub(crate) fn inner(&self) -> Self {
        Self {
            eps_tail: self.eps_tail * 1e-4,
            max_terms: self.max_terms,
        }
    }
}

/// A truncated infinite quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated {
    pub value: f64,
    /// Bound on `|exact - value|` from the omitted terms (rounding excluded).
    pub tail_bound: f64,
    pub terms: usize,
    /// Set when `max_terms` was reached before the tail met `eps_tail`.
    pub cap_hit: bool,
}

impl Truncated {
    pub fn require(self, max_terms: usize, context: &'static str) -> Result<f64> {
        if self.cap_hit {
            Err(Error::CapHit { max_terms, context })
        } else {
            Ok(self.value)
        }
    }
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(name, x, "[0, 1]"))
    }
}

/// `(a;q)_k = prod_{s<k} (1 - a q^s)`.
pub fn qpoch_finite(a: f64, q: QParam, k: usize) -> f64 {
    let mut product = 1.0;
    let mut qs = 1.0;
    for _ in 0..k {
        product *= 1.0 - a * qs;
        qs *= q.0;
    }
    product
}

/// `(a;q)_inf` for `0 <= a < 1`.
///
/// Stops at the first `S` with `a q^S / (1-q) < eps_tail`; the omitted factors
/// satisfy `prod_{s>=S} (1 - a q^s) >= 1 - a q^S/(1-q)`.
pub fn qpoch_inf(a: f64, q: QParam, policy: &TruncationPolicy) -> Result<Truncated> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::domain("a", a, "[0, 1)"));
    }
    let one_minus_q = 1.0 - q.0;
    let mut product = 1.0;
    let mut aqs = a;
    let mut s = 0;
    while aqs / one_minus_q >= policy.eps_tail {
        if s >= policy.max_terms {
            return Ok(Truncated {
                value: product,
                tail_bound: product * aqs / one_minus_q,
                terms: s,
                cap_hit: true,
            });
        }
        product *= 1.0 - aqs;
        aqs *= q.0;
        s += 1;
    }
    Ok(Truncated {
        value: product,
        tail_bound: product * aqs / one_minus_q,
        terms: s,
        cap_hit: false,
    })
}

/// `ln (a;q)_inf`, summed in the log domain so that products far below the
/// smallest normal double stay usable in ratios.
pub fn ln_qpoch_inf(a: f64, q: QParam, policy: &TruncationPolicy) -> Result<Truncated> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::domain("a", a, "[0, 1)"));
    }
    let one_minus_q = 1.0 - q.0;
    let mut acc = CompensatedSum::new();
    let mut aqs = a;
    let mut s = 0;
    let mut cap_hit = false;
    while aqs / one_minus_q >= policy.eps_tail {
        if s >= policy.max_terms {
            cap_hit = true;
            break;
        }
        acc.add((-aqs).ln_1p());
        aqs *= q.0;
        s += 1;
    }
    // -ln(1 - y) <= y/(1-y) for the remaining product's deficit y.
    let deficit = aqs / one_minus_q;
    Ok(Truncated {
        value: acc.value(),
        tail_bound: if deficit < 1.0 {
            deficit / (1.0 - deficit)
        } else {
            f64::INFINITY
        },
        terms: s,
        cap_hit,
    })
}

/// `p_k(q;x)`, with `p_k(q;1) = 0` and `p_k(q;0) = [k = 0]`.
pub fn weight_pk(q: QParam, x: f64, k: usize, policy: &TruncationPolicy) -> Result<f64> {
    check_unit_interval("x", x)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let head =
        qpoch_inf(x, q, &policy.inner())?.require(policy.max_terms, "evaluating (x;q)_inf")?;
    Ok(int_pow(x, k) * head / qpoch_finite(q.0, q, k))
}

fn int_pow(x: f64, k: usize) -> f64 {
    match i32::try_from(k) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(k as f64),
    }
}

/// Closed-form bracket for tails `sum_{i>=0} lambda^k p_k(q;x)` over
/// `k = start + i*stride`, valid once the explicit prefix has been summed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailModel {
    q: f64,
    x: f64,
    /// `(qx;q)_inf / (q;q)_inf`
    ratio: f64,
    ratio_rel_bound: f64,
}

impl TailModel {
    pub(crate) fn new(q: QParam, x: f64, policy: &TruncationPolicy) -> Result<Self> {
        let inner = policy.inner();
        let num = ln_qpoch_inf(q.0 * x, q, &inner)?;
        let den = ln_qpoch_inf(q.0, q, &inner)?;
        if num.cap_hit || den.cap_hit {
            return Err(Error::CapHit {
                max_terms: policy.max_terms,
                context: "evaluating (q;q)_inf",
            });
        }
        Ok(Self {
            q: q.0,
            x,
            ratio: (num.value - den.value).exp(),
            ratio_rel_bound: num.tail_bound + den.tail_bound,
        })
    }

    /// Returns `(midpoint, half_width)` of the bracket for
    /// `sum_{i>=0} lambda^k p_k` with `k = start + i*stride` and `lambda` in `{1, q}`.
    pub(crate) fn tail(&self, start: usize, stride: usize, scale_by_q: bool) -> (f64, f64) {
        let (q, x) = (self.q, self.x);
        let base = if scale_by_q { q * x } else { x };
        // c = (x;q)_inf/(q;q)_inf = (1-x) * ratio
        let lead = if scale_by_q {
            (1.0 - x) * self.ratio * int_pow(base, start) / (1.0 - int_pow(base, stride))
        } else {
            // (1-x)/(1-x^d) = 1/(1 + x + ... + x^{d-1})
            let geometric: f64 = (0..stride).map(|i| int_pow(x, i)).sum();
            self.ratio * int_pow(base, start) / geometric
        };
        let lower_gap = (1.0 - x) * self.ratio * q * int_pow(q * base, start)
            / ((1.0 - q) * (1.0 - int_pow(q * base, stride)));
        let half = 0.5 * lower_gap.min(lead);
        (lead - half, half + lead * self.ratio_rel_bound)
    }
}

/// The weights `p_0..p_K` for fixed `(q, x)` together with a closed-form
/// estimate of the omitted mass `sum_{k>K} p_k`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightSeries {
    pub q: QParam,
    pub x: f64,
    pub weights: Vec<f64>,
    /// Estimate of `sum_{k>K} p_k(q;x)`.
    pub tail_mass: f64,
    /// Bound on `|sum_{k>K} p_k - tail_mass|` plus the truncation error of
    /// `(x;q)_inf`.
    pub tail_bound: f64,
    pub cap_hit: bool,
    #[serde(skip)]
    pub(crate) tail_model: Option<TailModel>,
}

impl WeightSeries {
    /// Index of the last explicit weight.
    pub fn last_index(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn partial_sum(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    /// Partial sum plus the closed-form tail. Equals 1 on `[0,1)` to within
    /// `tail_bound` plus rounding.
    pub fn total(&self) -> f64 {
        let mut acc: CompensatedSum = self.weights.iter().copied().collect();
        acc.add(self.tail_mass);
        acc.value()
    }

    /// Bracket `(mid, half_width)` for `sum lambda^k p_k` over
    /// `k = start, start + stride, ...` with `start > last_index()`.
    pub(crate) fn tail(&self, start: usize, stride: usize, scale_by_q: bool) -> (f64, f64) {
        debug_assert!(start > self.last_index());
        match &self.tail_model {
            Some(model) => model.tail(start, stride, scale_by_q),
            None => (0.0, 0.0),
        }
    }
}

/// How far a weight series must extend.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Extent {
    /// Stop once the closed-form tail is certified to `eps_tail`.
    ClosedFormTail { min_terms: usize },
    /// Stop only when the omitted mass itself is below `eps_tail`.
    Explicit,
}

/// Weights for `(q, x)` with the omitted mass accounted for in closed form.
pub fn weight_series(q: QParam, x: f64, policy: &TruncationPolicy) -> Result<WeightSeries> {
    build_series(q, x, Extent::ClosedFormTail { min_terms: 0 }, policy)
}

/// Weights for `(q, x)` summed explicitly until the omitted mass is below
/// `eps_tail`. Close to `x = 1` this needs about `ln(eps)/ln(x)` terms and
/// sets `cap_hit` once `max_terms` is reached.
pub fn weight_series_explicit(
    q: QParam,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<WeightSeries> {
    build_series(q, x, Extent::Explicit, policy)
}

pub(crate) fn build_series(
    q: QParam,
    x: f64,
    extent: Extent,
    policy: &TruncationPolicy,
) -> Result<WeightSeries> {
    check_unit_interval("x", x)?;
    let min_terms = match extent {
        Extent::ClosedFormTail { min_terms } => min_terms,
        Extent::Explicit => 0,
    };
    if x == 1.0 || x == 0.0 {
        let mut weights = vec![0.0; min_terms + 1];
        if x == 0.0 {
            weights[0] = 1.0;
        }
        return Ok(WeightSeries {
            q,
            x,
            weights,
            tail_mass: 0.0,
            tail_bound: 0.0,
            cap_hit: false,
            tail_model: None,
        });
    }

    let head = qpoch_inf(x, q, &policy.inner())?;
    if head.cap_hit {
        return Err(Error::CapHit {
            max_terms: policy.max_terms,
            context: "evaluating (x;q)_inf",
        });
    }
    let model = TailModel::new(q, x, policy)?;
    let head_rel = head.tail_bound / head.value;

    let qv = q.0;
    let mut weights = vec![head.value];
    let mut p = head.value;
    let mut qk = 1.0; // q^k
    let mut cap_hit = false;
    loop {
        let k = weights.len() - 1;
        if k >= min_terms {
            let (mid, half) = model.tail(k + 1, 1, false);
            let done = match extent {
                Extent::ClosedFormTail { .. } => half <= 0.5 * policy.eps_tail,
                Extent::Explicit => mid + half <= 0.5 * policy.eps_tail,
            };
            if done {
                return Ok(WeightSeries {
                    q,
                    x,
                    weights,
                    tail_mass: mid,
                    tail_bound: half + head_rel,
                    cap_hit,
                    tail_model: Some(model),
                });
            }
        }
        if weights.len() >= policy.max_terms {
            cap_hit = true;
            let (mid, half) = model.tail(k + 1, 1, false);
            return Ok(WeightSeries {
                q,
                x,
                weights,
                tail_mass: mid,
                tail_bound: half + head_rel,
                cap_hit,
                tail_model: Some(model),
            });
        }
        qk *= qv;
        p *= x / (1.0 - qk);
        weights.push(p);
    }
}

/// `sum_k x^k / (q;q)_k` for `0 <= x < 1`, with the tail past the explicit
/// prefix bracketed in closed form. By Euler's identity this equals
/// `1/(x;q)_inf`.
pub fn euler_series(x: f64, q: QParam, policy: &TruncationPolicy) -> Result<Truncated> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain("x", x, "[0, 1)"));
    }
    let qv = q.0;
    let ln_qq = ln_qpoch_inf(qv, q, &policy.inner())?;
    let inv_qq = (-ln_qq.value).exp();
    let mut acc = CompensatedSum::new();
    let mut term = 1.0; // x^k/(q;q)_k
    let mut xk = 1.0;
    let mut qk = 1.0;
    let mut k = 0usize;
    loop {
        acc.add(term);
        xk *= x;
        qk *= qv;
        // tail over j > k: x^j (q^{j+1};q)_inf / (q;q)_inf
        let upper = xk / (1.0 - x) * inv_qq;
        let gap = qk * qv * xk / ((1.0 - qv) * (1.0 - qv * x)) * inv_qq;
        if gap.min(upper) <= policy.eps_tail * acc.value().max(1.0) {
            let half = 0.5 * gap.min(upper);
            acc.add(upper - half);
            let value = acc.value();
            return Ok(Truncated {
                value,
                tail_bound: half + value * ln_qq.tail_bound,
                terms: k + 1,
                cap_hit: false,
            });
        }
        if k + 1 >= policy.max_terms {
            return Ok(Truncated {
                value: acc.value() + upper,
                tail_bound: gap,
                terms: k + 1,
                cap_hit: true,
            });
        }
        k += 1;
        term *= x / (1.0 - qk);
    }
}

/// `sum_k p_{mk}(q;x)` with the envelopes that sandwich it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StridedSum {
    pub value: f64,
    /// `(x;q)_inf / (x^m;q)_inf`
    pub lower_env: f64,
    /// `(x;q)_inf / ((q;q)_inf (1 - x^m))`
    pub upper_env: f64,
    pub tail_bound: f64,
}

/// The strided sum `sum_k p_{mk}(q;x)`, which tends to `1/m` as `x -> 1`.
pub fn strided_sum(q: QParam, m: usize, x: f64, policy: &TruncationPolicy) -> Result<StridedSum> {
    if m < 2 {
        return Err(Error::domain("m", m as f64, "integers >= 2"));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain("x", x, "[0, 1)"));
    }
    if x == 0.0 {
        let lower = 1.0;
        let upper = (-ln_qpoch_inf(q.0, q, &policy.inner())?.value).exp();
        return Ok(StridedSum {
            value: 1.0,
            lower_env: lower,
            upper_env: upper,
            tail_bound: 0.0,
        });
    }
    let series = weight_series(q, x, policy)?;
    if series.cap_hit {
        return Err(Error::CapHit {
            max_terms: policy.max_terms,
            context: "summing strided weights",
        });
    }
    let mut acc: CompensatedSum = series.weights.iter().step_by(m).copied().collect();
    let next = (series.last_index() / m + 1) * m;
    let (mid, half) = series.tail(next, m, false);
    acc.add(mid);

    // Both envelopes share (x;q)_inf/(1-x^m) = (qx;q)_inf/(1+x+..+x^{m-1}).
    let ln_qx = ln_qpoch_inf(q.0 * x, q, &policy.inner())?.value;
    let ln_q = ln_qpoch_inf(q.0, q, &policy.inner())?.value;
    let ln_qxm = ln_qpoch_inf(q.0 * int_pow(x, m), q, &policy.inner())?.value;
    let geometric: f64 = (0..m).map(|i| int_pow(x, i)).sum();
    Ok(StridedSum {
        value: acc.value(),
        lower_env: (ln_qx - ln_qxm).exp() / geometric,
        upper_env: (ln_qx - ln_q).exp() / geometric,
        tail_bound: half + series.tail_bound,
    })
}

/// `p_k(q^m;x) - p_{mk}(q;x)`, which is nonnegative for every admissible input.
pub fn fedja_margin(
    q: QParam,
    m: usize,
    k: usize,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("m", m as f64, "integers >= 2"));
    }
    let qm = q.pow(m as u32)?;
    Ok(weight_pk(qm, x, k, policy)? - weight_pk(q, x, m * k, policy)?)
}

/// Margins `p_k(q^m;x) - p_{mk}(q;x)` for `k = 0..=k_max` at one `x`.
///
/// Shares the infinite products across `k`; agrees with [`fedja_margin`].
pub fn fedja_margins(
    q: QParam,
    m: usize,
    k_max: usize,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::domain("m", m as f64, "integers >= 2"));
    }
    check_unit_interval("x", x)?;
    if x == 1.0 {
        return Ok(vec![0.0; k_max + 1]);
    }
    if x == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 0.0;
        return Ok(out);
    }
    let qm = q.pow(m as u32)?;
    let head_q =
        qpoch_inf(x, q, &policy.inner())?.require(policy.max_terms, "evaluating (x;q)_inf")?;
    let head_qm =
        qpoch_inf(x, qm, &policy.inner())?.require(policy.max_terms, "evaluating (x;q^m)_inf")?;
    let mut out = Vec::with_capacity(k_max + 1);
    let mut small = head_q; // p_{mk}(q;x)
    let mut large = head_qm; // p_k(q^m;x)
    let mut qs = 1.0;
    let mut qms = 1.0;
    for k in 0..=k_max {
        if k > 0 {
            qms *= qm.0;
            large *= x / (1.0 - qms);
            for _ in 0..m {
                qs *= q.0;
                small *= x / (1.0 - qs);
            }
        }
        out.push(large - small);
    }
    Ok(out)
}

/// `alpha_k = 1 - (prod_{l=1}^{m-1} (1 - q^{mk+l}))^{1/(m-1)}`, the point where
/// consecutive terms of the reduced inequality cross.
pub fn alpha_k(q: QParam, m: usize, k: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("m", m as f64, "integers >= 2"));
    }
    if k < 1 {
        return Err(Error::domain("k", k as f64, "integers >= 1"));
    }
    let ln_product: f64 = (1..m)
        .map(|l| (-q.0.powf((m * k + l) as f64)).ln_1p())
        .collect::<CompensatedSum>()
        .value();
    Ok(-(ln_product / (m - 1) as f64).exp_m1())
}

/// `q^{mk + m/2}`, the lower bound for [`alpha_k`].
pub fn alpha_k_bound(q: QParam, m: usize, k: usize) -> f64 {
    q.0.powf((m * k) as f64 + m as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    /// Multiply factors until `a q^s < 1e-18`.
    fn product_oracle(a: f64, qv: f64) -> f64 {
        let mut p = 1.0;
        let mut t = a;
        while t >= 1e-18 {
            p *= 1.0 - t;
            t *= qv;
        }
        p
    }

    #[test]
    fn qparam_rejects_boundary() {
        assert!(QParam::new(0.0).is_err());
        assert!(QParam::new(1.0).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(QParam::new(0.3).is_ok());
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-10, 0).is_err());
    }

    #[test]
    fn finite_pochhammer_examples() {
        assert_eq!(qpoch_finite(0.7, q(0.5), 0), 1.0);
        assert_eq!(qpoch_finite(0.5, q(0.5), 1), 0.5);
        assert_eq!(qpoch_finite(0.5, q(0.5), 2), 0.375);
    }

    #[test]
    fn infinite_pochhammer_examples() {
        let policy = TruncationPolicy::default();
        assert_eq!(qpoch_inf(0.0, q(0.5), &policy).unwrap().value, 1.0);
        let v = qpoch_inf(0.5, q(0.5), &policy).unwrap();
        assert!((v.value - product_oracle(0.5, 0.5)).abs() < policy.eps_tail);
        assert!((v.value - 0.288_788_095_1).abs() < 1e-10);
        assert!(v.tail_bound <= policy.eps_tail);
        assert!(qpoch_inf(1.0, q(0.5), &policy).is_err());
    }

    #[test]
    fn infinite_pochhammer_cap_hit() {
        let policy = TruncationPolicy::new(1e-14, 5).unwrap();
        let v = qpoch_inf(0.5, q(0.9), &policy).unwrap();
        assert!(v.cap_hit);
        assert_eq!(v.terms, 5);
        assert!(v.require(5, "test").is_err());
    }

    #[test]
    fn partial_products_non_increasing() {
        let mut prev = 1.0;
        for k in 0..60 {
            let p = qpoch_finite(0.6, q(0.8), k);
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn log_pochhammer_matches_product() {
        let policy = TruncationPolicy::default();
        for &(a, qv) in &[(0.3, 0.5), (0.9, 0.9), (0.45, 0.95)] {
            let direct = qpoch_inf(a, q(qv), &policy).unwrap().value;
            let logged = ln_qpoch_inf(a, q(qv), &policy).unwrap().value.exp();
            assert!((direct / logged - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn weight_examples() {
        let policy = TruncationPolicy::default();
        assert_eq!(weight_pk(q(0.5), 0.0, 0, &policy).unwrap(), 1.0);
        assert_eq!(weight_pk(q(0.5), 0.0, 2, &policy).unwrap(), 0.0);
        assert_eq!(weight_pk(q(0.5), 1.0, 3, &policy).unwrap(), 0.0);
        let w = weight_pk(q(0.5), 0.5, 1, &policy).unwrap();
        assert!((w - 0.5 * product_oracle(0.5, 0.5) / 0.5).abs() < 1e-15);
        assert!(weight_pk(q(0.5), 1.5, 0, &policy).is_err());
    }

    #[test]
    fn series_normalises() {
        let policy = TruncationPolicy::new(1e-12, 1_000_000).unwrap();
        let s = weight_series(q(0.5), 0.5, &policy).unwrap();
        assert!((s.total() - 1.0).abs() <= 1e-12);
        let s = weight_series(
            q(0.9),
            0.99,
            &TruncationPolicy::new(1e-10, 1_000_000).unwrap(),
        )
        .unwrap();
        assert!((s.total() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn series_at_one_is_zero() {
        let s = weight_series(q(0.5), 1.0, &TruncationPolicy::default()).unwrap();
        assert!(s.weights.iter().all(|&w| w == 0.0));
        assert_eq!(s.total(), 0.0);
    }

    #[test]
    fn explicit_series_matches_closed_form_tail() {
        let policy = TruncationPolicy::default();
        let closed = weight_series(q(0.7), 0.95, &policy).unwrap();
        let explicit = weight_series_explicit(q(0.7), 0.95, &policy).unwrap();
        assert!(!explicit.cap_hit);
        assert!(explicit.tail_mass <= policy.eps_tail);
        // Mass beyond the closed-form prefix, summed term by term.
        let beyond: f64 = explicit.weights[closed.weights.len()..].iter().sum();
        assert!((beyond - closed.tail_mass).abs() < 1e-14);
    }

    #[test]
    fn explicit_series_caps_near_one() {
        let policy = TruncationPolicy::new(1e-14, 10_000).unwrap();
        let s = weight_series_explicit(q(0.5), 1.0 - 1e-6, &policy).unwrap();
        assert!(s.cap_hit);
    }

    #[test]
    fn euler_identity_spot_check() {
        let policy = TruncationPolicy::default();
        let lhs = 1.0 / qpoch_inf(0.4, q(0.6), &policy).unwrap().value;
        let rhs = euler_series(0.4, q(0.6), &policy).unwrap().value;
        assert!((lhs / rhs - 1.0).abs() < 1e-13);
    }

    #[test]
    fn strided_examples() {
        let policy = TruncationPolicy::default();
        let s = strided_sum(q(0.5), 2, 0.0, &policy).unwrap();
        assert_eq!(s.value, 1.0);

        let s = strided_sum(q(0.5), 2, 0.999_999, &policy).unwrap();
        assert!(s.lower_env - 1e-12 <= s.value && s.value <= s.upper_env + 1e-12);
        assert!((s.lower_env - 0.5).abs() < 1e-3);
        assert!((s.upper_env - 0.5).abs() < 1e-3);
        assert!(strided_sum(q(0.5), 1, 0.5, &policy).is_err());
    }

    #[test]
    fn strided_sum_approaches_one_third() {
        let policy = TruncationPolicy::default();
        let mut prev = f64::INFINITY;
        for d in 2..=8 {
            let x = 1.0 - 10f64.powi(-d);
            let s = strided_sum(q(0.5), 3, x, &policy).unwrap();
            let dist = (s.value - 1.0 / 3.0).abs();
            assert!(dist < prev, "d = {d}: {dist} !< {prev}");
            assert!(s.lower_env <= s.value + 1e-13 && s.value <= s.upper_env + 1e-13);
            prev = dist;
        }
    }

    #[test]
    fn fedja_examples() {
        let policy = TruncationPolicy::default();
        let margin = fedja_margin(q(0.5), 2, 0, 0.5, &policy).unwrap();
        let oracle = product_oracle(0.5, 0.25) - product_oracle(0.5, 0.5);
        assert!((margin - oracle).abs() < 1e-15);
        assert!(margin >= 0.0);
        assert_eq!(fedja_margin(q(0.3), 3, 4, 1.0, &policy).unwrap(), 0.0);
        assert_eq!(fedja_margin(q(0.3), 3, 4, 0.0, &policy).unwrap(), 0.0);
    }

    #[test]
    fn batched_margins_agree() {
        let policy = TruncationPolicy::default();
        let batch = fedja_margins(q(0.8), 3, 12, 0.7, &policy).unwrap();
        for (k, b) in batch.iter().enumerate() {
            let single = fedja_margin(q(0.8), 3, k, 0.7, &policy).unwrap();
            assert!((b - single).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_k(q(0.5), 2, 1).unwrap();
        assert!((a - 0.125).abs() < 1e-16);
        assert_eq!(alpha_k_bound(q(0.5), 2, 1), 0.125);

        let a = alpha_k(q(0.5), 3, 1).unwrap();
        let direct = 1.0 - ((1.0 - 0.5f64.powi(4)) * (1.0 - 0.5f64.powi(5))).sqrt();
        assert!((a - direct).abs() < 1e-15);
        assert!(a >= alpha_k_bound(q(0.5), 3, 1));
        // quoted as 0.0469; the exact value is 0.0470031
        assert!((a - 0.0469).abs() < 2e-4);

        assert!(alpha_k(q(0.9), 4, 2).unwrap() >= 0.9f64.powi(10));
        assert!(alpha_k(q(0.9), 1, 2).is_err());
        assert!(alpha_k(q(0.9), 2, 0).is_err());
    }
}
