//! Composite errors of `f(t) = -ln(1 - e^{-t})` on half-lines, and the decay
//! and area inequalities they satisfy.

use super::log_term::{head_integral, rho_unchecked, tail_integral};
use super::moments::InequalityCheck;
use super::{check_m, joints, periodic_kernel};
use crate::error::{Error, Result};
use crate::integrate::Integrator;
use crate::qseries::TruncationPolicy;

/// `rho(s + t)` against `e^{-s} rho(t)`; `margin = rhs - lhs >= 0`.
pub fn rho_decay(s: f64, t: f64) -> Result<InequalityCheck> {
    if !(s >= 0.0) {
        return Err(Error::domain("s", s, "[0, inf)"));
    }
    if !(t > 0.0) {
        return Err(Error::domain("t", t, "(0, inf)"));
    }
    let lhs = rho_unchecked(s + t);
    let rhs = (-s).exp() * rho_unchecked(t);
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// `E_{start,inf} = int_start^inf rho(t) K(t - start) dt` with the `h`-periodic
/// kernel, truncated where `rho` falls below `eps_tail`.
pub fn semi_infinite_error(start: f64, m: usize, h: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_m(m)?;
    if !(start >= 0.0) {
        return Err(Error::domain("start", start, "[0, inf)"));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    let cutoff = -policy.eps_tail.ln() + 2.0;
    let periods = ((cutoff - start) / h).ceil().max(1.0);
    if periods * m as f64 > policy.max_terms as f64 {
        return Err(Error::CapHit {
            max_terms: policy.max_terms,
            context: "covering the semi-infinite error integral",
        });
    }
    let end = start + periods * h;
    let breaks = joints(start, end, h / m as f64);
    Ok(Integrator::default()
        .integrate_with_breaks(
            |t| rho_unchecked(t) * periodic_kernel(h, m, t - start),
            &breaks,
        )?
        .value)
}

/// `E_{s+a,inf}` against `e^{-s} E_{a,inf}`; `margin = rhs - lhs >= 0`.
pub fn composite_error_decay(
    s: f64,
    a: f64,
    m: usize,
    h: f64,
    policy: &TruncationPolicy,
) -> Result<InequalityCheck> {
    if !(s >= 0.0) {
        return Err(Error::domain("s", s, "[0, inf)"));
    }
    let base = semi_infinite_error(a, m, h, policy)?;
    let lhs = if s == 0.0 {
        base
    } else {
        semi_infinite_error(s + a, m, h, policy)?
    };
    let rhs = (-s).exp() * base;
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// `int_S^inf f` against `-S T + int_0^T f`; `margin = lhs - rhs >= 0`.
pub fn tail_area_inequality(s: f64, t: f64) -> Result<InequalityCheck> {
    if !(s > 0.0) {
        return Err(Error::domain("S", s, "(0, inf)"));
    }
    if !(t > 0.0) {
        return Err(Error::domain("T", t, "(0, inf)"));
    }
    let lhs = tail_integral(s)?;
    let rhs = -s * t + head_integral(t)?;
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}
