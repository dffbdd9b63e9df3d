//! Kernel moments `I_j = int_0^h K(t)/(t + jh)^2 dt` and the inequalities
//! comparing the first period of the kernel against the next two.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use super::log_term::rho_unchecked;
use super::{check_m, joints, periodic_kernel};
use crate::error::{Error, Result};
use crate::integrate::Integrator;
use crate::sum::CompensatedSum;

/// Value of `theta(2)` quoted alongside the certificate.
pub const THETA_REPORTED_AT_TWO: f64 = 0.0073;

/// Both sides of an inequality `lhs >= rhs` (or `lhs <= rhs`, see the producing
/// function); `margin` is positive when the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n)
        .map(|k| (k as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// Closed form of `I_j` for the `h`-periodic kernel with `m` sub-panels.
///
/// `I_0 = h (m - 1 - m ln m + ln m!) / (m-1)` and for `j >= 1`
/// `I_j = h - h sum_{k<m} (j + k/(m-1)) ln(1 + 1/(jm + k))`.
pub fn kernel_moment(m: usize, h: f64, j: usize) -> Result<f64> {
    check_m(m)?;
    if !(h > 0.0) {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    let mf = m as f64;
    if j == 0 {
        let mut acc = CompensatedSum::new();
        acc.add(mf - 1.0);
        acc.add(-mf * mf.ln());
        acc.add(ln_factorial(m));
        return Ok(h * acc.value() / (mf - 1.0));
    }
    let jf = j as f64;
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    for k in 0..m {
        let kf = k as f64;
        acc.add(-(jf + kf / (mf - 1.0)) * (1.0 / (jf * mf + kf)).ln_1p());
    }
    Ok(h * acc.value())
}

/// `I_j` by adaptive integration, split at every sub-panel joint.
pub fn kernel_moment_numeric(m: usize, h: f64, j: usize) -> Result<f64> {
    check_m(m)?;
    if !(h > 0.0) {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    let shift = j as f64 * h;
    let breaks = joints(0.0, h, h / m as f64);
    let integrator = Integrator::with_tolerance(1e-13 * h);
    Ok(integrator
        .integrate_with_breaks(
            |t| periodic_kernel(h, m, t) / ((t + shift) * (t + shift)),
            &breaks,
        )?
        .value)
}

/// `theta(x) = ln sqrt(2 pi x) + 9/(12x+1) - 2/(9x) + 15 - 20 ln 3 + 8 ln 2`,
/// defined for `x >= 2`; increasing there.
pub fn theta(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::domain("x", x, "[2, inf)"));
    }
    Ok(
        0.5 * (2.0 * PI * x).ln() + 9.0 / (12.0 * x + 1.0) - 2.0 / (9.0 * x) + 15.0
            - 20.0 * 3f64.ln()
            + 8.0 * LN_2,
    )
}

/// The Stirling-bound comparison that `theta >= 0` certifies:
/// `lhs = -1 + ln sqrt(2 pi m) + 1/(12m+1)` (a lower bound for `(m-1) I_0 / h`)
/// against `rhs = 8(-2 + (5/2) ln 3 - ln 2 + 1/(36m) - 1/(12m+1))`
/// (eight times an upper bound for `(m-1)(I_1 + I_2)/h`).
pub fn theta_chain(m: usize) -> Result<InequalityCheck> {
    check_m(m)?;
    let mf = m as f64;
    let lhs = -1.0 + 0.5 * (2.0 * PI * mf).ln() + 1.0 / (12.0 * mf + 1.0);
    let rhs = 8.0 * (-2.0 + 2.5 * 3f64.ln() - LN_2 + 1.0 / (36.0 * mf) - 1.0 / (12.0 * mf + 1.0));
    Ok(InequalityCheck {
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelWeight {
    /// `int_0^h K/t^2 >= 8 int_h^{3h} K/t^2`, i.e. `I_0 >= 8 (I_1 + I_2)`.
    InverseSquare,
    /// `int_0^h K rho >= 8 int_h^{3h} K rho`, any `h > 0`.
    RhoEightfold,
    /// `int_0^h K rho >= e^{3h/2} int_h^{3h} K rho`, for `h <= ln 4`.
    Rho,
}

/// Compare the kernel's first period against the next two under `weight`.
pub fn weighted_kernel_inequality(
    m: usize,
    h: f64,
    weight: KernelWeight,
) -> Result<InequalityCheck> {
    check_m(m)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    match weight {
        KernelWeight::InverseSquare => {
            let lhs = kernel_moment(m, h, 0)?;
            let rhs = 8.0 * (kernel_moment(m, h, 1)? + kernel_moment(m, h, 2)?);
            Ok(InequalityCheck {
                lhs,
                rhs,
                margin: lhs - rhs,
            })
        }
        KernelWeight::RhoEightfold | KernelWeight::Rho => {
            if weight == KernelWeight::Rho && h > 4f64.ln() * (1.0 + f64::EPSILON) {
                return Err(Error::domain("h", h, "(0, ln 4]"));
            }
            let factor = if weight == KernelWeight::Rho {
                (1.5 * h).exp()
            } else {
                8.0
            };
            let integrator = Integrator::with_tolerance(1e-14);
            let h1 = h / m as f64;
            let integrand = |t: f64| periodic_kernel(h, m, t) * rho_unchecked(t);
            let head = integrator
                .integrate_with_breaks(integrand, &joints(0.0, h, h1))?
                .value;
            let next = integrator
                .integrate_with_breaks(integrand, &joints(h, 3.0 * h, h1))?
                .value;
            let lhs = head;
            let rhs = factor * next;
            Ok(InequalityCheck {
                lhs,
                rhs,
                margin: lhs - rhs,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_moment_for_midpoint_rule() {
        let v = kernel_moment(2, 1.0, 0).unwrap();
        assert!((v - (1.0 - LN_2)).abs() < 1e-15);
        let numeric = kernel_moment_numeric(2, 1.0, 0).unwrap();
        assert!((numeric - (1.0 - LN_2)).abs() < 1e-12);
    }

    #[test]
    fn moments_positive() {
        for m in 2..=20 {
            for j in 0..4 {
                assert!(kernel_moment(m, 0.7, j).unwrap() > 0.0);
            }
        }
    }

    /// `I_j/h = 1 - j ln(1+1/j) - m/(m-1) ln(jm+m) + (ln (jm+m)! - ln (jm)!)/(m-1)`
    #[test]
    fn factorial_form_of_shifted_moments() {
        for m in 2..=12 {
            let mf = m as f64;
            for j in 1..=3 {
                let jf = j as f64;
                let alt = 1.0 - jf * (1.0 / jf).ln_1p() - mf / (mf - 1.0) * (jf * mf + mf).ln()
                    + (ln_factorial(j * m + m) - ln_factorial(j * m)) / (mf - 1.0);
                let v = kernel_moment(m, 1.0, j).unwrap();
                assert!((alt - v).abs() < 1e-11, "m={m} j={j}: {alt} vs {v}");
            }
        }
    }

    #[test]
    fn inverse_square_scales_with_h() {
        let a = weighted_kernel_inequality(5, 1.0, KernelWeight::InverseSquare).unwrap();
        let b = weighted_kernel_inequality(5, 3.5, KernelWeight::InverseSquare).unwrap();
        assert!((a.margin - b.margin / 3.5).abs() < 1e-14);
        assert!(a.margin > 0.0);
    }

    #[test]
    fn rho_weight_domain() {
        assert!(weighted_kernel_inequality(3, 1.5, KernelWeight::Rho).is_err());
        assert!(weighted_kernel_inequality(3, 1.5, KernelWeight::RhoEightfold).is_ok());
        let c = weighted_kernel_inequality(5, 4f64.ln(), KernelWeight::Rho).unwrap();
        assert!(c.margin >= -1e-12);
    }

    #[test]
    fn theta_values() {
        assert!(theta(1.9).is_err());
        let t2 = theta(2.0).unwrap();
        assert!((t2 - 0.087_332_683_490_898_5).abs() < 1e-14);
        assert!(theta(3.0).unwrap() > t2);
        // theta(m) is the chain's margin rearranged.
        for m in 2..50 {
            let chain = theta_chain(m).unwrap();
            assert!((chain.margin - theta(m as f64).unwrap()).abs() < 1e-13);
        }
    }
}
