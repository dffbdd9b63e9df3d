//! The open equal-weight rule `Q_m`, its Peano kernel and composite errors.
//!
//! `Q_m(f; a, b) = (b-a)/(m-1) * sum_{j=1}^{m-1} f(a + j(b-a)/m)` integrates
//! affine functions exactly, so for twice differentiable `f` the error
//! `R_{a,b}(f) = int_a^b f - Q_m(f;a,b)` equals `int_a^b K_{a,b}(t) f''(t) dt`.

mod composite;
mod log_term;
mod moments;
mod tail;

use serde::Serialize;

use crate::error::{Error, Result};

pub use composite::{
    composite_error, ErrorMethod, ErrorReport, FnIntegrand, Integrand, NegLogOneMinusExp, Span,
};
pub use log_term::{
    dilog_exp_neg, head_integral, neg_log_one_minus_exp, rho, tail_integral, ZETA_2,
};
pub use moments::{
    kernel_moment, kernel_moment_numeric, theta, theta_chain, weighted_kernel_inequality,
    InequalityCheck, KernelWeight, THETA_REPORTED_AT_TWO,
};
pub use tail::{composite_error_decay, rho_decay, semi_infinite_error, tail_area_inequality};

/// `Q_m(f; a, b)`. Never samples the endpoints.
pub fn quad_rule<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    assert!(m >= 2, "quad_rule needs m >= 2");
    let width = b - a;
    let step = width / m as f64;
    let sum = crate::sum::compensated_sum((1..m).map(|j| f(a + step * j as f64)));
    width / (m - 1) as f64 * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KernelMode {
    Local { a: f64, b: f64 },
    Periodic { h: f64 },
}

/// Parameters of a Peano kernel: either `K_{a,b}` on one panel or its
/// `h`-periodic extension `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    pub mode: KernelMode,
    pub m: usize,
}

impl KernelSpec {
    pub fn local(a: f64, b: f64, m: usize) -> Result<Self> {
        check_m(m)?;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain("b", b, "finite b > a"));
        }
        Ok(Self {
            mode: KernelMode::Local { a, b },
            m,
        })
    }

    pub fn periodic(h: f64, m: usize) -> Result<Self> {
        check_m(m)?;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain("h", h, "(0, inf)"));
        }
        Ok(Self {
            mode: KernelMode::Periodic { h },
            m,
        })
    }

    /// Panel width: `b - a` or `h`.
    pub fn width(&self) -> f64 {
        match self.mode {
            KernelMode::Local { a, b } => b - a,
            KernelMode::Periodic { h } => h,
        }
    }

    /// Sub-panel width `h_1 = width / m`.
    pub fn sub_width(&self) -> f64 {
        self.width() / self.m as f64
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.mode {
            KernelMode::Local { .. } => peano_kernel_local(self, t),
            KernelMode::Periodic { .. } => peano_kernel_periodic(self, t),
        }
    }
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::domain("m", m as f64, "integers >= 2"))
    } else {
        Ok(())
    }
}

/// `K_{a,b}(t)`: `(t-a)^2/2` on the first sub-panel, `(b-t)^2/2` on the last,
/// and on sub-panel `k` in between
/// `(t - a - m h_1 k/(m-1))^2/2 + m h_1^2 k (m-k-1) / (2 (m-1)^2)`.
pub fn peano_kernel_local(spec: &KernelSpec, t: f64) -> Result<f64> {
    let KernelMode::Local { a, b } = spec.mode else {
        return Err(Error::InvalidFunction(
            "peano_kernel_local needs a local kernel spec".into(),
        ));
    };
    if !(a..=b).contains(&t) {
        return Err(Error::domain("t", t, "[a, b]"));
    }
    Ok(local_kernel(a, b, spec.m, t))
}

pub(crate) fn local_kernel(a: f64, b: f64, m: usize, t: f64) -> f64 {
    let h1 = (b - a) / m as f64;
    let k = (((t - a) / h1).floor().max(0.0) as usize).min(m - 1);
    if k == 0 {
        0.5 * (t - a) * (t - a)
    } else if k == m - 1 {
        0.5 * (b - t) * (b - t)
    } else {
        let (mf, kf) = (m as f64, k as f64);
        let shift = t - a - mf * h1 * kf / (mf - 1.0);
        0.5 * shift * shift + mf * h1 * h1 * kf * (mf - kf - 1.0) / (2.0 * (mf - 1.0) * (mf - 1.0))
    }
}

/// The `h`-periodic kernel: on `[k h_1, (k+1) h_1]`,
/// `K(t) = t^2/2 - h k t/(m-1) + h^2 k (k+1) / (2 m (m-1))`.
pub fn peano_kernel_periodic(spec: &KernelSpec, t: f64) -> Result<f64> {
    let KernelMode::Periodic { h } = spec.mode else {
        return Err(Error::InvalidFunction(
            "peano_kernel_periodic needs a periodic kernel spec".into(),
        ));
    };
    if !t.is_finite() {
        return Err(Error::domain("t", t, "finite reals"));
    }
    Ok(periodic_kernel(h, spec.m, t))
}

pub(crate) fn periodic_kernel(h: f64, m: usize, t: f64) -> f64 {
    let r = t.rem_euclid(h);
    let h1 = h / m as f64;
    let k = ((r / h1).floor() as usize).min(m - 1);
    let (mf, kf) = (m as f64, k as f64);
    0.5 * r * r - h * kf / (mf - 1.0) * r + h * h * kf * (kf + 1.0) / (2.0 * mf * (mf - 1.0))
}

/// Sub-panel joints `start + i h_1` covering `[start, end]`.
pub(crate) fn joints(start: f64, end: f64, h1: f64) -> Vec<f64> {
    let count = ((end - start) / h1).round() as usize;
    let mut points: Vec<f64> = (0..=count).map(|i| start + h1 * i as f64).collect();
    if let Some(last) = points.last_mut() {
        *last = end;
    }
    points
}
