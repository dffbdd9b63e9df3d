use serde::Serialize;

use super::log_term::{neg_log_one_minus_exp, rho_unchecked, tail_integral, ZETA_2};
use super::{check_m, joints, local_kernel, quad_rule};
use crate::error::{Error, Result};
use crate::integrate::Integrator;
use crate::qseries::TruncationPolicy;
use crate::sum::CompensatedSum;

/// A twice differentiable integrand.
pub trait Integrand {
    fn value(&self, t: f64) -> f64;

    fn second_derivative(&self, t: f64) -> f64;

    /// Exact `int_a^b f`, if known. `b` may be `f64::INFINITY`.
    fn integral(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    /// A point past which `f` and `f''` are below `eps` in absolute value.
    /// Required for semi-infinite spans.
    fn decay_cutoff(&self, _eps: f64) -> Option<f64> {
        None
    }
}

/// `f(t) = -ln(1 - e^{-t})` with `f'' = rho`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegLogOneMinusExp;

impl Integrand for NegLogOneMinusExp {
    fn value(&self, t: f64) -> f64 {
        neg_log_one_minus_exp(t).unwrap_or(f64::NAN)
    }

    fn second_derivative(&self, t: f64) -> f64 {
        if t > 0.0 {
            rho_unchecked(t)
        } else {
            f64::NAN
        }
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let upper = if b.is_infinite() {
            0.0
        } else {
            tail_integral(b).ok()?
        };
        let lower = if a == 0.0 {
            ZETA_2
        } else {
            tail_integral(a).ok()?
        };
        Some(lower - upper)
    }

    fn decay_cutoff(&self, eps: f64) -> Option<f64> {
        // f(t) ~ e^{-t} and rho(t) ~ e^{-t}
        Some(-eps.ln() + 2.0)
    }
}

/// Closure-backed integrand with an optional antiderivative.
pub struct FnIntegrand<F, G> {
    f: F,
    f_second: G,
    antiderivative: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl<F, G> FnIntegrand<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    pub fn new(f: F, f_second: G) -> Self {
        Self {
            f,
            f_second,
            antiderivative: None,
        }
    }

    pub fn with_antiderivative(
        mut self,
        anti: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.antiderivative = Some(Box::new(anti));
        self
    }
}

impl<F, G> Integrand for FnIntegrand<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn second_derivative(&self, t: f64) -> f64 {
        (self.f_second)(t)
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        if b.is_infinite() {
            return None;
        }
        self.antiderivative.as_ref().map(|anti| anti(b) - anti(a))
    }
}

/// Integration domain for the composite rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Span {
    /// `[a, b]` split into `panels` equal panels.
    Finite { a: f64, b: f64, panels: usize },
    /// `[a, inf)` with panels of width `h`.
    SemiInfinite { a: f64, h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMethod {
    /// Integral (exact or adaptive) minus the summed panel rules.
    Direct,
    /// `sum over panels of int f''(t) K_panel(t) dt`.
    Peano,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub value_integral: f64,
    pub value_quadrature: f64,
    /// `value_integral - value_quadrature`
    pub error: f64,
    pub method: ErrorMethod,
}

struct Panels {
    start: f64,
    width: f64,
    count: usize,
    end: f64,
    infinite: bool,
}

fn panels<F: Integrand + ?Sized>(f: &F, span: Span, policy: &TruncationPolicy) -> Result<Panels> {
    match span {
        Span::Finite { a, b, panels } => {
            if !(a < b) || !b.is_finite() {
                return Err(Error::domain("b", b, "finite b > a"));
            }
            if panels == 0 {
                return Err(Error::domain("panels", 0.0, "integers >= 1"));
            }
            Ok(Panels {
                start: a,
                width: (b - a) / panels as f64,
                count: panels,
                end: b,
                infinite: false,
            })
        }
        Span::SemiInfinite { a, h } => {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::domain("h", h, "(0, inf)"));
            }
            let cutoff = f.decay_cutoff(policy.eps_tail).ok_or_else(|| {
                Error::InvalidFunction("semi-infinite span needs a decaying integrand".into())
            })?;
            let count = ((cutoff - a) / h).ceil().max(1.0) as usize;
            if count > policy.max_terms {
                return Err(Error::CapHit {
                    max_terms: policy.max_terms,
                    context: "covering a semi-infinite span with panels",
                });
            }
            Ok(Panels {
                start: a,
                width: h,
                count,
                end: a + h * count as f64,
                infinite: true,
            })
        }
    }
}

/// Composite error `int f - sum_j Q_m(f; panel_j)`, computed by `method`.
///
/// On a semi-infinite span the panels stop past the integrand's decay cutoff
/// for `policy.eps_tail`; the direct method still uses the full improper
/// integral when the integrand provides one.
pub fn composite_error<F: Integrand + ?Sized>(
    f: &F,
    span: Span,
    m: usize,
    method: ErrorMethod,
    policy: &TruncationPolicy,
) -> Result<ErrorReport> {
    check_m(m)?;
    let p = panels(f, span, policy)?;
    let panel_start = |j: usize| p.start + p.width * j as f64;

    let quadrature: f64 = (0..p.count)
        .map(|j| {
            let a = panel_start(j);
            let b = if j + 1 == p.count {
                p.end
            } else {
                panel_start(j + 1)
            };
            quad_rule(|t| f.value(t), a, b, m)
        })
        .collect::<CompensatedSum>()
        .value();

    let integrator = Integrator::default();
    let error = match method {
        ErrorMethod::Direct => {
            let upper = if p.infinite { f64::INFINITY } else { p.end };
            let integral = match f.integral(p.start, upper) {
                Some(v) => v,
                None => integrator.integrate(|t| f.value(t), p.start, p.end)?.value,
            };
            return Ok(ErrorReport {
                value_integral: integral,
                value_quadrature: quadrature,
                error: integral - quadrature,
                method,
            });
        }
        ErrorMethod::Peano => {
            let h1 = p.width / m as f64;
            let breaks = joints(p.start, p.end, h1);
            let kernel = |t: f64| {
                let j = (((t - p.start) / p.width).floor().max(0.0) as usize).min(p.count - 1);
                let a = panel_start(j);
                let b = if j + 1 == p.count {
                    p.end
                } else {
                    panel_start(j + 1)
                };
                local_kernel(a, b, m, t.clamp(a, b))
            };
            integrator
                .integrate_with_breaks(|t| f.second_derivative(t) * kernel(t), &breaks)?
                .value
        }
    };
    Ok(ErrorReport {
        value_integral: quadrature + error,
        value_quadrature: quadrature,
        error,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(f: &dyn Integrand, span: Span, m: usize) -> (ErrorReport, ErrorReport) {
        let policy = TruncationPolicy::default();
        (
            composite_error(f, span, m, ErrorMethod::Direct, &policy).unwrap(),
            composite_error(f, span, m, ErrorMethod::Peano, &policy).unwrap(),
        )
    }

    #[test]
    fn affine_has_zero_error() {
        let f =
            FnIntegrand::new(|t| 3.0 * t - 1.0, |_| 0.0).with_antiderivative(|t| 1.5 * t * t - t);
        for panels in [1, 3, 7] {
            let (d, p) = both(
                &f,
                Span::Finite {
                    a: 0.0,
                    b: 1.0,
                    panels,
                },
                4,
            );
            assert!(d.error.abs() < 1e-15);
            assert_eq!(p.error, 0.0);
        }
    }

    #[test]
    fn cubic_peano_identity() {
        // R_{0,1}(t^3) with m = 3: 1/4 - (1/2)((1/3)^3 + (2/3)^3) = 1/12
        let f =
            FnIntegrand::new(|t| t * t * t, |t| 6.0 * t).with_antiderivative(|t| t.powi(4) / 4.0);
        let (d, p) = both(
            &f,
            Span::Finite {
                a: 0.0,
                b: 1.0,
                panels: 1,
            },
            3,
        );
        assert!((d.error - 1.0 / 12.0).abs() < 1e-15);
        assert!((p.error - d.error).abs() < 1e-10);
    }

    #[test]
    fn adaptive_direct_without_antiderivative() {
        let f = FnIntegrand::new(|t: f64| t.sin(), |t: f64| -t.sin());
        let (d, p) = both(
            &f,
            Span::Finite {
                a: 0.0,
                b: 2.0,
                panels: 5,
            },
            3,
        );
        assert!((d.error - p.error).abs() < 1e-11);
    }

    #[test]
    fn improper_integral_of_log_term() {
        let f = NegLogOneMinusExp;
        let total = f.integral(0.0, f64::INFINITY).unwrap();
        assert!((total - 1.644_934_066_848_226_4).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_methods_agree() {
        let (d, p) = both(
            &NegLogOneMinusExp,
            Span::SemiInfinite { a: 0.1, h: 0.25 },
            3,
        );
        assert!(
            (d.error - p.error).abs() < 1e-9,
            "{} vs {}",
            d.error,
            p.error
        );
        assert!(p.error > 0.0);
    }

    #[test]
    fn semi_infinite_requires_decay() {
        let f = FnIntegrand::new(|t| t, |_| 0.0);
        let err = composite_error(
            &f,
            Span::SemiInfinite { a: 0.0, h: 1.0 },
            2,
            ErrorMethod::Peano,
            &TruncationPolicy::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFunction(_)));
    }

    #[test]
    fn additivity_over_panels() {
        let h = 0.3;
        let policy = TruncationPolicy::default();
        let whole = composite_error(
            &NegLogOneMinusExp,
            Span::SemiInfinite { a: 0.0, h },
            2,
            ErrorMethod::Peano,
            &policy,
        )
        .unwrap()
        .error;
        let head = composite_error(
            &NegLogOneMinusExp,
            Span::Finite {
                a: 0.0,
                b: 2.0 * h,
                panels: 2,
            },
            2,
            ErrorMethod::Peano,
            &policy,
        )
        .unwrap()
        .error;
        let rest = composite_error(
            &NegLogOneMinusExp,
            Span::SemiInfinite { a: 2.0 * h, h },
            2,
            ErrorMethod::Peano,
            &policy,
        )
        .unwrap()
        .error;
        assert!((whole - head - rest).abs() < 1e-11);
    }
}
