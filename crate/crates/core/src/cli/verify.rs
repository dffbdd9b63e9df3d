use std::collections::BTreeMap;

use serde::Serialize;

use super::{param, policy, CliError, RunConfig, Suite, VerifyArgs, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::qseries::{fedja_margins, strided_sum, QParam, TruncationPolicy};
use crate::quadrature::{
    composite_error_decay, rho_decay, tail_area_inequality, theta, weighted_kernel_inequality,
    KernelWeight,
};

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub params: BTreeMap<&'static str, f64>,
    pub margin: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub suite: Suite,
    pub tolerance: f64,
    pub cases: usize,
    pub failures: Vec<Case>,
    pub worst_margin: f64,
    pub worst_case: Option<Case>,
    #[serde(skip)]
    pub all: Vec<Case>,
}

struct Sweep {
    tol: f64,
    cases: Vec<Case>,
}

impl Sweep {
    fn record(&mut self, params: &[(&'static str, f64)], margin: f64) {
        self.cases.push(Case {
            params: params.iter().copied().collect(),
            margin,
            failed: !(margin >= -self.tol),
        });
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn default_tol(suite: Suite) -> f64 {
    match suite {
        Suite::Decay => 1e-10,
        _ => 1e-12,
    }
}

/// Run `args.suite` and collect every case with its margin.
pub fn verify(
    config: &RunConfig,
    args: &VerifyArgs,
) -> std::result::Result<VerifyReport, CliError> {
    let tol = args.tol.unwrap_or_else(|| default_tol(args.suite));
    if !(tol >= 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be nonnegative, got {tol}"
        )));
    }
    let policy = policy(args.eps, 1_000_000)?;
    let qs: Option<QParam> = args.q.map(|q| param("q", q)).transpose()?;
    let mut sweep = Sweep {
        tol,
        cases: Vec::new(),
    };
    let pick_m = |defaults: &[usize]| args.m.map_or_else(|| defaults.to_vec(), |m| vec![m]);
    match args.suite {
        Suite::Fedja => {
            let q_list = match qs {
                Some(q) => vec![q],
                None => (1..=19)
                    .map(|i| QParam::new(0.05 * i as f64))
                    .collect::<Result<_>>()?,
            };
            for q in q_list {
                for m in pick_m(&[2, 3, 4, 5, 8]) {
                    for i in 0..200 {
                        let x = i as f64 / 199.0;
                        for (k, margin) in fedja_margins(q, m, args.k_max, x, &policy)?
                            .into_iter()
                            .enumerate()
                        {
                            sweep.record(
                                &[("q", q.value()), ("m", m as f64), ("k", k as f64), ("x", x)],
                                margin,
                            );
                        }
                    }
                }
            }
        }
        Suite::Moments => {
            let ms = args
                .m
                .map_or_else(|| (2..=args.m_max.unwrap_or(64)).collect(), |m| vec![m]);
            for m in ms {
                let c = weighted_kernel_inequality(m, 1.0, KernelWeight::InverseSquare)?;
                sweep.record(&[("m", m as f64)], c.margin);
            }
        }
        Suite::Theta => {
            let ms = args
                .m
                .map_or_else(|| (2..=args.m_max.unwrap_or(1000)).collect(), |m| vec![m]);
            for m in ms {
                sweep.record(&[("m", m as f64)], theta(m as f64)?);
            }
        }
        Suite::Rho => {
            let grid = log_grid(1e-3, 10.0, 25);
            for &s in &grid {
                for &t in &grid {
                    let c = rho_decay(s, t)?;
                    // relative to the scale of rho(t), which is huge near 0
                    sweep.record(&[("s", s), ("t", t)], c.margin / c.rhs.max(1.0));
                }
            }
        }
        Suite::Decay => {
            let shifts = [0.25, 0.5, 1.0, 2.0];
            for m in pick_m(&[2, 3]) {
                for h in [0.25, 0.5, 4f64.ln()] {
                    for &s in &shifts {
                        for &a in &shifts {
                            let c = composite_error_decay(s, a, m, h, &policy)?;
                            sweep
                                .record(&[("s", s), ("a", a), ("m", m as f64), ("h", h)], c.margin);
                        }
                    }
                }
            }
        }
        Suite::Tail => {
            let grid = log_grid(1e-2, 20.0, 16);
            for &s in &grid {
                for &t in &grid {
                    let c = tail_area_inequality(s, t)?;
                    sweep.record(&[("S", s), ("T", t)], c.margin);
                }
            }
        }
        Suite::Envelope => {
            let q_list = match qs {
                Some(q) => vec![q],
                None => [0.3, 0.5, 0.8]
                    .iter()
                    .map(|&v| QParam::new(v))
                    .collect::<Result<_>>()?,
            };
            for q in q_list {
                for m in pick_m(&[2, 3, 5]) {
                    for d in 1..=args.grid_depth {
                        let x = 1.0 - 10f64.powi(-(d as i32));
                        let margin = envelope_margin(q, m, x, &policy)?;
                        sweep.record(&[("q", q.value()), ("m", m as f64), ("x", x)], margin);
                    }
                }
            }
        }
    }

    let failures: Vec<Case> = sweep.cases.iter().filter(|c| c.failed).cloned().collect();
    let worst_case = sweep
        .cases
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .cloned();
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        suite: args.suite,
        tolerance: tol,
        cases: sweep.cases.len(),
        failures,
        worst_margin: worst_case.as_ref().map_or(f64::NAN, |c| c.margin),
        worst_case,
        all: sweep.cases,
    })
}

/// Distance of the strided sum from the nearer envelope, negative outside.
fn envelope_margin(
    q: QParam,
    m: usize,
    x: f64,
    policy: &TruncationPolicy,
) -> std::result::Result<f64, Error> {
    let s = strided_sum(q, m, x, policy)?;
    Ok((s.value - s.lower_env).min(s.upper_env - s.value))
}
