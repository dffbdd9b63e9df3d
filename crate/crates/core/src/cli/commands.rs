use serde::Serialize;

use super::{
    param, policy, BqApplyArgs, CliError, DistanceArgs, MomentsArgs, QuadErrorArgs, RunConfig,
    TestFunction,
};
use super::{WeightsArgs, SCHEMA_VERSION};
use crate::error::Error;
use crate::operator::{
    apply_bq_bounded, distance_lower_bound, envelope_at, geometric_grid, parse_points,
    search_lower_bound, PowerRelation, Regime,
};
use crate::qseries::weight_series_explicit;
use crate::quadrature::{
    composite_error, kernel_moment, kernel_moment_numeric, weighted_kernel_inequality, ErrorMethod,
    ErrorReport, FnIntegrand, InequalityCheck, Integrand, KernelWeight, NegLogOneMinusExp, Span,
};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub k: usize,
    pub p_k: f64,
    pub cumulative_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightsReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub rows: Vec<WeightRow>,
    /// Mass of the omitted weights.
    pub tail_mass: f64,
}

pub fn weights(config: &RunConfig, args: &WeightsArgs) -> Result<WeightsReport, CliError> {
    let q = param("q", args.q)?;
    if !(0.0..1.0).contains(&args.x) {
        return Err(CliError::Input(format!(
            "--x must lie in [0, 1), got {}",
            args.x
        )));
    }
    let policy = policy(args.eps, args.max_k)?;
    let series = weight_series_explicit(q, args.x, &policy)?;
    if series.cap_hit {
        return Err(Error::CapHit {
            max_terms: args.max_k,
            context: "tabulating weights",
        }
        .into());
    }
    let mut acc = CompensatedSum::new();
    let rows = series
        .weights
        .iter()
        .enumerate()
        .map(|(k, &p_k)| {
            acc.add(p_k);
            WeightRow {
                k,
                p_k,
                cumulative_sum: acc.value(),
            }
        })
        .collect();
    Ok(WeightsReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        rows,
        tail_mass: series.tail_mass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplyRow {
    pub x: f64,
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BqApplyReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub sup_norm: f64,
    pub rows: Vec<ApplyRow>,
}

pub fn bq_apply(config: &RunConfig, args: &BqApplyArgs) -> Result<BqApplyReport, CliError> {
    let q = param("q", args.q)?;
    let policy = policy(args.eps, 1_000_000)?;
    let text = std::fs::read_to_string(&args.function).map_err(|source| CliError::Io {
        path: args.function.clone(),
        source,
    })?;
    let f = parse_points(&text)?;
    let xs = if args.x.is_empty() {
        geometric_grid(0.5, 10f64.powi(-(args.grid_depth as i32)), 1)?
    } else {
        args.x.clone()
    };
    let rows = xs
        .into_iter()
        .map(|x| {
            let a = apply_bq_bounded(&f, q, x, &policy)?;
            Ok(ApplyRow {
                x,
                value: a.value,
                error_bound: a.error_bound,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(BqApplyReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        sup_norm: f.sup_norm(),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub x: f64,
    pub n: usize,
    pub breakpoints: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub regime: Regime,
    pub relation: Option<PowerRelation>,
    pub lower_bound: f64,
    pub closed_form: Option<f64>,
    /// `2(1 - sum_k p_{mk}(q;x))` at the finest grid point, when one parameter
    /// is an integer power of the other.
    pub envelope: Option<f64>,
    pub witness: Witness,
}

pub fn distance(config: &RunConfig, args: &DistanceArgs) -> Result<DistanceReport, CliError> {
    let q = param("q", args.q)?;
    let r = param("r", args.r)?;
    if args.n == 0 {
        return Err(CliError::Input("--N must be at least 1".into()));
    }
    let policy = policy(args.eps, 1_000_000)?;
    let grid = geometric_grid(
        args.start_gap,
        10f64.powi(-(args.grid_depth as i32)),
        args.per_halving,
    )?;
    let est = match args.target_eps {
        Some(t) if !(t > 0.0) => {
            return Err(CliError::Input(format!(
                "--target-eps must be positive, got {t}"
            )))
        }
        Some(t) => search_lower_bound(
            q,
            r,
            t,
            args.n,
            10f64.powi(-(args.grid_depth as i32)),
            &policy,
        )?,
        None => distance_lower_bound(q, r, args.n, &grid, &policy)?,
    };
    let envelope = match est.relation {
        Some(rel) if rel.j.min(rel.m) == 1 => {
            let hi = if q > r { q } else { r };
            let finest = *grid.last().expect("grid is nonempty");
            Some(envelope_at(hi, rel.j.max(rel.m) as usize, finest, &policy)?)
        }
        _ => None,
    };
    Ok(DistanceReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        regime: est.regime,
        relation: est.relation,
        lower_bound: est.lower_bound,
        closed_form: est.closed_form,
        envelope,
        witness: Witness {
            x: est.witness_x,
            n: est.n,
            breakpoints: est.witness_fn.len(),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadErrorReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub direct: ErrorReport,
    pub peano: ErrorReport,
    /// `|direct - peano|`
    pub discrepancy: f64,
}

pub fn quad_error(config: &RunConfig, args: &QuadErrorArgs) -> Result<QuadErrorReport, CliError> {
    let policy = policy(args.eps, 1_000_000)?;
    let span = match args.b {
        Some(b) => Span::Finite {
            a: args.a,
            b,
            panels: args.panels,
        },
        None => Span::SemiInfinite {
            a: args.a,
            h: args.h,
        },
    };
    let square = FnIntegrand::new(|t| t * t, |_| 2.0).with_antiderivative(|t| t * t * t / 3.0);
    let cube =
        FnIntegrand::new(|t| t * t * t, |t| 6.0 * t).with_antiderivative(|t| t.powi(4) / 4.0);
    let exp_neg = FnIntegrand::new(|t: f64| (-t).exp(), |t: f64| (-t).exp())
        .with_antiderivative(|t| -(-t).exp());
    let f: &dyn Integrand = match args.function {
        TestFunction::Square => &square,
        TestFunction::Cube => &cube,
        TestFunction::ExpNeg => &exp_neg,
        TestFunction::LogTerm => {
            if !(args.a > 0.0) {
                return Err(CliError::Input("--a must be positive for log-term".into()));
            }
            &NegLogOneMinusExp
        }
    };
    if matches!(span, Span::SemiInfinite { .. }) && !matches!(args.function, TestFunction::LogTerm)
    {
        return Err(CliError::Input(
            "omit --b only for the decaying log-term integrand".into(),
        ));
    }
    let direct = composite_error(f, span, args.m, ErrorMethod::Direct, &policy)?;
    let peano = composite_error(f, span, args.m, ErrorMethod::Peano, &policy)?;
    Ok(QuadErrorReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        discrepancy: (direct.error - peano.error).abs(),
        direct,
        peano,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub j: usize,
    pub closed_form: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentsReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub rows: Vec<MomentRow>,
    /// `I_0` against `8 (I_1 + I_2)`.
    pub inequality: InequalityCheck,
}

pub fn moments(config: &RunConfig, args: &MomentsArgs) -> Result<MomentsReport, CliError> {
    let rows = (0..=args.j_max)
        .map(|j| {
            Ok(MomentRow {
                j,
                closed_form: kernel_moment(args.m, args.h, j)?,
                numeric: kernel_moment_numeric(args.m, args.h, j)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(MomentsReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        rows,
        inequality: weighted_kernel_inequality(args.m, args.h, KernelWeight::InverseSquare)?,
    })
}
