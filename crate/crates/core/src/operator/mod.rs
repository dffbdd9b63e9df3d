//! The limit q-Bernstein operator
//!
//! ```text
//! B_q(f; x) = sum_k f(1 - q^k) p_k(q; x)   for x in [0, 1),     B_q(f; 1) = f(1),
//! ```
//!
//! and estimates of the operator distance `||B_q - B_r||` on `C[0, 1]`.

mod distance;
mod piecewise;
mod relation;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qseries::{build_series, Extent, QParam, TruncationPolicy};
use crate::sum::CompensatedSum;

pub use distance::{
    build_extremal_commensurable, build_extremal_disjoint, distance_closed_form,
    distance_lower_bound, distance_lower_bound_with, distance_target, distance_upper_envelope,
    envelope_at, geometric_grid, proof_window_gap, search_lower_bound, strong_continuity_probe,
    DistanceEstimate, DistanceOptions, Regime, DEFAULT_GUARD_DEPTH, NODE_COLLISION_TOL,
};
pub use piecewise::{parse_points, PiecewiseLinearFn};
pub use relation::{
    detect_power_relation, PowerRelation, DEFAULT_MAX_EXPONENT, DEFAULT_RELATION_TOL,
};

/// The nodes `1 - q^k`, `k = 0..=depth`, at which `B_q` samples its argument.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSet {
    pub q: QParam,
    pub depth: usize,
    /// `q^k`, the distance of node `k` to 1.
    pub gaps: Vec<f64>,
}

impl NodeSet {
    pub fn new(q: QParam, depth: usize) -> Self {
        let gaps = (0..=depth).map(|k| q.value().powi(k as i32)).collect();
        Self { q, depth, gaps }
    }

    /// `1 - q^k`; deep nodes round to 1 in this view.
    pub fn nodes(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| 1.0 - g).collect()
    }

    /// Index pairs `(k, l)` with `q^k` and `r^l` equal to relative tolerance
    /// `rel_tol`, excluding the shared node at 0.
    pub fn coincidences(&self, other: &NodeSet, rel_tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, &a) in self.gaps.iter().enumerate().skip(1) {
            for (l, &b) in other.gaps.iter().enumerate().skip(1) {
                if (a - b).abs() <= rel_tol * a.max(b) {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// How an argument of `B_q` behaves as `t -> 1`, which decides how the
/// infinitely many nodes past the explicit prefix are summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBehavior {
    /// `f(1 - u) = value_at_one + slope * u` for `u <= below_gap`.
    Affine {
        below_gap: f64,
        value_at_one: f64,
        slope: f64,
    },
    /// `|f(1 - u) - f(1)| <= constant * u`.
    Lipschitz { constant: f64 },
    /// Only boundedness is known; the weight series is summed explicitly.
    Unknown,
}

/// A bounded function on `[0, 1]` addressed by the gap `u = 1 - t`.
pub trait NodeFunction {
    fn eval_gap(&self, gap: f64) -> f64;

    fn sup_norm(&self) -> f64;

    fn tail_behavior(&self) -> TailBehavior {
        TailBehavior::Unknown
    }
}

impl NodeFunction for PiecewiseLinearFn {
    fn eval_gap(&self, gap: f64) -> f64 {
        PiecewiseLinearFn::eval_gap(self, gap)
    }

    fn sup_norm(&self) -> f64 {
        PiecewiseLinearFn::sup_norm(self)
    }

    fn tail_behavior(&self) -> TailBehavior {
        let (below_gap, value_at_one, slope) = self.affine_tail();
        TailBehavior::Affine {
            below_gap,
            value_at_one,
            slope,
        }
    }
}

/// A closure `t -> f(t)` with a caller-supplied sup-norm bound and, optionally,
/// a Lipschitz constant near `t = 1`.
pub struct FnInput<F> {
    f: F,
    sup_norm: f64,
    lipschitz: Option<f64>,
}

impl<F: Fn(f64) -> f64> FnInput<F> {
    pub fn new(f: F, sup_norm: f64) -> Self {
        Self {
            f,
            sup_norm,
            lipschitz: None,
        }
    }

    pub fn with_lipschitz(mut self, constant: f64) -> Self {
        self.lipschitz = Some(constant);
        self
    }
}

impl<F: Fn(f64) -> f64> NodeFunction for FnInput<F> {
    fn eval_gap(&self, gap: f64) -> f64 {
        (self.f)(1.0 - gap)
    }

    fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    fn tail_behavior(&self) -> TailBehavior {
        match self.lipschitz {
            Some(constant) => TailBehavior::Lipschitz { constant },
            None => TailBehavior::Unknown,
        }
    }
}

/// A value with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approximation {
    pub value: f64,
    pub error_bound: f64,
}

/// `B_q(f; x)`.
pub fn apply_bq<F: NodeFunction + ?Sized>(
    f: &F,
    q: QParam,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    apply_bq_bounded(f, q, x, policy).map(|a| a.value)
}

/// `B_q(f; x)` with a bound on the error from the omitted nodes.
pub fn apply_bq_bounded<F: NodeFunction + ?Sized>(
    f: &F,
    q: QParam,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<Approximation> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", x, "[0, 1]"));
    }
    if x == 1.0 {
        return Ok(Approximation {
            value: f.eval_gap(0.0),
            error_bound: 0.0,
        });
    }
    if x == 0.0 {
        return Ok(Approximation {
            value: f.eval_gap(1.0),
            error_bound: 0.0,
        });
    }

    let behavior = f.tail_behavior();
    let extent = match behavior {
        TailBehavior::Affine { below_gap, .. } => {
            // first K with q^{K+1} <= below_gap
            let needed = (below_gap.ln() / q.value().ln()).ceil() - 1.0;
            let needed = needed.max(0.0);
            if needed >= policy.max_terms as f64 {
                return Err(Error::CapHit {
                    max_terms: policy.max_terms,
                    context: "reaching the last breakpoint of the argument",
                });
            }
            Extent::ClosedFormTail {
                min_terms: needed as usize,
            }
        }
        TailBehavior::Lipschitz { .. } => Extent::ClosedFormTail { min_terms: 0 },
        TailBehavior::Unknown => Extent::Explicit,
    };
    let series = build_series(q, x, extent, policy)?;
    if series.cap_hit {
        return Err(Error::CapHit {
            max_terms: policy.max_terms,
            context: "summing the weights of B_q",
        });
    }

    let mut acc: CompensatedSum = series
        .weights
        .iter()
        .enumerate()
        .map(|(k, &p)| f.eval_gap(q.value().powi(k as i32)) * p)
        .collect();
    let norm = f.sup_norm();
    let value_at_one = f.eval_gap(0.0);
    let next = series.last_index() + 1;
    let mut error_bound = norm * series.tail_bound;
    acc.add(value_at_one * series.tail_mass);
    match behavior {
        TailBehavior::Affine { slope, .. } => {
            let (mid, half) = series.tail(next, 1, true);
            acc.add(slope * mid);
            error_bound += slope.abs() * half;
        }
        TailBehavior::Lipschitz { constant } => {
            let (mid, half) = series.tail(next, 1, true);
            error_bound += constant * (mid + half);
        }
        TailBehavior::Unknown => {
            error_bound += norm * series.tail_mass;
        }
    }
    Ok(Approximation {
        value: acc.value(),
        error_bound,
    })
}
