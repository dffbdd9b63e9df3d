//! Lower and upper estimates of `||B_q - B_r||`.

use serde::Serialize;

use super::{apply_bq, detect_power_relation, NodeFunction, PiecewiseLinearFn, PowerRelation};
use super::{DEFAULT_MAX_EXPONENT, DEFAULT_RELATION_TOL};
use crate::error::{Error, Result};
use crate::qseries::{qpoch_inf, strided_sum, QParam, TruncationPolicy};

/// Nodes past depth `N` pinned to zero, per parameter.
pub const DEFAULT_GUARD_DEPTH: usize = 20;

/// Relative distance below which two prescribed nodes count as one.
pub const NODE_COLLISION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceOptions {
    pub max_exponent: u32,
    pub relation_tol: f64,
    pub guard_depth: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            max_exponent: DEFAULT_MAX_EXPONENT,
            relation_tol: DEFAULT_RELATION_TOL,
            guard_depth: DEFAULT_GUARD_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Identical,
    Commensurable,
    Incommensurable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEstimate {
    pub q: QParam,
    pub r: QParam,
    pub regime: Regime,
    pub relation: Option<PowerRelation>,
    /// `max_x |(B_q - B_r) f_N (x)| / ||f_N||` over the grid.
    pub lower_bound: f64,
    pub witness_x: f64,
    #[serde(skip)]
    pub witness_fn: PiecewiseLinearFn,
    pub n: usize,
    pub closed_form: Option<f64>,
}

/// Collects `(gap, value)` prescriptions and merges coincident nodes.
struct Prescriptions(Vec<(f64, f64)>);

impl Prescriptions {
    fn push(&mut self, gap: f64, value: f64) {
        if gap > 0.0 {
            self.0.push((gap, value));
        }
    }

    fn min_gap(&self) -> f64 {
        self.0.iter().map(|p| p.0).fold(1.0, f64::min)
    }

    fn finish(mut self) -> Result<PiecewiseLinearFn> {
        self.0.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for (gap, value) in self.0 {
            let &(last_gap, last_value) = merged.last().expect("seeded");
            if last_gap > 0.0 && gap - last_gap <= NODE_COLLISION_TOL * gap {
                if last_value != value {
                    return Err(Error::NodeCollision {
                        gap_a: last_gap,
                        gap_b: gap,
                        value_a: last_value,
                        value_b: value,
                    });
                }
                continue;
            }
            merged.push((gap, value));
        }
        PiecewiseLinearFn::from_gap_points(merged)
    }

    /// Zero every node of `p` from depth `n + 1` down to `guard` levels below
    /// the deepest prescription so the function vanishes near 1.
    fn pin_deep_nodes(&mut self, p: QParam, n: usize, guard: usize, keep: impl Fn(usize) -> bool) {
        let floor = self.min_gap();
        let below = (floor.ln() / p.value().ln()).ceil() as usize;
        let last = (n + guard).max(below + guard);
        for k in n + 1..=last {
            if keep(k) {
                self.push(p.value().powi(k as i32), 0.0);
            }
        }
    }
}

fn distinct(q: QParam, r: QParam) -> Result<()> {
    if q == r {
        return Err(Error::InvalidFunction(
            "extremal functions need q != r".into(),
        ));
    }
    Ok(())
}

/// `f = +1` at `1 - q^k`, `-1` at `1 - r^k` for `k = 1..=N`, and 0 at `t = 0`,
/// at deeper nodes and at `t = 1`.
pub fn build_extremal_disjoint(q: QParam, r: QParam, n: usize) -> Result<PiecewiseLinearFn> {
    build_disjoint(q, r, n, DEFAULT_GUARD_DEPTH)
}

fn build_disjoint(q: QParam, r: QParam, n: usize, guard: usize) -> Result<PiecewiseLinearFn> {
    distinct(q, r)?;
    if n == 0 {
        return Err(Error::domain("N", 0.0, "integers >= 1"));
    }
    let mut pres = Prescriptions(Vec::new());
    pres.push(1.0, 0.0);
    for k in 1..=n {
        pres.push(q.value().powi(k as i32), 1.0);
        pres.push(r.value().powi(k as i32), -1.0);
    }
    pres.pin_deep_nodes(q, n, guard, |_| true);
    pres.pin_deep_nodes(r, n, guard, |_| true);
    pres.finish()
}

/// Extremal function for `r^j = q^m`: on `1 - q^k`, `k <= N`, it is `-1` when
/// `m | k` and `+1` otherwise; on `1 - r^k`, `k <= N`, it is `-1`. Nodes shared
/// by both sets are `-1`, including `q`-nodes past depth `N` that coincide with
/// an `r`-node up to `N`. Every other node past depth `N` is 0.
pub fn build_extremal_commensurable(
    q: QParam,
    r: QParam,
    rel: PowerRelation,
    n: usize,
) -> Result<PiecewiseLinearFn> {
    build_commensurable(q, r, rel, n, DEFAULT_GUARD_DEPTH)
}

fn build_commensurable(
    q: QParam,
    r: QParam,
    rel: PowerRelation,
    n: usize,
    guard: usize,
) -> Result<PiecewiseLinearFn> {
    distinct(q, r)?;
    let (j, m) = (rel.j as usize, rel.m as usize);
    if j == 0 || m == 0 {
        return Err(Error::domain("exponent", 0.0, "integers >= 1"));
    }
    let q_value = |k: usize| if k.is_multiple_of(m) { -1.0 } else { 1.0 };
    let mut pres = Prescriptions(Vec::new());
    pres.push(1.0, q_value(0));
    for k in 1..=n {
        pres.push(q.value().powi(k as i32), q_value(k));
        // r^k = q^{mk/j} when j | k; that q-node is a multiple of m, so -1 either way
        pres.push(r.value().powi(k as i32), -1.0);
    }
    // q-nodes past N that coincide with r-nodes up to N keep their -1
    let shared = |i: usize| i.is_multiple_of(m) && (i / m) * j <= n;
    for i in n + 1..=m * n / j {
        if shared(i) {
            pres.push(q.value().powi(i as i32), -1.0);
        }
    }
    pres.pin_deep_nodes(q, n, guard, |i| !shared(i));
    pres.pin_deep_nodes(r, n, guard, |_| true);
    pres.finish()
}

/// `2(m-1)/m` when the relation is `r = q^m` (or `q = r^m`), otherwise none.
pub fn distance_closed_form(rel: PowerRelation) -> Option<f64> {
    let (lo, hi) = (rel.j.min(rel.m), rel.j.max(rel.m));
    (lo == 1).then(|| 2.0 * (hi as f64 - 1.0) / hi as f64)
}

/// `max_x |(B_q - B_r) f_N(x)|` over `x_grid` with the extremal `f_N` of the
/// detected regime.
pub fn distance_lower_bound(
    q: QParam,
    r: QParam,
    n: usize,
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<DistanceEstimate> {
    distance_lower_bound_with(q, r, n, x_grid, policy, &DistanceOptions::default())
}

pub fn distance_lower_bound_with(
    q: QParam,
    r: QParam,
    n: usize,
    x_grid: &[f64],
    policy: &TruncationPolicy,
    options: &DistanceOptions,
) -> Result<DistanceEstimate> {
    if x_grid.is_empty() {
        return Err(Error::InvalidFunction("x grid is empty".into()));
    }
    if n == 0 {
        return Err(Error::domain("N", 0.0, "integers >= 1"));
    }
    for &x in x_grid {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::domain("x", x, "[0, 1)"));
        }
    }
    if q == r {
        return Ok(DistanceEstimate {
            q,
            r,
            regime: Regime::Identical,
            relation: None,
            lower_bound: 0.0,
            witness_x: x_grid[0],
            witness_fn: PiecewiseLinearFn::constant(1.0),
            n,
            closed_form: Some(0.0),
        });
    }

    // The constructions assume the second parameter is the smaller one.
    let (hi, lo) = if q > r { (q, r) } else { (r, q) };
    let relation = detect_power_relation(hi, lo, options.max_exponent, options.relation_tol);
    let (regime, witness_fn) = match relation {
        Some(rel) => (
            Regime::Commensurable,
            build_commensurable(hi, lo, rel, n, options.guard_depth)?,
        ),
        None => (
            Regime::Incommensurable,
            build_disjoint(hi, lo, n, options.guard_depth)?,
        ),
    };

    let norm = witness_fn.sup_norm();
    let mut best = (f64::NEG_INFINITY, x_grid[0]);
    for &x in x_grid {
        let diff = apply_bq(&witness_fn, hi, x, policy)? - apply_bq(&witness_fn, lo, x, policy)?;
        let ratio = diff.abs() / norm;
        if ratio > best.0 {
            best = (ratio, x);
        }
    }
    Ok(DistanceEstimate {
        q,
        r,
        regime,
        relation: detect_power_relation(q, r, options.max_exponent, options.relation_tol),
        lower_bound: best.0,
        witness_x: best.1,
        witness_fn,
        n,
        closed_form: relation.and_then(distance_closed_form),
    })
}

/// `2 (1 - sum_k p_{mk}(q;x))`, which bounds `|(B_q - B_{q^m}) f (x)| / ||f||`.
pub fn envelope_at(q: QParam, m: usize, x: f64, policy: &TruncationPolicy) -> Result<f64> {
    if x == 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (1.0 - strided_sum(q, m, x, policy)?.value))
}

/// Maximum of [`envelope_at`] over `x_grid`.
pub fn distance_upper_envelope(
    q: QParam,
    m: usize,
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<f64> {
    let mut best = 0.0f64;
    for &x in x_grid {
        best = best.max(envelope_at(q, m, x, policy)?);
    }
    Ok(best)
}

/// `sup_x |B_q f(x) - B_a f(x)|` over `x_grid`, for each `q` in turn.
pub fn strong_continuity_probe<F: NodeFunction + ?Sized>(
    f: &F,
    a: QParam,
    q_sequence: &[QParam],
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<Vec<f64>> {
    let base = x_grid
        .iter()
        .map(|&x| apply_bq(f, a, x, policy))
        .collect::<Result<Vec<_>>>()?;
    q_sequence
        .iter()
        .map(|&q| {
            let mut sup = 0.0f64;
            for (&x, &b) in x_grid.iter().zip(&base) {
                sup = sup.max((apply_bq(f, q, x, policy)? - b).abs());
            }
            Ok(sup)
        })
        .collect()
}

/// `x_i = 1 - start_gap 2^{-i/per_halving}` down to `finest_gap`, increasing,
/// with `1 - finest_gap` always the last point.
pub fn geometric_grid(start_gap: f64, finest_gap: f64, per_halving: usize) -> Result<Vec<f64>> {
    if !(start_gap > 0.0 && start_gap <= 1.0) {
        return Err(Error::domain("start_gap", start_gap, "(0, 1]"));
    }
    if !(finest_gap > 0.0 && finest_gap <= start_gap) {
        return Err(Error::domain("finest_gap", finest_gap, "(0, start_gap]"));
    }
    if per_halving == 0 {
        return Err(Error::domain("per_halving", 0.0, "integers >= 1"));
    }
    let steps = ((start_gap / finest_gap).log2() * per_halving as f64).floor() as i32;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|i| 1.0 - start_gap * (-(i as f64) / per_halving as f64).exp2())
        .collect();
    if grid.last().is_none_or(|&x| x < 1.0 - finest_gap) {
        grid.push(1.0 - finest_gap);
    }
    grid.dedup();
    Ok(grid)
}

/// Largest `delta = 2^{-i}/2` with `p_0(q; 1 - 2 delta) < eps/4`, so that the
/// constant weight is negligible on `[1 - 2 delta, 1)`.
pub fn proof_window_gap(q: QParam, eps: f64, policy: &TruncationPolicy) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps", eps, "(0, inf)"));
    }
    let mut delta = 0.5;
    while delta > f64::EPSILON {
        if qpoch_inf(1.0 - 2.0 * delta, q, policy)?.value < eps / 4.0 {
            return Ok(delta);
        }
        delta /= 2.0;
    }
    Err(Error::CapHit {
        max_terms: policy.max_terms,
        context: "shrinking the proof window",
    })
}

/// Value the lower bound approaches as `N` grows: `2(m-1)/m` for `r^j = q^m`
/// with `m` the larger exponent, 2 without a relation, 0 when `q = r`.
pub fn distance_target(q: QParam, r: QParam, options: &DistanceOptions) -> f64 {
    if q == r {
        return 0.0;
    }
    let (hi, lo) = if q > r { (q, r) } else { (r, q) };
    match detect_power_relation(hi, lo, options.max_exponent, options.relation_tol) {
        Some(rel) => {
            let m = rel.j.max(rel.m) as f64;
            2.0 * (m - 1.0) / m
        }
        None => 2.0,
    }
}

/// Double `N` from 16 until the lower bound is within `eps` of
/// [`distance_target`]. The grid runs from gap 0.5 down past the proof window
/// `[1 - 2 delta, 1 - delta]`; the maximum usually sits well outside it.
pub fn search_lower_bound(
    q: QParam,
    r: QParam,
    eps: f64,
    max_n: usize,
    finest_gap: f64,
    policy: &TruncationPolicy,
) -> Result<DistanceEstimate> {
    let options = DistanceOptions::default();
    let target = distance_target(q, r, &options);
    let delta = proof_window_gap(if q > r { q } else { r }, eps, policy)?;
    let grid = geometric_grid(0.5, finest_gap.min(delta), 4)?;
    let mut best = f64::NEG_INFINITY;
    let mut n = 16;
    while n <= max_n.max(16) {
        let est = distance_lower_bound_with(q, r, n, &grid, policy, &options)?;
        if est.lower_bound >= target - eps {
            return Ok(est);
        }
        best = best.max(est.lower_bound);
        n *= 2;
    }
    Err(Error::TargetNotReached {
        target,
        best,
        max_n,
    })
}
