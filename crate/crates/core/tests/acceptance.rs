//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! summary is always printed; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbernstein::operator::{
    distance_lower_bound, envelope_at, geometric_grid, strong_continuity_probe, DistanceEstimate,
    FnInput,
};
use qbernstein::qseries::{euler_series, fedja_margins, qpoch_inf, strided_sum, weight_series};
use qbernstein::quadrature::{
    composite_error, composite_error_decay, kernel_moment, kernel_moment_numeric, theta,
    weighted_kernel_inequality, ErrorMethod, FnIntegrand, Integrand, KernelWeight,
    NegLogOneMinusExp, Span, THETA_REPORTED_AT_TWO,
};
use qbernstein::{QParam, Result, TruncationPolicy};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn qp(v: f64) -> QParam {
    QParam::new(v).expect("valid q")
}

fn q_grid() -> Vec<QParam> {
    (1..=9).map(|i| qp(i as f64 / 10.0)).collect()
}

/// 100 points spanning [0, 1 - 1e-8].
fn x_grid_100() -> Vec<f64> {
    let top = 1.0 - 1e-8;
    (0..100).map(|i| top * i as f64 / 99.0).collect()
}

fn distance_grid() -> Vec<f64> {
    geometric_grid(0.5, 1e-8, 4).expect("valid grid")
}

fn normalization() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for q in q_grid() {
        for x in x_grid_100() {
            worst = worst.max((weight_series(q, x, &policy)?.total() - 1.0).abs());
        }
    }
    verdict(
        worst <= 1e-10,
        format!("max |sum p_k - 1| = {worst:.2e} (tol 1e-10)"),
    )
}

fn euler_identity() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let (mut abs, mut rel) = (0.0f64, 0.0f64);
    for q in q_grid() {
        for x in x_grid_100() {
            let lhs = 1.0 / qpoch_inf(x, q, &policy)?.value;
            let rhs = euler_series(x, q, &policy)?.value;
            abs = abs.max((lhs - rhs).abs());
            rel = rel.max(((lhs - rhs) / lhs).abs());
        }
    }
    // 1/(x;q)_inf reaches ~1e8 on this grid, where one ulp is ~1e-8, so the
    // agreement is measured relative to the value.
    verdict(
        rel <= 1e-10,
        format!("max relative gap {rel:.2e} (tol 1e-10); max absolute gap {abs:.2e}"),
    )
}

fn fedja_sweep() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let (mut failures, mut cases, mut worst) = (0usize, 0usize, f64::INFINITY);
    for i in 1..=19 {
        let q = qp(0.05 * i as f64);
        for m in [2, 3, 4, 5, 8] {
            for s in 0..200 {
                let x = s as f64 / 199.0;
                for margin in fedja_margins(q, m, 30, x, &policy)? {
                    cases += 1;
                    worst = worst.min(margin);
                    if margin < -1e-12 {
                        failures += 1;
                    }
                }
            }
        }
    }
    verdict(
        failures == 0,
        format!("{cases} cases, {failures} failures, min margin {worst:.2e}"),
    )
}

fn strided_envelopes() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let x = 1.0 - 1e-6;
    let mut ok = true;
    let mut worst_gap = 0.0f64;
    for qv in [0.3, 0.5, 0.8] {
        for m in [2, 3, 5] {
            let s = strided_sum(qp(qv), m, x, &policy)?;
            let target = 1.0 / m as f64;
            let gap = (s.lower_env - target)
                .abs()
                .max((s.upper_env - target).abs());
            worst_gap = worst_gap.max(gap);
            ok &= s.lower_env <= s.value && s.value <= s.upper_env && gap <= 1e-3;
        }
    }
    verdict(
        ok,
        format!("sums inside envelopes; max |envelope - 1/m| = {worst_gap:.2e} (tol 1e-3)"),
    )
}

fn kernel_moments() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for m in 2..=16 {
        for j in 0..=2 {
            worst =
                worst.max((kernel_moment(m, 1.0, j)? - kernel_moment_numeric(m, 1.0, j)?).abs());
        }
    }
    let mut min_margin = f64::INFINITY;
    for m in 2..=64 {
        min_margin =
            min_margin.min(weighted_kernel_inequality(m, 1.0, KernelWeight::InverseSquare)?.margin);
    }
    verdict(
        worst <= 1e-10 && min_margin >= 0.0,
        format!("max |closed - numeric| = {worst:.2e} (tol 1e-10); min I_0 - 8(I_1+I_2) = {min_margin:.3e}"),
    )
}

fn theta_certificate() -> Result<Verdict> {
    let t2 = theta(2.0)?;
    let mut increasing = true;
    let mut prev = t2;
    for m in 3..=1000 {
        let t = theta(m as f64)?;
        increasing &= t > prev;
        prev = t;
    }
    let close = (t2 - THETA_REPORTED_AT_TWO).abs() <= 5e-4;
    verdict(
        close && increasing,
        format!("theta(2) = {t2:.10} vs reported {THETA_REPORTED_AT_TWO} (tol 5e-4); increasing on 2..1000: {increasing}"),
    )
}

fn peano_consistency() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let square = FnIntegrand::new(|t| t * t, |_| 2.0).with_antiderivative(|t| t * t * t / 3.0);
    let cube =
        FnIntegrand::new(|t| t * t * t, |t| 6.0 * t).with_antiderivative(|t| t.powi(4) / 4.0);
    let exp_neg = FnIntegrand::new(|t: f64| (-t).exp(), |t: f64| (-t).exp())
        .with_antiderivative(|t| -(-t).exp());
    let finite: [&dyn Integrand; 3] = [&square, &cube, &exp_neg];
    let mut worst = 0.0f64;
    for m in [2, 3, 5] {
        for f in finite {
            for panels in [1, 4] {
                let span = Span::Finite {
                    a: 0.0,
                    b: 1.0,
                    panels,
                };
                let d = composite_error(f, span, m, ErrorMethod::Direct, &policy)?;
                let p = composite_error(f, span, m, ErrorMethod::Peano, &policy)?;
                worst = worst.max((d.error - p.error).abs());
            }
        }
        for h in [0.5, 1.0] {
            let span = Span::SemiInfinite { a: 0.1, h };
            let d = composite_error(&NegLogOneMinusExp, span, m, ErrorMethod::Direct, &policy)?;
            let p = composite_error(&NegLogOneMinusExp, span, m, ErrorMethod::Peano, &policy)?;
            worst = worst.max((d.error - p.error).abs());
        }
    }
    verdict(
        worst <= 1e-8,
        format!("max |direct - peano| = {worst:.2e} (tol 1e-8)"),
    )
}

fn error_decay() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let grid = [0.25, 0.5, 1.0, 2.0];
    let mut worst = f64::INFINITY;
    for m in [2, 3] {
        for h in [0.25, 0.5, 4f64.ln()] {
            for s in grid {
                for a in grid {
                    worst = worst.min(composite_error_decay(s, a, m, h, &policy)?.margin);
                }
            }
        }
    }
    verdict(
        worst >= -1e-10,
        format!("min e^-s E_a - E_(s+a) = {worst:.3e} (tol -1e-10)"),
    )
}

fn rho_weighted_kernel() -> Result<Verdict> {
    let mut worst = f64::INFINITY;
    for h in [0.1, 0.5, 1.0, 4f64.ln()] {
        for m in 2..=10 {
            worst = worst.min(weighted_kernel_inequality(m, h, KernelWeight::Rho)?.margin);
        }
    }
    verdict(
        worst >= -1e-12,
        format!("min margin {worst:.3e} (tol -1e-12)"),
    )
}

fn exact_distance(estimates: &mut Vec<DistanceEstimate>) -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let grid = distance_grid();
    let finest = *grid.last().expect("nonempty");
    let mut ok = true;
    let mut parts = Vec::new();
    for (qv, m) in [(0.5, 2u32), (0.7, 3), (0.6, 4)] {
        let q = qp(qv);
        let target = 2.0 * (m as f64 - 1.0) / m as f64;
        let est = distance_lower_bound(q, q.pow(m)?, 60, &grid, &policy)?;
        let env = envelope_at(q, m as usize, finest, &policy)?;
        ok &= est.lower_bound >= target - 0.05 && env <= target + 0.05;
        parts.push(format!(
            "(q={qv}, m={m}) lower {:.4} envelope {env:.4} target {target:.4}",
            est.lower_bound
        ));
        estimates.push(est);
    }
    verdict(ok, parts.join("; "))
}

fn incommensurable(estimates: &mut Vec<DistanceEstimate>) -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let grid = distance_grid();
    let mut bounds = Vec::new();
    for n in [30, 60, 120] {
        let est = distance_lower_bound(qp(0.5), qp(0.3), n, &grid, &policy)?;
        bounds.push(est.lower_bound);
        estimates.push(est);
    }
    let monotone = bounds.windows(2).all(|w| w[1] >= w[0]);
    verdict(
        bounds[2] >= 1.5 && monotone,
        format!(
            "N = 30, 60, 120: {:.4}, {:.4}, {:.4}",
            bounds[0], bounds[1], bounds[2]
        ),
    )
}

fn distance_range(estimates: &[DistanceEstimate]) -> Result<Verdict> {
    let ok = !estimates.is_empty()
        && estimates
            .iter()
            .all(|e| e.lower_bound >= 0.0 && e.lower_bound <= 2.0 + 1e-10);
    let max = estimates.iter().map(|e| e.lower_bound).fold(0.0, f64::max);
    verdict(
        ok,
        format!("{} estimates, largest {max:.6}", estimates.len()),
    )
}

fn strong_continuity() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let grid = distance_grid();
    let a = qp(0.5);
    let qs: Vec<QParam> = [0.6, 0.55, 0.51, 0.501].iter().map(|&v| qp(v)).collect();
    let identity = FnInput::new(|t| t, 1.0).with_lipschitz(1.0);
    let devs = strong_continuity_probe(&identity, a, &qs, &grid, &policy)?;
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let square = FnInput::new(|t| t * t, 1.0).with_lipschitz(2.0);
    let devs_sq = strong_continuity_probe(&square, a, &qs, &grid, &policy)?;
    let mut lows = Vec::new();
    for &q in &qs {
        lows.push(distance_lower_bound(q, a, 60, &grid, &policy)?.lower_bound);
    }
    let far = lows.iter().all(|&l| l >= 0.9);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|d| format!("{d:.2e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    verdict(
        decreasing && far,
        format!(
            "f = t deviations [{}] strictly decreasing: {decreasing}; f = t^2 deviations [{}]; lower bounds [{}]",
            fmt(&devs),
            fmt(&devs_sq),
            lows.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let mut estimates = Vec::new();
    type Check<'a> = Box<dyn FnMut() -> Result<Verdict> + 'a>;
    let mut results: Vec<(u32, &str, Duration, Result<Verdict>)> = Vec::new();
    {
        let simple: Vec<(u32, &str, f64, Check)> = vec![
            (1, "normalization", 5.0, Box::new(normalization)),
            (2, "euler identity", 5.0, Box::new(euler_identity)),
            (3, "weight domination sweep", 60.0, Box::new(fedja_sweep)),
            (
                4,
                "strided sums and envelopes",
                5.0,
                Box::new(strided_envelopes),
            ),
            (5, "kernel moments", 30.0, Box::new(kernel_moments)),
            (6, "theta certificate", 1.0, Box::new(theta_certificate)),
            (7, "peano consistency", 30.0, Box::new(peano_consistency)),
            (8, "composite error decay", 60.0, Box::new(error_decay)),
            (
                9,
                "rho weighted kernel",
                30.0,
                Box::new(rho_weighted_kernel),
            ),
        ];
        for (id, name, budget, mut check) in simple {
            let start = Instant::now();
            let out = check();
            let took = start.elapsed();
            results.push((id, name, took, within(out, took, budget)));
        }
    }
    let start = Instant::now();
    let out = exact_distance(&mut estimates);
    let took = start.elapsed();
    results.push((
        10,
        "exact distance for r = q^m",
        took,
        within(out, took, 120.0),
    ));
    let start = Instant::now();
    let out = incommensurable(&mut estimates);
    let took = start.elapsed();
    results.push((
        11,
        "incommensurable lower bound",
        took,
        within(out, took, 120.0),
    ));
    let start = Instant::now();
    let out = distance_range(&estimates);
    results.push((12, "distance range", start.elapsed(), out));
    let start = Instant::now();
    let out = strong_continuity();
    let took = start.elapsed();
    results.push((
        13,
        "strong continuity probe",
        took,
        within(out, took, 120.0),
    ));

    let mut failed = 0;
    for (id, name, took, result) in &results {
        let (status, detail) = match result {
            Ok(v) if v.pass => ("PASS", v.detail.clone()),
            Ok(v) => ("FAIL", v.detail.clone()),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id:>2} [{status}] {name} ({:.2}s): {detail}",
            took.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn within(out: Result<Verdict>, took: Duration, budget_secs: f64) -> Result<Verdict> {
    out.map(|mut v| {
        if took.as_secs_f64() > budget_secs {
            v.pass = false;
            v.detail
                .push_str(&format!("; over the {budget_secs}s runtime budget"));
        }
        v
    })
}
