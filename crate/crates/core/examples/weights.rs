// The weights p_k(q;x), their normalisation and Euler's identity.

use qbernstein::qseries::{euler_series, qpoch_inf, weight_series, weight_series_explicit};
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let q = QParam::new(0.5)?;
    let policy = TruncationPolicy::default();

    let series = weight_series_explicit(q, 0.5, &policy)?;
    println!("{:>3}  {:>22}  {:>22}", "k", "p_k(0.5;0.5)", "running sum");
    let mut sum = 0.0;
    for (k, p) in series.weights.iter().enumerate().take(12) {
        sum += p;
        println!("{k:>3}  {p:>22.16e}  {sum:>22.16e}");
    }
    println!(
        "... {} terms in all, omitted mass {:.2e}",
        series.weights.len(),
        series.tail_mass
    );

    // Close to x = 1 the mass drifts to large k; the closed-form tail keeps
    // the prefix short.
    for x in [0.9, 0.999, 1.0 - 1e-8] {
        let s = weight_series(q, x, &policy)?;
        println!(
            "x = 1 - {:.0e}: {} explicit terms, total - 1 = {:+.2e}",
            1.0 - x,
            s.weights.len(),
            s.total() - 1.0
        );
    }

    for (x, qv) in [(0.3, 0.5), (0.9, 0.9), (0.99, 0.2)] {
        let q = QParam::new(qv)?;
        let lhs = 1.0 / qpoch_inf(x, q, &policy)?.value;
        let rhs = euler_series(x, q, &policy)?.value;
        println!("1/(x;q)_inf = {lhs:.15e}, sum x^k/(q;q)_k = {rhs:.15e}  (x={x}, q={qv})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
