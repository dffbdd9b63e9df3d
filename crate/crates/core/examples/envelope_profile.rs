// Strided sums sum_k p_{mk}(q;x) approaching 1/m, with their envelopes, and
// the resulting bound 2(1 - sum) on |(B_q - B_{q^m}) f| / ||f||.

use qbernstein::operator::{envelope_at, geometric_grid};
use qbernstein::qseries::strided_sum;
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    for (qv, m) in [(0.5, 2), (0.7, 3), (0.6, 4)] {
        let q = QParam::new(qv)?;
        println!("q = {qv}, m = {m}, 1/m = {:.6}", 1.0 / m as f64);
        println!(
            "{:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
            "1-x", "lower", "sum", "upper", "2(1-sum)"
        );
        for x in geometric_grid(0.5, 1e-8, 1)?.into_iter().step_by(3) {
            let s = strided_sum(q, m, x, &policy)?;
            println!(
                "{:>10.3e}  {:>10.6}  {:>10.6}  {:>10.6}  {:>10.6}",
                1.0 - x,
                s.lower_env,
                s.value,
                s.upper_env,
                envelope_at(q, m, x, &policy)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
