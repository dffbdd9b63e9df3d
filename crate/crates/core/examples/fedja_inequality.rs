// Weight domination p_{mk}(q;x) <= p_k(q^m;x) and the crossing points alpha_k.

use qbernstein::qseries::{alpha_k, alpha_k_bound, fedja_margins};
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    let mut worst = (f64::INFINITY, 0.0, 0, 0, 0.0);
    let mut cases = 0usize;
    for i in 1..=19 {
        let q = QParam::new(0.05 * i as f64)?;
        for m in [2, 3, 4, 5, 8] {
            for s in 0..=40 {
                let x = s as f64 / 40.0;
                for (k, margin) in fedja_margins(q, m, 30, x, &policy)?.into_iter().enumerate() {
                    cases += 1;
                    if margin < worst.0 {
                        worst = (margin, q.value(), m, k, x);
                    }
                }
            }
        }
    }
    let (margin, q, m, k, x) = worst;
    println!("{cases} cases, smallest margin {margin:.3e} at q={q:.2}, m={m}, k={k}, x={x}");

    println!(
        "{:>5} {:>3} {:>3}  {:>12}  {:>12}",
        "q", "m", "k", "alpha_k", "q^(mk+m/2)"
    );
    for (qv, m, k) in [(0.5, 2, 1), (0.5, 3, 1), (0.9, 4, 2), (0.3, 5, 3)] {
        let q = QParam::new(qv)?;
        println!(
            "{qv:>5} {m:>3} {k:>3}  {:>12.6e}  {:>12.6e}",
            alpha_k(q, m, k)?,
            alpha_k_bound(q, m, k)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
