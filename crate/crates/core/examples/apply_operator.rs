// Applying B_q to piecewise-linear functions and to closures.

use qbernstein::operator::{apply_bq, apply_bq_bounded, parse_points, FnInput};
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    let q = QParam::new(0.5)?;

    // Same text format the `bq-apply` command reads.
    let hat = parse_points("# a hat\n0,0\n0.5,1\n1,0\n")?;
    let ramp = FnInput::new(|t| t, 1.0).with_lipschitz(1.0);
    let square = FnInput::new(|t| t * t, 1.0).with_lipschitz(2.0);

    println!(
        "{:>10}  {:>20}  {:>20}  {:>20}",
        "x", "B_q hat", "B_q t", "B_q t^2"
    );
    for x in [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999_999, 1.0] {
        let a = apply_bq_bounded(&hat, q, x, &policy)?;
        println!(
            "{x:>10}  {:>20.16}  {:>20.16}  {:>20.16}   (+- {:.1e})",
            a.value,
            apply_bq(&ramp, q, x, &policy)?,
            apply_bq(&square, q, x, &policy)?,
            a.error_bound,
        );
    }
    // B_q reproduces t, and B_q t^2 = t^2 + (1-q) t (1-t).
    let x = 0.3;
    let gap = apply_bq(&square, q, x, &policy)? - x * x;
    println!(
        "B_q t^2 - t^2 at x = {x}: {gap:.16}, (1-q) x (1-x) = {:.16}",
        0.5 * x * (1.0 - x)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
