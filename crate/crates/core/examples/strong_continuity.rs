// B_q f -> B_a f uniformly for each f as q -> a, while ||B_q - B_a|| stays
// near 2.

use qbernstein::operator::{
    distance_lower_bound, geometric_grid, strong_continuity_probe, FnInput,
};
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    let grid = geometric_grid(0.5, 1e-8, 4)?;
    let a = QParam::new(0.5)?;
    let qs = [0.6, 0.55, 0.51, 0.501]
        .iter()
        .map(|&v| QParam::new(v))
        .collect::<Result<Vec<_>, _>>()?;

    let square = FnInput::new(|t| t * t, 1.0).with_lipschitz(2.0);
    let bump = FnInput::new(|t: f64| (std::f64::consts::PI * t).sin(), 1.0)
        .with_lipschitz(std::f64::consts::PI);
    let dev_sq = strong_continuity_probe(&square, a, &qs, &grid, &policy)?;
    let dev_bump = strong_continuity_probe(&bump, a, &qs, &grid, &policy)?;

    println!(
        "{:>6}  {:>12}  {:>12}  {:>12}",
        "q", "t^2", "sin(pi t)", "||B_q-B_a||>="
    );
    for (i, q) in qs.iter().enumerate() {
        let est = distance_lower_bound(*q, a, 60, &grid, &policy)?;
        println!(
            "{:>6}  {:>12.4e}  {:>12.4e}  {:>12.6}",
            q.value(),
            dev_sq[i],
            dev_bump[i],
            est.lower_bound
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
