// Lower bounds for ||B_q - B_r|| in the three parameter regimes.

use qbernstein::operator::{
    detect_power_relation, distance_lower_bound, distance_target, distance_upper_envelope,
    geometric_grid, search_lower_bound, DistanceOptions, DEFAULT_MAX_EXPONENT,
    DEFAULT_RELATION_TOL,
};
use qbernstein::{QParam, TruncationPolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    let grid = geometric_grid(0.5, 1e-8, 4)?;

    for (qv, rv, n) in [
        (0.5, 0.25, 60),
        (0.7, 0.343, 60),
        (0.64, 0.512, 60),
        (0.5, 0.3, 120),
        (0.4, 0.4, 10),
    ] {
        let (q, r) = (QParam::new(qv)?, QParam::new(rv)?);
        let relation = if q == r {
            None
        } else {
            detect_power_relation(q, r, DEFAULT_MAX_EXPONENT, DEFAULT_RELATION_TOL)
        };
        let est = distance_lower_bound(q, r, n, &grid, &policy)?;
        print!(
            "q = {qv}, r = {rv}: {:?}, relation {:?}, lower bound {:.6} at x = 1 - {:.3e}",
            est.regime,
            relation.map(|r| (r.j, r.m)),
            est.lower_bound,
            1.0 - est.witness_x,
        );
        if let Some(cf) = est.closed_form {
            print!(", closed form {cf:.6}");
        }
        println!();
    }

    // The envelope over the whole grid, not just near 1.
    let q = QParam::new(0.7)?;
    println!(
        "sup over grid of 2(1 - sum p_3k(0.7;x)) = {:.6}",
        distance_upper_envelope(q, 3, &grid, &policy)?
    );

    // Smallest power-of-two N whose bound is within eps of the limit.
    let (q, r) = (QParam::new(0.5)?, QParam::new(0.3)?);
    let target = distance_target(q, r, &DistanceOptions::default());
    for eps in [0.2, 0.1, 0.05] {
        let est = search_lower_bound(q, r, eps, 1024, 1e-8, &policy)?;
        println!(
            "target {target} - {eps}: N = {}, bound {:.6}",
            est.n, est.lower_bound
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
