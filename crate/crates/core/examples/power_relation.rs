// Detecting r^j = q^m from continued-fraction convergents of ln r / ln q.

use qbernstein::operator::{detect_power_relation, distance_closed_form};
use qbernstein::QParam;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let base: f64 = 0.97;
    let pairs = [
        (0.5, 0.25),
        (0.64, 0.512),
        (0.7, 0.343),
        (0.5, 0.3),
        (0.501, 0.5),
        (base.powi(7), base.powi(40)),
    ];
    for (qv, rv) in pairs {
        let (q, r) = (QParam::new(qv)?, QParam::new(rv)?);
        match detect_power_relation(q, r, 64, 1e-9) {
            Some(rel) => println!(
                "q = {qv:.6}, r = {rv:.6}: r^{} = q^{} (residual {:.1e}), closed form {:?}",
                rel.j,
                rel.m,
                rel.residual,
                distance_closed_form(rel)
            ),
            None => println!("q = {qv:.6}, r = {rv:.6}: no relation with exponents <= 64"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
