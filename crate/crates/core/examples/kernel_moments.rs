// Kernel moments I_j, the eightfold comparison, theta and the rho-weighted
// inequalities.

use qbernstein::quadrature::{
    kernel_moment, kernel_moment_numeric, rho_decay, tail_area_inequality, theta,
    weighted_kernel_inequality, KernelWeight,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>3} {:>3}  {:>20}  {:>20}",
        "m", "j", "closed form", "numeric"
    );
    for m in [2, 5, 16] {
        for j in 0..3 {
            println!(
                "{m:>3} {j:>3}  {:>20.15e}  {:>20.15e}",
                kernel_moment(m, 1.0, j)?,
                kernel_moment_numeric(m, 1.0, j)?
            );
        }
    }

    let worst = (2..=64)
        .map(|m| {
            weighted_kernel_inequality(m, 1.0, KernelWeight::InverseSquare).map(|c| (m, c.margin))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    println!(
        "I_0 - 8(I_1 + I_2) is smallest at m = {}: {:.6e}",
        worst.0, worst.1
    );

    println!(
        "theta(2) = {:.10}, theta(10) = {:.10}, theta(1000) = {:.10}",
        theta(2.0)?,
        theta(10.0)?,
        theta(1000.0)?
    );

    let h = 4f64.ln();
    for m in [2, 5, 10] {
        let c = weighted_kernel_inequality(m, h, KernelWeight::Rho)?;
        println!(
            "h = ln 4, m = {m}: int_0^h K rho = {:.6e} >= e^(3h/2) int_h^3h K rho = {:.6e}",
            c.lhs, c.rhs
        );
    }

    let c = rho_decay(1.0, 0.5)?;
    println!("rho(1.5) = {:.6e} <= e^-1 rho(0.5) = {:.6e}", c.lhs, c.rhs);
    let c = tail_area_inequality(1.0, 2.0)?;
    println!(
        "int_1^inf f = {:.6e} >= -2 + int_0^2 f = {:.6e}",
        c.lhs, c.rhs
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
