// The open rule Q_m, its Peano kernel, and composite errors computed both
// directly and through the kernel.

use qbernstein::quadrature::{
    composite_error, quad_rule, ErrorMethod, FnIntegrand, KernelSpec, NegLogOneMinusExp, Span,
};
use qbernstein::TruncationPolicy;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();

    println!(
        "Q_3(e^t; 0, 1) = {:.15}, exact {:.15}",
        quad_rule(f64::exp, 0.0, 1.0, 3),
        1f64.exp() - 1.0
    );

    let kernel = KernelSpec::local(0.0, 1.0, 4)?;
    println!("K_(0,1) for m = 4:");
    for i in 0..=8 {
        let t = i as f64 / 8.0;
        println!("  t = {t:.3}  K = {:.6}", kernel.eval(t)?);
    }

    let cube =
        FnIntegrand::new(|t| t * t * t, |t| 6.0 * t).with_antiderivative(|t| t.powi(4) / 4.0);
    let span = Span::Finite {
        a: 0.0,
        b: 1.0,
        panels: 4,
    };
    for m in [2, 3, 5] {
        let d = composite_error(&cube, span, m, ErrorMethod::Direct, &policy)?;
        let p = composite_error(&cube, span, m, ErrorMethod::Peano, &policy)?;
        println!(
            "t^3 on 4 panels, m = {m}: direct {:+.15e}  peano {:+.15e}",
            d.error, p.error
        );
    }

    let span = Span::SemiInfinite { a: 0.1, h: 0.5 };
    for m in [2, 3, 5] {
        let d = composite_error(&NegLogOneMinusExp, span, m, ErrorMethod::Direct, &policy)?;
        let p = composite_error(&NegLogOneMinusExp, span, m, ErrorMethod::Peano, &policy)?;
        println!(
            "-ln(1-e^-t) on [0.1, inf), m = {m}: direct {:+.15e}  peano {:+.15e}",
            d.error, p.error
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
