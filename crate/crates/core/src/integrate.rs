//! Globally adaptive Gauss-Kronrod (7/15) integration on finite intervals.
//!
//! Integrands in this crate are only piecewise smooth (the Peano kernel has a
//! discontinuous second derivative at every sub-panel joint), so callers pass
//! the joints as break points and the integrator never straddles one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_segments: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];

    for i in 0..7 {
        let dx = half * XGK[i];
        let lo = f(centre - dx);
        let hi = f(centre + dx);
        f1[i] = lo;
        f2[i] = hi;
        kronrod += WGK[i] * (lo + hi);
        abs_sum += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        asc += WGK[i] * ((f1[i] - mean).abs() + (f2[i] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment { a, b, value, error }
}

impl Integrator {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrate over `[breaks[0], breaks[last]]`, never crossing an interior
    /// break point. `breaks` must be sorted; repeated points are skipped.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        breaks: &[f64],
    ) -> Result<Integral> {
        if breaks.len() < 2 {
            return Ok(Integral {
                value: 0.0,
                error_estimate: 0.0,
            });
        }

        let mut heap = BinaryHeap::new();
        let mut settled = Vec::new();
        let mut running_error = 0.0;
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                let s = kronrod15(&f, w[0], w[1]);
                running_error += s.error;
                heap.push(s);
            }
        }

        loop {
            let mut error = running_error;
            if error <= self.abs_tol {
                // Re-add exactly; the running total drifts.
                error = heap
                    .iter()
                    .chain(settled.iter())
                    .map(|s: &Segment| s.error)
                    .sum();
                if error <= self.abs_tol {
                    let value = compensated_sum(heap.iter().chain(settled.iter()).map(|s| s.value));
                    return Ok(Integral {
                        value,
                        error_estimate: error,
                    });
                }
                running_error = error;
            }
            if heap.len() >= self.max_segments {
                return Err(Error::NoConvergence {
                    a: breaks[0],
                    b: breaks[breaks.len() - 1],
                    estimate: error,
                    tolerance: self.abs_tol,
                });
            }

            let Some(worst) = heap.pop() else {
                return Err(Error::NoConvergence {
                    a: breaks[0],
                    b: breaks[breaks.len() - 1],
                    estimate: error,
                    tolerance: self.abs_tol,
                });
            };
            let mid = 0.5 * (worst.a + worst.b);
            // Cannot bisect further in double precision.
            if mid <= worst.a
                || mid >= worst.b
                || (worst.b - worst.a) < 8.0 * f64::EPSILON * mid.abs()
            {
                settled.push(worst);
                continue;
            }
            let left = kronrod15(&f, worst.a, mid);
            let right = kronrod15(&f, mid, worst.b);
            running_error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
    }
}
