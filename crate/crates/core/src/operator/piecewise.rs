use serde::Serialize;

use crate::error::{Error, Result};

/// A continuous piecewise-linear function on `[0, 1]`.
///
/// Breakpoints are stored by their gap `u = 1 - t` to the right endpoint so
/// that nodes `1 - q^k` stay distinct long after `1 - q^k` rounds to `1.0`.
/// Linear interpolation in `u` is linear interpolation in `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearFn {
    /// Strictly increasing, `gaps[0] = 0` (t = 1), last entry `1` (t = 0).
    gaps: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinearFn {
    /// Build from `(t, value)` pairs sorted by `t`, which must start at `t = 0`
    /// and end at `t = 1`. Exact duplicates with equal values are merged.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidFunction(
                "need at least the points t = 0 and t = 1".into(),
            ));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::InvalidFunction(
                "breakpoints must include t = 0 and t = 1".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::InvalidFunction(format!(
                    "breakpoints not sorted at t = {}",
                    w[1].0
                )));
            }
        }
        let gap_points: Vec<(f64, f64)> = points.iter().rev().map(|&(t, v)| (1.0 - t, v)).collect();
        Self::from_gap_points(gap_points)
    }

    /// Build from `(gap, value)` pairs sorted by increasing gap, starting at
    /// gap 0 and ending at gap 1.
    pub fn from_gap_points(points: Vec<(f64, f64)>) -> Result<Self> {
        let mut gaps = Vec::with_capacity(points.len());
        let mut values = Vec::with_capacity(points.len());
        for (u, v) in points {
            if !u.is_finite() || !v.is_finite() || !(0.0..=1.0).contains(&u) {
                return Err(Error::InvalidFunction(format!(
                    "invalid breakpoint ({u}, {v})"
                )));
            }
            match gaps.last() {
                Some(&prev) if u < prev => {
                    return Err(Error::InvalidFunction(format!(
                        "breakpoints not sorted at gap {u}"
                    )));
                }
                Some(&prev) if u == prev => {
                    let last = *values.last().expect("values track gaps");
                    if last != v {
                        return Err(Error::NodeCollision {
                            gap_a: prev,
                            gap_b: u,
                            value_a: last,
                            value_b: v,
                        });
                    }
                }
                _ => {
                    gaps.push(u);
                    values.push(v);
                }
            }
        }
        if gaps.first() != Some(&0.0) || gaps.last() != Some(&1.0) {
            return Err(Error::InvalidFunction(
                "breakpoints must include t = 0 and t = 1".into(),
            ));
        }
        Ok(Self { gaps, values })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            gaps: vec![0.0, 1.0],
            values: vec![value, value],
        }
    }

    /// `f(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_gap(1.0 - t)
    }

    /// `f(1 - gap)`.
    pub fn eval_gap(&self, gap: f64) -> f64 {
        let u = gap.clamp(0.0, 1.0);
        let i = self.gaps.partition_point(|&g| g <= u);
        if i == 0 {
            return self.values[0];
        }
        if i == self.gaps.len() {
            return self.values[self.values.len() - 1];
        }
        let (u0, u1) = (self.gaps[i - 1], self.gaps[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * ((u - u0) / (u1 - u0))
    }

    /// `max |f|`, attained at a breakpoint.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Breakpoints as `(gap, value)`, ordered from `t = 1` towards `t = 0`.
    pub fn gap_points(&self) -> impl DoubleEndedIterator<Item = (f64, f64)> + '_ {
        self.gaps.iter().copied().zip(self.values.iter().copied())
    }

    /// Breakpoints as `(t, value)` sorted by `t`. Nodes within an ulp of 1
    /// collapse in this view.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.gap_points().rev().map(|(u, v)| (1.0 - u, v)).collect()
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// On gaps `[0, gaps[1]]` the function is `f(1) + slope * gap`.
    pub(crate) fn affine_tail(&self) -> (f64, f64, f64) {
        let slope = (self.values[1] - self.values[0]) / self.gaps[1];
        (self.gaps[1], self.values[0], slope)
    }
}

/// Parse the plain-text format: one `t,y` pair per line, sorted by `t`,
/// including `t = 0` and `t = 1`. Blank lines and `#` comments are ignored.
pub fn parse_points(text: &str) -> Result<PiecewiseLinearFn> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::InvalidFunction(format!("record {}: {e}", line + 1)))?;
        if record.len() != 2 {
            return Err(Error::InvalidFunction(format!(
                "record {}: expected `t,y`",
                line + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::InvalidFunction(format!("record {}: {e}", line + 1)))
        };
        points.push((parse(&record[0])?, parse(&record[1])?));
    }
    PiecewiseLinearFn::from_points(&points)
}
