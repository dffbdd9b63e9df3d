use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must lie strictly inside (0, 1), got {0}")]
    InvalidQ(f64),

    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("term budget of {max_terms} exhausted while {context}")]
    CapHit {
        max_terms: usize,
        context: &'static str,
    },

    #[error("adaptive integration on [{a}, {b}] did not converge (error estimate {estimate:e}, tolerance {tolerance:e})")]
    NoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("lower bound {best} stayed below {target} up to N = {max_n}")]
    TargetNotReached {
        target: f64,
        best: f64,
        max_n: usize,
    },

    #[error(
        "nodes at gap {gap_a:e} and {gap_b:e} carry conflicting values {value_a} and {value_b}"
    )]
    NodeCollision {
        gap_a: f64,
        gap_b: f64,
        value_a: f64,
        value_b: f64,
    },

    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }

    /// True for errors caused by running out of a numerical budget rather
    /// than by bad input.
    pub fn is_budget_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::CapHit { .. } | Error::NoConvergence { .. } | Error::TargetNotReached { .. }
        )
    }
}
