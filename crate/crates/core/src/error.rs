use thiserror::Error;

use crate::generator::FamilyId;

pub type Result<T> = std::result::Result<T, CopulaError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    /// Dependence parameter outside the family's admissible set.
    #[error("{name} out of domain {domain} for family {family} (got {value})")]
    Parameter {
        family: FamilyId,
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Function argument outside the operation's domain.
    #[error("{name} = {value} out of domain {domain}")]
    Argument {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("bracket violation: target {target} not within [g(lo), g(hi)] = [{g_lo}, {g_hi}]")]
    Bracket { target: f64, g_lo: f64, g_hi: f64 },

    #[error("{what} did not converge: {detail}")]
    Convergence { what: &'static str, detail: String },

    #[error("sample size {n} invalid: {reason}")]
    SampleSize { n: usize, reason: String },

    #[error("{0}")]
    Unsupported(String),
}

impl CopulaError {
    pub(crate) fn argument(name: &'static str, value: f64, domain: &'static str) -> Self {
        CopulaError::Argument {
            name,
            value,
            domain,
        }
    }

    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_convergence(&self) -> bool {
        matches!(self, CopulaError::Convergence { .. })
    }
}
