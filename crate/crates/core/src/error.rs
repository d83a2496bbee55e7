use thiserror::Error;

/// Errors raised by parameter validation and the Monte Carlo drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    /// Zero effective orientational diffusion for both molecules: the
    /// coordinate change behind the 5D region degenerates.
    #[error("singular geometry: D_A = D_B = 0, the 5D capacitance problem is undefined")]
    SingularGeometry,

    #[error("rate diverges: k/k_smol = {0} (perfectly absorbing limit)")]
    Divergence(f64),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A trial exceeded its iteration or step budget.
    #[error("trial {trial} exceeded the budget of {budget} {unit}")]
    BudgetExceeded {
        trial: u64,
        budget: u64,
        unit: &'static str,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for numerical diagnostics failures (budget exhaustion) as opposed
    /// to bad inputs.
    pub fn is_diagnostic(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
