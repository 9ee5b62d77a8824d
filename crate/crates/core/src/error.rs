use thiserror::Error;

/// Errors raised by the model functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter is negative, zero where it must be positive, or not finite.
    #[error("invalid value for `{param}`: {value} ({reason})")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The base station does not fit on the platform.
    #[error("infeasible payload: {bs_mass} kg base station exceeds the {max_payload} kg {budget}")]
    Infeasible {
        bs_mass: f64,
        max_payload: f64,
        budget: &'static str,
    },
    /// A coverage computation was requested for a profile without radio parameters.
    #[error("base station profile has no {0}; it cannot take part in coverage analysis")]
    MissingRadio(&'static str),
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn finite(param: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            param,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn non_negative(param: &'static str, value: f64) -> Result<f64> {
    finite(param, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            param,
            value,
            reason: "must be non-negative",
        })
    }
}

pub(crate) fn positive(param: &'static str, value: f64) -> Result<f64> {
    finite(param, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            param,
            value,
            reason: "must be strictly positive",
        })
    }
}

pub(crate) fn fraction(param: &'static str, value: f64) -> Result<f64> {
    non_negative(param, value)?;
    if value <= 1.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            param,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
