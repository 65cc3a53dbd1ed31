use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial has no coefficients")]
    NonPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("root {root} is not simple: |p'| = {derivative:e}")]
    MultipleRoot { root: f64, derivative: f64 },
    #[error("derivative vanishes at pole {root}")]
    DegenerateRoot { root: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("t = {t} and tau = {tau} lie in different strips")]
    CrossesCharacteristic { t: f64, tau: f64 },
    #[error("t = {t} lies on the characteristic line of a root of p")]
    OnCharacteristic { t: f64 },
    #[error("t = {t} is outside strip {strip}")]
    OutsideStrip { t: f64, strip: usize },
    #[error("strip {strip} is not a separatrix")]
    NotSeparatrix { strip: usize },
    #[error("characteristic through ({t}, {x}) does not meet the transversal")]
    CrossingNotFound { t: f64, x: f64 },
    #[error("tolerance not met: achieved {achieved:e}, target {target:e}")]
    ToleranceNotMet { achieved: f64, target: f64 },
    #[error("declared envelope violated: {0}")]
    EnvelopeViolation(String),
    #[error("derivative not available: {0}")]
    NonEvaluable(String),
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("samples leak through the window edge (edge/max = {ratio:e})")]
    WindowLeak { ratio: f64 },
    #[error("symbol validation failed: {0}")]
    Symbol(String),
    #[error("no contraction after {iterations} iterations (last ratio {last_ratio})")]
    NoContraction {
        iterations: usize,
        last_ratio: f64,
        ratios: Vec<f64>,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by the input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonPolynomial
                | Error::DivisionByZero
                | Error::MultipleRoot { .. }
                | Error::DegenerateRoot { .. }
                | Error::Hypothesis(_)
                | Error::CrossesCharacteristic { .. }
                | Error::OnCharacteristic { .. }
                | Error::OutsideStrip { .. }
                | Error::NotSeparatrix { .. }
                | Error::EnvelopeViolation(_)
                | Error::NonEvaluable(_)
                | Error::WindowLeak { .. }
                | Error::Symbol(_)
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
