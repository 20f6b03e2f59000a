use core::fmt;

/// Errors shared across the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain(&'static str),
    /// An internal series or quadrature failed to meet its accuracy target.
    Accuracy(&'static str),
    /// Auto grid refinement exceeded the configured ceiling.
    NonConvergence { ceiling: usize, last_change: f64 },
    /// A finite window is too small for the requested operation.
    WindowTooSmall(&'static str),
    /// Adaptive time stepping drove the step size below representable size.
    StepUnderflow,
    /// Center of a field is flat or non-positive; FWHM undefined.
    FlatField,
    /// Histogram / field windows do not overlap.
    EmptyIntersection,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Accuracy(m) => write!(f, "accuracy error: {m}"),
            Error::NonConvergence { ceiling, last_change } => write!(
                f,
                "grid refinement exceeded ceiling {ceiling} (last sup-change {last_change:e})"
            ),
            Error::WindowTooSmall(m) => write!(f, "window too small: {m}"),
            Error::StepUnderflow => write!(f, "time step underflow"),
            Error::FlatField => write!(f, "flat field: center is not a strict maximum region"),
            Error::EmptyIntersection => write!(f, "windows do not overlap"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
