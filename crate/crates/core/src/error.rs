use thiserror::Error;

/// Errors raised anywhere in the root-construction pipeline.
///
/// Each variant maps to exactly one reporting category (see [`Error::category`]),
/// which is what the CLI emits in its structured error output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("rational function evaluated at its pole z = {pole}")]
    Pole { pole: f64 },

    #[error("quadrature did not converge: best estimate {estimate} with error {error_estimate}")]
    Accuracy { estimate: f64, error_estimate: f64 },

    #[error("quadrature failed at grid node {node}: best estimate {estimate} with error {error_estimate}")]
    NodeAccuracy {
        node: usize,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("Mellin transform is not a proper rational function: numerator degree {numerator} >= denominator degree {denominator}")]
    Properness { numerator: usize, denominator: usize },

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    #[error("parameter {name} = {value} is not positive (from root {root})")]
    Positivity {
        name: String,
        value: f64,
        root: f64,
    },

    #[error("Gamma pair ({num}, {den}) needs more than one shift to normalize")]
    UnsupportedConfiguration { num: f64, den: f64 },

    #[error("calibration factor vanishes or is not finite at zeta = {zeta}")]
    DegenerateCalibration { zeta: f64 },

    #[error("{0}")]
    Range(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Reporting category used by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Positivity { .. } => "positivity",
            Error::Properness { .. } => "properness",
            Error::UnsupportedSymbol(_) | Error::UnsupportedConfiguration { .. } => {
                "unsupported-symbol"
            }
            Error::Accuracy { .. }
            | Error::NodeAccuracy { .. }
            | Error::DegenerateCalibration { .. } => "accuracy",
            Error::Domain { .. } | Error::Pole { .. } | Error::Range(_) => "range",
            Error::Input(_) => "input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
