use thiserror::Error;

/// Errors raised by source evaluation, correlators and analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("operation requires a physical (Bogoliubov) source")]
    RequiresPhysicalSource,

    #[error("invalid optical element: {0}")]
    InvalidElement(String),

    #[error("Bessel J_{n}({x}) outside the validated domain |n| <= 200, |x| <= 50")]
    BesselDomain { n: i64, x: f64 },

    #[error(
        "alias risk: predicted correlation width {predicted:.4} ps exceeds 40% of the \
         {window:.4} ps delay window; enlarge the grid"
    )]
    AliasRisk { predicted: f64, window: f64 },

    #[error("modulators driven at different frequencies ({0} vs {1} rad/ps)")]
    MismatchedDrive(f64, f64),

    #[error("narrowband approximation invalid: comb span / source bandwidth = {ratio:.4} >= 0.05")]
    NarrowbandInvalid { ratio: f64 },

    #[error("modulation frequency {mod_freq} rad/ps is not an integer multiple of the grid step {delta_omega} rad/ps")]
    GridIncommensurate { mod_freq: f64, delta_omega: f64 },

    #[error("degenerate trace: background-subtracted mass is negligible")]
    DegenerateTrace,

    #[error("zero background (source has no flux)")]
    ZeroBackground,

    #[error("broadening fit needs at least 5 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("broadening fit is poorly conditioned")]
    PoorConditioning,
}

impl Error {
    /// True for the grid/physics preconditions a caller can fix by choosing
    /// a different grid or modulator configuration.
    pub fn is_physics_precondition(&self) -> bool {
        matches!(
            self,
            Error::AliasRisk { .. }
                | Error::NarrowbandInvalid { .. }
                | Error::GridIncommensurate { .. }
                | Error::MismatchedDrive(..)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
