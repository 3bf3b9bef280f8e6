//! Second-order coherence of continuous-wave pumped parametric
//! down-conversion, in the Heisenberg picture.
//!
//! The crate samples the Bogoliubov solution for the signal and idler
//! beams on a detuning grid ([`spdc`]), passes the photons through
//! dispersive media or phase modulators ([`elements`]), evaluates the
//! four second-order correlation observables ([`correlators`]) and
//! extracts widths, signal-to-background and cancelation verdicts
//! ([`analysis`]).

// `!(x > 0.0)` style guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bessel;
pub mod correlators;
pub mod elements;
pub mod error;
pub mod grid;
pub mod spdc;

pub use analysis::{
    broadening_fit, cauchy_schwarz_ratio, comb_leakage, rms_width, signal_to_background,
    BroadeningFit, CancelationVerdict, WidthReport,
};
pub use bessel::{bessel_j, bessel_j_sequence};
pub use correlators::{
    baseline, g2_freq_exact, g2_inter_freq_narrowband, g2_inter_time, g2_intra_freq_narrowband,
    g2_intra_time, Baseline, BeamConfig, Configuration, Correlation1D, JointComb, JointGrid,
    JointLine, RidgeAxis,
};
pub use elements::{build_comb, dispersive_transfer, CombLine, DispersiveElement, ModulatorComb};
pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use num_complex::Complex64;
pub use spdc::{
    evaluate_analytic, evaluate_uv, gamma_of, EnvelopeShape, PhaseMismatch, SourceFields,
    SourceSpec,
};
