//! Reference calculations for checking `spdc-g2`, plus the acceptance
//! criteria that the `selftest` command and the acceptance test target run.
//!
//! Nothing here reuses the production numerical kernels: integrals are
//! composite Simpson sums evaluated directly (no FFT), spectral phases are
//! re-derived from the element coefficients, and Bessel values come from
//! the integral representation.

pub mod acceptance;
pub mod oracle;
