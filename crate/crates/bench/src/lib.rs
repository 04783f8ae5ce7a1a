//! Fixtures shared by the benchmarks.

use ffsc_core::EnsembleParams;

/// Chain lengths timed by the enumeration benchmarks.
pub const LENGTHS: [usize; 3] = [14, 18, 22];

/// A point just below the critical temperature in a weak field.
pub fn near_critical(n: usize) -> EnsembleParams {
    EnsembleParams::new(n, 2.2, 0.01).expect("valid parameters")
}
