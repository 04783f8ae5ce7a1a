//! Exact finite-size thermodynamics of the Farey fraction spin chain, the
//! one-dimensional KDP comparison models and renormalization-group
//! predictions for the chain's phase transition.

pub mod analysis;
pub mod error;
pub mod farey;
pub mod kdp;
pub mod rg;
pub mod roots;
pub mod spin_chain;
pub mod summation;

pub use error::{Error, Result};
pub use farey::{
    chain_traces_via_farey, for_each_chain_trace, next_level, tilde, word_matrix, ChainTrace, FareyLevel, Fraction,
    Matrix2, SpinConfiguration,
};
pub use kdp::{FieldVariant, KdpParams, KdpPhase, KdpThermo};
pub use rg::{FfscBoundary, FfscDiscontinuities, MeanFieldConstants, RgConstants, RgState};
pub use spin_chain::{
    EnsembleParams, Enumerator, PartitionResult, SpectrumSummary, ThermoPoint, BETA_C, DEFAULT_ENUMERATION_CAP,
    ENUMERATION_CAP_ENV, MAX_ENUMERATION_CAP,
};
