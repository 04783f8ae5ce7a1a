//! Verification and asymptotics on top of the exact enumeration: rigorous
//! bound checks, thermodynamic-limit extrapolation, finite-size-scaling
//! fits and Farey-difference moments.

mod bounds;
mod fit;
mod moments;
pub mod suites;

pub use bounds::{verify_bounds, verify_bounds_with, BoundKind, BoundViolation, BoundsReport};
pub use fit::{extrapolate_f, fss_fit, Extrapolation, FitResult};
pub use moments::{farey_moments, moment_scaling_report, MomentResult, MomentScalingRow, MAX_MOMENT_LEVEL};
pub use suites::{run_suite, Check, Suite, SuiteReport};
