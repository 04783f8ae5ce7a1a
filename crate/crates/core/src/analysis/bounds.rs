use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spin_chain::{EnsembleParams, Enumerator};

/// Absolute slack (in `ln Z`) granted to the non-strict inequalities.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `2^{-beta} e^{beta |h| N} < Z_N(beta, h)`; `2^{1-beta} <= Z_N` at `h = 0`.
    SandwichLower,
    /// `Z_N(beta, h) < Z_N(beta, 0) e^{beta |h| N}` for `h != 0`.
    SandwichUpper,
    /// `2^{-beta} e^{-beta |h|} <= Z_{N+1} / Z_N`.
    RatioLower,
    /// `Z_{N+1} / Z_N <= 2 e^{beta |h|}`.
    RatioUpper,
}

/// A failed inequality; `margin` is `ln(rhs) - ln(lhs)` style slack and is
/// negative (or zero for a strict bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub kind: BoundKind,
    pub n: usize,
    pub beta: f64,
    pub h: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub checks: usize,
    pub violations: Vec<BoundViolation>,
    /// Smallest margin seen for each kind, in [`BoundKind`] order.
    pub tightest: Vec<(BoundKind, f64)>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// [`verify_bounds_with`] using the default enumerator.
pub fn verify_bounds(n_max: usize, betas: &[f64], hs: &[f64]) -> Result<BoundsReport> {
    verify_bounds_with(&Enumerator::default(), n_max, betas, hs)
}

/// Checks the sandwich inequality for `N = 1..=n_max` and the ratio bounds
/// for `N = 1..n_max` at every grid point. Violations are collected, not
/// returned as errors.
pub fn verify_bounds_with(enumerator: &Enumerator, n_max: usize, betas: &[f64], hs: &[f64]) -> Result<BoundsReport> {
    if n_max == 0 {
        return Err(invalid("n_max must be >= 1"));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut checks = 0;
    let mut violations = Vec::new();
    let kinds = [
        BoundKind::SandwichLower,
        BoundKind::SandwichUpper,
        BoundKind::RatioLower,
        BoundKind::RatioUpper,
    ];
    let mut tightest = kinds.map(|k| (k, f64::INFINITY));

    let mut record = |kind: BoundKind, n: usize, beta: f64, h: f64, margin: f64, strict: bool| {
        checks += 1;
        let slot = &mut tightest[kinds.iter().position(|&k| k == kind).unwrap()].1;
        *slot = slot.min(margin);
        let failed = if strict { margin <= 0.0 } else { margin < -ROUNDING_SLACK };
        if failed {
            violations.push(BoundViolation {
                kind,
                n,
                beta,
                h,
                margin,
            });
        }
    };

    for &beta in betas {
        for &h in hs {
            let a = h.abs();
            let mut log_z = Vec::with_capacity(n_max);
            for n in 1..=n_max {
                let lz = enumerator.log_partition(&EnsembleParams::new(n, beta, h)?)?.log_z;
                let nf = n as f64;
                if h == 0.0 {
                    let lower = (1.0 - beta) * ln2;
                    record(BoundKind::SandwichLower, n, beta, h, lz - lower, n >= 2);
                } else {
                    let lz0 = enumerator.log_partition(&EnsembleParams::new(n, beta, 0.0)?)?.log_z;
                    record(BoundKind::SandwichLower, n, beta, h, lz - (beta * a * nf - beta * ln2), true);
                    record(BoundKind::SandwichUpper, n, beta, h, (lz0 + beta * a * nf) - lz, true);
                }
                log_z.push(lz);
            }
            for (i, pair) in log_z.windows(2).enumerate() {
                let log_ratio = pair[1] - pair[0];
                record(BoundKind::RatioLower, i + 1, beta, h, log_ratio - (-beta * ln2 - beta * a), false);
                record(BoundKind::RatioUpper, i + 1, beta, h, (ln2 + beta * a) - log_ratio, false);
            }
        }
    }
    Ok(BoundsReport {
        checks,
        violations,
        tightest: tightest.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_no_violations() {
        let report = verify_bounds(12, &[0.5, 2.0, 3.5], &[0.0, 0.5, -0.5, 1.5, -1.5]).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        // 3 betas x (1 zero-field x 12 + 4 fields x 24) sandwich, 15 x 11 x 2 ratio
        assert_eq!(report.checks, 3 * (12 + 4 * 24) + 15 * 11 * 2);
    }

    #[test]
    fn ratio_bounds_at_low_temperature() {
        let report = verify_bounds(10, &[3.0], &[0.0]).unwrap();
        assert!(report.passed());
        let e = Enumerator::default();
        for n in 1..10 {
            let z0 = e.log_partition(&EnsembleParams::new(n, 3.0, 0.0).unwrap()).unwrap().log_z;
            let z1 = e.log_partition(&EnsembleParams::new(n + 1, 3.0, 0.0).unwrap()).unwrap().log_z;
            let ratio = (z1 - z0).exp();
            assert!((0.125..=2.0).contains(&ratio));
        }
    }

    #[test]
    fn infinite_temperature_saturates_ratio_upper_bound() {
        // Z_N(0, h) = 2^N, so Z_{N+1}/Z_N = 2 exactly: allowed (non-strict)
        let report = verify_bounds(6, &[0.0], &[0.0]).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        let upper = report.tightest.iter().find(|k| k.0 == BoundKind::RatioUpper).unwrap();
        assert!(upper.1.abs() < 1e-12);
    }
}
