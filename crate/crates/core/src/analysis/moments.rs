use serde::{Deserialize, Serialize};

use super::fit::weighted_line;
use crate::error::{invalid, Result};
use crate::summation::NeumaierSum;

/// Deepest level accepted by [`farey_moments`].
pub const MAX_MOMENT_LEVEL: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub level: usize,
    pub order: u32,
    pub sum: f64,
}

/// Error-free product `a * b = hi + lo`.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `x^{-m}` as an unevaluated sum `hi + lo`, accurate to about `2^-100`.
fn inverse_power(x: f64, m: u32) -> (f64, f64) {
    let q = 1.0 / x;
    let r = (-q).mul_add(x, 1.0) / x;
    let (mut hi, mut lo) = (1.0, 0.0);
    for _ in 0..m {
        let (p, e) = two_prod(hi, q);
        let e = e + hi * r + lo * q;
        hi = p + e;
        lo = e - (hi - p);
    }
    (hi, lo)
}

/// Sum of `(r_{k+1} - r_k)^m` over adjacent fractions of level `level`.
///
/// Neighbours are unimodular, so each gap is exactly `1 / (d_k d_{k+1})`;
/// only denominators are tracked, by in-order recursion over pairs.
pub fn farey_moments(level: usize, order: u32) -> Result<MomentResult> {
    if order == 0 {
        return Err(invalid("moment order must be >= 1"));
    }
    if level > MAX_MOMENT_LEVEL {
        return Err(invalid(format!("level {level} exceeds {MAX_MOMENT_LEVEL}")));
    }
    let mut acc = NeumaierSum::new();
    walk(1, 1, level, order, &mut acc);
    Ok(MomentResult {
        level,
        order,
        sum: acc.value(),
    })
}

fn walk(d_left: u64, d_right: u64, depth: usize, order: u32, acc: &mut NeumaierSum) {
    if depth == 0 {
        // d <= F_{26} at level 24, so the product is exact in f64
        let (hi, lo) = inverse_power((d_left * d_right) as f64, order);
        *acc += hi;
        *acc += lo;
        return;
    }
    let mid = d_left + d_right;
    walk(d_left, mid, depth - 1, order, acc);
    walk(mid, d_right, depth - 1, order, acc);
}

/// Power-law fits of the moment sums against three abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentScalingRow {
    pub order: u32,
    /// Slope of `ln sum` vs `ln(2^N + 1)`.
    pub power_vs_fraction_count: f64,
    pub residual_vs_fraction_count: f64,
    /// Slope of `ln(sum / ln(2^N + 1))` vs `ln(2^N + 1)`.
    pub power_vs_fraction_count_log_corrected: f64,
    pub residual_log_corrected: f64,
    /// Slope of `ln sum` vs `ln N`.
    pub power_vs_level: f64,
    pub residual_vs_level: f64,
    pub levels: Vec<usize>,
    pub sums: Vec<f64>,
}

/// Diagnostic scaling table for orders in `2..=6` over levels `1..=n_max`;
/// fits use the upper half of the levels.
pub fn moment_scaling_report(n_max: usize, orders: &[u32]) -> Result<Vec<MomentScalingRow>> {
    if !(4..=MAX_MOMENT_LEVEL).contains(&n_max) {
        return Err(invalid(format!("n_max must be in 4..={MAX_MOMENT_LEVEL}")));
    }
    if let Some(bad) = orders.iter().find(|m| !(2..=6).contains(*m)) {
        return Err(invalid(format!("moment order {bad} outside 2..=6")));
    }
    let levels: Vec<usize> = (1..=n_max).collect();
    let first_fit = n_max / 2;
    orders
        .iter()
        .map(|&order| {
            let sums = levels
                .iter()
                .map(|&l| farey_moments(l, order).map(|r| r.sum))
                .collect::<Result<Vec<_>>>()?;
            let fit_levels = &levels[first_fit - 1..];
            let fit_sums = &sums[first_fit - 1..];
            let count: Vec<f64> = fit_levels.iter().map(|&l| ((1u64 << l) as f64 + 1.0).ln()).collect();
            let by_level: Vec<f64> = fit_levels.iter().map(|&l| (l as f64).ln()).collect();
            let ln_sum: Vec<f64> = fit_sums.iter().map(|s| s.ln()).collect();
            let corrected: Vec<f64> = ln_sum.iter().zip(&count).map(|(s, c)| s - c.ln()).collect();
            let ones = vec![1.0; count.len()];
            let (_, p_count, r_count) = weighted_line(&count, &ln_sum, &ones)?;
            let (_, p_log, r_log) = weighted_line(&count, &corrected, &ones)?;
            let (_, p_level, r_level) = weighted_line(&by_level, &ln_sum, &ones)?;
            Ok(MomentScalingRow {
                order,
                power_vs_fraction_count: p_count,
                residual_vs_fraction_count: r_count,
                power_vs_fraction_count_log_corrected: p_log,
                residual_log_corrected: r_log,
                power_vs_level: p_level,
                residual_vs_level: r_level,
                levels: levels.clone(),
                sums,
            })
        })
        .collect()
}
