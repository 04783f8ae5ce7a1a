use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Weighted least-squares line `y = intercept + slope x`; returns
/// `(intercept, slope, weighted rms residual)`.
pub(crate) fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<(f64, f64, f64)> {
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| w * x).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| w * y).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        sxx += w * (x - mx) * (x - mx);
        sxy += w * (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae have zero spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .map(|((x, y), w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    Ok((intercept, slope, (ss / sw).sqrt()))
}

/// Least-squares fit of `f_N = f_inf + c1 / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub f_infinity: f64,
    pub c1: f64,
    pub residual: f64,
    pub n_points: usize,
}

pub fn extrapolate_f(sequence: &[(usize, f64)]) -> Result<Extrapolation> {
    if sequence.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: sequence.len(),
        });
    }
    if sequence.iter().any(|&(n, f)| n == 0 || !f.is_finite()) {
        return Err(invalid("sequence needs N >= 1 and finite f_N"));
    }
    if sequence.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(invalid("sequence must be ordered by increasing N"));
    }
    let xs: Vec<f64> = sequence.iter().map(|&(n, _)| 1.0 / n as f64).collect();
    let ys: Vec<f64> = sequence.iter().map(|&(_, f)| f).collect();
    let ws = vec![1.0; xs.len()];
    let (f_infinity, c1, residual) = weighted_line(&xs, &ys, &ws)?;
    Ok(Extrapolation {
        f_infinity,
        c1,
        residual,
        n_points: sequence.len(),
    })
}

/// Fit of `ln Z_N ~ amplitude (ln N)^{-p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent_p: f64,
    pub amplitude: f64,
    /// Weighted RMS residual of `ln |ln Z_N|`.
    pub residual: f64,
    pub n_points: usize,
    pub warnings: Vec<String>,
}

/// Largest chain length below which [`fss_fit`] warns about range.
pub const FSS_MIN_RANGE: usize = 24;

/// Weighted (weight `N`) fit of `ln |ln Z_N| = ln amplitude - p ln ln N`.
pub fn fss_fit(sequence: &[(usize, f64)]) -> Result<FitResult> {
    if sequence.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: sequence.len(),
        });
    }
    let mut warnings = Vec::new();
    if sequence.iter().any(|&(n, _)| n < 3) {
        return Err(invalid("finite-size fit needs N >= 3 so that ln ln N > 0"));
    }
    if sequence.iter().any(|&(_, lz)| lz == 0.0 || !lz.is_finite()) {
        return Err(invalid("ln Z_N must be finite and nonzero"));
    }
    let positive = sequence.iter().filter(|x| x.1 > 0.0).count();
    let sign = if positive == sequence.len() {
        1.0
    } else {
        if positive != 0 {
            warnings.push("ln Z_N changes sign over the range; fitting |ln Z_N|".to_string());
        }
        -1.0
    };
    if sequence.iter().any(|&(n, _)| n < 8) {
        warnings.push("points with N < 8 included".to_string());
    }
    let n_max = sequence.iter().map(|x| x.0).max().unwrap_or(0);
    if n_max < FSS_MIN_RANGE {
        warnings.push(format!("insufficient range: max N = {n_max} < {FSS_MIN_RANGE}"));
    }
    let xs: Vec<f64> = sequence.iter().map(|&(n, _)| (n as f64).ln().ln()).collect();
    let ys: Vec<f64> = sequence.iter().map(|&(_, lz)| lz.abs().ln()).collect();
    let ws: Vec<f64> = sequence.iter().map(|&(n, _)| n as f64).collect();
    let (intercept, slope, residual) = weighted_line(&xs, &ys, &ws)?;
    Ok(FitResult {
        exponent_p: -slope,
        amplitude: sign * intercept.exp(),
        residual,
        n_points: sequence.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_recovers_planted_line() {
        let seq: Vec<_> = (4..20).map(|n| (n, 0.7 + 2.0 / n as f64)).collect();
        let e = extrapolate_f(&seq).unwrap();
        assert!((e.f_infinity - 0.7).abs() < 1e-12);
        assert!((e.c1 - 2.0).abs() < 1e-10);
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn extrapolation_errors() {
        assert!(matches!(
            extrapolate_f(&[(1, 0.0), (2, 0.0), (3, 0.0)]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            extrapolate_f(&[(5, 0.1), (5, 0.2), (5, 0.3), (5, 0.4)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(extrapolate_f(&[(5, 0.1), (4, 0.2), (6, 0.3), (7, 0.4)]).is_err());
    }

    #[test]
    fn fss_recovers_planted_exponent() {
        let seq: Vec<_> = (8..=40).map(|n| (n, 3.0 * (n as f64).ln().powf(-1.5))).collect();
        let fit = fss_fit(&seq).unwrap();
        assert!((fit.exponent_p - 1.5).abs() < 1e-6);
        assert!((fit.amplitude - 3.0).abs() < 1e-6);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn fss_warns_on_short_range() {
        let seq: Vec<_> = (8..=12).map(|n| (n, 3.0 * (n as f64).ln().powf(-1.5))).collect();
        let fit = fss_fit(&seq).unwrap();
        assert!(fit.warnings.iter().any(|w| w.contains("insufficient range")));
    }

    #[test]
    fn fits_are_bit_reproducible() {
        let seq: Vec<_> = (8..=30).map(|n| (n, 0.1 + (n as f64).sin().abs())).collect();
        assert_eq!(fss_fit(&seq).unwrap(), fss_fit(&seq).unwrap());
        assert_eq!(extrapolate_f(&seq).unwrap(), extrapolate_f(&seq).unwrap());
    }
}
