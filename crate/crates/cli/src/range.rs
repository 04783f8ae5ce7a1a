/// Inclusive scan grid parsed from `min:max:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// Parses `min:max:step` into the grid `min + i step <= max`.
///
/// The grid is built by multiplication, not accumulation, so every run
/// produces the same values.
pub fn parse_range(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected min:max:step, got '{s}'"));
    };
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    if !(step > 0.0) {
        return Err(format!("step must be > 0, got {step}"));
    }
    if lo > hi {
        return Err(format!("min {lo} exceeds max {hi}"));
    }
    let count = ((hi - lo) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range has {count} points"));
    }
    Ok(Grid((0..count).map(|i| lo + i as f64 * step).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_grid() {
        assert_eq!(parse_range("1:4:0.25").unwrap().0.len(), 13);
        assert_eq!(parse_range("0:1:0.1").unwrap().0.len(), 11);
        assert_eq!(parse_range("2:2:1").unwrap().0, vec![2.0]);
        assert_eq!(parse_range("-1:1:1").unwrap().0, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_ranges() {
        for bad in ["1:0:0.5", "0:1:0", "0:1:-1", "0:1", "a:b:c", "0:inf:1"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
