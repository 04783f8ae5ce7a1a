//! Compensated summation and log-domain helpers.

use std::ops::{Add, AddAssign};

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl From<f64> for NeumaierSum {
    fn from(value: f64) -> Self {
        Self {
            sum: value,
            compensation: 0.0,
        }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
    let s = big + small;
    (s, (big - s) + small)
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        let (s, c) = two_sum(self.sum, rhs);
        self.sum = s;
        self.compensation += c;
    }
}

impl AddAssign for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self += rhs.sum;
        self.compensation += rhs.compensation;
    }
}

impl Add for NeumaierSum {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl std::iter::Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// `ln(sum_i exp(x_i))` with a max shift. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let acc: NeumaierSum = xs.iter().map(|&x| (x - max).exp()).sum();
    max + acc.value().ln()
}

/// `ln(2 cosh x)` without overflow.
#[inline]
pub fn ln_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}
