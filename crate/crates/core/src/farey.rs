//! Exact integer machinery: Farey levels, 2x2 matrix words, traces and the
//! tilde involution that exchanges the two generators.
//!
//! Bit convention used throughout the crate: bit `i = 0` selects `A`,
//! `1` selects `B`, and the leftmost bit is the first factor of the product.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

fn checked_add(a: u128, b: u128, context: &'static str) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow { context })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A reduced rational in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    /// Builds `num/den`, rejecting non-reduced or out-of-range input.
    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(invalid("fraction denominator must be positive"));
        }
        if num > den {
            return Err(invalid(format!("{num}/{den} is not in [0, 1]")));
        }
        if gcd(num, den) != 1 {
            return Err(invalid(format!("{num}/{den} is not reduced")));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }

    /// `(n1 + n2) / (d1 + d2)`.
    pub fn mediant(&self, other: &Fraction) -> Result<Fraction> {
        Ok(Fraction {
            num: checked_add(self.num, other.num, "mediant numerator")?,
            den: checked_add(self.den, other.den, "mediant denominator")?,
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Level `N` of the mediant construction: `2^N + 1` fractions from `0/1`
/// to `1/1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FareyLevel {
    index: usize,
    entries: Vec<Fraction>,
}

impl FareyLevel {
    /// Level 0: `{0/1, 1/1}`.
    pub fn root() -> Self {
        Self {
            index: 0,
            entries: vec![Fraction::ZERO, Fraction::ONE],
        }
    }

    /// Materializes level `index` by repeated mediant insertion.
    pub fn at(index: usize) -> Result<Self> {
        let mut level = Self::root();
        for _ in 0..index {
            level = next_level(&level)?;
        }
        Ok(level)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn entries(&self) -> &[Fraction] {
        &self.entries
    }

    /// Checks length, ordering, endpoints, coprimality and unimodularity of
    /// neighbours.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let expected = (1usize << self.index) + 1;
        if self.entries.len() != expected {
            return Err(format!(
                "level {} has {} entries, expected {expected}",
                self.index,
                self.entries.len()
            ));
        }
        if self.entries.first() != Some(&Fraction::ZERO)
            || self.entries.last() != Some(&Fraction::ONE)
        {
            return Err("endpoints must be 0/1 and 1/1".into());
        }
        for f in &self.entries {
            if gcd(f.num, f.den) != 1 {
                return Err(format!("{f} is not reduced"));
            }
        }
        for pair in self.entries.windows(2) {
            let (l, r) = (pair[0], pair[1]);
            // n_r d_l - n_l d_r = 1 also implies l < r.
            let lhs = r.num.checked_mul(l.den);
            let rhs = l.num.checked_mul(r.den);
            match (lhs, rhs) {
                (Some(a), Some(b)) if a == b + 1 => {}
                _ => return Err(format!("{l}, {r} are not unimodular neighbours")),
            }
        }
        Ok(())
    }
}

/// Inserts the mediant between every adjacent pair of `level`.
pub fn next_level(level: &FareyLevel) -> Result<FareyLevel> {
    let entries = level.entries();
    let mut out = Vec::with_capacity(2 * entries.len() - 1);
    for pair in entries.windows(2) {
        out.push(pair[0]);
        out.push(pair[0].mediant(&pair[1])?);
    }
    out.extend(entries.last().copied());
    Ok(FareyLevel {
        index: level.index + 1,
        entries: out,
    })
}

/// A 2x2 nonnegative integer matrix `((m1, m2), (m3, m4))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix2 {
    pub m1: u128,
    pub m2: u128,
    pub m3: u128,
    pub m4: u128,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1, 0, 0, 1);
    /// `A = ((1, 0), (1, 1))`.
    pub const A: Matrix2 = Matrix2::new(1, 0, 1, 1);
    /// `B = ((1, 1), (0, 1))`.
    pub const B: Matrix2 = Matrix2::new(1, 1, 0, 1);

    pub const fn new(m1: u128, m2: u128, m3: u128, m4: u128) -> Self {
        Self { m1, m2, m3, m4 }
    }

    pub fn checked_mul(&self, rhs: &Matrix2) -> Result<Matrix2> {
        let dot = |a: u128, b: u128, c: u128, d: u128| -> Result<u128> {
            let x = a.checked_mul(b);
            let y = c.checked_mul(d);
            match (x, y) {
                (Some(x), Some(y)) => checked_add(x, y, "matrix product"),
                _ => Err(Error::Overflow {
                    context: "matrix product",
                }),
            }
        };
        Ok(Matrix2 {
            m1: dot(self.m1, rhs.m1, self.m2, rhs.m3)?,
            m2: dot(self.m1, rhs.m2, self.m2, rhs.m4)?,
            m3: dot(self.m3, rhs.m1, self.m4, rhs.m3)?,
            m4: dot(self.m3, rhs.m2, self.m4, rhs.m4)?,
        })
    }

    pub fn trace(&self) -> Result<u128> {
        checked_add(self.m1, self.m4, "trace")
    }

    /// `m1 m4 - m2 m3` as a signed value, or `None` on overflow.
    pub fn determinant(&self) -> Option<i128> {
        let p = i128::try_from(self.m1.checked_mul(self.m4)?).ok()?;
        let q = i128::try_from(self.m2.checked_mul(self.m3)?).ok()?;
        Some(p - q)
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}, {}), ({}, {}))", self.m1, self.m2, self.m3, self.m4)
    }
}

/// `((m1, m2), (m3, m4)) -> ((m4, m3), (m2, m1))`. Conjugation by the swap
/// matrix, so it maps `A <-> B` and commutes with products.
pub fn tilde(m: &Matrix2) -> Matrix2 {
    Matrix2::new(m.m4, m.m3, m.m2, m.m1)
}

/// A binary word of length `N >= 1`; `true` means `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfiguration {
    bits: Vec<bool>,
}

impl SpinConfiguration {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("spin configuration must have length >= 1"));
        }
        Ok(Self { bits })
    }

    /// Reads the low `n` bits of `word`, most significant first, so that
    /// bit `n - 1` of `word` is `sigma_1`.
    pub fn from_word(word: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(invalid(format!("word length {n} outside 1..=64")));
        }
        Self::new((0..n).rev().map(|i| (word >> i) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of `B` letters, `sum_i sigma_i`.
    pub fn b_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bitwise complement (`A <-> B`).
    pub fn flipped(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl FromStr for SpinConfiguration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' | 'A' | 'a' => Ok(false),
                '1' | 'B' | 'b' => Ok(true),
                other => Err(invalid(format!("invalid spin symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Left-to-right product of `A` (bit 0) and `B` (bit 1).
pub fn word_matrix(config: &SpinConfiguration) -> Result<Matrix2> {
    config.bits().iter().try_fold(Matrix2::IDENTITY, |acc, &b| {
        acc.checked_mul(if b { &Matrix2::B } else { &Matrix2::A })
    })
}

/// Trace of an `A`-initial chain together with its number of `B` letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChainTrace {
    pub trace: u128,
    pub b_count: u32,
}

/// Streams `(trace, b_count)` for every chain of length `n` that begins with
/// `A`, by depth-first recursion over adjacent Farey pairs of level `n - 1`.
///
/// A pair `(n_l/d_l, n_r/d_r)` carries trace `d_l + n_r`. Its left child
/// `(l, mediant)` has trace `d_l + n_l + n_r` and the same `b_count`; its
/// right child `(mediant, r)` has trace `d_l + d_r + n_r` and one more `B`.
/// Memory use is `O(n)`. `visit` is called from the current thread only.
pub fn for_each_chain_trace<F>(n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(ChainTrace),
{
    if n == 0 {
        return Err(invalid("chain length must be >= 1"));
    }
    walk_pairs(Fraction::ZERO, Fraction::ONE, n - 1, 0, &mut visit)
}

fn walk_pairs<F>(left: Fraction, right: Fraction, depth: usize, b_count: u32, visit: &mut F) -> Result<()>
where
    F: FnMut(ChainTrace),
{
    if depth == 0 {
        visit(ChainTrace {
            trace: checked_add(left.den, right.num, "chain trace")?,
            b_count,
        });
        return Ok(());
    }
    let mid = left.mediant(&right)?;
    walk_pairs(left, mid, depth - 1, b_count, visit)?;
    walk_pairs(mid, right, depth - 1, b_count + 1, visit)
}

/// Collects [`for_each_chain_trace`] into a vector of `2^(n-1)` entries.
pub fn chain_traces_via_farey(n: usize) -> Result<Vec<ChainTrace>> {
    if n == 0 || n > 40 {
        return Err(invalid(format!("chain length {n} outside 1..=40 for materialized output")));
    }
    let mut out = Vec::with_capacity(1usize << (n - 1));
    for_each_chain_trace(n, |c| out.push(c))?;
    Ok(out)
}
