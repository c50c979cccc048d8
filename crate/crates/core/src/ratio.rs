//! Exact rationals for distances and rates.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Exact non-negative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        Self {
            num: u64::try_from(num).expect("numerator fits u64"),
            den: u64::try_from(den).expect("denominator fits u64"),
        }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Cross-multiplied comparison.
    pub fn max(self, other: Ratio) -> Ratio {
        if (self.num as u128) * (other.den as u128) >= (other.num as u128) * (self.den as u128) {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
