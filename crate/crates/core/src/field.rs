//! Prime-field arithmetic.
//!
//! Every symbol in the protocol lives in GF(q) for a prime `q < 2^64`.
//! Elements carry their modulus so that vectors and matrices can check
//! that they are never mixed across fields.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live in different fields (GF({0}) vs GF({1}))")]
    ModulusMismatch(u64, u64),
    #[error("matrix is singular")]
    Singular,
}

/// The field GF(q) for a prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// Canonical element for `value mod q`.
    pub fn elem(self, value: u64) -> Fp {
        Fp {
            value: value % self.modulus,
            modulus: self.modulus,
        }
    }

    /// Canonical element for a signed integer, e.g. `-1 -> q - 1`.
    pub fn elem_signed(self, value: i64) -> Fp {
        let m = self.modulus as i128;
        let v = (value as i128).rem_euclid(m);
        self.elem(v as u64)
    }

    pub fn zero(self) -> Fp {
        self.elem(0)
    }

    pub fn one(self) -> Fp {
        self.elem(1)
    }

    /// All `q` elements in increasing order of representative.
    pub fn elements(self) -> impl Iterator<Item = Fp> + Clone {
        (0..self.modulus).map(move |v| Fp {
            value: v,
            modulus: self.modulus,
        })
    }

    pub fn vector(self, values: &[u64]) -> crate::linalg::FVector {
        crate::linalg::FVector::new(self, values.iter().map(|&v| self.elem(v)).collect())
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = FieldError;

    fn try_from(q: u64) -> Result<Self, Self::Error> {
        Self::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.modulus
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

/// An element of GF(q), always held as its canonical representative in `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField {
            modulus: self.modulus,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Fp, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut old_r, mut r) = (self.value as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let quotient = old_r / r;
            (old_r, r) = (r, old_r - quotient * r);
            (old_s, s) = (s, old_s - quotient * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(Fp {
            value: old_s.rem_euclid(self.modulus as i128) as u64,
            modulus: self.modulus,
        })
    }

    pub fn pow(self, mut exp: u64) -> Fp {
        let mut base = self;
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    #[inline]
    fn check(self, other: Fp) {
        debug_assert_eq!(
            self.modulus, other.modulus,
            "mixed-field arithmetic: GF({}) vs GF({})",
            self.modulus, other.modulus
        );
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;

    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        // Both operands are < q < 2^64, so the sum fits in u128 but not always u64.
        let sum = self.value as u128 + rhs.value as u128;
        let m = self.modulus as u128;
        Fp {
            value: if sum >= m { (sum - m) as u64 } else { sum as u64 },
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;

    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        Fp {
            value,
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;

    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let value = if self.modulus <= u32::MAX as u64 {
            (self.value * rhs.value) % self.modulus
        } else {
            ((self.value as u128 * rhs.value as u128) % self.modulus as u128) as u64
        };
        Fp {
            value,
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;

    #[inline]
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut candidate = n.max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}
