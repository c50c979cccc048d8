//! Public protocol parameters and their validation.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_prime, next_prime, Fp, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("need N > 4B, got N = {n}, B = {b}")]
    TooManyByzantine { n: usize, b: usize },
    #[error("B must be at least 1")]
    NoByzantineBound,
    #[error("K must be at least 1")]
    NoMessages,
    #[error("message length L = {l} but N - 4B = {expected}")]
    LengthMismatch { l: usize, expected: usize },
    #[error("field modulus {0} is not prime")]
    NotPrime(u64),
    #[error("field modulus {q} is smaller than N + L = {needed}")]
    FieldTooSmall { q: u64, needed: u64 },
    #[error("expected {expected} {what} evaluation points, got {got}")]
    PointCount { what: &'static str, expected: usize, got: usize },
    #[error("{what} evaluation point {value} is not below the modulus {q}")]
    PointOutOfRange { what: &'static str, value: u64, q: u64 },
    #[error("duplicate server evaluation point {0}")]
    DuplicateAlpha(u64),
    #[error("duplicate message evaluation point {0}")]
    DuplicateF(u64),
    #[error("evaluation point {0} is used both for a server and for a message symbol")]
    PointCollision(u64),
}

/// All public parameters of one retrieval.
///
/// Evaluation points are stored as integer representatives so the record
/// can be read from configuration before the field is known to be valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirParams {
    /// Number of servers.
    pub n: usize,
    /// Maximum number of Byzantine (and colluding) servers.
    pub b: usize,
    /// Number of messages.
    pub k: usize,
    /// Symbols retrieved per message, `N - 4B`.
    pub l: usize,
    /// Field modulus.
    pub q: u64,
    /// Server evaluation points, one per server.
    pub alphas: Vec<u64>,
    /// Message evaluation points, one per retrieved symbol.
    pub fs: Vec<u64>,
}

impl PirParams {
    /// Parameters with the default evaluation points `alpha_n = n` and
    /// `f_l = q - l`; `q` defaults to the smallest prime `>= N + L`.
    pub fn with_defaults(n: usize, b: usize, k: usize, q: Option<u64>) -> Result<Self, ParamsError> {
        if b == 0 {
            return Err(ParamsError::NoByzantineBound);
        }
        if n <= 4 * b {
            return Err(ParamsError::TooManyByzantine { n, b });
        }
        let l = n - 4 * b;
        let q = q.unwrap_or_else(|| next_prime((n + l) as u64));
        let params = Self {
            n,
            b,
            k,
            l,
            q,
            alphas: (1..=n as u64).collect(),
            fs: (1..=l as u64).map(|i| q.saturating_sub(i)).collect(),
        };
        params.validate()?;
        Ok(params)
    }

    /// The worked instance with nine servers, two of them Byzantine, over GF(11).
    pub fn nine_server_example() -> Self {
        Self::with_defaults(9, 2, 1, Some(11)).expect("valid example parameters")
    }

    /// Smallest instance the exhaustive verifier runs on: (N, B, K, L, q) = (5, 1, 2, 1, 7).
    pub fn tiny() -> Self {
        Self::with_defaults(5, 1, 2, Some(7)).expect("valid tiny parameters")
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.b == 0 {
            return Err(ParamsError::NoByzantineBound);
        }
        if self.n <= 4 * self.b {
            return Err(ParamsError::TooManyByzantine { n: self.n, b: self.b });
        }
        if self.k == 0 {
            return Err(ParamsError::NoMessages);
        }
        let expected = self.n - 4 * self.b;
        if self.l != expected {
            return Err(ParamsError::LengthMismatch { l: self.l, expected });
        }
        if !is_prime(self.q) {
            return Err(ParamsError::NotPrime(self.q));
        }
        let needed = (self.n + self.l) as u64;
        if self.q < needed {
            return Err(ParamsError::FieldTooSmall { q: self.q, needed });
        }
        self.check_points()
    }

    /// Point checks only; used for degenerate instances that skip the
    /// `L = N - 4B` relation.
    pub(crate) fn check_points(&self) -> Result<(), ParamsError> {
        for (what, points, expected) in [("server", &self.alphas, self.n), ("message", &self.fs, self.l)] {
            if points.len() != expected {
                return Err(ParamsError::PointCount {
                    what,
                    expected,
                    got: points.len(),
                });
            }
            if let Some(&value) = points.iter().find(|&&v| v >= self.q) {
                return Err(ParamsError::PointOutOfRange { what, value, q: self.q });
            }
        }
        let mut seen = HashSet::new();
        if let Some(&dup) = self.alphas.iter().find(|&&a| !seen.insert(a)) {
            return Err(ParamsError::DuplicateAlpha(dup));
        }
        let mut seen_f = HashSet::new();
        if let Some(&dup) = self.fs.iter().find(|&&f| !seen_f.insert(f)) {
            return Err(ParamsError::DuplicateF(dup));
        }
        if let Some(&clash) = self.fs.iter().find(|f| seen.contains(f)) {
            return Err(ParamsError::PointCollision(clash));
        }
        Ok(())
    }

    pub fn field(&self) -> Result<PrimeField, ParamsError> {
        PrimeField::new(self.q).map_err(|_| ParamsError::NotPrime(self.q))
    }

    /// Server evaluation points as field elements (0-based server index).
    pub fn alpha_points(&self) -> Result<Vec<Fp>, ParamsError> {
        let field = self.field()?;
        Ok(self.alphas.iter().map(|&a| field.elem(a)).collect())
    }

    pub fn f_points(&self) -> Result<Vec<Fp>, ParamsError> {
        let field = self.field()?;
        Ok(self.fs.iter().map(|&f| field.elem(f)).collect())
    }

    /// Number of answer symbols the user downloads per retrieval.
    pub fn download_symbols(&self) -> usize {
        self.n
    }
}

/// Returns the parameters unchanged iff every invariant holds.
pub fn validate_params(params: PirParams) -> Result<PirParams, ParamsError> {
    params.validate()?;
    Ok(params)
}
