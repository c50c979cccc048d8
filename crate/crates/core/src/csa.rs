//! The Cauchy-Vandermonde answer matrix and its inverse.
//!
//! With all servers honest the stacked answers satisfy
//! `A = CSA * [W_theta; I + Z'; 0]`, where `CSA` has the Cauchy column
//! `1 / (f_l - alpha_n)` for each message symbol followed by the
//! Vandermonde columns `alpha_n^j`, `j = 0..N-L-1`. Applying `CSA^-1`
//! therefore separates three row blocks:
//!
//! | rows (0-based)      | content                         |
//! |---------------------|---------------------------------|
//! | `0..L`              | message symbols                 |
//! | `L..L+2B`           | masked interference             |
//! | `L+2B..N`           | syndrome, zero when all honest  |
//!
//! The decoder further splits the syndrome block into two halves of `B`
//! rows each, `Phi` on top and `Psi` below.

use std::ops::Range;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{FieldError, Fp, PrimeField};
use crate::linalg::FMatrix;
use crate::params::{ParamsError, PirParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsaError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("answer matrix is singular for valid parameters")]
    Singular,
    #[error("candidate set must hold exactly {expected} servers, got {got}")]
    CandidateSize { expected: usize, got: usize },
    #[error("candidate server index {index} out of range for {n} servers")]
    CandidateOutOfRange { index: usize, n: usize },
    #[error("candidate set must be strictly ascending")]
    CandidateOrder,
}

/// Immutable per-parameter context: the answer matrix and its cached inverse.
#[derive(Debug, Clone)]
pub struct CsaContext {
    params: PirParams,
    field: PrimeField,
    alphas: Vec<Fp>,
    fs: Vec<Fp>,
    csa: FMatrix,
    csa_inv: FMatrix,
}

impl CsaContext {
    pub fn new(params: PirParams) -> Result<Self, CsaError> {
        params.validate()?;
        let field = params.field()?;
        let alphas = params.alpha_points()?;
        let fs = params.f_points()?;
        let csa = csa_matrix(field, &alphas, &fs);
        let csa_inv = csa.inverse().map_err(|e| match e {
            FieldError::Singular => CsaError::Singular,
            other => panic!("unexpected failure inverting a square matrix: {other}"),
        })?;
        Ok(Self {
            params,
            field,
            alphas,
            fs,
            csa,
            csa_inv,
        })
    }

    pub fn params(&self) -> &PirParams {
        &self.params
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn alphas(&self) -> &[Fp] {
        &self.alphas
    }

    pub fn fs(&self) -> &[Fp] {
        &self.fs
    }

    pub fn csa(&self) -> &FMatrix {
        &self.csa
    }

    pub fn csa_inv(&self) -> &FMatrix {
        &self.csa_inv
    }

    pub fn message_rows(&self) -> Range<usize> {
        0..self.params.l
    }

    pub fn interference_rows(&self) -> Range<usize> {
        self.params.l..self.params.l + 2 * self.params.b
    }

    pub fn syndrome_rows(&self) -> Range<usize> {
        self.params.l + 2 * self.params.b..self.params.n
    }

    /// All size-B server sets in lexicographic order.
    pub fn candidates(&self) -> impl Iterator<Item = Vec<usize>> {
        (0..self.params.n).combinations(self.params.b)
    }

    pub fn check_candidate(&self, candidate: &[usize]) -> Result<(), CsaError> {
        let b = self.params.b;
        if candidate.len() != b {
            return Err(CsaError::CandidateSize {
                expected: b,
                got: candidate.len(),
            });
        }
        if let Some(&index) = candidate.iter().find(|&&i| i >= self.params.n) {
            return Err(CsaError::CandidateOutOfRange { index, n: self.params.n });
        }
        if candidate.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CsaError::CandidateOrder);
        }
        Ok(())
    }

    /// `(Phi, Psi)`: the two B-row halves of the syndrome block of `CSA^-1`
    /// restricted to the candidate columns (0-based server indices).
    pub fn candidate_submatrices(&self, candidate: &[usize]) -> Result<(FMatrix, FMatrix), CsaError> {
        self.check_candidate(candidate)?;
        let (l, b) = (self.params.l, self.params.b);
        let phi_rows: Vec<usize> = (l + 2 * b..l + 3 * b).collect();
        let psi_rows: Vec<usize> = (l + 3 * b..self.params.n).collect();
        Ok((
            self.csa_inv.select(&phi_rows, candidate),
            self.csa_inv.select(&psi_rows, candidate),
        ))
    }

    /// The `2B x B` syndrome block of `CSA^-1` at the candidate columns.
    pub fn syndrome_matrix(&self, candidate: &[usize]) -> Result<FMatrix, CsaError> {
        self.check_candidate(candidate)?;
        let rows: Vec<usize> = self.syndrome_rows().collect();
        Ok(self.csa_inv.select(&rows, candidate))
    }
}

pub fn build_csa(params: PirParams) -> Result<CsaContext, CsaError> {
    CsaContext::new(params)
}

fn csa_matrix(field: PrimeField, alphas: &[Fp], fs: &[Fp]) -> FMatrix {
    let n = alphas.len();
    let l = fs.len();
    FMatrix::from_fn(field, n, n, |row, col| {
        let alpha = alphas[row];
        if col < l {
            (fs[col] - alpha)
                .inv()
                .expect("message and server points are disjoint")
        } else {
            alpha.pow((col - l) as u64)
        }
    })
}
