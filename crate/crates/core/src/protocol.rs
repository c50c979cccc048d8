//! Dealer, user and honest-server actors.
//!
//! * The storage dealer hides column `l` of the message table behind a
//!   degree-B polynomial in `(f_l - alpha_n)` with random coefficients `Z`.
//! * The user sends `(f_l - alpha_n)^-1 (e_theta + sum_i (f_l - alpha_n)^i R_{l,i})`.
//! * A common-randomness dealer samples `2B` mask secrets `Z'` and hands
//!   server `n` only `Zhat_n = sum_i alpha_n^(i-1) Z'_i`.
//! * An honest server answers `<S_n, Q_n> + Zhat_n`, one symbol.
//!
//! Server and message indices are 0-based throughout the library.

use rand::Rng;
use thiserror::Error;

use crate::decoder::AnswerVector;
use crate::field::{FieldError, Fp, PrimeField};
use crate::linalg::{FMatrix, FVector};
use crate::params::{ParamsError, PirParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("message index {theta} out of range for {k} messages")]
    ThetaOutOfRange { theta: usize, k: usize },
    #[error("shares belong to different servers ({0}, {1}, {2})")]
    ServerMismatch(usize, usize, usize),
}

/// The `K x L` table of all messages; row `k` is message `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageTable {
    w: FMatrix,
}

impl MessageTable {
    pub fn new(params: &PirParams, w: FMatrix) -> Result<Self, ProtocolError> {
        if w.rows() != params.k || w.cols() != params.l || w.field().modulus() != params.q {
            return Err(ProtocolError::Dimension(format!(
                "message table is {}x{} over GF({}), expected {}x{} over GF({})",
                w.rows(),
                w.cols(),
                w.field().modulus(),
                params.k,
                params.l,
                params.q
            )));
        }
        Ok(Self { w })
    }

    pub fn from_rows<R: AsRef<[u64]>>(params: &PirParams, rows: &[R]) -> Result<Self, ProtocolError> {
        let w = FMatrix::from_rows(params.field()?, rows)?;
        Self::new(params, w)
    }

    pub fn random<G: Rng + ?Sized>(params: &PirParams, rng: &mut G) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        let w = FMatrix::from_fn(field, params.k, params.l, |_, _| field.elem(rng.random_range(0..params.q)));
        Ok(Self { w })
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.w
    }

    /// The L symbols of message `theta`.
    pub fn message(&self, theta: usize) -> FVector {
        FVector::new(self.w.field(), self.w.row(theta).to_vec())
    }

    /// Symbol position `l` across all K messages.
    pub fn column(&self, l: usize) -> FVector {
        self.w.column(l)
    }
}

/// `L x B` grid of K-length noise vectors, indexed `[l][i]` where entry `i`
/// multiplies the power `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseGrid {
    blocks: Vec<Vec<FVector>>,
}

impl NoiseGrid {
    pub fn symbol_count(params: &PirParams) -> usize {
        params.l * params.b * params.k
    }

    /// Builds the grid from a flat symbol list, ordered by `l`, then `i`, then `k`.
    pub fn from_symbols(params: &PirParams, symbols: &[Fp]) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        if symbols.len() != Self::symbol_count(params) {
            return Err(ProtocolError::Dimension(format!(
                "{} noise symbols, expected {}",
                symbols.len(),
                Self::symbol_count(params)
            )));
        }
        let mut chunks = symbols.chunks(params.k.max(1));
        let blocks = (0..params.l)
            .map(|_| {
                (0..params.b)
                    .map(|_| FVector::new(field, chunks.next().expect("length checked").to_vec()))
                    .collect()
            })
            .collect();
        Ok(Self { blocks })
    }

    pub fn zero(params: &PirParams) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        Self::from_symbols(params, &vec![field.zero(); Self::symbol_count(params)])
    }

    pub fn sample<G: Rng + ?Sized>(params: &PirParams, rng: &mut G) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        let symbols: Vec<Fp> = (0..Self::symbol_count(params))
            .map(|_| field.elem(rng.random_range(0..params.q)))
            .collect();
        Self::from_symbols(params, &symbols)
    }

    pub fn get(&self, l: usize, i: usize) -> &FVector {
        &self.blocks[l][i]
    }

    fn check(&self, params: &PirParams) -> Result<(), ProtocolError> {
        let ok = self.blocks.len() == params.l
            && self
                .blocks
                .iter()
                .all(|row| row.len() == params.b && row.iter().all(|v| v.len() == params.k));
        if ok {
            Ok(())
        } else {
            Err(ProtocolError::Dimension("noise grid does not match parameters".into()))
        }
    }
}

/// Storage noise `Z`, drawn by the storage dealer.
pub type DealerRandomness = NoiseGrid;
/// Query noise `R`, drawn by the user.
pub type UserRandomness = NoiseGrid;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageShare {
    pub server: usize,
    pub blocks: Vec<FVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryShare {
    pub server: usize,
    pub blocks: Vec<FVector>,
}

/// The `2B` mask secrets `Z'`. Never seen by the user or any single server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSecrets {
    pub zprime: Vec<Fp>,
}

impl MaskSecrets {
    pub fn new(params: &PirParams, zprime: Vec<Fp>) -> Result<Self, ProtocolError> {
        if zprime.len() != 2 * params.b {
            return Err(ProtocolError::Dimension(format!(
                "{} mask secrets, expected {}",
                zprime.len(),
                2 * params.b
            )));
        }
        Ok(Self { zprime })
    }

    pub fn sample<G: Rng + ?Sized>(params: &PirParams, rng: &mut G) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        Self::new(
            params,
            (0..2 * params.b)
                .map(|_| field.elem(rng.random_range(0..params.q)))
                .collect(),
        )
    }

    pub fn zero(params: &PirParams) -> Result<Self, ProtocolError> {
        let field = params.field()?;
        Self::new(params, vec![field.zero(); 2 * params.b])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskShare {
    pub server: usize,
    pub zhat: Fp,
}

/// Powers `d, d^2, .., d^B` for `d = f_l - alpha_n`.
fn offset_powers(d: Fp, b: usize) -> Vec<Fp> {
    std::iter::successors(Some(d), |&p| Some(p * d)).take(b).collect()
}

pub fn encode_storage(
    w: &MessageTable,
    params: &PirParams,
    noise: &DealerRandomness,
) -> Result<Vec<StorageShare>, ProtocolError> {
    params.check_points()?;
    if w.matrix().rows() != params.k || w.matrix().cols() != params.l {
        return Err(ProtocolError::Dimension("message table does not match parameters".into()));
    }
    noise.check(params)?;
    let alphas = params.alpha_points()?;
    let fs = params.f_points()?;
    let columns: Vec<FVector> = (0..params.l).map(|l| w.column(l)).collect();
    alphas
        .iter()
        .enumerate()
        .map(|(server, &alpha)| {
            let blocks = fs
                .iter()
                .enumerate()
                .map(|(l, &f)| {
                    let mut block = columns[l].clone();
                    for (i, p) in offset_powers(f - alpha, params.b).into_iter().enumerate() {
                        block.axpy(p, noise.get(l, i))?;
                    }
                    Ok(block)
                })
                .collect::<Result<_, ProtocolError>>()?;
            Ok(StorageShare { server, blocks })
        })
        .collect()
}

pub fn generate_queries(
    theta: usize,
    params: &PirParams,
    noise: &UserRandomness,
) -> Result<Vec<QueryShare>, ProtocolError> {
    params.check_points()?;
    if theta >= params.k {
        return Err(ProtocolError::ThetaOutOfRange { theta, k: params.k });
    }
    noise.check(params)?;
    let field = params.field()?;
    let alphas = params.alpha_points()?;
    let fs = params.f_points()?;
    let e_theta = FVector::unit(field, params.k, theta);
    alphas
        .iter()
        .enumerate()
        .map(|(server, &alpha)| {
            let blocks = fs
                .iter()
                .enumerate()
                .map(|(l, &f)| {
                    let d = f - alpha;
                    let mut block = e_theta.clone();
                    for (i, p) in offset_powers(d, params.b).into_iter().enumerate() {
                        block.axpy(p, noise.get(l, i))?;
                    }
                    Ok(block.scale(d.inv()?))
                })
                .collect::<Result<_, ProtocolError>>()?;
            Ok(QueryShare { server, blocks })
        })
        .collect()
}

/// Per-server mask shares `Zhat_n = sum_{i=1..2B} alpha_n^(i-1) Z'_i`.
pub fn mask_shares(params: &PirParams, secrets: &MaskSecrets) -> Result<Vec<MaskShare>, ProtocolError> {
    if secrets.zprime.len() != 2 * params.b {
        return Err(ProtocolError::Dimension("mask secrets do not match parameters".into()));
    }
    let field = params.field()?;
    Ok(params
        .alpha_points()?
        .into_iter()
        .enumerate()
        .map(|(server, alpha)| MaskShare {
            server,
            zhat: horner(field, &secrets.zprime, alpha),
        })
        .collect())
}

/// Samples fresh mask secrets and deals one share per server.
pub fn deal_masks<G: Rng + ?Sized>(
    params: &PirParams,
    rng: &mut G,
) -> Result<(MaskSecrets, Vec<MaskShare>), ProtocolError> {
    let secrets = MaskSecrets::sample(params, rng)?;
    let shares = mask_shares(params, &secrets)?;
    Ok((secrets, shares))
}

fn horner(field: PrimeField, coefficients: &[Fp], x: Fp) -> Fp {
    coefficients
        .iter()
        .rev()
        .fold(field.zero(), |acc, &c| acc * x + c)
}

/// Pre-mask answer `<S_n, Q_n>`.
pub fn unmasked_answer(storage: &StorageShare, query: &QueryShare) -> Result<Fp, ProtocolError> {
    if storage.server != query.server {
        return Err(ProtocolError::ServerMismatch(storage.server, query.server, query.server));
    }
    if storage.blocks.len() != query.blocks.len() {
        return Err(ProtocolError::Dimension("storage and query block counts differ".into()));
    }
    let mut acc: Option<Fp> = None;
    for (s, q) in storage.blocks.iter().zip(&query.blocks) {
        let term = s.dot(q)?;
        acc = Some(acc.map_or(term, |a| a + term));
    }
    acc.ok_or_else(|| ProtocolError::Dimension("empty storage share".into()))
}

pub fn honest_answer(storage: &StorageShare, query: &QueryShare, mask: &MaskShare) -> Result<Fp, ProtocolError> {
    if storage.server != mask.server {
        return Err(ProtocolError::ServerMismatch(storage.server, query.server, mask.server));
    }
    Ok(unmasked_answer(storage, query)? + mask.zhat)
}

pub fn honest_answers(
    storages: &[StorageShare],
    queries: &[QueryShare],
    masks: &[MaskShare],
) -> Result<AnswerVector, ProtocolError> {
    if storages.len() != queries.len() || storages.len() != masks.len() {
        return Err(ProtocolError::Dimension("share counts differ".into()));
    }
    let answers = storages
        .iter()
        .zip(queries)
        .zip(masks)
        .map(|((s, q), m)| honest_answer(s, q, m))
        .collect::<Result<Vec<_>, _>>()?;
    let field = answers
        .first()
        .map(|a| a.field())
        .ok_or_else(|| ProtocolError::Dimension("no servers".into()))?;
    Ok(AnswerVector::new(FVector::new(field, answers)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::CsaContext;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn five_server(k: usize) -> PirParams {
        PirParams::with_defaults(5, 1, k, Some(7)).unwrap()
    }

    #[test]
    fn storage_single_symbol_example() {
        let p = five_server(1);
        let f = p.field().unwrap();
        let w = MessageTable::from_rows(&p, &[[3u64]]).unwrap();
        let z = NoiseGrid::from_symbols(&p, &[f.elem(2)]).unwrap();
        let shares = encode_storage(&w, &p, &z).unwrap();
        // 3 + (6 - 1) * 2 = 13 = 6 mod 7.
        assert_eq!(shares[0].blocks[0].values(), vec![6]);
        assert_eq!(shares[0].server, 0);
    }

    #[test]
    fn storage_without_noise_is_replication() {
        let mut p = five_server(2);
        p.b = 0;
        let w = MessageTable::from_rows(&p, &[[3u64], [5]]).unwrap();
        let shares = encode_storage(&w, &p, &NoiseGrid::zero(&p).unwrap()).unwrap();
        for s in shares {
            assert_eq!(s.blocks[0], w.column(0));
        }
    }

    #[test]
    fn zero_messages_leave_only_noise() {
        let p = five_server(2);
        let f = p.field().unwrap();
        let w = MessageTable::from_rows(&p, &[[0u64], [0]]).unwrap();
        let z = NoiseGrid::from_symbols(&p, &[f.elem(4), f.elem(1)]).unwrap();
        let shares = encode_storage(&w, &p, &z).unwrap();
        for (n, s) in shares.iter().enumerate() {
            let d = (6 + 7 - (n as u64 + 1)) % 7;
            assert_eq!(s.blocks[0].values(), vec![(d * 4) % 7, d % 7]);
        }
    }

    #[test]
    fn query_example() {
        let p = five_server(2);
        let f = p.field().unwrap();
        let r = NoiseGrid::from_symbols(&p, &[f.elem(1), f.elem(2)]).unwrap();
        let queries = generate_queries(0, &p, &r).unwrap();
        // 5^-1 ((1, 0) + 5 (1, 2)) = 3 (6, 10) = (4, 2) mod 7.
        assert_eq!(queries[0].blocks[0].values(), vec![4, 2]);
    }

    #[test]
    fn noiseless_query_is_scaled_unit_vector() {
        let mut p = five_server(2);
        p.b = 0;
        let queries = generate_queries(1, &p, &NoiseGrid::zero(&p).unwrap()).unwrap();
        let f = p.field().unwrap();
        for (n, q) in queries.iter().enumerate() {
            let d = f.elem(6) - f.elem(n as u64 + 1);
            assert_eq!(q.blocks[0], FVector::unit(f, 2, 1).scale(d.inv().unwrap()));
        }
    }

    #[test]
    fn queries_for_two_indices_differ_only_by_unit_term() {
        let p = five_server(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = NoiseGrid::sample(&p, &mut rng).unwrap();
        let f = p.field().unwrap();
        let q0 = generate_queries(0, &p, &r).unwrap();
        let q2 = generate_queries(2, &p, &r).unwrap();
        for n in 0..p.n {
            let d_inv = (f.elem(6) - f.elem(n as u64 + 1)).inv().unwrap();
            let diff = q2[n].blocks[0].sub(&q0[n].blocks[0]).unwrap();
            let expected = FVector::unit(f, 3, 2)
                .sub(&FVector::unit(f, 3, 0))
                .unwrap()
                .scale(d_inv);
            assert_eq!(diff, expected);
        }
    }

    #[test]
    fn theta_out_of_range() {
        let p = five_server(2);
        let r = NoiseGrid::zero(&p).unwrap();
        assert_eq!(
            generate_queries(2, &p, &r).unwrap_err(),
            ProtocolError::ThetaOutOfRange { theta: 2, k: 2 }
        );
    }

    #[test]
    fn mask_share_examples() {
        let p = PirParams::nine_server_example();
        let f = p.field().unwrap();
        let secrets = MaskSecrets::new(&p, vec![f.elem(1), f.elem(2), f.elem(3), f.elem(4)]).unwrap();
        let shares = mask_shares(&p, &secrets).unwrap();
        // 1 + 2*2 + 3*4 + 4*8 = 49 = 5 mod 11.
        assert_eq!(shares[1].zhat, f.elem(5));
        let zero = mask_shares(&p, &MaskSecrets::zero(&p).unwrap()).unwrap();
        assert!(zero.iter().all(|s| s.zhat.is_zero()));

        let p1 = five_server(1);
        let f7 = p1.field().unwrap();
        let secrets = MaskSecrets::new(&p1, vec![f7.elem(3), f7.elem(5)]).unwrap();
        for s in mask_shares(&p1, &secrets).unwrap() {
            assert_eq!(s.zhat, f7.elem(3) + f7.elem(s.server as u64 + 1) * f7.elem(5));
        }
    }

    #[test]
    fn mask_secret_count_checked() {
        let p = five_server(1);
        assert!(matches!(MaskSecrets::new(&p, vec![]), Err(ProtocolError::Dimension(_))));
    }

    #[test]
    fn honest_answer_with_zero_storage_and_mask() {
        let p = five_server(2);
        let f = p.field().unwrap();
        let w = MessageTable::from_rows(&p, &[[0u64], [0]]).unwrap();
        let storages = encode_storage(&w, &p, &NoiseGrid::zero(&p).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let queries = generate_queries(1, &p, &NoiseGrid::sample(&p, &mut rng).unwrap()).unwrap();
        let mask = MaskShare { server: 0, zhat: f.zero() };
        assert_eq!(honest_answer(&storages[0], &queries[0], &mask).unwrap(), f.zero());
        let wrong = MaskShare { server: 1, zhat: f.zero() };
        assert!(matches!(
            honest_answer(&storages[0], &queries[0], &wrong),
            Err(ProtocolError::ServerMismatch(..))
        ));
    }

    /// Interpolates the degree-(2B-1) mask polynomial from 2B shares by
    /// solving the Vandermonde system.
    #[test]
    fn any_2b_mask_shares_recover_the_secrets() {
        let p = PirParams::nine_server_example();
        let f = p.field().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (secrets, shares) = deal_masks(&p, &mut rng).unwrap();
        for subset in [[0usize, 1, 2, 3], [5, 6, 7, 8], [0, 3, 5, 8]] {
            let v = FMatrix::from_fn(f, 4, 4, |r, c| f.elem(p.alphas[subset[r]]).pow(c as u64));
            let y = FVector::new(f, subset.iter().map(|&s| shares[s].zhat).collect());
            let solved = v.inverse().unwrap().mul_vec(&y).unwrap();
            assert_eq!(solved.as_slice(), secrets.zprime.as_slice());
        }
    }

    #[test]
    fn all_honest_answers_have_message_and_zero_syndrome() {
        for (n, b, k) in [(5, 1, 2), (9, 2, 3), (12, 2, 2), (13, 3, 1)] {
            let p = PirParams::with_defaults(n, b, k, None).unwrap();
            let ctx = CsaContext::new(p.clone()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64((n * 100 + b) as u64);
            for _ in 0..50 {
                let w = MessageTable::random(&p, &mut rng).unwrap();
                let theta = rng.random_range(0..k);
                let storages = encode_storage(&w, &p, &NoiseGrid::sample(&p, &mut rng).unwrap()).unwrap();
                let queries = generate_queries(theta, &p, &NoiseGrid::sample(&p, &mut rng).unwrap()).unwrap();
                let (_, masks) = deal_masks(&p, &mut rng).unwrap();
                let answers = honest_answers(&storages, &queries, &masks).unwrap();
                let separated = ctx.csa_inv().mul_vec(answers.as_vector()).unwrap();
                for (row, l) in ctx.message_rows().enumerate() {
                    assert_eq!(separated[l], w.message(theta)[row]);
                }
                assert!(ctx.syndrome_rows().all(|r| separated[r].is_zero()));
            }
        }
    }

    /// Exhaustive version on the smallest instance: every (W, theta, Z, R, Z').
    #[test]
    fn answer_structure_exhaustive_tiny() {
        let p = PirParams::with_defaults(5, 1, 1, Some(7)).unwrap();
        let ctx = CsaContext::new(p.clone()).unwrap();
        let f = p.field().unwrap();
        for w0 in f.elements() {
            let w = MessageTable::new(&p, FMatrix::new(f, 1, 1, vec![w0]).unwrap()).unwrap();
            for z in f.elements() {
                let storages = encode_storage(&w, &p, &NoiseGrid::from_symbols(&p, &[z]).unwrap()).unwrap();
                for r in f.elements() {
                    let queries = generate_queries(0, &p, &NoiseGrid::from_symbols(&p, &[r]).unwrap()).unwrap();
                    for z1 in f.elements() {
                        for z2 in f.elements() {
                            let masks = mask_shares(&p, &MaskSecrets::new(&p, vec![z1, z2]).unwrap()).unwrap();
                            let answers = honest_answers(&storages, &queries, &masks).unwrap();
                            let separated = ctx.csa_inv().mul_vec(answers.as_vector()).unwrap();
                            assert_eq!(separated[0], w0);
                            assert!(separated[3].is_zero() && separated[4].is_zero());
                        }
                    }
                }
            }
        }
    }
}
