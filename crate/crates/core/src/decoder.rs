//! Byzantine-locating decoder.
//!
//! `CSA^-1 A = [W_theta; I + Z'; 0] + CSA^-1 Delta`, and `Delta` is supported
//! on at most `B` servers. The last `2B` rows (the syndrome) only see
//! `Delta`, so a candidate server set `G` is consistent when the syndrome lies
//! in the span of the syndrome block's columns `G`. The corruption recovered
//! for the first consistent candidate is then stripped from the message rows.

use std::ops::Index;

use thiserror::Error;

use crate::csa::{CsaContext, CsaError};
use crate::field::{FieldError, Fp};
use crate::linalg::FVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} answers, got {got}")]
    AnswerCount { expected: usize, got: usize },
    #[error("no candidate set of size B explains the syndrome")]
    NoConsistentCandidate,
    #[error("candidates {first:?} and {other:?} are both consistent but decode different messages")]
    Ambiguous { first: Vec<usize>, other: Vec<usize> },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The N downloaded symbols, in server order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerVector {
    answers: FVector,
}

impl AnswerVector {
    pub fn new(answers: FVector) -> Self {
        Self { answers }
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn as_vector(&self) -> &FVector {
        &self.answers
    }

    pub fn set(&mut self, server: usize, value: Fp) {
        self.answers[server] = value;
    }

    /// `self - other`, the corruption vector when `other` is the honest vector.
    pub fn difference(&self, other: &AnswerVector) -> Result<FVector, FieldError> {
        self.answers.sub(&other.answers)
    }
}

impl Index<usize> for AnswerVector {
    type Output = Fp;

    fn index(&self, i: usize) -> &Fp {
        &self.answers[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// The L recovered symbols of the requested message.
    pub message: FVector,
    /// First consistent candidate, 0-based server indices.
    pub byz_estimate: Vec<usize>,
    /// Corruption values recovered on `byz_estimate`.
    pub delta_hat: FVector,
    pub candidates_tested: usize,
    pub consistent_candidates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Stop at the first consistent candidate instead of auditing the rest.
    pub fast: bool,
}

/// Some `delta` with `syndrome_matrix(candidate) * delta = syndrome`, if any.
pub fn consistency_check(
    ctx: &CsaContext,
    candidate: &[usize],
    syndrome: &FVector,
) -> Result<Option<FVector>, CsaError> {
    let m = ctx.syndrome_matrix(candidate)?;
    Ok(m.solve_in_colspace(syndrome))
}

/// The split form of the test: `delta = Psi^-1 * bottom`, accepted iff
/// `Phi * delta = top`. Returns `None` when `Psi` is singular, where only
/// [`consistency_check`] applies.
pub fn split_consistency_check(
    ctx: &CsaContext,
    candidate: &[usize],
    syndrome: &FVector,
) -> Result<Option<Option<FVector>>, CsaError> {
    let (phi, psi) = ctx.candidate_submatrices(candidate)?;
    let b = ctx.params().b;
    let Ok(psi_inv) = psi.inverse() else {
        return Ok(None);
    };
    let field = ctx.field();
    let top = FVector::new(field, syndrome.as_slice()[..b].to_vec());
    let bottom = FVector::new(field, syndrome.as_slice()[b..].to_vec());
    let delta = psi_inv.mul_vec(&bottom).expect("B x B times length-B");
    let predicted_top = phi.mul_vec(&delta).expect("B x B times length-B");
    Ok(Some((predicted_top == top).then_some(delta)))
}

pub fn decode(answers: &AnswerVector, ctx: &CsaContext) -> Result<DecodeResult, DecodeError> {
    decode_with(answers, ctx, DecodeOptions::default())
}

pub fn decode_with(answers: &AnswerVector, ctx: &CsaContext, options: DecodeOptions) -> Result<DecodeResult, DecodeError> {
    let n = ctx.params().n;
    if answers.len() != n {
        return Err(DecodeError::AnswerCount {
            expected: n,
            got: answers.len(),
        });
    }
    let separated = ctx.csa_inv().mul_vec(answers.as_vector())?;
    let field = ctx.field();
    let syndrome = FVector::new(field, separated.as_slice()[ctx.syndrome_rows()].to_vec());
    let message_rows: Vec<usize> = ctx.message_rows().collect();

    let mut found: Option<DecodeResult> = None;
    let mut tested = 0;
    let mut consistent = 0;
    for candidate in ctx.candidates() {
        tested += 1;
        let delta = consistency_check(ctx, &candidate, &syndrome).expect("enumerated candidates are well formed");
        let Some(delta) = delta else { continue };
        consistent += 1;
        let leak = ctx.csa_inv().select(&message_rows, &candidate).mul_vec(&delta)?;
        let message = FVector::new(field, separated.as_slice()[ctx.message_rows()].to_vec()).sub(&leak)?;
        match &found {
            None => {
                found = Some(DecodeResult {
                    message,
                    byz_estimate: candidate,
                    delta_hat: delta,
                    candidates_tested: 0,
                    consistent_candidates: 0,
                });
                if options.fast {
                    break;
                }
            }
            Some(first) if first.message != message => {
                return Err(DecodeError::Ambiguous {
                    first: first.byz_estimate.clone(),
                    other: candidate,
                });
            }
            Some(_) => {}
        }
    }
    let mut result = found.ok_or(DecodeError::NoConsistentCandidate)?;
    result.candidates_tested = tested;
    result.consistent_candidates = consistent;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{byzantine_answers, corrupt_answers, ByzantineView, Strategy};
    use crate::linalg::FMatrix;
    use crate::params::PirParams;
    use crate::protocol::{deal_masks, encode_storage, generate_queries, honest_answers, MessageTable, NoiseGrid};
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example() -> CsaContext {
        CsaContext::new(PirParams::nine_server_example()).unwrap()
    }

    /// `A = CSA [x] + delta` for an arbitrary hidden vector `x`.
    fn synthetic_answers(ctx: &CsaContext, hidden: &[u64], delta: &[(usize, u64)]) -> AnswerVector {
        let f = ctx.field();
        let mut a = ctx.csa().mul_vec(&f.vector(hidden)).unwrap();
        for &(s, d) in delta {
            a[s] += f.elem(d);
        }
        AnswerVector::new(a)
    }

    #[test]
    fn zero_syndrome_decodes_with_first_candidate() {
        let ctx = example();
        let a = synthetic_answers(&ctx, &[4, 1, 2, 3, 5, 0, 0, 0, 0], &[]);
        let r = decode(&a, &ctx).unwrap();
        assert_eq!(r.message.values(), vec![4]);
        assert_eq!(r.byz_estimate, vec![0, 1]);
        assert!(r.delta_hat.is_zero());
        assert_eq!(r.candidates_tested, 36);
        assert_eq!(r.consistent_candidates, 36);
    }

    #[test]
    fn wrong_candidate_rejected_for_generic_corruption() {
        let ctx = example();
        let f = ctx.field();
        // Syndrome of Delta = (1, 0) on servers {1, 2}: column 1 of rows 6..9.
        let syndrome = f.vector(&[8, 3, 4, 7]);
        assert_eq!(consistency_check(&ctx, &[1, 2], &syndrome).unwrap(), None);
        assert_eq!(split_consistency_check(&ctx, &[1, 2], &syndrome).unwrap(), Some(None));
        assert_eq!(consistency_check(&ctx, &[0, 1], &syndrome).unwrap(), Some(f.vector(&[1, 0])));
    }

    #[test]
    fn correct_candidate_recovers_delta() {
        let ctx = example();
        let f = ctx.field();
        let m = ctx.syndrome_matrix(&[0, 1]).unwrap();
        for (d1, d2) in [(3u64, 7u64), (10, 1), (0, 5)] {
            let delta = f.vector(&[d1, d2]);
            // Build the syndrome from the explicit coefficients
            // (8, 3, 4, 7) and (8, 1, 0, 4) rather than from `m`.
            let syndrome = f.vector(&[
                (8 * d1 + 8 * d2) % 11,
                (3 * d1 + d2) % 11,
                (4 * d1) % 11,
                (7 * d1 + 4 * d2) % 11,
            ]);
            assert_eq!(m.mul_vec(&delta).unwrap(), syndrome);
            assert_eq!(consistency_check(&ctx, &[0, 1], &syndrome).unwrap(), Some(delta.clone()));
            assert_eq!(split_consistency_check(&ctx, &[0, 1], &syndrome).unwrap(), Some(Some(delta)));
        }
    }

    #[test]
    fn zero_syndrome_is_consistent_everywhere() {
        let ctx = example();
        let zero = FVector::zeros(ctx.field(), 4);
        for c in ctx.candidates() {
            assert_eq!(consistency_check(&ctx, &c, &zero).unwrap(), Some(FVector::zeros(ctx.field(), 2)));
        }
    }

    #[test]
    fn decode_strips_corruption_from_message_row() {
        let ctx = example();
        let a = synthetic_answers(&ctx, &[6, 9, 9, 9, 9, 0, 0, 0, 0], &[(0, 3), (1, 4)]);
        let r = decode(&a, &ctx).unwrap();
        assert_eq!(r.message.values(), vec![6]);
        assert_eq!(r.byz_estimate, vec![0, 1]);
        assert_eq!(r.delta_hat.values(), vec![3, 4]);
        // Row 1 before correction: W + 9*3 + 5*4 = 6 + 47 = 53 = 9 mod 11.
        let separated = ctx.csa_inv().mul_vec(a.as_vector()).unwrap();
        assert_eq!(separated[0].value(), 9);
    }

    #[test]
    fn fast_mode_stops_early() {
        let ctx = example();
        let a = synthetic_answers(&ctx, &[1, 0, 0, 0, 0, 0, 0, 0, 0], &[(7, 2), (8, 5)]);
        let full = decode(&a, &ctx).unwrap();
        let fast = decode_with(&a, &ctx, DecodeOptions { fast: true }).unwrap();
        assert_eq!(fast.message, full.message);
        assert_eq!(fast.byz_estimate, vec![7, 8]);
        assert_eq!(fast.candidates_tested, 36);
        let b = synthetic_answers(&ctx, &[1, 0, 0, 0, 0, 0, 0, 0, 0], &[(0, 2), (1, 5)]);
        assert_eq!(decode_with(&b, &ctx, DecodeOptions { fast: true }).unwrap().candidates_tested, 1);
    }

    #[test]
    fn too_many_corruptions_are_detected() {
        let ctx = example();
        let a = synthetic_answers(&ctx, &[1, 0, 0, 0, 0, 0, 0, 0, 0], &[(0, 1), (4, 1), (8, 1)]);
        assert_eq!(decode(&a, &ctx), Err(DecodeError::NoConsistentCandidate));
    }

    #[test]
    fn answer_count_checked() {
        let ctx = example();
        let a = AnswerVector::new(FVector::zeros(ctx.field(), 8));
        assert_eq!(decode(&a, &ctx), Err(DecodeError::AnswerCount { expected: 9, got: 8 }));
    }

    /// Every corruption supported on any size-B set, exhaustively on the
    /// nine-server instance: the true support is consistent, and every
    /// consistent candidate agrees on the message.
    #[test]
    fn exhaustive_completeness_and_soundness_nine_servers() {
        let ctx = example();
        let hidden = [5u64, 1, 2, 3, 4, 0, 0, 0, 0];
        for support in ctx.candidates() {
            for d1 in 0..11 {
                for d2 in 0..11 {
                    let a = synthetic_answers(&ctx, &hidden, &[(support[0], d1), (support[1], d2)]);
                    let r = decode(&a, &ctx).expect("decodable");
                    assert_eq!(r.message.values(), vec![5]);
                    let separated = ctx.csa_inv().mul_vec(a.as_vector()).unwrap();
                    let syndrome = FVector::new(ctx.field(), separated.as_slice()[5..].to_vec());
                    let delta = consistency_check(&ctx, &support, &syndrome).unwrap();
                    assert_eq!(delta.unwrap().values(), vec![d1, d2]);
                }
            }
        }
    }

    #[test]
    fn smaller_support_makes_every_superset_consistent() {
        let ctx = example();
        let a = synthetic_answers(&ctx, &[2, 0, 0, 0, 0, 0, 0, 0, 0], &[(4, 6)]);
        let r = decode(&a, &ctx).unwrap();
        assert_eq!(r.message.values(), vec![2]);
        assert_eq!(r.byz_estimate, vec![0, 4]);
        // {i, 4} for the 8 other servers.
        assert_eq!(r.consistent_candidates, 8);
    }

    #[test]
    fn split_test_agrees_with_colspace_when_psi_invertible() {
        let ctx = CsaContext::new(PirParams::with_defaults(13, 3, 1, None).unwrap()).unwrap();
        let f = ctx.field();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let mut support = sample(&mut rng, 13, 3).into_vec();
            support.sort_unstable();
            let delta: Vec<u64> = (0..3).map(|_| rng.random_range(0..17)).collect();
            let syndrome = ctx.syndrome_matrix(&support).unwrap().mul_vec(&f.vector(&delta)).unwrap();
            for c in ctx.candidates().take(40) {
                let general = consistency_check(&ctx, &c, &syndrome).unwrap();
                if let Some(split) = split_consistency_check(&ctx, &c, &syndrome).unwrap() {
                    assert_eq!(split, general);
                }
            }
        }
    }

    #[test]
    fn pipeline_roundtrip_all_messages_and_strategies() {
        for (n, b, k) in [(5, 1, 3), (9, 2, 2), (13, 3, 2)] {
            let p = PirParams::with_defaults(n, b, k, None).unwrap();
            let ctx = CsaContext::new(p.clone()).unwrap();
            let f = p.field().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let w = MessageTable::random(&p, &mut rng).unwrap();
            for theta in 0..k {
                for strategy in Strategy::ALL {
                    let storages = encode_storage(&w, &p, &NoiseGrid::sample(&p, &mut rng).unwrap()).unwrap();
                    let queries = generate_queries(theta, &p, &NoiseGrid::sample(&p, &mut rng).unwrap()).unwrap();
                    let (_, masks) = deal_masks(&p, &mut rng).unwrap();
                    let honest = honest_answers(&storages, &queries, &masks).unwrap();
                    let mut coalition = sample(&mut rng, n, b).into_vec();
                    coalition.sort_unstable();
                    let gamma: Vec<Fp> = (0..b).map(|_| f.elem(rng.random_range(0..p.q))).collect();
                    let view = ByzantineView::new(&coalition, &storages, &queries, &masks, &gamma).unwrap();
                    let received = corrupt_answers(&honest, &byzantine_answers(strategy, &view), b).unwrap();
                    let r = decode(&received, &ctx).unwrap();
                    assert_eq!(r.message, w.message(theta), "{strategy} on ({n},{b})");
                }
            }
        }
    }

    #[test]
    fn identity_csa_inverse_sanity() {
        let ctx = example();
        assert_eq!(ctx.csa_inv().mul(ctx.csa()).unwrap(), FMatrix::identity(ctx.field(), 9));
    }
}
