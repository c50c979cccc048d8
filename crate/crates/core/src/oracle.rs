//! Exhaustive verification of the zero-leakage claims on tiny instances.
//!
//! A mutual-information statement `I(X; Y) = 0` is checked as "the
//! distribution of `X` is the same for every value of `Y`". Distributions
//! are built by enumerating every value of the relevant randomness and
//! counting observed outcomes, so the total-variation distance between two
//! of them is an exact rational. Nothing here uses floating point.
//!
//! Each check takes a [`Mutation`] that removes one ingredient of the
//! scheme; the mutated scheme must make the matching check fail, which
//! shows the checks are not vacuous.

use std::collections::BTreeSet;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{byzantine_answers, corrupt_answers, ByzantineView, Strategy};
use crate::csa::{CsaContext, CsaError};
use crate::field::{Fp, PrimeField};
use crate::linalg::FMatrix;
use crate::params::{ParamsError, PirParams};
use crate::ratio::Ratio;
use crate::protocol::{
    encode_storage, generate_queries, honest_answers, mask_shares, unmasked_answer, MaskSecrets, MaskShare,
    MessageTable, NoiseGrid, ProtocolError, QueryShare, StorageShare,
};
use crate::decoder::decode;

/// Default limit on primitive cases a single exact check may enumerate.
pub const DEFAULT_CASE_CEILING: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exact enumeration needs {cases} cases, above the ceiling of {ceiling}")]
    EnumerationTooLarge { cases: u128, ceiling: u64 },
    #[error("an observation of {symbols} symbols over GF({q}) does not fit the 128-bit canonical encoding")]
    TranscriptTooWide { symbols: usize, q: u64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Csa(#[from] CsaError),
}

/// Which part of the scheme to remove.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Mask secrets forced to zero, so honest answers carry no mask.
    NoMask,
    /// Query noise `R` forced to zero.
    NoQueryNoise,
    /// Storage noise `Z` forced to zero.
    NoStorageNoise,
}

/// Injective mixed-radix encoding of a fixed-length symbol tuple as a `u128`.
#[derive(Debug, Clone, Copy)]
pub struct TranscriptEncoder {
    q: u64,
    symbols: usize,
}

impl TranscriptEncoder {
    pub fn new(field: PrimeField, symbols: usize) -> Result<Self, OracleError> {
        let q = field.modulus();
        let mut capacity: u128 = 1;
        for _ in 0..symbols {
            capacity = capacity.checked_mul(q as u128).ok_or(OracleError::TranscriptTooWide { symbols, q })?;
        }
        Ok(Self { q, symbols })
    }

    pub fn encode<I: IntoIterator<Item = Fp>>(&self, symbols: I) -> u128 {
        let mut key: u128 = 0;
        let mut count = 0;
        for s in symbols {
            key = key * self.q as u128 + s.value() as u128;
            count += 1;
        }
        debug_assert_eq!(count, self.symbols);
        key
    }

    pub fn decode(&self, mut key: u128) -> Vec<u64> {
        let mut out = vec![0u64; self.symbols];
        for slot in out.iter_mut().rev() {
            *slot = (key % self.q as u128) as u64;
            key /= self.q as u128;
        }
        out
    }

    /// Radix for appending `tail` more symbols after an existing key.
    fn shift(&self, tail: usize) -> u128 {
        (self.q as u128).pow(tail as u32)
    }
}

/// Outcome counts keyed by canonical encoding, sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    counts: Vec<(u128, u64)>,
    total: u64,
}

impl ExactDistribution {
    pub fn from_keys(mut keys: Vec<u128>) -> Self {
        keys.sort_unstable();
        let total = keys.len() as u64;
        let mut counts: Vec<(u128, u64)> = Vec::new();
        for k in keys {
            match counts.last_mut() {
                Some((last, c)) if *last == k => *c += 1,
                _ => counts.push((k, 1)),
            }
        }
        Self { counts, total }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, key: u128) -> u64 {
        self.counts
            .binary_search_by_key(&key, |&(k, _)| k)
            .map_or(0, |i| self.counts[i].1)
    }

    /// `1/2 * sum |p(x) - p'(x)|`, exactly.
    pub fn total_variation(&self, other: &ExactDistribution) -> Ratio {
        let (ta, tb) = (self.total as u128, other.total as u128);
        let (mut i, mut j) = (0, 0);
        let mut acc: u128 = 0;
        let diff = |a: u128, b: u128| a.abs_diff(b);
        while i < self.counts.len() || j < other.counts.len() {
            let a = self.counts.get(i);
            let b = other.counts.get(j);
            match (a, b) {
                (Some(&(ka, ca)), Some(&(kb, cb))) if ka == kb => {
                    acc += diff(ca as u128 * tb, cb as u128 * ta);
                    i += 1;
                    j += 1;
                }
                (Some(&(ka, ca)), Some(&(kb, _))) if ka < kb => {
                    acc += ca as u128 * tb;
                    i += 1;
                }
                (Some(&(_, ca)), None) => {
                    acc += ca as u128 * tb;
                    i += 1;
                }
                (_, Some(&(_, cb))) => {
                    acc += cb as u128 * ta;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ratio::new(acc, 2 * ta * tb)
    }
}

/// Largest pairwise TV distance among a family of distributions.
/// Identical members are collapsed first, so a passing family costs one pass.
pub fn max_pairwise_tv(family: &[ExactDistribution]) -> Ratio {
    let mut distinct: Vec<&ExactDistribution> = Vec::new();
    for d in family {
        if !distinct.contains(&d) {
            distinct.push(d);
        }
    }
    distinct
        .iter()
        .tuple_combinations()
        .map(|(a, b)| a.total_variation(b))
        .fold(Ratio::zero(), Ratio::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub check: String,
    pub params: PirParams,
    pub strategy: Option<Strategy>,
    /// Coalition used by adversarial checks, 1-based as in the CLI.
    pub byz_set: Option<Vec<usize>>,
    pub mutation: Mutation,
    pub status: CheckStatus,
    /// `false` for sampled runs, which are statistical evidence only.
    pub exact: bool,
    pub tv_numerator: Option<u64>,
    pub tv_denominator: Option<u64>,
    pub cases: u64,
    pub failures: Option<u64>,
    pub millis: u64,
    pub note: Option<String>,
}

impl OracleReport {
    fn new(check: &str, params: &PirParams, mutation: Mutation) -> Self {
        Self {
            check: check.to_string(),
            params: params.clone(),
            strategy: None,
            byz_set: None,
            mutation,
            status: CheckStatus::NotApplicable,
            exact: true,
            tv_numerator: None,
            tv_denominator: None,
            cases: 0,
            failures: None,
            millis: 0,
            note: None,
        }
    }

    pub fn tv(&self) -> Option<Ratio> {
        Some(Ratio {
            num: self.tv_numerator?,
            den: self.tv_denominator?,
        })
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Passed
    }

    fn with_tv(mut self, tv: Ratio, cases: u128, started: Instant) -> Self {
        self.tv_numerator = Some(tv.num);
        self.tv_denominator = Some(tv.den);
        self.status = if tv.is_zero() {
            CheckStatus::Passed
        } else {
            CheckStatus::Failed
        };
        self.cases = cases as u64;
        self.millis = started.elapsed().as_millis() as u64;
        self
    }
}

/// Every vector in `GF(q)^len`, in lexicographic order.
pub fn all_vectors(field: PrimeField, len: usize) -> Vec<Vec<Fp>> {
    let q = field.modulus();
    let total = (q as usize).pow(len as u32);
    (0..total)
        .map(|mut index| {
            let mut v = vec![field.zero(); len];
            for slot in v.iter_mut().rev() {
                *slot = field.elem((index % q as usize) as u64);
                index /= q as usize;
            }
            v
        })
        .collect()
}

fn pow_u128(q: u64, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(q as u128))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Saturating product, so oversized enumerations report instead of overflowing.
fn product(factors: &[u128]) -> u128 {
    factors.iter().fold(1u128, |acc, &f| acc.saturating_mul(f))
}

fn guard(cases: u128, ceiling: u64) -> Result<(), OracleError> {
    if cases > ceiling as u128 {
        return Err(OracleError::EnumerationTooLarge { cases, ceiling });
    }
    Ok(())
}

/// Degenerate instances (`B = 0`) skip the `L = N - 4B` relation.
fn check_oracle_params(params: &PirParams) -> Result<(), OracleError> {
    if params.b == 0 {
        params.field()?;
        params.check_points()?;
        Ok(())
    } else {
        Ok(params.validate()?)
    }
}

fn noise_draw_count(params: &PirParams, zeroed: bool) -> u128 {
    if zeroed {
        1
    } else {
        pow_u128(params.q, NoiseGrid::symbol_count(params))
    }
}

fn mask_draw_count(params: &PirParams, zeroed: bool) -> u128 {
    if zeroed {
        1
    } else {
        pow_u128(params.q, 2 * params.b)
    }
}

fn noise_draws(params: &PirParams, zeroed: bool) -> Result<Vec<NoiseGrid>, OracleError> {
    let field = params.field()?;
    let len = NoiseGrid::symbol_count(params);
    if zeroed {
        return Ok(vec![NoiseGrid::zero(params)?]);
    }
    all_vectors(field, len)
        .iter()
        .map(|s| NoiseGrid::from_symbols(params, s).map_err(OracleError::from))
        .collect()
}

fn mask_draws(params: &PirParams, zeroed: bool) -> Result<Vec<Vec<MaskShare>>, OracleError> {
    let field = params.field()?;
    let secrets: Vec<MaskSecrets> = if zeroed {
        vec![MaskSecrets::zero(params)?]
    } else {
        all_vectors(field, 2 * params.b)
            .into_iter()
            .map(|z| MaskSecrets::new(params, z))
            .collect::<Result<_, _>>()?
    };
    secrets
        .iter()
        .map(|s| mask_shares(params, s).map_err(OracleError::from))
        .collect()
}

fn message_tables(params: &PirParams) -> Result<Vec<MessageTable>, OracleError> {
    let field = params.field()?;
    all_vectors(field, params.k * params.l)
        .into_iter()
        .map(|symbols| {
            let m = FMatrix::new(field, params.k, params.l, symbols).expect("K*L symbols");
            MessageTable::new(params, m).map_err(OracleError::from)
        })
        .collect()
}

/// For every coalition of size B, the distribution of its query shares over
/// all query noise must not depend on the requested index.
pub fn check_query_privacy(params: &PirParams, mutation: Mutation, ceiling: u64) -> Result<OracleReport, OracleError> {
    let started = Instant::now();
    check_oracle_params(params)?;
    let report = OracleReport::new("query_privacy", params, mutation);
    if params.b == 0 {
        return Ok(OracleReport {
            note: Some("not applicable: no collusion bound".into()),
            ..report
        });
    }
    let field = params.field()?;
    let zeroed = mutation == Mutation::NoQueryNoise;
    let cases = product(&[binomial(params.n, params.b), params.k as u128, noise_draw_count(params, zeroed)]);
    guard(cases, ceiling)?;
    let draws = noise_draws(params, zeroed)?;
    let coalitions: Vec<Vec<usize>> = (0..params.n).combinations(params.b).collect();
    let encoder = TranscriptEncoder::new(field, params.b * params.l * params.k)?;

    let per_theta: Vec<Vec<Vec<QueryShare>>> = (0..params.k)
        .map(|theta| {
            draws
                .iter()
                .map(|r| generate_queries(theta, params, r))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;

    let tv = coalitions
        .par_iter()
        .map(|coalition| {
            let family: Vec<ExactDistribution> = per_theta
                .iter()
                .map(|queries| {
                    let keys = queries
                        .iter()
                        .map(|q| {
                            encoder.encode(
                                coalition
                                    .iter()
                                    .flat_map(|&s| q[s].blocks.iter().flat_map(|b| b.iter().copied())),
                            )
                        })
                        .collect();
                    ExactDistribution::from_keys(keys)
                })
                .collect();
            max_pairwise_tv(&family)
        })
        .reduce(Ratio::zero, Ratio::max);
    Ok(report.with_tv(tv, cases, started))
}

/// For every coalition of size B, the distribution of its storage shares
/// over all storage noise must be the same for every message table.
pub fn check_storage_security(params: &PirParams, mutation: Mutation, ceiling: u64) -> Result<OracleReport, OracleError> {
    let started = Instant::now();
    check_oracle_params(params)?;
    let report = OracleReport::new("storage_security", params, mutation);
    if params.b == 0 {
        return Ok(OracleReport {
            note: Some("not applicable: no collusion bound".into()),
            ..report
        });
    }
    let field = params.field()?;
    let zeroed = mutation == Mutation::NoStorageNoise;
    let cases = product(&[
        pow_u128(params.q, params.k * params.l),
        noise_draw_count(params, zeroed),
        binomial(params.n, params.b),
    ]);
    guard(cases, ceiling)?;
    let tables = message_tables(params)?;
    let draws = noise_draws(params, zeroed)?;
    let coalitions: Vec<Vec<usize>> = (0..params.n).combinations(params.b).collect();
    let encoder = TranscriptEncoder::new(field, params.b * params.l * params.k)?;

    // Shares per table per draw, computed once and shared by all coalitions.
    let shares: Vec<Vec<Vec<StorageShare>>> = tables
        .par_iter()
        .map(|w| draws.iter().map(|z| encode_storage(w, params, z)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;

    let tv = coalitions
        .par_iter()
        .map(|coalition| {
            let family: Vec<ExactDistribution> = shares
                .iter()
                .map(|per_draw| {
                    let keys = per_draw
                        .iter()
                        .map(|s| {
                            encoder.encode(
                                coalition
                                    .iter()
                                    .flat_map(|&n| s[n].blocks.iter().flat_map(|b| b.iter().copied())),
                            )
                        })
                        .collect();
                    ExactDistribution::from_keys(keys)
                })
                .collect();
            max_pairwise_tv(&family)
        })
        .reduce(Ratio::zero, Ratio::max);
    Ok(report.with_tv(tv, cases, started))
}

/// Precomputed shares for one parameter set, reused across strategies.
struct Enumeration {
    storage_draws: Vec<NoiseGrid>,
    /// `[theta][draw]`
    queries: Vec<Vec<Vec<QueryShare>>>,
    masks: Vec<Vec<MaskShare>>,
    gammas: Vec<Fp>,
}

impl Enumeration {
    fn new(params: &PirParams, mutation: Mutation) -> Result<Self, OracleError> {
        let field = params.field()?;
        let storage_draws = noise_draws(params, mutation == Mutation::NoStorageNoise)?;
        let query_draws = noise_draws(params, mutation == Mutation::NoQueryNoise)?;
        let queries = (0..params.k)
            .map(|theta| {
                query_draws
                    .iter()
                    .map(|r| generate_queries(theta, params, r))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            storage_draws,
            queries,
            masks: mask_draws(params, mutation == Mutation::NoMask)?,
            gammas: field.elements().collect(),
        })
    }

    /// Randomness tuples per (message table, theta), without building them.
    fn count(params: &PirParams, mutation: Mutation) -> u128 {
        product(&[
            noise_draw_count(params, mutation == Mutation::NoStorageNoise),
            noise_draw_count(params, mutation == Mutation::NoQueryNoise),
            mask_draw_count(params, mutation == Mutation::NoMask),
            params.q as u128,
        ])
    }
}

/// For every requested index and every value of the requested message, the
/// distribution of the full transcript (all answers, all queries) over
/// `(Z, R, Z', gamma)` must be the same for every value of the other messages.
///
/// `byz_set` holds 0-based server indices; `gamma` ranges over all `q`
/// single-symbol coordination streams.
pub fn check_symmetric_privacy(
    params: &PirParams,
    strategy: Strategy,
    byz_set: &[usize],
    mutation: Mutation,
    ceiling: u64,
) -> Result<OracleReport, OracleError> {
    let started = Instant::now();
    params.validate()?;
    check_coalition(params, byz_set)?;
    let field = params.field()?;
    let mut report = OracleReport::new("symmetric_privacy", params, mutation);
    report.strategy = Some(strategy);
    report.byz_set = Some(byz_set.iter().map(|s| s + 1).collect());

    let tables_per_theta = pow_u128(params.q, params.k * params.l);
    let cases = product(&[params.k as u128, tables_per_theta, Enumeration::count(params, mutation)]);
    guard(cases, ceiling)?;
    let enumeration = Enumeration::new(params, mutation)?;

    let encoder = TranscriptEncoder::new(field, params.n + params.n * params.l * params.k)?;
    let answer_shift = encoder.shift(params.n);
    let query_encoder = TranscriptEncoder::new(field, params.n * params.l * params.k)?;

    let requested_values = all_vectors(field, params.l);
    let other_values = all_vectors(field, (params.k - 1) * params.l);
    let groups: Vec<(usize, &Vec<Fp>)> = (0..params.k)
        .flat_map(|theta| requested_values.iter().map(move |v| (theta, v)))
        .collect();

    let tv = groups
        .par_iter()
        .map(|&(theta, requested)| -> Result<Ratio, OracleError> {
            let query_keys: Vec<u128> = enumeration.queries[theta]
                .iter()
                .map(|qs| query_encoder.encode(qs.iter().flat_map(|q| q.blocks.iter().flat_map(|b| b.iter().copied()))))
                .collect();
            let mut family = Vec::with_capacity(other_values.len());
            for others in &other_values {
                let w = assemble_table(params, field, theta, requested, others)?;
                let keys = transcript_keys(
                    params,
                    &enumeration,
                    &w,
                    theta,
                    strategy,
                    byz_set,
                    &query_keys,
                    answer_shift,
                )?;
                family.push(ExactDistribution::from_keys(keys));
            }
            Ok(max_pairwise_tv(&family))
        })
        .try_reduce(Ratio::zero, |a, b| Ok(a.max(b)))?;
    Ok(report.with_tv(tv, cases, started))
}

fn check_coalition(params: &PirParams, byz_set: &[usize]) -> Result<(), OracleError> {
    if byz_set.len() > params.b {
        return Err(CsaError::CandidateSize {
            expected: params.b,
            got: byz_set.len(),
        }
        .into());
    }
    if let Some(&index) = byz_set.iter().find(|&&c| c >= params.n) {
        return Err(CsaError::CandidateOutOfRange { index, n: params.n }.into());
    }
    Ok(())
}

/// Message table with row `theta` set to `requested` and the remaining rows
/// filled from `others` in order.
fn assemble_table(
    params: &PirParams,
    field: PrimeField,
    theta: usize,
    requested: &[Fp],
    others: &[Fp],
) -> Result<MessageTable, OracleError> {
    let mut rows = others.chunks(params.l.max(1));
    let mut symbols = Vec::with_capacity(params.k * params.l);
    for k in 0..params.k {
        if k == theta {
            symbols.extend_from_slice(requested);
        } else {
            symbols.extend_from_slice(rows.next().expect("K-1 other rows"));
        }
    }
    let m = FMatrix::new(field, params.k, params.l, symbols).expect("K*L symbols");
    Ok(MessageTable::new(params, m)?)
}

#[allow(clippy::too_many_arguments)]
fn transcript_keys(
    params: &PirParams,
    enumeration: &Enumeration,
    w: &MessageTable,
    theta: usize,
    strategy: Strategy,
    byz_set: &[usize],
    query_keys: &[u128],
    answer_shift: u128,
) -> Result<Vec<u128>, OracleError> {
    let n = params.n;
    let queries = &enumeration.queries[theta];
    let mut keys = Vec::with_capacity(
        (enumeration.storage_draws.len() * queries.len() * enumeration.masks.len() * enumeration.gammas.len()).max(1),
    );
    let mut answers = vec![params.field()?.zero(); n];
    let mut unmasked = vec![params.field()?.zero(); n];
    for z in &enumeration.storage_draws {
        let storages = encode_storage(w, params, z)?;
        for (r_index, qs) in queries.iter().enumerate() {
            for s in 0..n {
                unmasked[s] = unmasked_answer(&storages[s], &qs[s])?;
            }
            let prefix = query_keys[r_index] * answer_shift;
            for masks in &enumeration.masks {
                for s in 0..n {
                    answers[s] = unmasked[s] + masks[s].zhat;
                }
                for gamma in &enumeration.gammas {
                    let stream = std::slice::from_ref(gamma);
                    let view = ByzantineView::new(byz_set, &storages, qs, masks, stream)
                        .expect("coalition indices checked");
                    let byz = byzantine_answers(strategy, &view);
                    let mut key = 0u128;
                    for (s, &honest) in answers.iter().enumerate() {
                        let value = byz.iter().find(|&&(b, _)| b == s).map_or(honest, |&(_, v)| v);
                        key = key * params.q as u128 + value.value() as u128;
                    }
                    keys.push(prefix + key);
                }
            }
        }
    }
    Ok(keys)
}

/// Decodes every enumerated retrieval and counts wrong messages.
///
/// With `byz_set = None` every coalition of size B is tried.
pub fn check_correctness_exhaustive(
    params: &PirParams,
    strategy: Strategy,
    byz_set: Option<&[usize]>,
    ceiling: u64,
) -> Result<OracleReport, OracleError> {
    let started = Instant::now();
    let ctx = CsaContext::new(params.clone())?;
    let mut report = OracleReport::new("correctness", params, Mutation::None);
    report.strategy = Some(strategy);
    report.byz_set = byz_set.map(|s| s.iter().map(|i| i + 1).collect());
    let coalitions: Vec<Vec<usize>> = match byz_set {
        Some(s) => {
            check_coalition(params, s)?;
            vec![s.to_vec()]
        }
        None => (0..params.n).combinations(params.b).collect(),
    };
    let cases = product(&[
        pow_u128(params.q, params.k * params.l),
        params.k as u128,
        Enumeration::count(params, Mutation::None),
        coalitions.len() as u128,
    ]);
    guard(cases, ceiling)?;
    let tables = message_tables(params)?;
    let enumeration = Enumeration::new(params, Mutation::None)?;

    let work: Vec<(&MessageTable, usize)> = tables.iter().flat_map(|w| (0..params.k).map(move |t| (w, t))).collect();
    let failures: u64 = work
        .par_iter()
        .map(|&(w, theta)| -> Result<u64, OracleError> {
            let expected = w.message(theta);
            let mut failures = 0;
            for z in &enumeration.storage_draws {
                let storages = encode_storage(w, params, z)?;
                for qs in &enumeration.queries[theta] {
                    for masks in &enumeration.masks {
                        let honest = honest_answers(&storages, qs, masks)?;
                        for gamma in &enumeration.gammas {
                            for coalition in &coalitions {
                                let view = ByzantineView::new(coalition, &storages, qs, masks, std::slice::from_ref(gamma))
                                    .expect("coalition indices in range");
                                let received = corrupt_answers(&honest, &byzantine_answers(strategy, &view), params.b)
                                    .expect("coalition within bound");
                                match decode(&received, &ctx) {
                                    Ok(r) if r.message == expected => {}
                                    _ => failures += 1,
                                }
                            }
                        }
                    }
                }
            }
            Ok(failures)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(finish_correctness(report, failures, cases, started))
}

/// Randomized correctness check for instances too large to enumerate.
pub fn check_correctness_sampled(
    params: &PirParams,
    strategy: Strategy,
    draws: u64,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    let started = Instant::now();
    let ctx = CsaContext::new(params.clone())?;
    let field = params.field()?;
    let mut report = OracleReport::new("correctness", params, Mutation::None);
    report.strategy = Some(strategy);
    report.exact = false;
    let failures: u64 = (0..draws)
        .into_par_iter()
        .map(|i| -> Result<u64, OracleError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let w = MessageTable::random(params, &mut rng)?;
            let theta = rng.random_range(0..params.k);
            let storages = encode_storage(&w, params, &NoiseGrid::sample(params, &mut rng)?)?;
            let queries = generate_queries(theta, params, &NoiseGrid::sample(params, &mut rng)?)?;
            let masks = mask_shares(params, &MaskSecrets::sample(params, &mut rng)?)?;
            let honest = honest_answers(&storages, &queries, &masks)?;
            let coalition: BTreeSet<usize> = rand::seq::index::sample(&mut rng, params.n, params.b).into_iter().collect();
            let coalition: Vec<usize> = coalition.into_iter().collect();
            let gamma: Vec<Fp> = (0..params.b).map(|_| field.elem(rng.random_range(0..params.q))).collect();
            let view = ByzantineView::new(&coalition, &storages, &queries, &masks, &gamma).expect("in range");
            let received = corrupt_answers(&honest, &byzantine_answers(strategy, &view), params.b).expect("within bound");
            Ok(match decode(&received, &ctx) {
                Ok(r) if r.message == w.message(theta) => 0,
                _ => 1,
            })
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(finish_correctness(report, failures, draws as u128, started))
}

fn finish_correctness(mut report: OracleReport, failures: u64, cases: u128, started: Instant) -> OracleReport {
    report.cases = cases as u64;
    report.failures = Some(failures);
    report.status = if failures == 0 {
        CheckStatus::Passed
    } else {
        CheckStatus::Failed
    };
    report.millis = started.elapsed().as_millis() as u64;
    report
}

/// Number of exact cases a symmetric-privacy check would enumerate.
pub fn symmetric_privacy_cases(params: &PirParams) -> u128 {
    let q = params.q;
    let klb = params.k * params.l * params.b;
    product(&[
        params.k as u128,
        pow_u128(q, params.k * params.l),
        pow_u128(q, klb),
        pow_u128(q, klb),
        pow_u128(q, 2 * params.b),
        q as u128,
    ])
}

/// Number of exact cases the query-privacy check enumerates.
pub fn query_privacy_cases(params: &PirParams) -> u128 {
    product(&[binomial(params.n, params.b), params.k as u128, pow_u128(params.q, params.k * params.l * params.b)])
}
