//! Reproducible experiment driver: seeded trial campaigns, the nine-server
//! worked example, and the privacy verifier, all reporting deterministic JSON.
//!
//! Server indices in [`RunConfig`] and in every report are 1-based, as on
//! the command line; the library underneath is 0-based.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adversary::{byzantine_answers, corrupt_answers, AdversaryError, ByzantineView, Strategy};
use crate::csa::{CsaContext, CsaError};
use crate::decoder::{consistency_check, decode_with, split_consistency_check, DecodeError, DecodeOptions};
use crate::field::Fp;
use crate::linalg::{FMatrix, FVector};
use crate::oracle::{
    check_correctness_exhaustive, check_correctness_sampled, check_query_privacy, check_storage_security,
    check_symmetric_privacy, symmetric_privacy_cases, Mutation, OracleError, OracleReport, DEFAULT_CASE_CEILING,
};
use crate::params::{ParamsError, PirParams};
use crate::protocol::{
    encode_storage, generate_queries, honest_answers, mask_shares, MaskSecrets, MessageTable, NoiseGrid,
    ProtocolError,
};
use crate::ratio::Ratio;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Csa(#[from] CsaError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Simulate,
    VerifyPrivacy,
    Golden,
}

/// A single strategy or the whole zoo.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategyChoice {
    #[default]
    All,
    One(Strategy),
}

impl StrategyChoice {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyChoice::All => Strategy::ALL.to_vec(),
            StrategyChoice::One(s) => vec![s],
        }
    }
}

impl FromStr for StrategyChoice {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            Ok(StrategyChoice::All)
        } else {
            s.parse().map(StrategyChoice::One)
        }
    }
}

impl TryFrom<String> for StrategyChoice {
    type Error = AdversaryError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StrategyChoice> for String {
    fn from(c: StrategyChoice) -> String {
        c.to_string()
    }
}

impl fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyChoice::All => f.write_str("all"),
            StrategyChoice::One(s) => f.write_str(s.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub b: usize,
    pub k: usize,
    /// Defaults to the smallest prime `>= N + L`.
    pub q: Option<u64>,
    /// Overrides for the server evaluation points (default `1..=N`).
    pub alphas: Option<Vec<u64>>,
    /// Overrides for the message evaluation points (default `q-1, q-2, ..`).
    pub fs: Option<Vec<u64>>,
    pub seed: u64,
    pub strategy: StrategyChoice,
    /// Fixed Byzantine servers (1-based); drawn per trial when absent.
    pub byz_set: Option<Vec<usize>>,
    pub trials: u64,
    pub mode: Mode,
    /// Stop decoding at the first consistent candidate.
    pub fast: bool,
    /// Which part of the scheme to remove in `verify-privacy`.
    pub mutation: Mutation,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 9,
            b: 2,
            k: 2,
            q: None,
            alphas: None,
            fs: None,
            seed: 0,
            strategy: StrategyChoice::All,
            byz_set: None,
            trials: 1000,
            mode: Mode::Simulate,
            fast: false,
            mutation: Mutation::None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn params(&self) -> Result<PirParams, HarnessError> {
        let mut params = PirParams::with_defaults(self.n, self.b, self.k, self.q)?;
        if let Some(alphas) = &self.alphas {
            params.alphas = alphas.clone();
        }
        if let Some(fs) = &self.fs {
            params.fs = fs.clone();
        }
        params.validate()?;
        Ok(params)
    }

    /// The fixed coalition as 0-based indices, after range checks.
    pub fn coalition(&self) -> Result<Option<Vec<usize>>, HarnessError> {
        let Some(set) = &self.byz_set else {
            return Ok(None);
        };
        if set.len() > self.b {
            return Err(HarnessError::Config(format!(
                "byz_set has {} servers but B = {}",
                set.len(),
                self.b
            )));
        }
        let mut zero_based = Vec::with_capacity(set.len());
        for &s in set {
            if s == 0 || s > self.n {
                return Err(HarnessError::Config(format!("byz_set entry {s} outside 1..={}", self.n)));
            }
            if zero_based.contains(&(s - 1)) {
                return Err(HarnessError::Config(format!("byz_set lists server {s} twice")));
            }
            zero_based.push(s - 1);
        }
        zero_based.sort_unstable();
        Ok(Some(zero_based))
    }
}

/// Randomness stream tags; each trial draws every stream independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Messages,
    Theta,
    Storage,
    Query,
    Mask,
    Gamma,
    Coalition,
}

impl Stream {
    fn tag(self) -> &'static [u8] {
        match self {
            Stream::Messages => b"messages",
            Stream::Theta => b"theta",
            Stream::Storage => b"storage",
            Stream::Query => b"query",
            Stream::Mask => b"mask",
            Stream::Gamma => b"gamma",
            Stream::Coalition => b"coalition",
        }
    }
}

/// `SHA-256("bspir/trial-seed/v1" || master_le || trial_le || tag)`, used
/// directly as a ChaCha8 key.
pub fn derive_seed(master: u64, trial: u64, stream: Stream) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(b"bspir/trial-seed/v1");
    hasher.update(master.to_le_bytes());
    hasher.update(trial.to_le_bytes());
    hasher.update(stream.tag());
    hasher.finalize().into()
}

pub fn trial_rng(master: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(master, trial, stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TrialOutcome {
    success: bool,
    located: bool,
    exact: bool,
    decode_error: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyBreakdown {
    pub strategy: Strategy,
    pub trials: u64,
    pub successes: u64,
    /// Trials where the located set covers every server whose answer changed.
    pub byz_located: u64,
    /// Trials where the located set equals the coalition.
    pub byz_exact: u64,
    pub decode_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub params: PirParams,
    pub seed: u64,
    pub fast: bool,
    pub trials: u64,
    pub successes: u64,
    pub byz_located: u64,
    pub byz_exact: u64,
    /// Answer symbols downloaded per retrieval.
    pub downloaded_per_trial: u64,
    /// Message symbols retrieved per successful retrieval.
    pub retrieved_per_success: u64,
    pub downloaded_symbols: u64,
    pub retrieved_symbols: u64,
    /// `retrieved_symbols / downloaded_symbols`, reduced.
    pub rate: Ratio,
    /// `(N - 4B) / N`, reduced.
    pub target_rate: Ratio,
    pub per_strategy: Vec<StrategyBreakdown>,
}

impl TrialReport {
    pub fn all_succeeded(&self) -> bool {
        self.successes == self.trials
    }
}

/// One seeded retrieval: dealer, user, servers, coalition, decoder.
fn run_trial(
    params: &PirParams,
    ctx: &CsaContext,
    config: &RunConfig,
    coalition: &Option<Vec<usize>>,
    strategy: Strategy,
    trial: u64,
) -> Result<TrialOutcome, HarnessError> {
    let field = ctx.field();
    let seed = config.seed;
    let w = MessageTable::random(params, &mut trial_rng(seed, trial, Stream::Messages))?;
    let theta = trial_rng(seed, trial, Stream::Theta).random_range(0..params.k);
    let storages = encode_storage(&w, params, &NoiseGrid::sample(params, &mut trial_rng(seed, trial, Stream::Storage))?)?;
    let queries = generate_queries(theta, params, &NoiseGrid::sample(params, &mut trial_rng(seed, trial, Stream::Query))?)?;
    let masks = mask_shares(params, &MaskSecrets::sample(params, &mut trial_rng(seed, trial, Stream::Mask))?)?;
    let honest = honest_answers(&storages, &queries, &masks)?;

    let members = match coalition {
        Some(c) => c.clone(),
        None => {
            let mut c = sample(&mut trial_rng(seed, trial, Stream::Coalition), params.n, params.b).into_vec();
            c.sort_unstable();
            c
        }
    };
    let mut gamma_rng = trial_rng(seed, trial, Stream::Gamma);
    let gamma: Vec<Fp> = (0..params.b.max(1)).map(|_| field.elem(gamma_rng.random_range(0..params.q))).collect();
    let view = ByzantineView::new(&members, &storages, &queries, &masks, &gamma)?;
    let received = corrupt_answers(&honest, &byzantine_answers(strategy, &view), params.b)?;
    let delta = received.difference(&honest).expect("same field and length");

    Ok(match decode_with(&received, ctx, DecodeOptions { fast: config.fast }) {
        Ok(r) => {
            let located = (0..params.n).all(|s| delta[s].is_zero() || r.byz_estimate.contains(&s));
            TrialOutcome {
                success: r.message == w.message(theta),
                located,
                exact: r.byz_estimate == members,
                decode_error: false,
            }
        }
        Err(_) => TrialOutcome {
            success: false,
            located: false,
            exact: false,
            decode_error: true,
        },
    })
}

/// Runs `trials` seeded retrievals per selected strategy. Trials run on the
/// current rayon pool; results are merged in trial order, so the report does
/// not depend on the thread count.
pub fn run_trials(config: &RunConfig) -> Result<TrialReport, HarnessError> {
    let params = config.params()?;
    let coalition = config.coalition()?;
    let ctx = CsaContext::new(params.clone())?;

    let mut per_strategy = Vec::new();
    for strategy in config.strategy.strategies() {
        let outcomes: Vec<TrialOutcome> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(&params, &ctx, config, &coalition, strategy, t))
            .collect::<Result<_, _>>()?;
        let count = |f: fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
        per_strategy.push(StrategyBreakdown {
            strategy,
            trials: config.trials,
            successes: count(|o| o.success),
            byz_located: count(|o| o.located),
            byz_exact: count(|o| o.exact),
            decode_errors: count(|o| o.decode_error),
        });
    }

    let trials: u64 = per_strategy.iter().map(|s| s.trials).sum();
    let successes: u64 = per_strategy.iter().map(|s| s.successes).sum();
    let downloaded_per_trial = params.download_symbols() as u64;
    let retrieved_per_success = params.l as u64;
    let downloaded_symbols = trials * downloaded_per_trial;
    let retrieved_symbols = successes * retrieved_per_success;
    Ok(TrialReport {
        seed: config.seed,
        fast: config.fast,
        trials,
        successes,
        byz_located: per_strategy.iter().map(|s| s.byz_located).sum(),
        byz_exact: per_strategy.iter().map(|s| s.byz_exact).sum(),
        downloaded_per_trial,
        retrieved_per_success,
        downloaded_symbols,
        retrieved_symbols,
        rate: if downloaded_symbols == 0 {
            Ratio::zero()
        } else {
            Ratio::new(retrieved_symbols as u128, downloaded_symbols as u128)
        },
        target_rate: Ratio::new(params.l as u128, params.n as u128),
        per_strategy,
        params,
    })
}

/// Serializes with sorted object keys, so equal reports are byte-identical.
pub fn to_canonical_json<T: Serialize>(report: &T) -> Result<String, HarnessError> {
    let value = serde_json::to_value(report)?;
    let mut text = serde_json::to_string_pretty(&sort_keys(value))?;
    text.push('\n');
    Ok(text)
}

fn sort_keys(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

pub fn emit_report<T: Serialize>(report: &T, path: &Path) -> Result<(), HarnessError> {
    let text = to_canonical_json(report)?;
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub name: String,
    pub passed: bool,
    /// Offending entries on failure.
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub passed: bool,
    pub params: PirParams,
    pub checks: Vec<GoldenCheck>,
    /// Corruptions `(d1, d2)` on servers {1, 2} that the wrong candidate
    /// {2, 3} also explains.
    pub coincidences: Vec<[u64; 2]>,
    pub ambiguity_errors: u64,
}

const GOLDEN_COLUMN_1: [u64; 9] = [9, 5, 6, 1, 10, 8, 3, 4, 7];
const GOLDEN_COLUMN_2: [u64; 9] = [5, 7, 3, 4, 3, 8, 1, 0, 4];
const GOLDEN_PHI_23: [[u64; 2]; 2] = [[8, 10], [1, 9]];
const GOLDEN_PSI_23: [[u64; 2]; 2] = [[0, 7], [4, 7]];
const GOLDEN_PSI_23_INV: [[u64; 2]; 2] = [[8, 3], [8, 0]];

fn compare_entries(name: &str, expected: &[Vec<u64>], actual: &[Vec<u64>]) -> GoldenCheck {
    let mut mismatches = Vec::new();
    for (r, (e_row, a_row)) in expected.iter().zip(actual).enumerate() {
        for (c, (e, a)) in e_row.iter().zip(a_row).enumerate() {
            if e != a {
                mismatches.push(format!("entry ({}, {}): expected {e}, got {a}", r + 1, c + 1));
            }
        }
    }
    GoldenCheck {
        name: name.to_string(),
        passed: mismatches.is_empty(),
        mismatches,
    }
}

fn as_column(values: &[u64]) -> Vec<Vec<u64>> {
    values.iter().map(|&v| vec![v]).collect()
}

fn check(name: &str, mismatches: Vec<String>) -> GoldenCheck {
    GoldenCheck {
        name: name.to_string(),
        passed: mismatches.is_empty(),
        mismatches,
    }
}

/// Regression against the worked nine-server example (N = 9, B = 2, K = 1,
/// q = 11, alpha_i = i, f_1 = 10). `alphas` / `fs` override the points.
pub fn run_golden(alphas: Option<Vec<u64>>, fs: Option<Vec<u64>>) -> Result<GoldenRecord, HarnessError> {
    let config = RunConfig {
        n: 9,
        b: 2,
        k: 1,
        q: Some(11),
        alphas,
        fs,
        ..RunConfig::default()
    };
    let params = config.params()?;
    let ctx = CsaContext::new(params.clone())?;
    let field = ctx.field();
    let mut checks = Vec::new();

    checks.push(compare_entries(
        "csa_inv column 1",
        &as_column(&GOLDEN_COLUMN_1),
        &as_column(&ctx.csa_inv().column(0).values()),
    ));
    checks.push(compare_entries(
        "csa_inv column 2",
        &as_column(&GOLDEN_COLUMN_2),
        &as_column(&ctx.csa_inv().column(1).values()),
    ));
    let (phi, psi) = ctx.candidate_submatrices(&[1, 2])?;
    let rows = |m: [[u64; 2]; 2]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    checks.push(compare_entries("phi({2,3})", &rows(GOLDEN_PHI_23), &phi.to_rows()));
    checks.push(compare_entries("psi({2,3})", &rows(GOLDEN_PSI_23), &psi.to_rows()));
    let psi_inv = match psi.inverse() {
        Ok(inv) => {
            checks.push(compare_entries("psi({2,3})^-1", &rows(GOLDEN_PSI_23_INV), &inv.to_rows()));
            inv
        }
        Err(_) => {
            checks.push(check("psi({2,3})^-1", vec!["psi({2,3}) is singular".into()]));
            FMatrix::zeros(field, 2, 2)
        }
    };

    // Symbolic corruption (d1, d2) on servers {1, 2}, every value.
    let syndrome_rows: Vec<usize> = ctx.syndrome_rows().collect();
    let true_block = ctx.csa_inv().select(&syndrome_rows, &[0, 1]);
    let mut recover = Vec::new();
    let mut split_form = Vec::new();
    let mut coincidences = Vec::new();
    let mut coincidence_shape = Vec::new();
    for d1 in 0..11u64 {
        for d2 in 0..11u64 {
            let delta = field.vector(&[d1, d2]);
            let syndrome = true_block.mul_vec(&delta).expect("2B x B times B");
            match consistency_check(&ctx, &[0, 1], &syndrome)? {
                Some(found) if found == delta => {}
                other => recover.push(format!("delta ({d1}, {d2}) on {{1,2}}: recovered {other:?}")),
            }
            // The wrong candidate predicts (7 d1 + 8 d2, d2) for the top half,
            // while the true top half is (8 d1 + 8 d2, 3 d1 + d2).
            if let Some(result) = split_consistency_check(&ctx, &[1, 2], &syndrome)? {
                let bottom = FVector::new(field, syndrome.as_slice()[2..].to_vec());
                let predicted = phi.mul_vec(&psi_inv.mul_vec(&bottom).expect("2 x 2")).expect("2 x 2");
                let top = &syndrome.values()[..2];
                let want_pred = [(7 * d1 + 8 * d2) % 11, d2];
                let want_top = [(8 * d1 + 8 * d2) % 11, (3 * d1 + d2) % 11];
                if predicted.values() != want_pred || top != want_top {
                    split_form.push(format!("delta ({d1}, {d2}): predicted {:?}, top {top:?}", predicted.values()));
                }
                if result.is_some() != (want_pred == want_top) {
                    split_form.push(format!("delta ({d1}, {d2}): split test disagrees with closed form"));
                }
            }
            if consistency_check(&ctx, &[1, 2], &syndrome)?.is_some() {
                coincidences.push([d1, d2]);
                if d1 != 0 {
                    coincidence_shape.push(format!("delta ({d1}, {d2}) explained by {{2,3}} with d1 != 0"));
                }
            }
        }
    }
    checks.push(check("candidate {1,2} recovers every delta", recover));
    checks.push(check("candidate {2,3} split test matches closed form", split_form));
    if coincidences.len() > 11 {
        coincidence_shape.push(format!("{} coincidences exceed a one-dimensional subset", coincidences.len()));
    }
    checks.push(check("candidate {2,3} consistent only on a line", coincidence_shape));

    // Full decodes with every delta: no ambiguity, always the right message.
    let mut rng = ChaCha8Rng::seed_from_u64(0x601d);
    let w = MessageTable::random(&params, &mut rng)?;
    let storages = encode_storage(&w, &params, &NoiseGrid::sample(&params, &mut rng)?)?;
    let queries = generate_queries(0, &params, &NoiseGrid::sample(&params, &mut rng)?)?;
    let masks = mask_shares(&params, &MaskSecrets::sample(&params, &mut rng)?)?;
    let honest = honest_answers(&storages, &queries, &masks)?;
    let mut ambiguity_errors = 0;
    let mut wrong = Vec::new();
    for d1 in 0..11u64 {
        for d2 in 0..11u64 {
            let corrupted = [(0, honest[0] + field.elem(d1)), (1, honest[1] + field.elem(d2))];
            let received = corrupt_answers(&honest, &corrupted, 2)?;
            match decode_with(&received, &ctx, DecodeOptions::default()) {
                Ok(r) if r.message == w.message(0) => {}
                Ok(r) => wrong.push(format!("delta ({d1}, {d2}): decoded {:?}", r.message.values())),
                Err(DecodeError::Ambiguous { .. }) => ambiguity_errors += 1,
                Err(e) => wrong.push(format!("delta ({d1}, {d2}): {e}")),
            }
        }
    }
    if ambiguity_errors > 0 {
        wrong.push(format!("{ambiguity_errors} ambiguous decodes"));
    }
    checks.push(check("decode under every delta on {1,2}", wrong));

    Ok(GoldenRecord {
        passed: checks.iter().all(|c| c.passed),
        params,
        checks,
        coincidences,
        ambiguity_errors,
    })
}

/// Runs every privacy check plus exhaustive correctness on one instance.
///
/// Symmetric privacy uses the configured coalition, or server 1..B when
/// none is given. Correctness falls back to `trials` sampled draws when the
/// exact enumeration is above the ceiling.
pub fn verify_privacy(config: &RunConfig, ceiling: u64) -> Result<Vec<OracleReport>, HarnessError> {
    let params = config.params()?;
    let coalition = config.coalition()?.unwrap_or_else(|| (0..params.b).collect());
    let mut reports = vec![
        check_query_privacy(&params, config.mutation, ceiling)?,
        check_storage_security(&params, config.mutation, ceiling)?,
    ];
    for strategy in config.strategy.strategies() {
        if symmetric_privacy_cases(&params) <= ceiling as u128 {
            reports.push(check_symmetric_privacy(&params, strategy, &coalition, config.mutation, ceiling)?);
        }
        if config.mutation == Mutation::None {
            let exact = check_correctness_exhaustive(&params, strategy, Some(&coalition), ceiling);
            reports.push(match exact {
                Ok(r) => r,
                Err(OracleError::EnumerationTooLarge { .. }) => {
                    check_correctness_sampled(&params, strategy, config.trials, config.seed)?
                }
                Err(e) => return Err(e.into()),
            });
        }
    }
    Ok(reports)
}

pub fn default_ceiling() -> u64 {
    DEFAULT_CASE_CEILING
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_every_input() {
        let a = derive_seed(42, 0, Stream::Storage);
        assert_eq!(a, derive_seed(42, 0, Stream::Storage));
        assert_ne!(a, derive_seed(43, 0, Stream::Storage));
        assert_ne!(a, derive_seed(42, 1, Stream::Storage));
        assert_ne!(a, derive_seed(42, 0, Stream::Query));
    }

    #[test]
    fn strategy_choice_parsing() {
        assert_eq!("all".parse::<StrategyChoice>().unwrap(), StrategyChoice::All);
        assert_eq!(
            "leak_mask".parse::<StrategyChoice>().unwrap(),
            StrategyChoice::One(Strategy::LeakMask)
        );
        assert_eq!(StrategyChoice::All.strategies().len(), 7);
        let c: RunConfig = serde_json::from_str(r#"{"strategy": "echo_query", "n": 5, "b": 1}"#).unwrap();
        assert_eq!(c.strategy, StrategyChoice::One(Strategy::EchoQuery));
        assert_eq!(c.trials, 1000);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn coalition_validation() {
        let mut c = RunConfig {
            byz_set: Some(vec![2, 1]),
            ..RunConfig::default()
        };
        assert_eq!(c.coalition().unwrap(), Some(vec![0, 1]));
        c.byz_set = Some(vec![1, 2, 3]);
        assert!(matches!(c.coalition(), Err(HarnessError::Config(_))));
        c.byz_set = Some(vec![0]);
        assert!(matches!(c.coalition(), Err(HarnessError::Config(_))));
        c.byz_set = Some(vec![10]);
        assert!(matches!(c.coalition(), Err(HarnessError::Config(_))));
        c.byz_set = Some(vec![4, 4]);
        assert!(matches!(c.coalition(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn rate_follows_message_length() {
        for (n, b, num, den) in [(9, 2, 1, 9), (13, 3, 1, 13), (12, 2, 1, 3)] {
            let config = RunConfig {
                n,
                b,
                trials: 20,
                seed: 3,
                ..RunConfig::default()
            };
            let report = run_trials(&config).unwrap();
            assert!(report.all_succeeded());
            assert_eq!(report.rate, Ratio { num, den });
            assert_eq!(report.rate, report.target_rate);
            assert_eq!(report.downloaded_per_trial, n as u64);
            assert_eq!(report.retrieved_per_success, (n - 4 * b) as u64);
        }
    }

    #[test]
    fn honest_camouflage_counts_supersets_as_located() {
        let config = RunConfig {
            strategy: StrategyChoice::One(Strategy::HonestCamouflage),
            trials: 50,
            ..RunConfig::default()
        };
        let report = run_trials(&config).unwrap();
        assert_eq!(report.successes, 50);
        assert_eq!(report.byz_located, 50);
        // Zero syndrome: the first candidate {1, 2} is reported.
        assert!(report.byz_exact < 50);
    }

    #[test]
    fn fixed_coalition_is_located_exactly_under_noise() {
        let config = RunConfig {
            strategy: StrategyChoice::One(Strategy::CoordinatedAffine),
            byz_set: Some(vec![4, 7]),
            trials: 40,
            fast: true,
            ..RunConfig::default()
        };
        let report = run_trials(&config).unwrap();
        assert_eq!(report.successes, 40);
        assert_eq!(report.byz_located, 40);
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let value = serde_json::json!({"zeta": 1, "alpha": {"b": 2, "a": [ {"y": 0, "x": 1} ]}});
        let text = to_canonical_json(&value).unwrap();
        let zeta = text.find("zeta").unwrap();
        let alpha = text.find("alpha").unwrap();
        assert!(alpha < zeta);
        assert!(text.find("\"x\"").unwrap() < text.find("\"y\"").unwrap());
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn golden_passes_with_default_points() {
        let record = run_golden(None, None).unwrap();
        for c in &record.checks {
            assert!(c.passed, "{}: {:?}", c.name, c.mismatches);
        }
        assert!(record.passed);
        assert_eq!(record.ambiguity_errors, 0);
        let expected: Vec<[u64; 2]> = (0..11).map(|d2| [0, d2]).collect();
        assert_eq!(record.coincidences, expected);
    }

    #[test]
    fn golden_rejects_colliding_points() {
        let err = run_golden(None, Some(vec![9])).unwrap_err();
        assert!(matches!(err, HarnessError::Params(ParamsError::PointCollision(9))));
    }

    #[test]
    fn golden_reports_mismatch_for_permuted_points() {
        let record = run_golden(Some(vec![2, 1, 3, 4, 5, 6, 7, 8, 9]), None).unwrap();
        assert!(!record.passed);
        let col = record.checks.iter().find(|c| c.name == "csa_inv column 1").unwrap();
        assert!(!col.passed);
        assert!(col.mismatches[0].starts_with("entry ("));
    }

    #[test]
    fn verify_privacy_rejects_oversized_instances() {
        let config = RunConfig {
            n: 13,
            b: 3,
            strategy: StrategyChoice::One(Strategy::LeakMask),
            trials: 10,
            ..RunConfig::default()
        };
        assert!(matches!(
            verify_privacy(&config, default_ceiling()),
            Err(HarnessError::Oracle(OracleError::EnumerationTooLarge { .. }))
        ));
    }

    #[test]
    fn verify_privacy_on_tiny_instance() {
        let config = RunConfig {
            n: 5,
            b: 1,
            k: 1,
            strategy: StrategyChoice::One(Strategy::CoordinatedAffine),
            ..RunConfig::default()
        };
        let reports = verify_privacy(&config, default_ceiling()).unwrap();
        let names: Vec<&str> = reports.iter().map(|r| r.check.as_str()).collect();
        assert_eq!(names, ["query_privacy", "storage_security", "symmetric_privacy", "correctness"]);
        assert!(reports.iter().all(|r| r.passed()), "{reports:?}");
    }
}
