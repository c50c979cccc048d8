//! Byzantine-robust symmetric private information retrieval over GF(q).
//!
//! `N` servers each store a noisy share of all `K` messages; any `B` of them
//! may collude and answer arbitrarily. The user downloads one symbol per
//! server and recovers `L = N - 4B` symbols of the requested message while
//! learning nothing about the others, and the servers learn nothing about
//! which message was requested.
//!
//! Modules, bottom up:
//!
//! * [`field`], [`linalg`]: exact GF(q) arithmetic and Gauss-Jordan.
//! * [`params`], [`csa`]: public parameters and the Cauchy-Vandermonde
//!   answer matrix with its inverse.
//! * [`protocol`]: storage dealer, user queries, mask dealer, honest servers.
//! * [`adversary`]: Byzantine strategies over a confined view.
//! * [`decoder`]: candidate-set search that locates the corrupted servers.
//! * [`oracle`]: exhaustive, integer-exact privacy and correctness checks.
//! * [`harness`]: seeded trial campaigns, the worked nine-server check, JSON reports.

pub mod adversary;
pub mod csa;
pub mod decoder;
pub mod field;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod protocol;
pub mod ratio;

pub use adversary::{byzantine_answers, corrupt_answers, AdversaryError, ByzantineView, ServerView, Strategy};
pub use csa::{build_csa, CsaContext, CsaError};
pub use decoder::{
    consistency_check, decode, decode_with, split_consistency_check, AnswerVector, DecodeError, DecodeOptions,
    DecodeResult,
};
pub use field::{FieldError, Fp, PrimeField};
pub use harness::{
    derive_seed, emit_report, run_golden, run_trials, to_canonical_json, verify_privacy, GoldenCheck, GoldenRecord,
    HarnessError, Mode, RunConfig, StrategyBreakdown, StrategyChoice, TrialReport,
};
pub use linalg::{FMatrix, FVector};
pub use oracle::{CheckStatus, Mutation, OracleError, OracleReport};
pub use ratio::Ratio;
pub use params::{validate_params, ParamsError, PirParams};
pub use protocol::{
    deal_masks, encode_storage, generate_queries, honest_answer, honest_answers, mask_shares, DealerRandomness,
    MaskSecrets, MaskShare, MessageTable, NoiseGrid, ProtocolError, QueryShare, StorageShare, UserRandomness,
};
