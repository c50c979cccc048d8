//! Byzantine servers as deterministic functions of their pooled view.
//!
//! A coalition sees its own storage shares, query shares and mask shares,
//! plus a shared coordination stream `gamma`. Nothing else reaches a
//! strategy: `ByzantineView` is the only argument.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::AnswerVector;
use crate::field::Fp;
use crate::protocol::{honest_answer, MaskShare, QueryShare, StorageShare};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("{got} corrupted servers exceeds the bound B = {bound}")]
    TooManyCorrupted { got: usize, bound: usize },
    #[error("server index {index} out of range for {n} servers")]
    ServerOutOfRange { index: usize, n: usize },
    #[error("server {0} listed twice")]
    DuplicateServer(usize),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}

/// What one Byzantine server holds.
#[derive(Debug, Clone, Copy)]
pub struct ServerView<'a> {
    pub server: usize,
    pub storage: &'a StorageShare,
    pub query: &'a QueryShare,
    pub mask: &'a MaskShare,
}

impl ServerView<'_> {
    /// Every scalar the server holds, in a fixed order: storage, query, mask.
    fn scalars(&self) -> impl Iterator<Item = Fp> + '_ {
        let storage = self.storage.blocks.iter().flat_map(|b| b.iter().copied());
        let query = self.query.blocks.iter().flat_map(|b| b.iter().copied());
        storage.chain(query).chain(std::iter::once(self.mask.zhat))
    }
}

/// The coalition's pooled knowledge.
#[derive(Debug, Clone)]
pub struct ByzantineView<'a> {
    members: Vec<ServerView<'a>>,
    gamma: &'a [Fp],
}

impl<'a> ByzantineView<'a> {
    /// Picks the coalition's shares out of the full share lists.
    pub fn new(
        byz_set: &[usize],
        storages: &'a [StorageShare],
        queries: &'a [QueryShare],
        masks: &'a [MaskShare],
        gamma: &'a [Fp],
    ) -> Result<Self, AdversaryError> {
        let n = storages.len().min(queries.len()).min(masks.len());
        let mut members = Vec::with_capacity(byz_set.len());
        for (pos, &server) in byz_set.iter().enumerate() {
            if server >= n {
                return Err(AdversaryError::ServerOutOfRange { index: server, n });
            }
            if byz_set[..pos].contains(&server) {
                return Err(AdversaryError::DuplicateServer(server));
            }
            members.push(ServerView {
                server,
                storage: &storages[server],
                query: &queries[server],
                mask: &masks[server],
            });
        }
        Ok(Self { members, gamma })
    }

    pub fn members(&self) -> &[ServerView<'a>] {
        &self.members
    }

    pub fn byz_set(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.server).collect()
    }

    /// Coordination value for the `j`-th coalition member; the stream is
    /// reused cyclically and an empty stream reads as zero.
    pub fn gamma(&self, j: usize) -> Option<Fp> {
        (!self.gamma.is_empty()).then(|| self.gamma[j % self.gamma.len()])
    }

    fn pooled_scalars(&self) -> impl Iterator<Item = Fp> + '_ {
        self.members.iter().flat_map(|m| m.scalars())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Answer exactly as an honest server would.
    HonestCamouflage,
    /// Honest answer plus the coordination value.
    RandomNoise,
    /// The coordination value, ignoring the view.
    ConstantGarbage,
    /// First coordinate of the first query block.
    EchoQuery,
    /// The storage coordinate selected by the coordination value.
    ReplayStorage,
    /// The server's own mask share.
    LeakMask,
    /// A gamma-keyed affine function of every scalar the coalition holds.
    CoordinatedAffine,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::HonestCamouflage,
        Strategy::RandomNoise,
        Strategy::ConstantGarbage,
        Strategy::EchoQuery,
        Strategy::ReplayStorage,
        Strategy::LeakMask,
        Strategy::CoordinatedAffine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::HonestCamouflage => "honest_camouflage",
            Strategy::RandomNoise => "random_noise",
            Strategy::ConstantGarbage => "constant_garbage",
            Strategy::EchoQuery => "echo_query",
            Strategy::ReplayStorage => "replay_storage",
            Strategy::LeakMask => "leak_mask",
            Strategy::CoordinatedAffine => "coordinated_affine",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().replace('-', "_");
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == normalized)
            .ok_or_else(|| AdversaryError::UnknownStrategy(s.to_string()))
    }
}

/// One answer per coalition member, in coalition order.
pub fn byzantine_answers(strategy: Strategy, view: &ByzantineView<'_>) -> Vec<(usize, Fp)> {
    view.members
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let field = m.mask.zhat.field();
            let gamma = view.gamma(j).unwrap_or_else(|| field.zero());
            let honest = || honest_answer(m.storage, m.query, m.mask).expect("coalition shares are well formed");
            let answer = match strategy {
                Strategy::HonestCamouflage => honest(),
                Strategy::RandomNoise => honest() + gamma,
                Strategy::ConstantGarbage => gamma,
                Strategy::EchoQuery => m.query.blocks[0][0],
                Strategy::ReplayStorage => {
                    let width = m.storage.blocks[0].len();
                    let total = width * m.storage.blocks.len();
                    let at = (gamma.value() % total as u64) as usize;
                    m.storage.blocks[at / width][at % width]
                }
                Strategy::LeakMask => m.mask.zhat,
                Strategy::CoordinatedAffine => {
                    let base = gamma + field.elem(j as u64 + 1);
                    let mut coefficient = base;
                    let mut acc = gamma;
                    for x in view.pooled_scalars() {
                        acc += coefficient * x;
                        coefficient *= base;
                    }
                    acc
                }
            };
            (m.server, answer)
        })
        .collect()
}

/// Replaces the honest answers at the Byzantine positions.
pub fn corrupt_answers(
    honest: &AnswerVector,
    byz: &[(usize, Fp)],
    bound: usize,
) -> Result<AnswerVector, AdversaryError> {
    if byz.len() > bound {
        return Err(AdversaryError::TooManyCorrupted {
            got: byz.len(),
            bound,
        });
    }
    let mut out = honest.clone();
    for (pos, &(server, value)) in byz.iter().enumerate() {
        if server >= honest.len() {
            return Err(AdversaryError::ServerOutOfRange {
                index: server,
                n: honest.len(),
            });
        }
        if byz[..pos].iter().any(|&(s, _)| s == server) {
            return Err(AdversaryError::DuplicateServer(server));
        }
        out.set(server, value);
    }
    Ok(out)
}
