//! Per-node random bit streams and assignments of streams to identifiers.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::graph::NodeId;

/// Default per-node, per-run cap on consumed bits.
pub const DEFAULT_BIT_CAP: usize = 1 << 20;

/// An unbounded (or explicitly bounded) sequence of bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BitStream {
    /// Pseudorandom bits keyed by `(seed, id)`: ChaCha8 with the seed as key
    /// and the identifier as stream number.
    Seeded { seed: u64, id: NodeId },
    /// A fixed prefix followed by `pad` forever.
    Padded { prefix: Vec<bool>, pad: bool },
    /// Exactly these bits; reading past the end exceeds the bit budget.
    Finite(Vec<bool>),
}

enum Source {
    Rng { rng: Box<ChaCha8Rng>, word: u64, left: u32 },
    Padded { prefix: Vec<bool>, pad: bool },
    Finite(Vec<bool>),
}

/// Reads a [`BitStream`] on demand, enforcing a safety cap.
pub struct BitReader {
    id: NodeId,
    source: Source,
    consumed: usize,
    cap: usize,
}

impl BitReader {
    pub fn new(id: NodeId, stream: BitStream, cap: usize) -> Self {
        let source = match stream {
            BitStream::Seeded { seed, id } => {
                let mut key = [0u8; 32];
                key[..8].copy_from_slice(&seed.to_le_bytes());
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(id);
                Source::Rng { rng: Box::new(rng), word: 0, left: 0 }
            }
            BitStream::Padded { prefix, pad } => Source::Padded { prefix, pad },
            BitStream::Finite(bits) => Source::Finite(bits),
        };
        BitReader {
            id,
            source,
            consumed: 0,
            cap,
        }
    }

    /// A reader that refuses every read; used for bit-free programs.
    pub fn empty(id: NodeId) -> Self {
        BitReader::new(id, BitStream::Finite(Vec::new()), 0)
    }

    pub fn next_bit(&mut self) -> Result<bool, SimError> {
        if self.consumed >= self.cap {
            return Err(SimError::BitCapExceeded { id: self.id, cap: self.cap });
        }
        let i = self.consumed;
        let bit = match &mut self.source {
            Source::Rng { rng, word, left } => {
                if *left == 0 {
                    *word = rng.next_u64();
                    *left = 64;
                }
                let b = *word & 1 == 1;
                *word >>= 1;
                *left -= 1;
                b
            }
            Source::Padded { prefix, pad } => prefix.get(i).copied().unwrap_or(*pad),
            Source::Finite(bits) => match bits.get(i) {
                Some(&b) => b,
                None => {
                    return Err(SimError::BitBudgetExceeded {
                        id: self.id,
                        budget: bits.len(),
                    })
                }
            },
        };
        self.consumed += 1;
        Ok(bit)
    }

    /// Reads `k` bits as an unsigned integer, first bit most significant.
    pub fn next_bits(&mut self, k: usize) -> Result<u64, SimError> {
        let mut x = 0u64;
        for _ in 0..k {
            x = x << 1 | self.next_bit()? as u64;
        }
        Ok(x)
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }
}

/// A function `f` from identifiers to bit streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RandomAssignment {
    /// `f(id) = Seeded { seed, id }`, total on all identifiers.
    Seeded(u64),
    Explicit(BTreeMap<NodeId, BitStream>),
}

impl RandomAssignment {
    pub fn stream_for(&self, id: NodeId) -> Result<BitStream, SimError> {
        match self {
            RandomAssignment::Seeded(seed) => Ok(BitStream::Seeded { seed: *seed, id }),
            RandomAssignment::Explicit(map) => map.get(&id).cloned().ok_or(SimError::UnknownIdentifier(id)),
        }
    }

    /// Every identifier maps to the same padded stream.
    pub fn constant(ids: impl IntoIterator<Item = NodeId>, prefix: Vec<bool>, pad: bool) -> Self {
        RandomAssignment::Explicit(
            ids.into_iter()
                .map(|id| {
                    (
                        id,
                        BitStream::Padded {
                            prefix: prefix.clone(),
                            pad,
                        },
                    )
                })
                .collect(),
        )
    }
}

/// A bounded assignment `f: ids -> {0,1}^b`, the finite search space for
/// good-assignment search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedAssignment {
    pub bits: usize,
    pub values: BTreeMap<NodeId, Vec<bool>>,
}

impl BoundedAssignment {
    /// The `index`-th assignment in lexicographic order: identifiers
    /// ascending, the first identifier's bit vector most significant, each
    /// vector read first-bit-most-significant.
    pub fn from_index(ids: &[NodeId], bits: usize, index: u128) -> Self {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        let k = sorted.len();
        let values = sorted
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                let shift = (k - 1 - i) * bits;
                let chunk = index >> shift;
                let v = (0..bits).map(|j| chunk >> (bits - 1 - j) & 1 == 1).collect();
                (id, v)
            })
            .collect();
        BoundedAssignment { bits, values }
    }

    pub fn to_assignment(&self) -> RandomAssignment {
        RandomAssignment::Explicit(
            self.values
                .iter()
                .map(|(&id, v)| (id, BitStream::Finite(v.clone())))
                .collect(),
        )
    }
}
