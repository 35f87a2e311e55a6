//! Mutual authentication and session-key establishment between tag, reader
//! and back-end server.
//!
//! One authentication is five steps: the reader issues a random 16-bit
//! query; the tag answers with the XOR of the last `n` bits of two
//! keystreams (seeded with `id ^ query` and `ssk ^ query`) plus a fresh
//! 16-bit nonce; the reader forwards both to the server, which scans its
//! keystore for the unique credential pair producing that answer; on a
//! unique match the server hands the reader the session key `id ^ ssk` and
//! the analogous response to the tag's nonce, and rotates the stored
//! credentials; the tag accepts only if that value matches its own
//! computation and then rotates too. Credentials never travel: the reader
//! sees queries, responses, nonces and the session key, nothing else.

pub mod wire;

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitVec;
use crate::crc16::crc16_compute;
use crate::prng::{keystream_tail, prng_keystream, update_credential};

/// Default response/nonce length in bits.
pub const DEFAULT_NONCE_BITS: usize = 16;

/// Maximum supported response/nonce length.
pub const MAX_NONCE_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("nonce length {0} outside the supported range 1..=64")]
    NonceLenOutOfRange(usize),
    #[error("value {value:#x} does not fit in {n} bits")]
    ValueTooWide { value: u64, n: usize },
    #[error("no authentication is pending on this tag")]
    NoPendingAuthentication,
    #[error("tag credentials with id == ssk answer every query with zeros")]
    DegenerateCredentials,
}

/// An `n`-bit value (1..=64), bit `j` = the `j`-th keystream-order bit.
/// Carries tag responses and the server's step-4 value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitsN {
    value: u64,
    n: u8,
}

impl BitsN {
    pub fn new(value: u64, n: usize) -> Result<Self, ProtocolError> {
        if !(1..=MAX_NONCE_BITS).contains(&n) {
            return Err(ProtocolError::NonceLenOutOfRange(n));
        }
        if n < 64 && value >> n != 0 {
            return Err(ProtocolError::ValueTooWide { value, n });
        }
        Ok(Self { value, n: n as u8 })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> usize {
        usize::from(self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.len());
        (self.value >> j) & 1 == 1
    }

    /// Copy with bit `j` flipped (tamper-model helper).
    pub fn with_bit_flipped(&self, j: usize) -> Self {
        assert!(j < self.len());
        Self {
            value: self.value ^ (1 << j),
            n: self.n,
        }
    }
}

/// Per-tag secret pair and rotation epoch, mirrored by tag and server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TagCredentials {
    pub id: u16,
    pub ssk: u16,
    pub epoch: u64,
}

impl TagCredentials {
    pub fn new(id: u16, ssk: u16) -> Self {
        Self { id, ssk, epoch: 0 }
    }

    /// Both halves rotated through the generator, epoch advanced.
    fn rotated(self) -> Self {
        Self {
            id: update_credential(self.id),
            ssk: update_credential(self.ssk),
            epoch: self.epoch + 1,
        }
    }
}

/// Source of queries and nonces. Implementations live in the harness; test
/// setups substitute a counter for reproducibility.
pub trait EntropySource {
    fn next_u16(&mut self) -> u16;
}

/// Step 1: the reader's fresh 16-bit query.
pub fn reader_begin(entropy: &mut dyn EntropySource) -> u16 {
    entropy.next_u16()
}

/// The challenge-response core: XOR of the last `n` bits of the two
/// `(16+n)`-bit keystreams seeded with `id ^ x` and `ssk ^ x`.
///
/// Symmetric in `id` and `ssk`, and identically zero when `id == ssk`;
/// registration rejects such pairs.
pub fn compute_response(id: u16, ssk: u16, x: u16, n: usize) -> Result<BitsN, ProtocolError> {
    if !(1..=MAX_NONCE_BITS).contains(&n) {
        return Err(ProtocolError::NonceLenOutOfRange(n));
    }
    let tail = keystream_tail(id ^ x, n) ^ keystream_tail(ssk ^ x, n);
    BitsN::new(tail, n)
}

/// Step-2 message: the response bits and the tag's fresh nonce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagResponse {
    pub response: BitsN,
    pub nonce1: u16,
}

/// Step-4 verdict from the keystore scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No stored pair explains the response: possible fraud attempt.
    NoMatch,
    /// Exactly one pair matched; the server rotated it and derived the
    /// session key and the answer to the tag's nonce.
    Unique { session_key: u16, nonce3: BitsN },
    /// More than one pair matched; nothing changed, restart from step 1.
    Ambiguous,
}

/// Step-5 outcome on the tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalizeOutcome {
    Accept { session_key: u16 },
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PendingAuth {
    query: u16,
    nonce1: u16,
    expected_nonce3: BitsN,
}

/// The tag's side of the protocol: credentials plus at most one pending
/// authentication.
#[derive(Debug, Clone)]
pub struct TagState {
    credentials: TagCredentials,
    nonce_bits: usize,
    pending: Option<PendingAuth>,
}

impl TagState {
    /// Provisions a tag. Rejects `id == ssk` (the response would be
    /// identically zero and the session key 0).
    pub fn new(credentials: TagCredentials, nonce_bits: usize) -> Result<Self, ProtocolError> {
        if !(1..=MAX_NONCE_BITS).contains(&nonce_bits) {
            return Err(ProtocolError::NonceLenOutOfRange(nonce_bits));
        }
        if credentials.id == credentials.ssk {
            return Err(ProtocolError::DegenerateCredentials);
        }
        Ok(Self {
            credentials,
            nonce_bits,
            pending: None,
        })
    }

    pub fn credentials(&self) -> TagCredentials {
        self.credentials
    }

    pub fn nonce_bits(&self) -> usize {
        self.nonce_bits
    }

    pub fn has_pending(&self) -> bool {
        self.pending.is_some()
    }

    /// Step 2: answer a query and remember what step 5 must deliver.
    /// Any previously pending authentication is abandoned.
    pub fn respond(&mut self, query: u16, entropy: &mut dyn EntropySource) -> TagResponse {
        let c = self.credentials;
        let n = self.nonce_bits;
        let response = compute_response(c.id, c.ssk, query, n).expect("nonce_bits validated");
        let nonce1 = entropy.next_u16();
        let expected_nonce3 =
            compute_response(c.id, c.ssk, nonce1, n).expect("nonce_bits validated");
        self.pending = Some(PendingAuth {
            query,
            nonce1,
            expected_nonce3,
        });
        TagResponse { response, nonce1 }
    }

    /// Step 5: strict comparison against the expected value. Acceptance
    /// rotates the credentials; rejection leaves them untouched. Either way
    /// the pending slot is cleared.
    pub fn finalize(&mut self, nonce3: BitsN) -> Result<FinalizeOutcome, ProtocolError> {
        let pending = self
            .pending
            .take()
            .ok_or(ProtocolError::NoPendingAuthentication)?;
        if nonce3 == pending.expected_nonce3 {
            let session_key = self.credentials.id ^ self.credentials.ssk;
            self.credentials = self.credentials.rotated();
            Ok(FinalizeOutcome::Accept { session_key })
        } else {
            Ok(FinalizeOutcome::Reject)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistrationError {
    #[error("label {0:?} already registered")]
    DuplicateLabel(String),
    #[error("tag {0:?} has id == ssk; its responses would be identically zero")]
    IdEqualsSsk(String),
    #[error("tag {label:?} shares the unordered credential pair of {existing:?}")]
    DuplicateCredentialPair { label: String, existing: String },
}

/// The server's credential database: label -> credentials, with the
/// registration invariants that keep the scan unambiguous among honest
/// tags (no id == ssk, no two entries with the same unordered pair).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServerKeystore {
    entries: BTreeMap<String, TagCredentials>,
}

impl ServerKeystore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        label: &str,
        credentials: TagCredentials,
    ) -> Result<(), RegistrationError> {
        if self.entries.contains_key(label) {
            return Err(RegistrationError::DuplicateLabel(label.to_owned()));
        }
        if credentials.id == credentials.ssk {
            return Err(RegistrationError::IdEqualsSsk(label.to_owned()));
        }
        let pair = unordered(credentials.id, credentials.ssk);
        if let Some((existing, _)) = self
            .entries
            .iter()
            .find(|(_, c)| unordered(c.id, c.ssk) == pair)
        {
            return Err(RegistrationError::DuplicateCredentialPair {
                label: label.to_owned(),
                existing: existing.clone(),
            });
        }
        self.entries.insert(label.to_owned(), credentials);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&TagCredentials> {
        self.entries.get(label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &TagCredentials)> {
        self.entries.iter().map(|(l, c)| (l.as_str(), c))
    }

    /// Labels whose stored pair reproduces the response for this query.
    /// Pure scan; no state change.
    pub fn matching_labels(&self, query: u16, response: &BitsN) -> Vec<&str> {
        let n = response.len();
        self.entries
            .iter()
            .filter(|(_, c)| {
                compute_response(c.id, c.ssk, query, n).expect("validated n") == *response
            })
            .map(|(l, _)| l.as_str())
            .collect()
    }

    fn resolve_unique(&mut self, label: String, nonce1: u16, n: usize) -> Verdict {
        let creds = self.entries.get_mut(&label).expect("label from scan");
        let session_key = creds.id ^ creds.ssk;
        let nonce3 = compute_response(creds.id, creds.ssk, nonce1, n).expect("validated n");
        *creds = creds.rotated();
        Verdict::Unique {
            session_key,
            nonce3,
        }
    }
}

fn unordered(a: u16, b: u16) -> (u16, u16) {
    (a.min(b), a.max(b))
}

/// Steps 3-4: scan every stored pair against the response. Exactly one
/// match rotates that entry and yields the session key and step-5 value;
/// zero or several matches change nothing.
pub fn server_verify(ks: &mut ServerKeystore, query: u16, r: &TagResponse) -> Verdict {
    let labels = ks.matching_labels(query, &r.response);
    match labels.len() {
        0 => Verdict::NoMatch,
        1 => {
            let label = labels[0].to_owned();
            ks.resolve_unique(label, r.nonce1, r.response.len())
        }
        _ => Verdict::Ambiguous,
    }
}

/// [`server_verify`] with the CRC-16 collision-search accelerator: entries
/// are bucketed by the checksum of their expected response and only the
/// matching bucket is compared bit-for-bit. Verdicts are identical to the
/// plain scan.
pub fn server_verify_crc_accelerated(
    ks: &mut ServerKeystore,
    query: u16,
    r: &TagResponse,
) -> Verdict {
    let n = r.response.len();
    let mut buckets: HashMap<u16, Vec<(&str, BitsN)>> = HashMap::new();
    for (label, c) in ks.entries.iter() {
        let expected = compute_response(c.id, c.ssk, query, n).expect("validated n");
        buckets
            .entry(crc16_compute(&wire::pack_msb(&expected)))
            .or_default()
            .push((label.as_str(), expected));
    }
    let key = crc16_compute(&wire::pack_msb(&r.response));
    let labels: Vec<String> = buckets
        .get(&key)
        .map(|bucket| {
            bucket
                .iter()
                .filter(|(_, expected)| *expected == r.response)
                .map(|(l, _)| (*l).to_owned())
                .collect()
        })
        .unwrap_or_default();
    match labels.len() {
        0 => Verdict::NoMatch,
        1 => ks.resolve_unique(labels.into_iter().next().unwrap(), r.nonce1, n),
        _ => Verdict::Ambiguous,
    }
}

/// Session layer: both sides seed the generator with the established key
/// `K = id ^ ssk` and XOR the keystream over their traffic.
pub fn session_keystream(session_key: u16, nbits: usize) -> BitVec {
    prng_keystream(session_key, nbits)
}

/// XOR a byte buffer with the session keystream (8 bits per byte,
/// LSB-first). Encryption and decryption are the same operation.
pub fn session_encrypt(session_key: u16, data: &[u8]) -> Vec<u8> {
    let ks = session_keystream(session_key, data.len() * 8).to_lsb_bytes();
    data.iter().zip(ks).map(|(d, k)| d ^ k).collect()
}
