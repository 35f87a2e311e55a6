//! Wire encoding of the over-the-air messages, used by the harness
//! transcript and the replayable scenario format.
//!
//! Every record is `[length: u16 BE][type: u8][payload]`, the length
//! covering the type byte and payload. Multi-bit payload fields are
//! big-endian; `n`-bit values are packed MSB-first (first keystream bit in
//! the top bit of the first byte) and zero-padded to a byte boundary.
//!
//! * type 1, query: 2-byte word
//! * type 2, tag response: packed `n`-bit response, then the 2-byte nonce
//! * type 3, step-5 value: packed `n`-bit value

use thiserror::Error;

use super::{BitsN, TagResponse};

pub const TYPE_QUERY: u8 = 1;
pub const TYPE_TAG_RESPONSE: u8 = 2;
pub const TYPE_NONCE3: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WireMessage {
    Query(u16),
    TagResponse(TagResponse),
    Nonce3(BitsN),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("record truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("unknown record type {0}")]
    UnknownType(u8),
    #[error("record length {got} does not match the {expected} expected for this type")]
    LengthMismatch { expected: usize, got: usize },
    #[error("padding bits past the {n}-bit field are not zero")]
    DirtyPadding { n: usize },
}

/// Packs an n-bit value MSB-first, zero-padded to a whole byte.
pub fn pack_msb(bits: &BitsN) -> Vec<u8> {
    let n = bits.len();
    let mut out = vec![0u8; n.div_ceil(8)];
    for j in 0..n {
        if bits.bit(j) {
            out[j / 8] |= 1 << (7 - j % 8);
        }
    }
    out
}

/// Inverse of [`pack_msb`]; rejects nonzero padding bits.
pub fn unpack_msb(bytes: &[u8], n: usize) -> Result<BitsN, WireError> {
    let expected = n.div_ceil(8);
    if bytes.len() != expected {
        return Err(WireError::LengthMismatch {
            expected,
            got: bytes.len(),
        });
    }
    let mut value = 0u64;
    for j in 0..n {
        if (bytes[j / 8] >> (7 - j % 8)) & 1 == 1 {
            value |= 1 << j;
        }
    }
    for pad in n..expected * 8 {
        if (bytes[pad / 8] >> (7 - pad % 8)) & 1 == 1 {
            return Err(WireError::DirtyPadding { n });
        }
    }
    Ok(BitsN::new(value, n).expect("n validated by caller"))
}

/// Encodes one record.
pub fn encode(msg: &WireMessage) -> Vec<u8> {
    let (ty, payload): (u8, Vec<u8>) = match msg {
        WireMessage::Query(q) => (TYPE_QUERY, q.to_be_bytes().to_vec()),
        WireMessage::TagResponse(r) => {
            let mut p = pack_msb(&r.response);
            p.extend_from_slice(&r.nonce1.to_be_bytes());
            (TYPE_TAG_RESPONSE, p)
        }
        WireMessage::Nonce3(b) => (TYPE_NONCE3, pack_msb(b)),
    };
    let mut out = Vec::with_capacity(3 + payload.len());
    out.extend_from_slice(&((payload.len() + 1) as u16).to_be_bytes());
    out.push(ty);
    out.extend_from_slice(&payload);
    out
}

/// Decodes one record; `nonce_bits` fixes the expected width of the n-bit
/// fields. Returns the message and the bytes consumed.
pub fn decode(bytes: &[u8], nonce_bits: usize) -> Result<(WireMessage, usize), WireError> {
    if bytes.len() < 3 {
        return Err(WireError::Truncated {
            need: 3,
            have: bytes.len(),
        });
    }
    let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    if bytes.len() < 2 + len {
        return Err(WireError::Truncated {
            need: 2 + len,
            have: bytes.len(),
        });
    }
    if len == 0 {
        return Err(WireError::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    let ty = bytes[2];
    let payload = &bytes[3..2 + len];
    let resp_bytes = nonce_bits.div_ceil(8);
    let msg = match ty {
        TYPE_QUERY => {
            if payload.len() != 2 {
                return Err(WireError::LengthMismatch {
                    expected: 2,
                    got: payload.len(),
                });
            }
            WireMessage::Query(u16::from_be_bytes([payload[0], payload[1]]))
        }
        TYPE_TAG_RESPONSE => {
            if payload.len() != resp_bytes + 2 {
                return Err(WireError::LengthMismatch {
                    expected: resp_bytes + 2,
                    got: payload.len(),
                });
            }
            let response = unpack_msb(&payload[..resp_bytes], nonce_bits)?;
            let nonce1 = u16::from_be_bytes([payload[resp_bytes], payload[resp_bytes + 1]]);
            WireMessage::TagResponse(TagResponse { response, nonce1 })
        }
        TYPE_NONCE3 => {
            if payload.len() != resp_bytes {
                return Err(WireError::LengthMismatch {
                    expected: resp_bytes,
                    got: payload.len(),
                });
            }
            WireMessage::Nonce3(unpack_msb(payload, nonce_bits)?)
        }
        other => return Err(WireError::UnknownType(other)),
    };
    Ok((msg, 2 + len))
}
