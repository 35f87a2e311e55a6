//! EPC Gen2 CRC-16: polynomial `x^16 + x^12 + x^5 + 1`, preset 0xFFFF,
//! complemented output, no bit reflection. Bits are processed
//! most-significant-first within each byte.
//!
//! The checksum is linear, so it detects transmission errors (all single and
//! double errors, bursts up to 16 bits) but offers no cryptographic
//! integrity; the server only uses it as a collision-search accelerator.

/// CRC parameters kept as data so tests can disable the preset and the
/// output complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcParams {
    pub polynomial: u16,
    pub initial: u16,
    pub final_xor: u16,
}

/// The Gen2 parameter set.
pub const GEN2_CRC: CrcParams = CrcParams {
    polynomial: 0x1021,
    initial: 0xFFFF,
    final_xor: 0xFFFF,
};

impl Default for CrcParams {
    fn default() -> Self {
        GEN2_CRC
    }
}

/// Bitwise long-division remainder over `data` under `params`.
pub fn crc16_with_params(data: &[u8], params: CrcParams) -> u16 {
    let mut crc = params.initial;
    for &byte in data {
        for k in (0..8).rev() {
            let bit = (byte >> k) & 1;
            let top = (crc >> 15) as u8 & 1;
            crc <<= 1;
            if top ^ bit == 1 {
                crc ^= params.polynomial;
            }
        }
    }
    crc ^ params.final_xor
}

/// Gen2 CRC-16 of `data`.
pub fn crc16_compute(data: &[u8]) -> u16 {
    crc16_with_params(data, GEN2_CRC)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Crc16Error {
    #[error("input of {0} bytes is shorter than the 2-byte checksum")]
    TooShort(usize),
}

/// Checks a message whose last two bytes are its big-endian CRC.
pub fn crc16_verify(data_with_crc: &[u8]) -> Result<bool, Crc16Error> {
    let n = data_with_crc.len();
    if n < 2 {
        return Err(Crc16Error::TooShort(n));
    }
    let (payload, tail) = data_with_crc.split_at(n - 2);
    let stored = u16::from_be_bytes([tail[0], tail[1]]);
    Ok(crc16_compute(payload) == stored)
}

/// Appends the big-endian CRC to a payload.
pub fn crc16_append(payload: &[u8]) -> Vec<u8> {
    let mut out = payload.to_vec();
    out.extend_from_slice(&crc16_compute(payload).to_be_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent table-driven implementation used only as a test oracle.
    fn crc16_table_oracle(data: &[u8]) -> u16 {
        let mut table = [0u16; 256];
        for (b, entry) in table.iter_mut().enumerate() {
            let mut r = (b as u16) << 8;
            for _ in 0..8 {
                r = if r & 0x8000 != 0 {
                    (r << 1) ^ 0x1021
                } else {
                    r << 1
                };
            }
            *entry = r;
        }
        let mut crc = 0xFFFFu16;
        for &byte in data {
            crc = (crc << 8) ^ table[((crc >> 8) ^ u16::from(byte)) as usize & 0xFF];
        }
        crc ^ 0xFFFF
    }

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    #[test]
    fn empty_input_gives_zero() {
        // register never moves off the preset; complemented to zero
        assert_eq!(crc16_compute(b""), 0x0000);
        assert!(crc16_verify(&[0x00, 0x00]).unwrap());
    }

    #[test]
    fn published_check_value() {
        assert_eq!(crc16_compute(b"123456789"), 0xD64E);
        assert_eq!(crc16_table_oracle(b"123456789"), 0xD64E);
    }

    #[test]
    fn bitwise_agrees_with_table_oracle() {
        let mut rng = 0xD1CEu64;
        for len in 0..64 {
            let msg: Vec<u8> = (0..len).map(|_| xorshift(&mut rng) as u8).collect();
            assert_eq!(crc16_compute(&msg), crc16_table_oracle(&msg));
        }
    }

    #[test]
    fn verify_roundtrip_and_rejection() {
        let msg = b"inventory round";
        let framed = crc16_append(msg);
        assert!(crc16_verify(&framed).unwrap());

        let mut corrupt = framed.clone();
        corrupt[3] ^= 0x10;
        assert!(!crc16_verify(&corrupt).unwrap());

        assert_eq!(crc16_verify(&[0xAB]), Err(Crc16Error::TooShort(1)));
    }

    #[test]
    fn all_single_bit_errors_detected() {
        let mut rng = 0xFEED_FACEu64;
        let msg: Vec<u8> = (0..64).map(|_| xorshift(&mut rng) as u8).collect();
        let crc = crc16_compute(&msg);
        for byte in 0..64 {
            for bit in 0..8 {
                let mut bad = msg.clone();
                bad[byte] ^= 1 << bit;
                assert_ne!(crc16_compute(&bad), crc, "missed flip {byte}.{bit}");
            }
        }
    }

    #[test]
    fn burst_errors_up_to_16_bits_detected() {
        let mut rng = 0xB00B_5EEDu64;
        for _ in 0..10_000 {
            let msg: Vec<u8> = (0..64).map(|_| xorshift(&mut rng) as u8).collect();
            let crc = crc16_compute(&msg);
            // contiguous burst of 1..=16 bits at a random bit offset, with
            // nonzero pattern anchored at both ends
            let width = 1 + (xorshift(&mut rng) % 16) as u32;
            let start = (xorshift(&mut rng) % (512 - u64::from(width))) as u32;
            let mut pattern = xorshift(&mut rng) & ((1u64 << width) - 1);
            pattern |= 1 | (1 << (width - 1));
            let mut bad = msg.clone();
            for k in 0..width {
                if (pattern >> k) & 1 == 1 {
                    let pos = start + k;
                    bad[pos as usize / 8] ^= 1 << (7 - pos % 8);
                }
            }
            assert_ne!(crc16_compute(&bad), crc, "missed burst");
        }
    }

    #[test]
    fn affine_structure_over_equal_length_messages() {
        // crc(a) ^ crc(b) ^ crc(0) = crc(a ^ b)
        let mut rng = 0xA5A5_5A5Au64;
        for len in [1usize, 7, 32, 64] {
            let a: Vec<u8> = (0..len).map(|_| xorshift(&mut rng) as u8).collect();
            let b: Vec<u8> = (0..len).map(|_| xorshift(&mut rng) as u8).collect();
            let zeros = vec![0u8; len];
            let x: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            assert_eq!(
                crc16_compute(&a) ^ crc16_compute(&b) ^ crc16_compute(&zeros),
                crc16_compute(&x)
            );
        }
    }

    #[test]
    fn parameters_are_data() {
        // bare remainder (no preset, no complement) of the empty message
        let bare = CrcParams {
            polynomial: 0x1021,
            initial: 0x0000,
            final_xor: 0x0000,
        };
        assert_eq!(crc16_with_params(b"", bare), 0x0000);
        assert_ne!(crc16_with_params(b"123456789", bare), 0xD64E);
    }
}
