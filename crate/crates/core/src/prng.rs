//! The complete generator: LFSR -> nonlinear filter -> irregular decimation
//! -> 4-bit output buffer, plus the credential-update primitive.
//!
//! On every clock the filter is evaluated on the pre-clock register contents
//! (variable `x_k` reads cell `k`) and the register's own output bit gates
//! the result: the filter bit is kept when the gate is 1 and discarded when
//! it is 0, so the generator emits 0.5 bit per clock on average. A small
//! FIFO smooths delivery; it changes timing, never content.

use std::sync::OnceLock;

use crate::bits::BitVec;
use crate::boolfn::{truth_table, FilterFunction, TruthTable};
use crate::lfsr::LfsrState;

/// Output buffer depth.
pub const BUFFER_LEN: usize = 4;

fn filter_table() -> &'static TruthTable {
    static TABLE: OnceLock<TruthTable> = OnceLock::new();
    TABLE.get_or_init(|| truth_table(&FilterFunction::gen2()))
}

/// The pseudo-random generator run by both the tag and the back-end server.
#[derive(Debug, Clone)]
pub struct Prng {
    state: LfsrState,
    /// FIFO bits, oldest at bit 0.
    buffer: u8,
    buffer_len: u8,
    capacity: u8,
    emitted: u64,
}

impl Prng {
    /// Fresh generator; the seed loads the register (zero remaps to 0x0001).
    pub fn new(seed: u16) -> Self {
        Self::with_buffer_capacity(seed, BUFFER_LEN)
    }

    /// Generator with a shrunken buffer (1..=4). The emitted stream is
    /// identical for every capacity; only delivery timing changes.
    pub fn with_buffer_capacity(seed: u16, capacity: usize) -> Self {
        assert!(
            (1..=BUFFER_LEN).contains(&capacity),
            "buffer capacity must be in 1..=4"
        );
        Self {
            state: LfsrState::new(seed),
            buffer: 0,
            buffer_len: 0,
            capacity: capacity as u8,
            emitted: 0,
        }
    }

    #[cfg(test)]
    pub(crate) fn from_state(state: LfsrState) -> Self {
        Self {
            state,
            buffer: 0,
            buffer_len: 0,
            capacity: BUFFER_LEN as u8,
            emitted: 0,
        }
    }

    /// LFSR clocks applied so far.
    pub fn clock_count(&self) -> u64 {
        self.state.clock_count()
    }

    /// Bits that passed the decimation gate so far.
    pub fn emitted_count(&self) -> u64 {
        self.emitted
    }

    pub fn state(&self) -> &LfsrState {
        &self.state
    }

    /// One decimation step: evaluate gate (cell 0) and filter on the current
    /// state, advance the register once, return the filter bit if the gate
    /// was 1.
    pub fn clock_once(&mut self) -> Option<bool> {
        let cells = self.state.cells();
        let gate = self.state.clock();
        if gate {
            self.emitted += 1;
            Some(filter_table().get(cells))
        } else {
            None
        }
    }

    /// Next output bit: pops the buffer, refilling it eagerly to capacity
    /// first when empty. Terminates for every reachable state because the
    /// gate stream is a maximum-length sequence.
    pub fn next_bit(&mut self) -> bool {
        if self.buffer_len == 0 {
            debug_assert_ne!(self.state.cells(), 0, "absorbing zero state");
            while self.buffer_len < self.capacity {
                if let Some(b) = self.clock_once() {
                    if b {
                        self.buffer |= 1 << self.buffer_len;
                    }
                    self.buffer_len += 1;
                }
            }
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.buffer_len -= 1;
        bit
    }

    /// Next 16 output bits packed LSB-first (bit `k` of the word is the
    /// `k`-th emitted bit).
    pub fn next_word(&mut self) -> u16 {
        let mut w = 0u16;
        for k in 0..16 {
            if self.next_bit() {
                w |= 1 << k;
            }
        }
        w
    }
}

/// First `nbits` output bits of a fresh generator seeded with `seed`.
pub fn prng_keystream(seed: u16, nbits: usize) -> BitVec {
    let mut g = Prng::new(seed);
    (0..nbits).map(|_| g.next_bit()).collect()
}

/// Keystream bits `16..16+n` packed LSB-first into a word. Allocation-free
/// hot path for response computation; `n <= 64`.
pub(crate) fn keystream_tail(seed: u16, n: usize) -> u64 {
    debug_assert!(n <= 64);
    let mut g = Prng::new(seed);
    for _ in 0..16 {
        g.next_bit();
    }
    let mut tail = 0u64;
    for k in 0..n {
        if g.next_bit() {
            tail |= 1 << k;
        }
    }
    tail
}

/// Credential rotation: the first output word of a fresh generator seeded
/// with the current value. Tag and server apply it independently and stay
/// synchronized by determinism.
pub fn update_credential(credential: u16) -> u16 {
    Prng::new(credential).next_word()
}
