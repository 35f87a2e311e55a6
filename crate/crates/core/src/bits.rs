//! Compact bit sequences, least-significant-bit-first within each word.

/// A growable bit sequence packed into `u64` words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. All keystreams and
/// test inputs in this crate use this type; the packing order matches the
/// generator's word convention (bit 0 first).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// # Panics
    /// If `i >= len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range ({})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn as_words(&self) -> &[u64] {
        &self.words
    }

    /// Packs into bytes, 8 bits per byte LSB-first, final byte zero-padded.
    pub fn to_lsb_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    /// Renders as an ASCII string of `0`/`1` characters, bit 0 first.
    pub fn to_01_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Parses an ASCII `0`/`1` string; whitespace is ignored.
    pub fn from_01_str(s: &str) -> Result<Self, ParseBitsError> {
        let mut v = Self::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => v.push(false),
                '1' => v.push(true),
                c if c.is_whitespace() => {}
                c => return Err(ParseBitsError { pos, ch: c }),
            }
        }
        Ok(v)
    }
}

impl FromIterator<bool> for BitVec {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = Self::new();
        for b in iter {
            v.push(b);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit character {ch:?} at position {pos}")]
pub struct ParseBitsError {
    pub pos: usize,
    pub ch: char,
}
