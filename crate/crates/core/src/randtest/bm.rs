//! Berlekamp–Massey LFSR synthesis over GF(2).

use std::fmt;

use crate::bits::BitVec;

/// Connection polynomial `c(x) = 1 + c_1 x + ... + c_L x^L` of the shortest
/// register found; bit `k` of the word storage is the coefficient of `x^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionPoly {
    words: Vec<u64>,
    degree: usize,
}

impl ConnectionPoly {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: usize) -> bool {
        k / 64 < self.words.len() && (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    /// Coefficient mask for small polynomials (degree <= 31), bit `k` =
    /// coefficient of `x^k`. Matches the register module's mask convention.
    pub fn mask_u32(&self) -> Option<u32> {
        if self.degree <= 31 {
            Some(self.words.first().copied().unwrap_or(1) as u32)
        } else {
            None
        }
    }

    fn from_words(mut words: Vec<u64>) -> Self {
        while words.len() > 1 && *words.last().unwrap() == 0 {
            words.pop();
        }
        let top = words.last().copied().unwrap_or(0);
        let degree = if top == 0 {
            0
        } else {
            (words.len() - 1) * 64 + (63 - top.leading_zeros() as usize)
        };
        Self { words, degree }
    }
}

impl fmt::Display for ConnectionPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in 0..=self.degree {
            if self.coeff(k) {
                if !first {
                    write!(f, " + ")?;
                }
                if k == 0 {
                    write!(f, "1")?;
                } else {
                    write!(f, "x^{k}")?;
                }
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Result of LFSR synthesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmResult {
    /// Length of the shortest register generating the sequence.
    pub linear_complexity: usize,
    pub connection: ConnectionPoly,
}

/// `dst ^= src << shift` over word vectors, growing `dst` as needed.
fn xor_shifted(dst: &mut Vec<u64>, src: &[u64], shift: usize) {
    let word_shift = shift / 64;
    let bit_shift = shift % 64;
    let needed = src.len() + word_shift + 1;
    if dst.len() < needed {
        dst.resize(needed, 0);
    }
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        dst[i + word_shift] ^= w << bit_shift;
        if bit_shift != 0 {
            dst[i + word_shift + 1] ^= w >> (64 - bit_shift);
        }
    }
}

/// Finds the shortest LFSR generating `seq`.
///
/// The discrepancy at each step is a word-parallel dot product between the
/// candidate polynomial and the reversed sequence prefix, which is
/// maintained incrementally by shifting; the whole synthesis is
/// `O(n^2 / 64)` word operations.
///
/// In builds with debug assertions the returned register is replayed over
/// the input and must regenerate it exactly.
pub fn berlekamp_massey(seq: &BitVec) -> BmResult {
    let n = seq.len();
    let mut c: Vec<u64> = vec![1];
    let mut b: Vec<u64> = vec![1];
    let mut l = 0usize;
    let mut last_change: i64 = -1;
    // rev bit j = seq[t - j]; shifted left one place each step
    let mut rev: Vec<u64> = Vec::with_capacity(n / 64 + 1);
    for t in 0..n {
        if t % 64 == 0 {
            rev.push(0);
        }
        for i in (1..rev.len()).rev() {
            rev[i] = (rev[i] << 1) | (rev[i - 1] >> 63);
        }
        rev[0] = (rev[0] << 1) | u64::from(seq.get(t));

        let mut acc = 0u64;
        for i in 0..c.len().min(rev.len()) {
            acc ^= c[i] & rev[i];
        }
        if acc.count_ones() & 1 == 1 {
            let previous = c.clone();
            xor_shifted(&mut c, &b, (t as i64 - last_change) as usize);
            if 2 * l <= t {
                l = t + 1 - l;
                last_change = t as i64;
                b = previous;
            }
        }
    }
    let result = BmResult {
        linear_complexity: l,
        connection: ConnectionPoly::from_words(c),
    };
    #[cfg(debug_assertions)]
    assert_replays(seq, &result);
    result
}

/// Replay check: with the first `L` bits as initial state, the synthesized
/// recurrence must regenerate the whole input. Equivalent to every
/// discrepancy of the final polynomial vanishing from position `L` on.
#[cfg(debug_assertions)]
fn assert_replays(seq: &BitVec, result: &BmResult) {
    let l = result.linear_complexity;
    let c = &result.connection;
    let mut rev: Vec<u64> = Vec::with_capacity(seq.len() / 64 + 1);
    for t in 0..seq.len() {
        if t % 64 == 0 {
            rev.push(0);
        }
        for i in (1..rev.len()).rev() {
            rev[i] = (rev[i] << 1) | (rev[i - 1] >> 63);
        }
        rev[0] = (rev[0] << 1) | u64::from(seq.get(t));
        if t < l {
            continue;
        }
        let acc = c
            .words
            .iter()
            .zip(&rev)
            .fold(0u64, |acc, (cw, rw)| acc ^ (cw & rw));
        assert_eq!(
            acc.count_ones() & 1,
            0,
            "synthesized register fails to regenerate bit {t}"
        );
    }
}
