//! The 16-bit maximum-length linear feedback shift register driving the
//! generator.
//!
//! The register cells hold the sliding window `s_j..s_{j+15}` of the
//! recurrence `s_{j+16} = s_{j+14} ^ s_{j+9} ^ s_{j+7} ^ s_j`; cell 0 is the
//! oldest symbol and is emitted on every clock, fresh bits enter at cell 15.
//! With the primitive feedback polynomial `1 + x^2 + x^7 + x^9 + x^16` the
//! state cycles through all 65535 nonzero values.

use crate::bits::BitVec;

/// Register length in cells.
pub const LFSR_LEN: usize = 16;

/// State-cycle length for a primitive degree-16 feedback polynomial.
pub const LFSR_PERIOD: usize = (1 << LFSR_LEN) - 1;

/// Coefficient mask of the fixed feedback polynomial, bit `k` = coefficient
/// of `x^k`: `1 + x^2 + x^7 + x^9 + x^16`.
const C_MASK: u32 = (1 << 16) | (1 << 9) | (1 << 7) | (1 << 2) | 1;

/// The register: 16 ordered cells plus a clock counter.
///
/// Cell `k` is bit `k` of [`cells`](Self::cells); cell 0 is the output.
/// The all-zero state is a fixed point of the feedback and is never produced
/// by [`LfsrState::new`] (a zero seed is remapped to `0x0001` instead of
/// rejected, so callers that XOR secrets into seeds cannot leak through an
/// error path).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LfsrState {
    cells: u16,
    clock_count: u64,
}

impl LfsrState {
    /// Loads the register from a seed word, cell `k` = bit `k` of the seed.
    /// Seed `0x0000` is remapped to `0x0001`.
    pub fn new(seed: u16) -> Self {
        Self {
            cells: if seed == 0 { 0x0001 } else { seed },
            clock_count: 0,
        }
    }

    /// Loads the register without the zero-seed remap. Test support only;
    /// a zero state clocks to itself forever.
    #[cfg(test)]
    pub(crate) fn from_raw(cells: u16) -> Self {
        Self {
            cells,
            clock_count: 0,
        }
    }

    /// The cell contents as a word, bit `k` = cell `k`.
    pub fn cells(&self) -> u16 {
        self.cells
    }

    /// Single cell accessor.
    ///
    /// # Panics
    /// If `k >= 16`.
    pub fn cell(&self, k: usize) -> bool {
        assert!(k < LFSR_LEN);
        (self.cells >> k) & 1 == 1
    }

    /// Clocks applied since construction. Carries no semantics beyond
    /// decimation-rate bookkeeping.
    pub fn clock_count(&self) -> u64 {
        self.clock_count
    }

    /// Advances one step: emits cell 0, shifts every cell down one position
    /// and feeds the recurrence bit in at cell 15.
    pub fn clock(&mut self) -> bool {
        let s = self.cells;
        let out = s & 1;
        let fresh = ((s >> 14) ^ (s >> 9) ^ (s >> 7) ^ s) & 1;
        self.cells = (s >> 1) | (fresh << 15);
        self.clock_count += 1;
        out == 1
    }
}

/// The first `n` output bits of a register seeded with `seed`.
pub fn lfsr_run(seed: u16, n: usize) -> BitVec {
    let mut st = LfsrState::new(seed);
    let mut out = BitVec::with_capacity(n);
    for _ in 0..n {
        out.push(st.clock());
    }
    out
}

#[cfg(test)]
pub(crate) fn lfsr_run_raw(cells: u16, n: usize) -> BitVec {
    let mut st = LfsrState::from_raw(cells);
    let mut out = BitVec::with_capacity(n);
    for _ in 0..n {
        out.push(st.clock());
    }
    out
}

/// A degree-16 feedback polynomial over GF(2) with constant term 1,
/// stored as a coefficient mask (bit `k` = coefficient of `x^k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackPolynomial {
    mask: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolynomialError {
    #[error("feedback polynomial must have degree exactly 16, got {0}")]
    WrongDegree(u32),
    #[error("feedback polynomial must have constant term 1")]
    NoConstantTerm,
}

impl FeedbackPolynomial {
    /// Validates degree 16 and constant term 1.
    pub fn new(mask: u32) -> Result<Self, PolynomialError> {
        let degree = 31 - mask.leading_zeros();
        if mask == 0 || degree != 16 {
            return Err(PolynomialError::WrongDegree(if mask == 0 { 0 } else { degree }));
        }
        if mask & 1 == 0 {
            return Err(PolynomialError::NoConstantTerm);
        }
        Ok(Self { mask })
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn degree(&self) -> u32 {
        16
    }
}

impl Default for FeedbackPolynomial {
    /// The fixed register polynomial `1 + x^2 + x^7 + x^9 + x^16`.
    fn default() -> Self {
        Self { mask: C_MASK }
    }
}

/// True iff the multiplicative order of `x` modulo `poly` is `2^16 - 1`,
/// i.e. the polynomial is primitive: `x^65535 = 1` and `x^(65535/q) != 1`
/// for every prime factor `q` of `65535 = 3 * 5 * 17 * 257`.
pub fn poly_is_primitive(poly: &FeedbackPolynomial) -> bool {
    let m = poly.mask;
    if polymod_pow_x(65535, m) != 1 {
        return false;
    }
    [3u32, 5, 17, 257]
        .iter()
        .all(|q| polymod_pow_x(65535 / q, m) != 1)
}

/// `x^e mod m` over GF(2); operands fit in u32 (degree <= 16 modulus).
fn polymod_pow_x(e: u32, m: u32) -> u32 {
    let mut result = 1u32;
    let mut base = polymod_reduce(2, m);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = polymod_mul(result, base, m);
        }
        base = polymod_mul(base, base, m);
        e >>= 1;
    }
    result
}

fn polymod_reduce(mut a: u64, m: u32) -> u32 {
    let dm = 63 - u64::from(m).leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= u64::from(m) << (da - dm);
    }
    a as u32
}

fn polymod_mul(a: u32, b: u32, m: u32) -> u32 {
    let mut acc = 0u64;
    for k in 0..32 {
        if (b >> k) & 1 == 1 {
            acc ^= u64::from(a) << k;
        }
    }
    polymod_reduce(acc, m)
}
