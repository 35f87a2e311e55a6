//! The degree-7 nonlinear filter function and exhaustive Boolean-function
//! analysis (truth table, Walsh spectrum, algebraic normal form).
//!
//! The filter is fixed: a single linear term plus 24 products of successive
//! disjoint cells, one block of `floor(16/i)` terms for each order
//! `i = 2..=7`. The analysis here measures — rather than assumes — its
//! balancedness, correlation immunity and nonlinearity; the measured profile
//! is what the reports and the acceptance checks pin down.

use serde::Serialize;

/// Variable masks of the 25 canonical monomials; bit `k` of a mask selects
/// variable `x_k`. A monomial evaluates to the AND of its variables and the
/// function is the XOR of all monomials.
pub const FILTER_MONOMIALS: [u16; 25] = [
    // linear
    0x0040, // x6
    // order 2
    0x0003, 0x000C, 0x0030, 0x00C0, 0x0300, 0x0C00, 0x3000, 0xC000,
    // order 3
    0x0007, 0x0038, 0x01C0, 0x0E00, 0x7000,
    // order 4
    0x000F, 0x00F0, 0x0F00, 0xF000,
    // order 5
    0x001F, 0x03E0, 0x7C00,
    // order 6
    0x003F, 0x0FC0,
    // order 7
    0x007F, 0x3F80,
];

/// A Boolean function of 16 variables in algebraic normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterFunction {
    monomials: Vec<u16>,
}

impl FilterFunction {
    /// The fixed generator filter (25 monomials, degree 7).
    pub fn gen2() -> Self {
        Self {
            monomials: FILTER_MONOMIALS.to_vec(),
        }
    }

    /// A function from an arbitrary monomial list (analysis support).
    pub fn from_monomials(monomials: Vec<u16>) -> Self {
        Self { monomials }
    }

    pub fn monomials(&self) -> &[u16] {
        &self.monomials
    }

    /// Evaluates at `x`, variable `x_k` read from bit `k`.
    pub fn eval(&self, x: u16) -> bool {
        self.monomials
            .iter()
            .fold(false, |acc, &m| acc ^ (x & m == m))
    }
}

/// Evaluates the fixed filter at `x`. Equivalent to
/// `FilterFunction::gen2().eval(x)` without constructing the function.
pub fn filter_eval(x: u16) -> bool {
    FILTER_MONOMIALS
        .iter()
        .fold(false, |acc, &m| acc ^ (x & m == m))
}

/// All 65536 outputs of a 16-variable function, indexed by the input word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    words: Vec<u64>, // 1024 words, bit (i % 64) of word (i / 64) = f(i)
}

pub const TABLE_LEN: usize = 1 << 16;

impl TruthTable {
    pub fn get(&self, x: u16) -> bool {
        let i = x as usize;
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of ones.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// Tabulates `f` over all 65536 inputs.
pub fn truth_table(f: &FilterFunction) -> TruthTable {
    let mut words = vec![0u64; TABLE_LEN / 64];
    for x in 0..TABLE_LEN {
        if f.eval(x as u16) {
            words[x / 64] |= 1 << (x % 64);
        }
    }
    TruthTable { words }
}

/// Walsh spectrum `W(a) = sum_x (-1)^(f(x) ^ <a,x>)` for all 65536 masks,
/// computed with the fast in-place butterfly transform.
pub fn walsh_spectrum(table: &TruthTable) -> Vec<i32> {
    let mut w: Vec<i32> = (0..TABLE_LEN)
        .map(|x| if table.get(x as u16) { -1 } else { 1 })
        .collect();
    let mut h = 1;
    while h < TABLE_LEN {
        let mut base = 0;
        while base < TABLE_LEN {
            for i in base..base + h {
                let (a, b) = (w[i], w[i + h]);
                w[i] = a + b;
                w[i + h] = a - b;
            }
            base += 2 * h;
        }
        h *= 2;
    }
    w
}

/// Algebraic normal form of a truth table: the sorted list of monomial
/// masks with nonzero coefficient (binary Möbius transform).
pub fn anf_monomials(table: &TruthTable) -> Vec<u16> {
    let mut t: Vec<u8> = (0..TABLE_LEN).map(|x| table.get(x as u16) as u8).collect();
    for bit in 0..16 {
        let step = 1usize << bit;
        let mut base = 0;
        while base < TABLE_LEN {
            for i in base..base + step {
                t[i + step] ^= t[i];
            }
            base += 2 * step;
        }
    }
    (0..TABLE_LEN)
        .filter(|&i| t[i] == 1)
        .map(|i| i as u16)
        .collect()
}

/// Measured cryptographic profile of a filter function.
///
/// Serializes with the report field names (`degree`, `ci_order`,
/// `resiliency`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterProfile {
    /// Ones in the truth table (32768 = balanced).
    pub weight: u32,
    /// Maximum degree over the ANF monomials.
    #[serde(rename = "degree")]
    pub algebraic_degree: u32,
    /// `2^15 - max|W|/2`.
    pub nonlinearity: u32,
    /// Largest `m` with `W(a) = 0` for all masks of Hamming weight `1..=m`.
    #[serde(rename = "ci_order")]
    pub correlation_immunity_order: u32,
    /// CI order if balanced, otherwise -1.
    #[serde(rename = "resiliency")]
    pub resiliency_order: i32,
    /// Whether `sum W(a)^2 == 2^32` held exactly.
    pub parseval_ok: bool,
}

/// Exhaustive profile of `f`: truth table, Walsh spectrum and ANF in one
/// pass over the 2^16 input space.
pub fn analyze_filter(f: &FilterFunction) -> FilterProfile {
    let table = truth_table(f);
    let spectrum = walsh_spectrum(&table);
    profile_from_parts(&table, &spectrum, &anf_monomials(&table))
}

pub(crate) fn profile_from_parts(
    table: &TruthTable,
    spectrum: &[i32],
    anf: &[u16],
) -> FilterProfile {
    let parseval: i64 = spectrum.iter().map(|&w| i64::from(w) * i64::from(w)).sum();
    let max_abs = spectrum.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    let mut ci = 0u32;
    for order in 1..=16u32 {
        let clean = (0..TABLE_LEN as u32)
            .filter(|a| a.count_ones() == order)
            .all(|a| spectrum[a as usize] == 0);
        if clean {
            ci = order;
        } else {
            break;
        }
    }
    let weight = table.weight();
    FilterProfile {
        weight,
        algebraic_degree: anf.iter().map(|m| m.count_ones()).max().unwrap_or(0),
        nonlinearity: (1 << 15) - max_abs / 2,
        correlation_immunity_order: ci,
        resiliency_order: if weight == 32768 { ci as i32 } else { -1 },
        parseval_ok: parseval == 1i64 << 32,
    }
}
