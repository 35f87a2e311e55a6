//! The classic five-test battery: frequency, serial, poker, runs (short and
//! long runs scored separately) and autocorrelation, each a chi-square or
//! normal test at significance 0.05.

use serde::Serialize;

use super::{RandTestError, CHI2_95, Z_975};
use crate::bits::BitVec;

/// Which test to run. The runs test is split: short runs score the
/// per-length chi-square over lengths 1..=4, long runs score the aggregated
/// count of runs of length >= 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Frequency,
    Serial,
    Poker,
    RunsShort,
    RunsLong,
    Autocorrelation,
}

/// Optional parameter overrides; `None` selects the conventional defaults
/// (serial m = 2, poker m = 4, autocorrelation shifts 1..=8).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TestParams {
    /// Pattern/block length for the serial and poker tests.
    pub block_len: Option<usize>,
    /// Largest shift examined by the autocorrelation test.
    pub max_shift: Option<usize>,
}

pub const DEFAULT_SERIAL_BLOCK: usize = 2;
pub const DEFAULT_POKER_BLOCK: usize = 4;
pub const DEFAULT_MAX_SHIFT: usize = 8;

/// One test verdict: the statistic, the acceptance threshold it was held
/// against and the resulting pass flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub kind: TestKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_shift: Option<usize>,
    pub alpha: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub(super) fn check_alpha(alpha: f64) -> Result<(), RandTestError> {
    if (alpha - 0.05).abs() > 1e-12 {
        return Err(RandTestError::UnsupportedAlpha(alpha));
    }
    Ok(())
}

fn require_len(seq: &BitVec, kind: TestKind, required: usize) -> Result<(), RandTestError> {
    if seq.len() < required {
        return Err(RandTestError::SequenceTooShort {
            kind,
            required,
            actual: seq.len(),
        });
    }
    Ok(())
}

fn chi2_threshold(df: usize) -> Result<f64, RandTestError> {
    CHI2_95
        .iter()
        .find(|(d, _)| *d == df)
        .map(|(_, t)| *t)
        .ok_or(RandTestError::UntabulatedDegrees(df))
}

/// Runs one of the five tests at significance `alpha` (0.05 only).
pub fn golomb_test(
    seq: &BitVec,
    kind: TestKind,
    params: TestParams,
    alpha: f64,
) -> Result<TestResult, RandTestError> {
    check_alpha(alpha)?;
    match kind {
        TestKind::Frequency => frequency_test(seq, alpha),
        TestKind::Serial => serial_test(seq, params.block_len.unwrap_or(DEFAULT_SERIAL_BLOCK), alpha),
        TestKind::Poker => poker_test(seq, params.block_len.unwrap_or(DEFAULT_POKER_BLOCK), alpha),
        TestKind::RunsShort => Ok(runs_tests(seq, alpha)?.0),
        TestKind::RunsLong => Ok(runs_tests(seq, alpha)?.1),
        TestKind::Autocorrelation => {
            autocorrelation_test(seq, params.max_shift.unwrap_or(DEFAULT_MAX_SHIFT), alpha)
        }
    }
}

/// Closeness of the proportion of ones to 1/2: `(n0 - n1)^2 / n`, one
/// degree of freedom.
pub fn frequency_test(seq: &BitVec, alpha: f64) -> Result<TestResult, RandTestError> {
    check_alpha(alpha)?;
    require_len(seq, TestKind::Frequency, 100)?;
    let n = seq.len() as f64;
    let ones = seq.ones() as f64;
    let diff = n - 2.0 * ones;
    let statistic = diff * diff / n;
    let threshold = chi2_threshold(1)?;
    Ok(TestResult {
        kind: TestKind::Frequency,
        block_len: None,
        max_shift: None,
        alpha,
        statistic,
        threshold,
        pass: statistic <= threshold,
    })
}

fn overlapping_counts(seq: &BitVec, m: usize) -> Vec<u64> {
    let n = seq.len();
    let mut counts = vec![0u64; 1 << m];
    if n < m {
        return counts;
    }
    let mut window = 0usize;
    for i in 0..n {
        window = (window >> 1) | ((seq.get(i) as usize) << (m - 1));
        if i + 1 >= m {
            counts[window] += 1;
        }
    }
    counts
}

fn psi_squared(counts: &[u64], windows: usize) -> f64 {
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    counts.len() as f64 / windows as f64 * sum_sq - windows as f64
}

/// Uniformity of overlapping m-bit patterns: the psi-square difference
/// `psi2(m) - psi2(m-1)`, `2^(m-1)` degrees of freedom. For m = 2 this is
/// the familiar two-bit test.
pub fn serial_test(seq: &BitVec, m: usize, alpha: f64) -> Result<TestResult, RandTestError> {
    check_alpha(alpha)?;
    if !(2..=5).contains(&m) {
        return Err(RandTestError::UnsupportedBlockLen {
            kind: TestKind::Serial,
            requested: m,
            min: 2,
            max: 5,
        });
    }
    require_len(seq, TestKind::Serial, 100 << m)?;
    let n = seq.len();
    let cm = overlapping_counts(seq, m);
    let cm1 = overlapping_counts(seq, m - 1);
    let statistic = psi_squared(&cm, n - m + 1) - psi_squared(&cm1, n - m + 2);
    let threshold = chi2_threshold(1 << (m - 1))?;
    Ok(TestResult {
        kind: TestKind::Serial,
        block_len: Some(m),
        max_shift: None,
        alpha,
        statistic,
        threshold,
        pass: statistic <= threshold,
    })
}

/// Uniformity of disjoint m-bit blocks: `2^m/k * sum c^2 - k` over
/// `k = floor(n/m)` blocks, `2^m - 1` degrees of freedom.
pub fn poker_test(seq: &BitVec, m: usize, alpha: f64) -> Result<TestResult, RandTestError> {
    check_alpha(alpha)?;
    if !(2..=8).contains(&m) {
        return Err(RandTestError::UnsupportedBlockLen {
            kind: TestKind::Poker,
            requested: m,
            min: 2,
            max: 8,
        });
    }
    require_len(seq, TestKind::Poker, 100 << m)?;
    let k = seq.len() / m;
    let mut counts = vec![0u64; 1 << m];
    for block in 0..k {
        let mut v = 0usize;
        for j in 0..m {
            v |= (seq.get(block * m + j) as usize) << j;
        }
        counts[v] += 1;
    }
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    let kf = k as f64;
    let statistic = (1u64 << m) as f64 / kf * sum_sq - kf;
    let threshold = chi2_threshold((1 << m) - 1)?;
    Ok(TestResult {
        kind: TestKind::Poker,
        block_len: Some(m),
        max_shift: None,
        alpha,
        statistic,
        threshold,
        pass: statistic <= threshold,
    })
}

/// Both runs verdicts in one pass: short runs (lengths 1..=4, chi-square
/// against `e_i = (n - i + 3) / 2^(i+2)` for runs of ones and of zeros, six
/// degrees of freedom) and long runs (counts of runs of length >= 5 against
/// their aggregate expectation, two degrees of freedom).
pub fn runs_tests(seq: &BitVec, alpha: f64) -> Result<(TestResult, TestResult), RandTestError> {
    check_alpha(alpha)?;
    require_len(seq, TestKind::RunsShort, 400)?;
    let n = seq.len();
    // slot 0..=3 for lengths 1..=4, slot 4 aggregates >= 5
    let mut ones_runs = [0u64; 5];
    let mut zeros_runs = [0u64; 5];
    let mut current = seq.get(0);
    let mut len = 1usize;
    for i in 1..n {
        let bit = seq.get(i);
        if bit == current {
            len += 1;
        } else {
            let slot = len.min(5) - 1;
            if current {
                ones_runs[slot] += 1;
            } else {
                zeros_runs[slot] += 1;
            }
            current = bit;
            len = 1;
        }
    }
    let slot = len.min(5) - 1;
    if current {
        ones_runs[slot] += 1;
    } else {
        zeros_runs[slot] += 1;
    }

    let nf = n as f64;
    let expected = |i: usize| (nf - i as f64 + 3.0) / 2f64.powi(i as i32 + 2);
    let mut short_stat = 0.0;
    for i in 1..=4usize {
        let e = expected(i);
        let b = ones_runs[i - 1] as f64;
        let g = zeros_runs[i - 1] as f64;
        short_stat += (b - e) * (b - e) / e + (g - e) * (g - e) / e;
    }
    let mut e_long = 0.0;
    let mut i = 5usize;
    while i <= n {
        let term = expected(i);
        if term <= 0.0 || term < 1e-12 {
            break;
        }
        e_long += term;
        i += 1;
    }
    let bl = ones_runs[4] as f64;
    let gl = zeros_runs[4] as f64;
    let long_stat = (bl - e_long) * (bl - e_long) / e_long + (gl - e_long) * (gl - e_long) / e_long;

    let short_threshold = chi2_threshold(6)?;
    let long_threshold = chi2_threshold(2)?;
    Ok((
        TestResult {
            kind: TestKind::RunsShort,
            block_len: None,
            max_shift: None,
            alpha,
            statistic: short_stat,
            threshold: short_threshold,
            pass: short_stat <= short_threshold,
        },
        TestResult {
            kind: TestKind::RunsLong,
            block_len: None,
            max_shift: None,
            alpha,
            statistic: long_stat,
            threshold: long_threshold,
            pass: long_stat <= long_threshold,
        },
    ))
}

/// Distance count between the sequence and its d-shifted copy, for
/// positions `0..n-d`, computed across whole words.
fn shifted_distance(seq: &BitVec, d: usize) -> u64 {
    let n = seq.len();
    debug_assert!((1..64).contains(&d) && d < n);
    let limit = n - d;
    let words = seq.as_words();
    let mut acc = 0u64;
    let mut pos = 0usize;
    let mut wi = 0usize;
    while pos < limit {
        let cur = words[wi];
        let next = if wi + 1 < words.len() { words[wi + 1] } else { 0 };
        let mut x = cur ^ ((cur >> d) | (next << (64 - d)));
        let take = limit - pos;
        if take < 64 {
            x &= (1u64 << take) - 1;
        }
        acc += u64::from(x.count_ones());
        pos += 64;
        wi += 1;
    }
    acc
}

/// Correlation with shifted copies: `X(d) = 2(A(d) - (n-d)/2)/sqrt(n-d)`
/// for every shift `d = 1..=max_shift`; the recorded statistic is the worst
/// absolute deviation, held against the two-sided normal threshold.
pub fn autocorrelation_test(
    seq: &BitVec,
    max_shift: usize,
    alpha: f64,
) -> Result<TestResult, RandTestError> {
    check_alpha(alpha)?;
    if !(1..=63).contains(&max_shift) {
        return Err(RandTestError::UnsupportedBlockLen {
            kind: TestKind::Autocorrelation,
            requested: max_shift,
            min: 1,
            max: 63,
        });
    }
    require_len(seq, TestKind::Autocorrelation, max_shift + 100)?;
    let n = seq.len();
    let mut worst: f64 = 0.0;
    for d in 1..=max_shift {
        let a = shifted_distance(seq, d) as f64;
        let nd = (n - d) as f64;
        let x = 2.0 * (a - nd / 2.0) / nd.sqrt();
        if x.abs() > worst {
            worst = x.abs();
        }
    }
    Ok(TestResult {
        kind: TestKind::Autocorrelation,
        block_len: None,
        max_shift: Some(max_shift),
        alpha,
        statistic: worst,
        threshold: Z_975,
        pass: worst <= Z_975,
    })
}
