//! Statistical validation battery: the five classic tests, serial
//! correlation, Berlekamp–Massey, period measurement, the Gen2 criteria and
//! multi-seed aggregation.

mod bm;
mod epc;
mod golomb;
mod period;
mod serial;

pub use bm::{berlekamp_massey, BmResult, ConnectionPoly};
pub use epc::{
    epc_criteria_report, EpcConfig, EpcCriterion1, EpcCriterion2, EpcCriterion3, EpcReport,
    DEFAULT_SAMPLE_SEED,
};
pub use golomb::{
    autocorrelation_test, frequency_test, golomb_test, poker_test, runs_tests, serial_test,
    TestKind, TestParams, TestResult, DEFAULT_MAX_SHIFT, DEFAULT_POKER_BLOCK,
    DEFAULT_SERIAL_BLOCK,
};
pub use period::measure_period;
pub use serial::{serial_correlation, serial_correlation_series, SerialCorrelation};

use rayon::prelude::*;
use serde::Serialize;

use crate::prng::prng_keystream;

/// Upper 5% chi-square critical values for every degrees-of-freedom value
/// the battery can request, embedded so reports are bit-exact with no
/// numerical dependency.
pub const CHI2_95: [(usize, f64); 13] = [
    (1, 3.841458820694124),
    (2, 5.991464547107979),
    (3, 7.814727903251179),
    (4, 9.487729036781154),
    (6, 12.591587243743977),
    (7, 14.067140449340169),
    (8, 15.50731305586545),
    (15, 24.995790139728616),
    (16, 26.29622760486423),
    (31, 44.98534328036513),
    (63, 82.5287265414718),
    (127, 154.30151616535022),
    (255, 293.2478350807012),
];

/// Two-sided 5% normal threshold used by the autocorrelation test.
pub const Z_975: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RandTestError {
    #[error("{kind:?} needs at least {required} bits, got {actual}")]
    SequenceTooShort {
        kind: TestKind,
        required: usize,
        actual: usize,
    },
    #[error("unsupported significance level {0}; only alpha = 0.05 is tabulated")]
    UnsupportedAlpha(f64),
    #[error("{kind:?} block length {requested} outside supported {min}..={max}")]
    UnsupportedBlockLen {
        kind: TestKind,
        requested: usize,
        min: usize,
        max: usize,
    },
    #[error("no chi-square critical value tabulated for {0} degrees of freedom")]
    UntabulatedDegrees(usize),
    #[error("seed list is empty")]
    NoSeeds,
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
}

/// Per-test pass counts over a seed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct BatteryCounts {
    pub frequency: usize,
    pub serial: usize,
    pub poker: usize,
    pub runs_short: usize,
    pub runs_long: usize,
    pub autocorrelation: usize,
}

/// Per-test pass percentages over a seed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryPercentages {
    pub frequency: f64,
    pub serial: f64,
    pub poker: f64,
    pub runs_short: f64,
    pub runs_long: f64,
    pub autocorrelation: f64,
}

/// Aggregate outcome of running the five tests over many seeds.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub seed_count: usize,
    pub bits_per_seed: usize,
    pub alpha: f64,
    pub pass_counts: BatteryCounts,
    pub pass_percent: BatteryPercentages,
}

/// Runs the whole battery on each seed's first `bits_per_seed` output bits
/// and aggregates pass percentages. Seeds are processed in parallel; the
/// aggregation is a commutative sum, so the report is deterministic.
pub fn battery_over_seeds(
    seeds: &[u16],
    bits_per_seed: usize,
    alpha: f64,
) -> Result<BatteryReport, RandTestError> {
    if seeds.is_empty() {
        return Err(RandTestError::NoSeeds);
    }
    // fail fast on lengths the block tests would reject
    let probe = prng_keystream(seeds[0], bits_per_seed.min(2048));
    if probe.len() < 100 << DEFAULT_POKER_BLOCK {
        return Err(RandTestError::SequenceTooShort {
            kind: TestKind::Poker,
            required: 100 << DEFAULT_POKER_BLOCK,
            actual: bits_per_seed,
        });
    }
    golomb::check_alpha(alpha)?;

    let counts = seeds
        .par_iter()
        .map(|&seed| {
            let bits = prng_keystream(seed, bits_per_seed);
            let freq = frequency_test(&bits, alpha).expect("length checked");
            let ser = serial_test(&bits, DEFAULT_SERIAL_BLOCK, alpha).expect("length checked");
            let pok = poker_test(&bits, DEFAULT_POKER_BLOCK, alpha).expect("length checked");
            let (rs, rl) = runs_tests(&bits, alpha).expect("length checked");
            let ac = autocorrelation_test(&bits, DEFAULT_MAX_SHIFT, alpha).expect("length checked");
            BatteryCounts {
                frequency: freq.pass as usize,
                serial: ser.pass as usize,
                poker: pok.pass as usize,
                runs_short: rs.pass as usize,
                runs_long: rl.pass as usize,
                autocorrelation: ac.pass as usize,
            }
        })
        .reduce(BatteryCounts::default, |a, b| BatteryCounts {
            frequency: a.frequency + b.frequency,
            serial: a.serial + b.serial,
            poker: a.poker + b.poker,
            runs_short: a.runs_short + b.runs_short,
            runs_long: a.runs_long + b.runs_long,
            autocorrelation: a.autocorrelation + b.autocorrelation,
        });

    let pct = |c: usize| 100.0 * c as f64 / seeds.len() as f64;
    Ok(BatteryReport {
        seed_count: seeds.len(),
        bits_per_seed,
        alpha,
        pass_counts: counts,
        pass_percent: BatteryPercentages {
            frequency: pct(counts.frequency),
            serial: pct(counts.serial),
            poker: pct(counts.poker),
            runs_short: pct(counts.runs_short),
            runs_long: pct(counts.runs_long),
            autocorrelation: pct(counts.autocorrelation),
        },
    })
}

/// The deterministic 1024-seed sample used by desk-scale battery reports:
/// seeds `1 + 64k` for `k = 0..1024`, an even stride across the nonzero
/// seed space.
pub fn stride_seed_sample() -> Vec<u16> {
    (0..1024u32).map(|k| (1 + 64 * k) as u16).collect()
}
