//! The three Gen2 randomness criteria, measured and reported:
//!
//! 1. every 16-bit word value's pooled frequency must sit in
//!    `[0.8/2^16, 1.25/2^16]`;
//! 2. no two of 10,000 distinct seeds may produce colliding 64-bit output
//!    prefixes;
//! 3. (prediction proxy) the lag-1 serial correlation of the word series
//!    must stay below a configured bound.
//!
//! The report records measured values and margins; it never adjusts them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::serial::{serial_correlation_series, SerialCorrelation};
use super::RandTestError;
use crate::prng::Prng;

/// Fixed default sampling seed so reports are reproducible run to run.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x4745_4E32_0001;

#[derive(Debug, Clone, Copy)]
pub struct EpcConfig {
    /// Seeds pooled for the word histogram.
    pub seed_sample_size: usize,
    /// Words generated per seed for the histogram.
    pub words_per_seed: usize,
    /// Distinct seeds checked for output-prefix collisions.
    pub collision_seeds: usize,
    /// Bound on the absolute lag-1 correlation of the word series.
    pub correlation_bound: f64,
    /// RNG seed for drawing the PRNG seed samples.
    pub sample_seed: u64,
}

impl Default for EpcConfig {
    fn default() -> Self {
        Self {
            seed_sample_size: 1024,
            words_per_seed: 1024,
            collision_seeds: 10_000,
            correlation_bound: 0.01,
            sample_seed: DEFAULT_SAMPLE_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpcCriterion1 {
    pub pass: bool,
    pub total_words: u64,
    /// Word values that occurred at all (65536 possible).
    pub distinct_values: u32,
    pub min_count: u64,
    pub max_count: u64,
    /// Count bounds implied by the frequency interval.
    pub lo_bound: f64,
    pub hi_bound: f64,
    pub values_below_floor: u32,
    pub values_above_ceiling: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpcCriterion2 {
    pub pass: bool,
    pub seeds: u32,
    pub prefix_bits: u32,
    /// Pairs of seeds with identical prefixes.
    pub colliding_pairs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpcCriterion3 {
    pub pass: bool,
    pub bound: f64,
    /// Worst absolute lag-1 correlation of the 16-bit word series.
    pub word_series_max_abs: f64,
    /// Worst absolute lag-1 correlation of the raw bit stream, for
    /// comparison.
    pub bit_stream_max_abs: f64,
    pub seeds: u32,
    pub words_per_seed: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpcReport {
    pub criterion1: EpcCriterion1,
    pub criterion2: EpcCriterion2,
    pub criterion3: EpcCriterion3,
    pub all_pass: bool,
}

/// Seeds examined by the prediction proxy.
const CORRELATION_SEEDS: usize = 16;
/// Words per seed examined by the prediction proxy; long enough that the
/// estimate is dominated by the generator, not sampling noise.
const CORRELATION_WORDS: usize = 1 << 16;

fn draw_distinct_seeds(count: usize, rng: &mut ChaCha8Rng) -> Vec<u16> {
    let mut all: Vec<u16> = (1..=u16::MAX).collect();
    all.shuffle(rng);
    all.truncate(count);
    all
}

/// Measures the three criteria over deterministic seed samples.
pub fn epc_criteria_report(config: &EpcConfig) -> Result<EpcReport, RandTestError> {
    let total_words = config.seed_sample_size as u64 * config.words_per_seed as u64;
    if config.seed_sample_size == 0 || total_words < 65_536 {
        return Err(RandTestError::InsufficientSample(format!(
            "word histogram needs at least 65536 pooled words (2^16 values), got {total_words}"
        )));
    }
    if !(2..=65_535).contains(&config.collision_seeds) {
        return Err(RandTestError::InsufficientSample(format!(
            "collision check needs 2..=65535 distinct seeds, got {}",
            config.collision_seeds
        )));
    }

    // criterion 1: pooled word histogram
    let mut rng = ChaCha8Rng::seed_from_u64(config.sample_seed);
    let seeds = draw_distinct_seeds(config.seed_sample_size, &mut rng);
    let mut histogram = vec![0u64; 1 << 16];
    for &seed in &seeds {
        let mut g = Prng::new(seed);
        for _ in 0..config.words_per_seed {
            histogram[g.next_word() as usize] += 1;
        }
    }
    let lo = 0.8 / 65536.0 * total_words as f64;
    let hi = 1.25 / 65536.0 * total_words as f64;
    let min_count = *histogram.iter().min().unwrap();
    let max_count = *histogram.iter().max().unwrap();
    let values_below = histogram.iter().filter(|&&c| (c as f64) < lo).count() as u32;
    let values_above = histogram.iter().filter(|&&c| (c as f64) > hi).count() as u32;
    let criterion1 = EpcCriterion1 {
        pass: values_below == 0 && values_above == 0,
        total_words,
        distinct_values: histogram.iter().filter(|&&c| c > 0).count() as u32,
        min_count,
        max_count,
        lo_bound: lo,
        hi_bound: hi,
        values_below_floor: values_below,
        values_above_ceiling: values_above,
    };

    // criterion 2: 64-bit output prefixes of distinct seeds
    let mut rng = ChaCha8Rng::seed_from_u64(config.sample_seed ^ 0x0002);
    let seeds = draw_distinct_seeds(config.collision_seeds, &mut rng);
    let mut prefixes: Vec<u64> = seeds
        .iter()
        .map(|&seed| {
            let mut g = Prng::new(seed);
            let mut p = 0u64;
            for k in 0..64 {
                if g.next_bit() {
                    p |= 1 << k;
                }
            }
            p
        })
        .collect();
    prefixes.sort_unstable();
    let mut colliding_pairs = 0u64;
    let mut run = 1u64;
    for i in 1..prefixes.len() {
        if prefixes[i] == prefixes[i - 1] {
            run += 1;
        } else {
            colliding_pairs += run * (run - 1) / 2;
            run = 1;
        }
    }
    colliding_pairs += run * (run - 1) / 2;
    let criterion2 = EpcCriterion2 {
        pass: colliding_pairs == 0,
        seeds: config.collision_seeds as u32,
        prefix_bits: 64,
        colliding_pairs,
    };

    // criterion 3: lag-1 correlation of the word series (prediction proxy)
    let mut rng = ChaCha8Rng::seed_from_u64(config.sample_seed ^ 0x0003);
    let seeds = draw_distinct_seeds(CORRELATION_SEEDS, &mut rng);
    let mut word_worst: f64 = 0.0;
    let mut bit_worst: f64 = 0.0;
    for &seed in &seeds {
        let mut g = Prng::new(seed);
        let words: Vec<f64> = (0..CORRELATION_WORDS)
            .map(|_| f64::from(g.next_word()))
            .collect();
        let SerialCorrelation { coefficient, .. } = serial_correlation_series(&words);
        word_worst = word_worst.max(coefficient.abs());

        let bits = crate::prng::prng_keystream(seed, CORRELATION_WORDS * 16);
        let r = super::serial::serial_correlation(&bits).expect("length checked");
        bit_worst = bit_worst.max(r.coefficient.abs());
    }
    let criterion3 = EpcCriterion3 {
        pass: word_worst < config.correlation_bound,
        bound: config.correlation_bound,
        word_series_max_abs: word_worst,
        bit_stream_max_abs: bit_worst,
        seeds: CORRELATION_SEEDS as u32,
        words_per_seed: CORRELATION_WORDS as u32,
    };

    let all_pass = criterion1.pass && criterion2.pass && criterion3.pass;
    Ok(EpcReport {
        criterion1,
        criterion2,
        criterion3,
        all_pass,
    })
}
