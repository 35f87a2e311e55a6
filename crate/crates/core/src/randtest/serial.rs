//! Lag-1 serial correlation.

use serde::Serialize;

use super::RandTestError;
use crate::bits::BitVec;

/// Lag-1 correlation coefficient and a degeneracy marker for constant
/// input (zero variance), where the coefficient is defined as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SerialCorrelation {
    pub coefficient: f64,
    pub degenerate: bool,
}

/// Pearson correlation between a series and its one-step shift.
pub fn serial_correlation_series(series: &[f64]) -> SerialCorrelation {
    let pairs = series.len().saturating_sub(1);
    if pairs == 0 {
        return SerialCorrelation {
            coefficient: 0.0,
            degenerate: true,
        };
    }
    let m = pairs as f64;
    let a = &series[..pairs];
    let b = &series[1..];
    let mean_a = a.iter().sum::<f64>() / m;
    let mean_b = b.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..pairs {
        let da = a[i] - mean_a;
        let db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return SerialCorrelation {
            coefficient: 0.0,
            degenerate: true,
        };
    }
    SerialCorrelation {
        coefficient: cov / (var_a * var_b).sqrt(),
        degenerate: false,
    }
}

/// Lag-1 serial correlation of a bit sequence (bits as 0/1 reals).
/// Integer accumulation keeps the estimate exact up to the final division.
pub fn serial_correlation(seq: &BitVec) -> Result<SerialCorrelation, RandTestError> {
    let n = seq.len();
    if n < 2 {
        return Err(RandTestError::SequenceTooShort {
            kind: super::TestKind::Serial,
            required: 2,
            actual: n,
        });
    }
    let pairs = (n - 1) as u64;
    let mut s_a = 0u64; // ones among x[0..n-1]
    let mut s_b = 0u64; // ones among x[1..n]
    let mut s_ab = 0u64; // positions with x[i] & x[i+1]
    let mut prev = seq.get(0);
    for i in 1..n {
        let cur = seq.get(i);
        s_a += u64::from(prev);
        s_b += u64::from(cur);
        s_ab += u64::from(prev & cur);
        prev = cur;
    }
    let m = pairs as f64;
    let mean_a = s_a as f64 / m;
    let mean_b = s_b as f64 / m;
    let cov = s_ab as f64 / m - mean_a * mean_b;
    let var_a = mean_a * (1.0 - mean_a);
    let var_b = mean_b * (1.0 - mean_b);
    if var_a <= 0.0 || var_b <= 0.0 {
        return Ok(SerialCorrelation {
            coefficient: 0.0,
            degenerate: true,
        });
    }
    Ok(SerialCorrelation {
        coefficient: cov / (var_a * var_b).sqrt(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_is_minus_one() {
        let seq: BitVec = (0..10_000).map(|i| i % 2 == 1).collect();
        let r = serial_correlation(&seq).unwrap();
        assert!((r.coefficient + 1.0).abs() < 1e-3, "{}", r.coefficient);
        assert!(!r.degenerate);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let seq: BitVec = (0..1000).map(|_| true).collect();
        let r = serial_correlation(&seq).unwrap();
        assert_eq!(r.coefficient, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn too_short_input_is_an_error() {
        let seq: BitVec = [true].into_iter().collect();
        assert!(serial_correlation(&seq).is_err());
    }

    #[test]
    fn generator_output_is_nearly_uncorrelated() {
        let bits = crate::prng::prng_keystream(0xBEEF, 1_000_000);
        let r = serial_correlation(&bits).unwrap();
        assert!(r.coefficient.abs() < 0.01, "{}", r.coefficient);
    }

    #[test]
    fn bit_and_series_paths_agree() {
        let bits = crate::prng::prng_keystream(0x0001, 4000);
        let series: Vec<f64> = bits.iter().map(f64::from).collect();
        let a = serial_correlation(&bits).unwrap();
        let b = serial_correlation_series(&series);
        assert!((a.coefficient - b.coefficient).abs() < 1e-12);
    }
}
