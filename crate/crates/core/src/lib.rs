//! Workbench for an EPC Gen2 style 16-bit pseudo-random generator and the
//! mutual-authentication protocol built on top of it.
//!
//! The generator is a maximum-length 16-bit LFSR whose state is passed
//! through a degree-7 nonlinear Boolean filter and irregularly decimated by
//! the register's own output bit. Around it this crate provides:
//!
//! * [`lfsr`] — the register, its feedback polynomial and primitivity check;
//! * [`boolfn`] — the filter function plus exhaustive truth-table, Walsh and
//!   ANF analysis of its cryptographic profile;
//! * [`prng`] — the complete generator (filter + decimation + output buffer)
//!   and the credential-update primitive;
//! * [`crc16`] — the Gen2 CRC-16 checksum;
//! * [`randtest`] — frequency/serial/poker/runs/autocorrelation tests,
//!   serial correlation, Berlekamp–Massey, period measurement and the three
//!   Gen2 randomness criteria;
//! * [`protocol`] — tag/reader/server state machines for the five-step
//!   mutual authentication and the XOR stream-cipher session layer;
//! * [`harness`] — scenario runner, adversary models, channel transcripts
//!   and keystore persistence.

pub mod bits;
pub mod boolfn;
pub mod crc16;
pub mod harness;
pub mod lfsr;
pub mod prng;
pub mod protocol;
pub mod randtest;

pub use bits::BitVec;
pub use boolfn::{analyze_filter, filter_eval, FilterFunction, FilterProfile, TruthTable};
pub use crc16::{crc16_compute, crc16_verify, CrcParams};
pub use lfsr::{lfsr_run, poly_is_primitive, FeedbackPolynomial, LfsrState};
pub use prng::{prng_keystream, update_credential, Prng};
pub use protocol::{
    compute_response, session_keystream, ServerKeystore, TagCredentials, TagState, Verdict,
};
pub use randtest::{
    battery_over_seeds, berlekamp_massey, epc_criteria_report, golomb_test, measure_period,
    serial_correlation, BatteryReport, TestKind, TestResult,
};
