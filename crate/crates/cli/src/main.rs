//! `gen2` — command-line workbench around the Gen2 filtered-LFSR generator:
//! keystream generation, statistical analysis, the Gen2 randomness criteria,
//! filter profiling, CRC-16, authentication demos and attack scenarios.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gen2_core::bits::BitVec;
use gen2_core::boolfn::{analyze_filter, FilterFunction};
use gen2_core::crc16::{crc16_compute, crc16_verify};
use gen2_core::harness::{
    resolve_run_seed, run_honest_session, run_mitm_attack, run_replay_attack, run_tracking_probe,
    MitmTamper,
};
use gen2_core::prng::prng_keystream;
use gen2_core::randtest::{
    berlekamp_massey, epc_criteria_report, golomb_test, measure_period, EpcConfig, TestKind,
    TestParams, TestResult, DEFAULT_SAMPLE_SEED,
};

#[derive(Parser)]
#[command(
    name = "gen2",
    version,
    about = "Workbench for a 16-bit filtered-LFSR generator and the mutual-authentication protocol built on it"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate keystream bits from a seed
    Gen(GenArgs),
    /// Run the statistical battery on a sequence
    Analyze(AnalyzeArgs),
    /// Measure the three Gen2 randomness criteria
    EpcCheck(EpcArgs),
    /// Exhaustive profile of the nonlinear filter
    FilterAnalyze(FilterArgs),
    /// CRC-16 of a file
    Crc(CrcArgs),
    /// Authentication scenarios
    #[command(subcommand)]
    Auth(AuthCommand),
    /// Adversary scenarios; exit code 0 iff every assertion passed
    #[command(subcommand)]
    Attack(AttackCommand),
}

fn parse_hex16(s: &str) -> Result<u16, String> {
    u16::from_str_radix(s.trim_start_matches("0x"), 16)
        .map_err(|_| format!("{s:?} is not a 16-bit hex word"))
}

fn parse_hex64(s: &str) -> Result<u64, String> {
    u64::from_str_radix(s.trim_start_matches("0x"), 16)
        .map_err(|_| format!("{s:?} is not a hex u64"))
}

#[derive(Args)]
struct GenArgs {
    /// Seed as 16-bit hex (0x0000 is remapped to 0x0001)
    #[arg(long, value_parser = parse_hex16)]
    seed: u16,
    /// Number of output bits
    #[arg(long)]
    bits: usize,
    /// Output path; stdout when omitted (required for --format raw)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GenFormat::Bits01)]
    format: GenFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenFormat {
    /// ASCII '0'/'1' characters
    Bits01,
    /// Hex of the packed bytes (8 bits/byte LSB-first)
    Hex,
    /// Packed bytes, LSB-first, zero-padded; writes a JSON sidecar
    Raw,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Bit sequence file (ASCII 0/1, whitespace ignored)
    #[arg(long = "in", conflicts_with = "seed")]
    input: Option<PathBuf>,
    /// Generate the sequence from this seed instead of reading a file
    #[arg(long, value_parser = parse_hex16)]
    seed: Option<u16>,
    /// Bits to generate in --seed mode
    #[arg(long, default_value_t = 65535)]
    bits: usize,
    /// Comma list from: freq,serial,poker,runs,autocorr,bm,period
    #[arg(long, default_value = "freq,serial,poker,runs,autocorr,bm,period")]
    tests: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EpcArgs {
    /// Seeds pooled for the word histogram
    #[arg(long, default_value_t = 1024)]
    seeds: usize,
    /// Words generated per seed
    #[arg(long, default_value_t = 1024)]
    words: usize,
    /// Sampling seed for reproducible reports
    #[arg(long, value_parser = parse_hex64)]
    sample_seed: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CrcArgs {
    /// Input file
    #[arg(long = "in")]
    input: PathBuf,
    /// Treat the last two bytes as a big-endian checksum and verify;
    /// exits nonzero on mismatch
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum AuthCommand {
    /// Honest end-to-end sessions for a fleet of tags
    Demo(DemoArgs),
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 10)]
    tags: usize,
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    /// Run seed (hex); defaults to GEN2_RUN_SEED or OS entropy
    #[arg(long, value_parser = parse_hex64)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    nonce_bits: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Replay recorded responses after credential rotation
    Replay(TrialArgs),
    /// All three in-flight tampering models
    Mitm(TrialArgs),
    /// Eavesdropper linking step-2 responses across epochs
    Tracking(TrialArgs),
}

#[derive(Args)]
struct TrialArgs {
    /// Trials (epochs for the tracking probe)
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Run seed (hex); defaults to GEN2_RUN_SEED or OS entropy
    #[arg(long, value_parser = parse_hex64)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    nonce_bits: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::EpcCheck(args) => cmd_epc_check(args),
        Command::FilterAnalyze(args) => cmd_filter_analyze(args),
        Command::Crc(args) => cmd_crc(args),
        Command::Auth(AuthCommand::Demo(args)) => cmd_auth_demo(args),
        Command::Attack(cmd) => cmd_attack(cmd),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let bits = prng_keystream(args.seed, args.bits);
    match args.format {
        GenFormat::Bits01 => {
            let text = bits.to_01_string();
            match &args.out {
                Some(path) => fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
        }
        GenFormat::Hex => {
            let hex: String = bits.to_lsb_bytes().iter().map(|b| format!("{b:02x}")).collect();
            match &args.out {
                Some(path) => fs::write(path, hex + "\n")?,
                None => println!("{hex}"),
            }
        }
        GenFormat::Raw => {
            let Some(path) = &args.out else {
                bail!("--format raw requires --out (binary output with a JSON sidecar)");
            };
            fs::write(path, bits.to_lsb_bytes())?;
            let sidecar = PathBuf::from(format!("{}.json", path.display()));
            write_json(
                &sidecar,
                &serde_json::json!({ "bits": args.bits, "seed": format!("{:04x}", args.seed) }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AnalysisReport {
    source: String,
    bits: usize,
    alpha: f64,
    results: Vec<TestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear_complexity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    connection_polynomial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<Option<usize>>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let (seq, source) = match (&args.input, args.seed) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let seq = BitVec::from_01_str(&text).context("parsing 0/1 sequence")?;
            (seq, path.display().to_string())
        }
        (None, Some(seed)) => (
            prng_keystream(seed, args.bits),
            format!("seed {seed:04x} ({} bits)", args.bits),
        ),
        _ => bail!("exactly one of --in or --seed is required"),
    };

    let mut results = Vec::new();
    let mut report = AnalysisReport {
        source,
        bits: seq.len(),
        alpha: args.alpha,
        results: Vec::new(),
        linear_complexity: None,
        connection_polynomial: None,
        period: None,
    };
    for name in args.tests.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "freq" => results.push(golomb_test(
                &seq,
                TestKind::Frequency,
                TestParams::default(),
                args.alpha,
            )?),
            "serial" => results.push(golomb_test(
                &seq,
                TestKind::Serial,
                TestParams::default(),
                args.alpha,
            )?),
            "poker" => results.push(golomb_test(
                &seq,
                TestKind::Poker,
                TestParams::default(),
                args.alpha,
            )?),
            "runs" => {
                results.push(golomb_test(
                    &seq,
                    TestKind::RunsShort,
                    TestParams::default(),
                    args.alpha,
                )?);
                results.push(golomb_test(
                    &seq,
                    TestKind::RunsLong,
                    TestParams::default(),
                    args.alpha,
                )?);
            }
            "autocorr" => results.push(golomb_test(
                &seq,
                TestKind::Autocorrelation,
                TestParams::default(),
                args.alpha,
            )?),
            "bm" => {
                let r = berlekamp_massey(&seq);
                report.linear_complexity = Some(r.linear_complexity);
                report.connection_polynomial = Some(r.connection.to_string());
            }
            "period" => report.period = Some(measure_period(&seq)),
            other => bail!(
                "unknown test {other:?}; valid: freq,serial,poker,runs,autocorr,bm,period"
            ),
        }
    }

    for r in &results {
        println!(
            "{:<16} statistic {:>12.4}  threshold {:>8.4}  {}",
            format!("{:?}", r.kind),
            r.statistic,
            r.threshold,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(lc) = report.linear_complexity {
        println!("linear complexity {lc} ({})", report.connection_polynomial.as_deref().unwrap_or(""));
    }
    if let Some(p) = report.period {
        match p {
            Some(p) => println!("period {p}"),
            None => println!("period undetermined over this window"),
        }
    }
    report.results = results;
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_epc_check(args: EpcArgs) -> Result<ExitCode> {
    let config = EpcConfig {
        seed_sample_size: args.seeds,
        words_per_seed: args.words,
        sample_seed: args.sample_seed.unwrap_or(DEFAULT_SAMPLE_SEED),
        ..EpcConfig::default()
    };
    let report = epc_criteria_report(&config)?;
    let c1 = &report.criterion1;
    println!(
        "criterion 1 (word frequency interval): {} — {} of 65536 values occurred over {} words; \
         counts [{}, {}], required [{:.2}, {:.2}]",
        pass_str(c1.pass),
        c1.distinct_values,
        c1.total_words,
        c1.min_count,
        c1.max_count,
        c1.lo_bound,
        c1.hi_bound
    );
    let c2 = &report.criterion2;
    println!(
        "criterion 2 (prefix uniqueness): {} — {} colliding 64-bit prefix pairs over {} seeds",
        pass_str(c2.pass),
        c2.colliding_pairs,
        c2.seeds
    );
    let c3 = &report.criterion3;
    println!(
        "criterion 3 (prediction proxy): {} — worst |lag-1| word-series correlation {:.5} \
         (bound {}), bit-stream {:.5}",
        pass_str(c3.pass),
        c3.word_series_max_abs,
        c3.bound,
        c3.bit_stream_max_abs
    );
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    Ok(exit_by(report.all_pass))
}

fn cmd_filter_analyze(args: FilterArgs) -> Result<ExitCode> {
    let profile = analyze_filter(&FilterFunction::gen2());
    println!("{}", serde_json::to_string_pretty(&profile)?);
    if profile.weight != 32768 {
        eprintln!(
            "note: weight {} — the function is not balanced (claimed 32768)",
            profile.weight
        );
    }
    if profile.correlation_immunity_order < 1 {
        eprintln!(
            "note: correlation immunity order {} — below the claimed first order",
            profile.correlation_immunity_order
        );
    }
    if let Some(path) = &args.json {
        write_json(path, &profile)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_crc(args: CrcArgs) -> Result<ExitCode> {
    let data = fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    if args.verify {
        let ok = crc16_verify(&data)?;
        println!("{}", if ok { "ok" } else { "mismatch" });
        Ok(exit_by(ok))
    } else {
        println!("{:04x}", crc16_compute(&data));
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_auth_demo(args: DemoArgs) -> Result<ExitCode> {
    let run_seed = resolve_run_seed(args.seed)?;
    let out = run_honest_session(args.tags, args.rounds, args.nonce_bits, run_seed);
    println!(
        "honest session: {} — {}/{} authentications, {} restarts, {:.0} auths/sec, run seed {}",
        pass_str(out.pass),
        out.successes,
        args.tags * args.rounds,
        out.ambiguous_restarts,
        out.auths_per_sec,
        out.run_seed
    );
    if let Some(path) = &args.json {
        write_json(path, &out)?;
    }
    Ok(exit_by(out.pass))
}

fn cmd_attack(cmd: AttackCommand) -> Result<ExitCode> {
    match cmd {
        AttackCommand::Replay(args) => {
            let run_seed = resolve_run_seed(args.seed)?;
            let out = run_replay_attack(args.trials, args.nonce_bits, run_seed);
            println!(
                "replay: {} — {}/{} new-query and {}/{} verbatim replays rejected, \
                 {}/{} frozen-keystore controls matched, run seed {}",
                pass_str(out.pass),
                out.new_query_replays_rejected,
                args.trials,
                out.old_pair_replays_rejected,
                args.trials,
                out.control_frozen_matches,
                args.trials,
                out.run_seed
            );
            if let Some(path) = &args.json {
                write_json(path, &out)?;
            }
            Ok(exit_by(out.pass))
        }
        AttackCommand::Mitm(args) => {
            let run_seed = resolve_run_seed(args.seed)?;
            let outs = [
                run_mitm_attack(MitmTamper::FlipResponseBit, args.trials, args.nonce_bits, run_seed),
                run_mitm_attack(MitmTamper::FlipNonce3Bit, args.trials, args.nonce_bits, run_seed),
                run_mitm_attack(MitmTamper::ForgeResponse, args.trials, args.nonce_bits, run_seed),
            ];
            for out in &outs {
                println!(
                    "mitm {:?}: {} — server no-match {}, tag rejects {}, accidental matches {}, \
                     desyncs documented {}, run seed {}",
                    out.tamper,
                    pass_str(out.pass),
                    out.server_no_match,
                    out.tag_rejects,
                    out.accidental_unique,
                    out.desyncs_documented,
                    out.run_seed
                );
            }
            let pass = outs.iter().all(|o| o.pass);
            if let Some(path) = &args.json {
                write_json(path, &outs)?;
            }
            Ok(exit_by(pass))
        }
        AttackCommand::Tracking(args) => {
            let run_seed = resolve_run_seed(args.seed)?;
            let epochs = args.trials.max(2);
            let out = run_tracking_probe(epochs, args.nonce_bits, run_seed);
            println!(
                "tracking: {} — {} pairwise collisions over {} epochs (budget {:.1}), \
                 frequency statistic {:.3}, run seed {}",
                pass_str(out.pass),
                out.pairwise_collisions,
                epochs,
                out.collision_budget,
                out.frequency_statistic,
                out.run_seed
            );
            if let Some(path) = &args.json {
                write_json(path, &out)?;
            }
            Ok(exit_by(out.pass))
        }
    }
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn exit_by(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
