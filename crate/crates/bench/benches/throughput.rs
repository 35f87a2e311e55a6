//! Generator and authentication throughput.
//!
//! The protocol targets batch reading rates around 450 tags/sec, so the
//! interesting numbers are keystream bits per second, one full
//! authentication against a large keystore, and a single-seed battery pass.

use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gen2_core::harness::CounterEntropy;
use gen2_core::prng::prng_keystream;
use gen2_core::protocol::{server_verify, ServerKeystore, TagCredentials, TagState, Verdict};
use gen2_core::randtest::{battery_over_seeds, berlekamp_massey};

fn keystream(c: &mut Criterion) {
    let mut group = c.benchmark_group("keystream");
    group.throughput(Throughput::Elements(65_535));
    group.bench_function("bits_65535", |b| {
        b.iter(|| prng_keystream(black_box(0xACE1), 65_535))
    });
    group.finish();
}

fn authentication(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE5E);
    let mut ks = ServerKeystore::new();
    let mut tags = Vec::new();
    for i in 0..1000 {
        loop {
            let creds = TagCredentials::new(rng.gen(), rng.gen());
            if creds.id != creds.ssk && ks.register(&format!("tag{i:04}"), creds).is_ok() {
                tags.push(TagState::new(creds, 16).unwrap());
                break;
            }
        }
    }
    let mut group = c.benchmark_group("auth");
    group.sample_size(20);
    group.bench_function("one_auth_1000_entry_keystore", |b| {
        b.iter_batched(
            || (ks.clone(), tags[0].clone(), CounterEntropy::new(1)),
            |(mut ks, mut tag, mut entropy)| {
                let query = 0x0042;
                let r = tag.respond(query, &mut entropy);
                match server_verify(&mut ks, query, &r) {
                    Verdict::Unique { nonce3, .. } => {
                        tag.finalize(nonce3).unwrap();
                    }
                    other => panic!("honest auth must match uniquely, got {other:?}"),
                }
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("analysis");
    group.sample_size(10);
    group.bench_function("battery_single_seed_65535", |b| {
        b.iter(|| battery_over_seeds(black_box(&[0xACE1]), 65_535, 0.05).unwrap())
    });
    group.bench_function("berlekamp_massey_65535", |b| {
        let bits = prng_keystream(0xACE1, 65_535);
        b.iter(|| berlekamp_massey(black_box(&bits)))
    });
    group.finish();
}

criterion_group!(benches, keystream, authentication, analysis);
criterion_main!(benches);
