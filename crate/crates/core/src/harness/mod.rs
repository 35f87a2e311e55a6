//! Scenario runner, adversary models, channel simulation and keystore
//! persistence.

pub mod channel;
pub mod entropy;
pub mod keystore;
pub mod scenarios;

pub use channel::{AdversaryHook, Channel, ChannelEvent, Intercept, Party};
pub use entropy::{
    resolve_run_seed, CounterEntropy, EntropySource, RunSeedError, SeededEntropy, RUN_SEED_ENV,
};
pub use keystore::{
    keystore_from_json, keystore_load, keystore_save, keystore_to_json, KeystoreFileError,
};
pub use scenarios::{
    run_honest_session, run_mitm_attack, run_replay_attack, run_tracking_probe,
    HonestSessionOutcome, MitmOutcome, MitmTamper, ReplayOutcome, TrackingOutcome,
};
