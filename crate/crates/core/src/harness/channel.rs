//! The insecure tag<->reader channel with an adversary hook and a complete
//! transcript.
//!
//! Every byte a party sends is logged before the adversary touches it, and
//! every adversary action is logged with attribution, so a scenario outcome
//! is recomputable from the log plus the run seed.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    Tag,
    Reader,
}

/// What the adversary does with an intercepted record.
pub enum Intercept {
    Pass,
    Drop,
    Replace(Vec<u8>),
}

/// Adversary model: sees every record in flight and decides its fate.
/// Implemented by closures in the attack scenarios.
pub trait AdversaryHook {
    fn intercept(&mut self, from: Party, bytes: &[u8]) -> Intercept;
}

impl<F: FnMut(Party, &[u8]) -> Intercept> AdversaryHook for F {
    fn intercept(&mut self, from: Party, bytes: &[u8]) -> Intercept {
        self(from, bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ChannelEvent {
    Delivered {
        from: Party,
        #[serde(with = "hex_bytes")]
        bytes: Vec<u8>,
    },
    AdversaryDropped {
        from: Party,
        #[serde(with = "hex_bytes")]
        bytes: Vec<u8>,
    },
    AdversaryModified {
        from: Party,
        #[serde(with = "hex_bytes")]
        original: Vec<u8>,
        #[serde(with = "hex_bytes")]
        delivered: Vec<u8>,
    },
    AdversaryInjected {
        #[serde(with = "hex_bytes")]
        bytes: Vec<u8>,
    },
}

mod hex_bytes {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        s.serialize_str(&hex)
    }
}

/// Ordered message log plus an optional adversary.
#[derive(Default)]
pub struct Channel {
    log: Vec<ChannelEvent>,
    hook: Option<Box<dyn AdversaryHook>>,
}

impl Channel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_hook(&mut self, hook: Option<Box<dyn AdversaryHook>>) {
        self.hook = hook;
    }

    /// Sends a record; returns what the far side receives, or `None` if the
    /// adversary dropped it.
    pub fn send(&mut self, from: Party, bytes: Vec<u8>) -> Option<Vec<u8>> {
        match self.hook.as_mut().map(|h| h.intercept(from, &bytes)) {
            None | Some(Intercept::Pass) => {
                self.log.push(ChannelEvent::Delivered {
                    from,
                    bytes: bytes.clone(),
                });
                Some(bytes)
            }
            Some(Intercept::Drop) => {
                self.log.push(ChannelEvent::AdversaryDropped { from, bytes });
                None
            }
            Some(Intercept::Replace(tampered)) => {
                self.log.push(ChannelEvent::AdversaryModified {
                    from,
                    original: bytes,
                    delivered: tampered.clone(),
                });
                Some(tampered)
            }
        }
    }

    /// Adversary injection: a record no party sent.
    pub fn inject(&mut self, bytes: Vec<u8>) -> Vec<u8> {
        self.log.push(ChannelEvent::AdversaryInjected {
            bytes: bytes.clone(),
        });
        bytes
    }

    pub fn log(&self) -> &[ChannelEvent] {
        &self.log
    }

    pub fn events(&self) -> usize {
        self.log.len()
    }
}
