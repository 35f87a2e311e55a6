//! Keystore persistence: a JSON array of
//! `{ "label": str, "id": "<4 hex>", "ssk": "<4 hex>", "epoch": int }`.
//!
//! Loading re-applies the registration invariants, so a file with duplicate
//! labels, an `id == ssk` entry or both orderings of one credential pair is
//! rejected with a distinct error.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{RegistrationError, ServerKeystore, TagCredentials};

#[derive(Debug, Serialize, Deserialize)]
struct KeystoreEntry {
    label: String,
    id: String,
    ssk: String,
    epoch: u64,
}

#[derive(Debug, Error)]
pub enum KeystoreFileError {
    #[error("keystore io: {0}")]
    Io(#[from] std::io::Error),
    #[error("keystore is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {label:?}: field {field} value {value:?} is not a 4-digit hex word")]
    BadHex {
        label: String,
        field: &'static str,
        value: String,
    },
    #[error(transparent)]
    Invalid(#[from] RegistrationError),
}

fn parse_hex16(label: &str, field: &'static str, value: &str) -> Result<u16, KeystoreFileError> {
    if value.len() != 4 {
        return Err(KeystoreFileError::BadHex {
            label: label.to_owned(),
            field,
            value: value.to_owned(),
        });
    }
    u16::from_str_radix(value, 16).map_err(|_| KeystoreFileError::BadHex {
        label: label.to_owned(),
        field,
        value: value.to_owned(),
    })
}

pub fn keystore_to_json(ks: &ServerKeystore) -> String {
    let entries: Vec<KeystoreEntry> = ks
        .iter()
        .map(|(label, c)| KeystoreEntry {
            label: label.to_owned(),
            id: format!("{:04x}", c.id),
            ssk: format!("{:04x}", c.ssk),
            epoch: c.epoch,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("plain data serializes")
}

pub fn keystore_from_json(json: &str) -> Result<ServerKeystore, KeystoreFileError> {
    let entries: Vec<KeystoreEntry> = serde_json::from_str(json)?;
    let mut ks = ServerKeystore::new();
    for e in entries {
        let id = parse_hex16(&e.label, "id", &e.id)?;
        let ssk = parse_hex16(&e.label, "ssk", &e.ssk)?;
        ks.register(
            &e.label,
            TagCredentials {
                id,
                ssk,
                epoch: e.epoch,
            },
        )?;
    }
    Ok(ks)
}

pub fn keystore_save(ks: &ServerKeystore, path: &Path) -> Result<(), KeystoreFileError> {
    fs::write(path, keystore_to_json(ks))?;
    Ok(())
}

pub fn keystore_load(path: &Path) -> Result<ServerKeystore, KeystoreFileError> {
    keystore_from_json(&fs::read_to_string(path)?)
}
