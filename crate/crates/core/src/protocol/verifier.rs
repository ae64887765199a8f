//! Verifier-side state and the ordered package checks.
//!
//! Checks run in this order and stop at the first failure:
//!
//! 1. certificate: issuer signature, validity window, and `vk_sig` equal to
//!    the certified key
//! 2. context: `r1cs_hash` registered, registered for the expected
//!    application, and the package's key hash equal to the registered key's
//! 3. signature over the payload rebuilt with the registered `Δ_sign`
//! 4. freshness: `|now - T| <= window`
//! 5. nonce: unseen and room left in the store
//! 6. proof: the public inputs carry the signed `c`, `T`, `ν`, and the
//!    Groth16 proof verifies against them

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::cert::CertError;
use super::domain::DomainSeparator;
use super::layout::{Nonce, PublicLayout};
use super::package::{vk_hash, ProofPackage};
use super::schnorr::PublicKey;
use super::ProtocolError;
use crate::codec::ByteReader;
use crate::groth16::{self, VerifyingKey};
use crate::pairing::{Engine, Fr};

pub const DEFAULT_WINDOW_SECS: u64 = 5;
pub const DEFAULT_NONCE_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Certificate,
    Context,
    Signature,
    Freshness,
    Nonce,
    Proof,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Certificate,
        Stage::Context,
        Stage::Signature,
        Stage::Freshness,
        Stage::Nonce,
        Stage::Proof,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Certificate => "certificate",
            Stage::Context => "context",
            Stage::Signature => "signature",
            Stage::Freshness => "freshness",
            Stage::Nonce => "nonce",
            Stage::Proof => "proof",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RejectReason {
    #[error("certificate: {0}")]
    Certificate(CertError),
    #[error("signing key differs from the certified key")]
    KeyNotCertified,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("signature does not verify over the rebuilt payload")]
    BadSignature,
    #[error("timestamp {timestamp} outside the window at {now}")]
    StaleTimestamp { timestamp: u64, now: u64 },
    #[error("nonce already seen")]
    NonceReplay,
    #[error("nonce store full")]
    NonceStoreFull,
    #[error("proof invalid: {0}")]
    ProofInvalid(String),
}

impl RejectReason {
    pub fn stage(&self) -> Stage {
        match self {
            RejectReason::Certificate(_) | RejectReason::KeyNotCertified => Stage::Certificate,
            RejectReason::ContextMismatch(_) => Stage::Context,
            RejectReason::BadSignature => Stage::Signature,
            RejectReason::StaleTimestamp { .. } => Stage::Freshness,
            RejectReason::NonceReplay | RejectReason::NonceStoreFull => Stage::Nonce,
            RejectReason::ProofInvalid(_) => Stage::Proof,
        }
    }

    /// Every code, in stage order.
    pub const CODES: [&'static str; 8] = [
        "certificate",
        "key-not-certified",
        "context-mismatch",
        "bad-signature",
        "stale-timestamp",
        "nonce-replay",
        "nonce-store-full",
        "proof-invalid",
    ];

    /// The stage that reports `code`, if it is one of [`Self::CODES`].
    pub fn stage_of_code(code: &str) -> Option<Stage> {
        const STAGES: [Stage; 8] = [
            Stage::Certificate,
            Stage::Certificate,
            Stage::Context,
            Stage::Signature,
            Stage::Freshness,
            Stage::Nonce,
            Stage::Nonce,
            Stage::Proof,
        ];
        Self::CODES.iter().position(|c| *c == code).map(|i| STAGES[i])
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::Certificate(_) => "certificate",
            RejectReason::KeyNotCertified => "key-not-certified",
            RejectReason::ContextMismatch(_) => "context-mismatch",
            RejectReason::BadSignature => "bad-signature",
            RejectReason::StaleTimestamp { .. } => "stale-timestamp",
            RejectReason::NonceReplay => "nonce-replay",
            RejectReason::NonceStoreFull => "nonce-store-full",
            RejectReason::ProofInvalid(_) => "proof-invalid",
        }
    }
}

/// Seen nonces, each kept until its timestamp is more than `retention`
/// seconds in the past.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonceStore {
    capacity: usize,
    retention: u64,
    seen: HashMap<Nonce, u64>,
}

impl NonceStore {
    pub fn new(capacity: usize, retention: u64) -> Self {
        NonceStore {
            capacity,
            retention,
            seen: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn contains(&self, nonce: &Nonce) -> bool {
        self.seen.contains_key(nonce)
    }

    /// Drops entries whose timestamp is older than `now - retention`.
    pub fn evict(&mut self, now: u64) {
        let retention = self.retention;
        self.seen.retain(|_, t| t.saturating_add(retention) >= now);
    }

    /// Records `nonce` seen with timestamp `t`.
    pub fn check_and_insert(&mut self, nonce: Nonce, t: u64, now: u64) -> Result<(), RejectReason> {
        self.check(&nonce, now)?;
        self.seen.insert(nonce, t);
        Ok(())
    }

    fn check(&mut self, nonce: &Nonce, now: u64) -> Result<(), RejectReason> {
        if self.contains(nonce) {
            return Err(RejectReason::NonceReplay);
        }
        self.evict(now);
        if self.seen.len() >= self.capacity {
            return Err(RejectReason::NonceStoreFull);
        }
        Ok(())
    }

    /// `capacity u64, retention u64, count u32, (nonce, t u64)*` sorted by
    /// nonce.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend((self.capacity as u64).to_le_bytes());
        out.extend(self.retention.to_le_bytes());
        out.extend((self.seen.len() as u32).to_le_bytes());
        let sorted: BTreeMap<_, _> = self.seen.iter().collect();
        for (n, t) in sorted {
            out.extend_from_slice(n);
            out.extend(t.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let bad = |e: crate::codec::CodecError| ProtocolError::Malformed(format!("nonce store: {e}"));
        let mut r = ByteReader::new(bytes);
        let capacity = r.u64().map_err(bad)? as usize;
        let retention = r.u64().map_err(bad)?;
        let n = r.u32().map_err(bad)? as usize;
        let mut seen = HashMap::new();
        for _ in 0..n {
            let nonce: Nonce = r.array().map_err(bad)?;
            seen.insert(nonce, r.u64().map_err(bad)?);
        }
        r.finish().map_err(bad)?;
        Ok(NonceStore {
            capacity,
            retention,
            seen,
        })
    }
}

/// A registered circuit: its key, signing context and public layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub vk: VerifyingKey<Engine>,
    pub delta_sign: DomainSeparator,
    pub layout: PublicLayout,
}

impl RegistryEntry {
    /// `Δ_sign u32 BE, layout length u32 LE, layout, verifying key`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.delta_sign.to_bytes().to_vec();
        let layout = self.layout.to_bytes();
        out.extend((layout.len() as u32).to_le_bytes());
        out.extend(layout);
        out.extend(self.vk.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let mut r = ByteReader::new(bytes);
        let delta_sign = DomainSeparator::from_bytes(r.array()?)?;
        let n = r.u32()? as usize;
        let layout = PublicLayout::from_bytes(r.take(n)?)?;
        let vk = VerifyingKey::from_bytes(r.take(bytes.len() - 8 - n)?)?;
        if vk.num_public() != layout.num_public {
            return Err(ProtocolError::Layout(
                "layout and key disagree on the number of public inputs".into(),
            ));
        }
        Ok(RegistryEntry { vk, delta_sign, layout })
    }
}

/// What an accepted package established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accepted {
    pub app_id: u8,
    pub r1cs_hash: [u8; 32],
    pub public_inputs: Vec<Fr>,
}

#[derive(Debug, Clone)]
pub struct VerifierState {
    pub root: PublicKey,
    pub window: u64,
    pub nonces: NonceStore,
    registry: BTreeMap<[u8; 32], RegistryEntry>,
    expected_app: Option<u8>,
}

impl VerifierState {
    /// Default window, and nonces retained for twice the window.
    pub fn new(root: PublicKey) -> Self {
        Self::with_window(root, DEFAULT_WINDOW_SECS, DEFAULT_NONCE_CAPACITY)
    }

    pub fn with_window(root: PublicKey, window: u64, nonce_capacity: usize) -> Self {
        VerifierState {
            root,
            window,
            nonces: NonceStore::new(nonce_capacity, 2 * window),
            registry: BTreeMap::new(),
            expected_app: None,
        }
    }

    /// Accept only packages whose circuit is registered under `app_id`.
    pub fn expect_app(&mut self, app_id: u8) -> &mut Self {
        self.expected_app = Some(app_id);
        self
    }

    pub fn expected_app(&self) -> Option<u8> {
        self.expected_app
    }

    /// Registers a verifying key; the key's circuit hash is the lookup key.
    pub fn register(&mut self, entry: RegistryEntry) -> Result<(), ProtocolError> {
        if entry.vk.num_public() != entry.layout.num_public {
            return Err(ProtocolError::Layout(
                "layout and key disagree on the number of public inputs".into(),
            ));
        }
        self.registry.insert(entry.vk.circuit_hash, entry);
        Ok(())
    }

    pub fn registry(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.registry.values()
    }

    pub fn lookup(&self, r1cs_hash: &[u8; 32]) -> Option<&RegistryEntry> {
        self.registry.get(r1cs_hash)
    }

    /// Runs the checks without recording the nonce.
    pub fn check_package(&mut self, pkg: &ProofPackage, now: u64) -> Result<Accepted, RejectReason> {
        pkg.cert.verify(&self.root, now).map_err(RejectReason::Certificate)?;
        if pkg.vk_sig != pkg.cert.vk_sig {
            return Err(RejectReason::KeyNotCertified);
        }

        let entry = self
            .registry
            .get(&pkg.r1cs_hash)
            .ok_or_else(|| RejectReason::ContextMismatch("circuit hash not registered".into()))?;
        if let Some(app) = self.expected_app {
            if entry.delta_sign.app_id != app {
                return Err(RejectReason::ContextMismatch(format!(
                    "circuit belongs to application {:#04x}, expected {app:#04x}",
                    entry.delta_sign.app_id
                )));
            }
        }
        let registered_vk_hash = vk_hash(&entry.vk);
        if pkg.vk_hash != registered_vk_hash {
            return Err(RejectReason::ContextMismatch(
                "verification key differs from the registered key".into(),
            ));
        }

        let payload = pkg.payload(entry.delta_sign, &registered_vk_hash);
        if !pkg.vk_sig.verify(&payload, &pkg.signature) {
            return Err(RejectReason::BadSignature);
        }

        if now.abs_diff(pkg.timestamp) > self.window {
            return Err(RejectReason::StaleTimestamp {
                timestamp: pkg.timestamp,
                now,
            });
        }

        self.nonces.check(&pkg.nonce, now)?;

        let bound = entry
            .layout
            .extract(&pkg.public_inputs)
            .map_err(|e| RejectReason::ProofInvalid(e.to_string()))?;
        if bound.commitment != pkg.commitment || bound.timestamp != pkg.timestamp || bound.nonce != pkg.nonce {
            return Err(RejectReason::ProofInvalid(
                "public inputs disagree with the signed commitment, timestamp or nonce".into(),
            ));
        }
        match groth16::verify(&entry.vk, &pkg.proof, &pkg.public_inputs) {
            Ok(true) => {}
            Ok(false) => return Err(RejectReason::ProofInvalid("pairing check failed".into())),
            Err(e) => return Err(RejectReason::ProofInvalid(e.to_string())),
        }
        Ok(Accepted {
            app_id: entry.delta_sign.app_id,
            r1cs_hash: pkg.r1cs_hash,
            public_inputs: pkg.public_inputs.clone(),
        })
    }

    /// Runs every check and, on acceptance, records the nonce.
    pub fn verify_package(&mut self, pkg: &ProofPackage, now: u64) -> Result<Accepted, RejectReason> {
        let accepted = self.check_package(pkg, now)?;
        self.nonces.check_and_insert(pkg.nonce, pkg.timestamp, now)?;
        Ok(accepted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nonce_store_replay_and_eviction() {
        let mut s = NonceStore::new(2, 10);
        s.check_and_insert([1; 16], 100, 100).unwrap();
        assert_eq!(s.check_and_insert([1; 16], 100, 101), Err(RejectReason::NonceReplay));
        s.check_and_insert([2; 16], 105, 105).unwrap();
        assert_eq!(s.check_and_insert([3; 16], 106, 106), Err(RejectReason::NonceStoreFull));
        // [1; 16] expires after t = 110
        s.check_and_insert([3; 16], 111, 111).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s.contains(&[1; 16]));
        let back = NonceStore::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn no_duplicate_within_retention(
            ops in proptest::collection::vec((0u8..6, 0u64..20), 1..80)
        ) {
            let retention = 10;
            let mut s = NonceStore::new(1000, retention);
            let mut accepted: Vec<(u8, u64)> = Vec::new();
            let mut now = 0;
            for (n, dt) in ops {
                now += dt % 3;
                let t = now;
                if s.check_and_insert([n; 16], t, now).is_ok() {
                    for &(m, t0) in &accepted {
                        prop_assert!(m != n || t0 + retention < now);
                    }
                    accepted.push((n, t));
                }
            }
        }
    }
}
