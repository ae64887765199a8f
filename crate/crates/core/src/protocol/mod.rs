//! Signed proof packages: domain separation, Schnorr signatures,
//! certificates, payload assembly, and the verifier's ordered checks.

mod cert;
mod domain;
mod layout;
mod package;
mod schnorr;
mod verifier;

use rand::RngCore;

use crate::codec::CodecError;
use crate::commitment::{verify_commitment, BlindingFactor, Commitment};
use crate::field::EncodingError;
use crate::groth16::{Groth16Error, Prover};
use crate::pairing::{Engine, Fr};
use crate::r1cs::{Assignment, ConstraintSystem, R1csError};

pub use cert::{Authority, CertError, Certificate, Identity};
pub use domain::{DomainSeparator, Operation, APP_AUDIT, APP_RSS};
pub use layout::{
    nonce_from_limbs, nonce_labels, nonce_limb_bytes, nonce_limb_count, nonce_to_limbs, set_context, BoundContext,
    ContextWires, Nonce, PublicLayout, COMMITMENT_LABEL, NONCE_LABEL, TIMESTAMP_LABEL,
};
pub use package::{assemble_payload, vk_hash, ProofPackage, PACKAGE_MAGIC};
pub use schnorr::{PublicKey, Signature, SigningKey, PUBLIC_KEY_LEN, SIGNATURE_LEN};
pub use verifier::{
    Accepted, NonceStore, RegistryEntry, RejectReason, Stage, VerifierState, DEFAULT_NONCE_CAPACITY,
    DEFAULT_WINDOW_SECS,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("operation byte {0:#04x} is neither commit (0x01) nor sign (0x02)")]
    OpId(u8),
    #[error("malformed {0}")]
    Malformed(String),
    #[error("public input layout: {0}")]
    Layout(String),
    #[error("proving key belongs to a different circuit")]
    CircuitMismatch,
    #[error(transparent)]
    R1cs(#[from] R1csError),
    #[error(transparent)]
    Groth16(#[from] Groth16Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

/// A fresh random nonce.
pub fn fresh_nonce<R: RngCore + ?Sized>(rng: &mut R) -> Nonce {
    let mut n = [0u8; 16];
    rng.fill_bytes(&mut n);
    n
}

/// Solves the witness, proves, and signs the payload under `delta_sign`.
/// `inputs` must already carry `T` and the nonce (see [`set_context`]).
pub fn create_package<R: RngCore + ?Sized>(
    prover: &Prover<Engine>,
    cs: &ConstraintSystem<Fr>,
    inputs: &Assignment<Fr>,
    identity: &Identity,
    delta_sign: DomainSeparator,
    rng: &mut R,
) -> Result<ProofPackage, ProtocolError> {
    let r1cs_hash = cs.digest();
    if prover.proving_key().circuit_hash != r1cs_hash {
        return Err(ProtocolError::CircuitMismatch);
    }
    let layout = PublicLayout::from_labels::<Fr>(cs.public_labels())?;
    let witness = cs.generate_witness(inputs)?;
    let public_inputs = witness.public_inputs().to_vec();
    let bound = layout.extract(&public_inputs)?;
    let proof = prover.prove(witness.values(), rng)?;
    let vk_hash = vk_hash(prover.verifying_key());
    let payload = assemble_payload(
        delta_sign,
        &r1cs_hash,
        &vk_hash,
        &identity.cert,
        &proof,
        bound.commitment,
        bound.timestamp,
        &bound.nonce,
    );
    Ok(ProofPackage {
        signature: identity.key.sign(&payload),
        vk_sig: identity.key.public_key(),
        proof,
        commitment: bound.commitment,
        timestamp: bound.timestamp,
        nonce: bound.nonce,
        cert: identity.cert.clone(),
        vk_hash,
        r1cs_hash,
        public_inputs,
    })
}

/// The registry entry a verifier needs for packages from `prover`.
pub fn registry_entry(
    prover: &Prover<Engine>,
    cs: &ConstraintSystem<Fr>,
    delta_sign: DomainSeparator,
) -> Result<RegistryEntry, ProtocolError> {
    Ok(RegistryEntry {
        vk: prover.verifying_key().clone(),
        delta_sign,
        layout: PublicLayout::from_labels::<Fr>(cs.public_labels())?,
    })
}

/// The authority's check of a demanded opening of a logged commitment.
pub fn audit_open(c: &Commitment<Fr>, message: &[Fr], s_sec: &BlindingFactor<Fr>) -> bool {
    verify_commitment(c, message, s_sec)
}
