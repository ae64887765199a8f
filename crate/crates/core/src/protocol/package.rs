//! The signature payload and the broadcast proof package.
//!
//! Payload bytes, in order:
//!
//! ```text
//! Enc_CTX(Δ_sign)              4
//! H(Enc_R1CS(R1CS))           32
//! H(Enc_VK(vk))               32
//! H(Enc_CERT(cert))           32
//! H(Enc_PROOF(π))             32
//! Enc_COMMIT(c)               F::BYTES
//! Enc_TS(T)                    8
//! Enc_NONCE(ν)                16
//! ```
//!
//! Package file: container with magic `HSPG` and sections PROOF, COMMIT,
//! TS, NONCE, CERT, VK (the 32-byte key hash), R1CS (the 32-byte circuit
//! hash), PUBLIC_INPUTS, SIGNATURE, SIG_KEY, in that order.

use super::cert::Certificate;
use super::domain::DomainSeparator;
use super::layout::Nonce;
use super::schnorr::{PublicKey, Signature};
use super::ProtocolError;
use crate::codec::{ext, put_fields, tag, ByteReader, Container, ContainerWriter};
use crate::commitment::byte_hash;
use crate::field::{encode, DTypeTag, PrimeField, Value};
use crate::groth16::{Proof, VerifyingKey};
use crate::pairing::{Engine, Fr, PairingEngine};

pub const PACKAGE_MAGIC: &[u8; 4] = b"HSPG";

/// `H(Enc_VK(vk))`.
pub fn vk_hash(vk: &VerifyingKey<Engine>) -> [u8; 32] {
    byte_hash(&vk.to_bytes())
}

fn enc(value: Value<Fr>, t: DTypeTag) -> Vec<u8> {
    encode(&value, t).expect("payload values match their tags")
}

/// Builds `m_sig`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_payload(
    delta_sign: DomainSeparator,
    r1cs_hash: &[u8; 32],
    vk_hash: &[u8; 32],
    cert: &Certificate,
    proof: &Proof<Engine>,
    commitment: Fr,
    timestamp: u64,
    nonce: &Nonce,
) -> Vec<u8> {
    let mut m = enc(Value::Integer(delta_sign.value() as u64), DTypeTag::Ctx);
    m.extend_from_slice(r1cs_hash);
    m.extend_from_slice(vk_hash);
    m.extend(byte_hash(&enc(Value::Bytes(cert.to_bytes()), DTypeTag::Cert)));
    m.extend(byte_hash(&enc(Value::Bytes(proof.to_bytes()), DTypeTag::Proof)));
    m.extend(enc(Value::Field(commitment), DTypeTag::Commit));
    m.extend(enc(Value::Integer(timestamp), DTypeTag::Ts));
    m.extend(enc(Value::Bytes(nonce.to_vec()), DTypeTag::Nonce));
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofPackage {
    pub proof: Proof<Engine>,
    pub commitment: Fr,
    pub timestamp: u64,
    pub nonce: Nonce,
    pub cert: Certificate,
    pub vk_hash: [u8; 32],
    pub r1cs_hash: [u8; 32],
    pub public_inputs: Vec<Fr>,
    pub signature: Signature,
    pub vk_sig: PublicKey,
}

const ORDER: [u8; 10] = [
    DTypeTag::Proof as u8,
    DTypeTag::Commit as u8,
    DTypeTag::Ts as u8,
    DTypeTag::Nonce as u8,
    DTypeTag::Cert as u8,
    DTypeTag::Vk as u8,
    DTypeTag::R1cs as u8,
    ext::PUBLIC_INPUTS,
    ext::SIGNATURE,
    ext::SIG_KEY,
];

impl ProofPackage {
    /// The payload this package's signature is expected to cover, using the
    /// package's own claims for Δ-independent fields.
    pub fn payload(&self, delta_sign: DomainSeparator, vk_hash: &[u8; 32]) -> Vec<u8> {
        assemble_payload(
            delta_sign,
            &self.r1cs_hash,
            vk_hash,
            &self.cert,
            &self.proof,
            self.commitment,
            self.timestamp,
            &self.nonce,
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut inputs = Vec::new();
        put_fields(&mut inputs, &self.public_inputs);
        ContainerWriter::new(PACKAGE_MAGIC, Engine::PROFILE_BYTE)
            .section(tag(DTypeTag::Proof), &self.proof.to_bytes())
            .section(tag(DTypeTag::Commit), &self.commitment.to_le_bytes())
            .section(tag(DTypeTag::Ts), &self.timestamp.to_le_bytes())
            .section(tag(DTypeTag::Nonce), &self.nonce)
            .section(tag(DTypeTag::Cert), &self.cert.to_bytes())
            .section(tag(DTypeTag::Vk), &self.vk_hash)
            .section(tag(DTypeTag::R1cs), &self.r1cs_hash)
            .section(ext::PUBLIC_INPUTS, &inputs)
            .section(ext::SIGNATURE, &self.signature.to_bytes())
            .section(ext::SIG_KEY, &self.vk_sig.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let c = Container::parse(bytes, PACKAGE_MAGIC, Engine::PROFILE_BYTE)?;
        c.expect_order(&ORDER)?;
        let exact = |t: DTypeTag| -> Result<ByteReader<'_>, ProtocolError> { Ok(ByteReader::new(c.get(tag(t))?)) };
        let commitment = {
            let mut r = exact(DTypeTag::Commit)?;
            let v = r.field()?;
            r.finish()?;
            v
        };
        let timestamp = {
            let mut r = exact(DTypeTag::Ts)?;
            let v = r.u64()?;
            r.finish()?;
            v
        };
        let nonce = {
            let mut r = exact(DTypeTag::Nonce)?;
            let v = r.array()?;
            r.finish()?;
            v
        };
        let hash = |t: DTypeTag| -> Result<[u8; 32], ProtocolError> {
            let mut r = exact(t)?;
            let v = r.array()?;
            r.finish()?;
            Ok(v)
        };
        let public_inputs = {
            let mut r = ByteReader::new(c.get(ext::PUBLIC_INPUTS)?);
            let v = r.fields()?;
            r.finish()?;
            v
        };
        Ok(ProofPackage {
            proof: Proof::from_bytes(c.get(tag(DTypeTag::Proof))?)?,
            commitment,
            timestamp,
            nonce,
            cert: Certificate::from_bytes(c.get(tag(DTypeTag::Cert))?)?,
            vk_hash: hash(DTypeTag::Vk)?,
            r1cs_hash: hash(DTypeTag::R1cs)?,
            public_inputs,
            signature: Signature::from_bytes(c.get(ext::SIGNATURE)?)?,
            vk_sig: PublicKey::from_bytes(c.get(ext::SIG_KEY)?)?,
        })
    }
}
