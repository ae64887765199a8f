//! Key and proof types with their byte encodings.
//!
//! `Proof::to_bytes` is `A || B || C`. Key encodings start with the profile
//! byte and the 32-byte circuit hash; files wrap them in a tagged container
//! (see [`crate::codec`]).

use crate::codec::{ext, put_points, tag, ByteReader, CodecError, Container, ContainerWriter};
use crate::field::DTypeTag;
use crate::pairing::{CurveGroup, PairingEngine};
use crate::qap::QapInstance;

use super::Groth16Error;

pub const PK_MAGIC: &[u8; 4] = b"HSPK";
pub const VK_MAGIC: &[u8; 4] = b"HSVK";
pub const PROOF_MAGIC: &[u8; 4] = b"HSPF";

/// `pi = (A, B, C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof<E: PairingEngine> {
    pub a: E::G1,
    pub b: E::G2,
    pub c: E::G1,
}

impl<E: PairingEngine> Proof<E> {
    pub fn encoded_len() -> usize {
        2 * <E::G1 as CurveGroup>::ENCODED_LEN + <E::G2 as CurveGroup>::ENCODED_LEN
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.a.to_bytes();
        out.extend(self.b.to_bytes());
        out.extend(self.c.to_bytes());
        out
    }

    /// Decodes and checks that every element lies in its subgroup.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = ByteReader::new(bytes);
        let p = Proof {
            a: r.point()?,
            b: r.point()?,
            c: r.point()?,
        };
        r.finish()?;
        Ok(p)
    }

    /// Proof file: container with a single PROOF section.
    pub fn to_file(&self) -> Vec<u8> {
        ContainerWriter::new(PROOF_MAGIC, E::PROFILE_BYTE)
            .section(tag(DTypeTag::Proof), &self.to_bytes())
            .finish()
    }

    pub fn from_file(bytes: &[u8]) -> Result<Self, CodecError> {
        let c = Container::parse(bytes, PROOF_MAGIC, E::PROFILE_BYTE)?;
        c.expect_order(&[tag(DTypeTag::Proof)])?;
        Self::from_bytes(c.get(tag(DTypeTag::Proof))?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyingKey<E: PairingEngine> {
    pub circuit_hash: [u8; 32],
    pub alpha_g1: E::G1,
    pub beta_g2: E::G2,
    pub gamma_g2: E::G2,
    pub delta_g2: E::G2,
    /// One element for the constant wire and one per public wire.
    pub ic: Vec<E::G1>,
    /// Cached `e(alpha, beta)`.
    pub alpha_beta: E::Gt,
}

impl<E: PairingEngine> VerifyingKey<E> {
    pub fn new(
        circuit_hash: [u8; 32],
        alpha_g1: E::G1,
        beta_g2: E::G2,
        gamma_g2: E::G2,
        delta_g2: E::G2,
        ic: Vec<E::G1>,
    ) -> Self {
        let alpha_beta = E::pair(&alpha_g1, &beta_g2);
        VerifyingKey {
            circuit_hash,
            alpha_g1,
            beta_g2,
            gamma_g2,
            delta_g2,
            ic,
            alpha_beta,
        }
    }

    /// `l`.
    pub fn num_public(&self) -> usize {
        self.ic.len() - 1
    }

    /// `Enc_VK(vk)`: profile byte, circuit hash, then the group elements.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![E::PROFILE_BYTE];
        out.extend_from_slice(&self.circuit_hash);
        out.extend(self.alpha_g1.to_bytes());
        out.extend(self.beta_g2.to_bytes());
        out.extend(self.gamma_g2.to_bytes());
        out.extend(self.delta_g2.to_bytes());
        put_points(&mut out, &self.ic);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = ByteReader::new(bytes);
        let profile = r.u8()?;
        if profile != E::PROFILE_BYTE {
            return Err(CodecError::Profile {
                expected: E::PROFILE_BYTE,
                got: profile,
            });
        }
        let circuit_hash = r.array()?;
        let alpha_g1 = r.point()?;
        let beta_g2 = r.point()?;
        let gamma_g2 = r.point()?;
        let delta_g2 = r.point()?;
        let ic: Vec<E::G1> = r.points()?;
        r.finish()?;
        if ic.is_empty() {
            return Err(CodecError::Invalid("empty input-combination vector".into()));
        }
        Ok(Self::new(circuit_hash, alpha_g1, beta_g2, gamma_g2, delta_g2, ic))
    }

    /// Decodes and requires the key to belong to `circuit_hash`.
    pub fn from_bytes_for(bytes: &[u8], circuit_hash: &[u8; 32]) -> Result<Self, Groth16Error> {
        let vk = Self::from_bytes(bytes)?;
        if &vk.circuit_hash != circuit_hash {
            return Err(Groth16Error::CircuitMismatch);
        }
        Ok(vk)
    }

    pub fn to_file(&self) -> Vec<u8> {
        ContainerWriter::new(VK_MAGIC, E::PROFILE_BYTE)
            .section(tag(DTypeTag::Vk), &self.to_bytes())
            .finish()
    }

    pub fn from_file(bytes: &[u8]) -> Result<Self, CodecError> {
        let c = Container::parse(bytes, VK_MAGIC, E::PROFILE_BYTE)?;
        c.expect_order(&[tag(DTypeTag::Vk)])?;
        Self::from_bytes(c.get(tag(DTypeTag::Vk))?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvingKey<E: PairingEngine> {
    pub circuit_hash: [u8; 32],
    pub num_constraints: usize,
    pub alpha_g1: E::G1,
    pub beta_g1: E::G1,
    pub beta_g2: E::G2,
    pub delta_g1: E::G1,
    pub delta_g2: E::G2,
    /// `A_j(tau)` for every wire.
    pub a_query: Vec<E::G1>,
    /// `B_j(tau)` for every wire, in G1.
    pub b_g1_query: Vec<E::G1>,
    /// `B_j(tau)` for every wire, in G2.
    pub b_g2_query: Vec<E::G2>,
    /// `tau^k t(tau) / delta` for `k = 0..n-2`.
    pub h_query: Vec<E::G1>,
    /// `(beta A_j + alpha B_j + C_j) / delta` for every private wire.
    pub l_query: Vec<E::G1>,
    pub vk: VerifyingKey<E>,
}

impl<E: PairingEngine> ProvingKey<E> {
    pub fn verifying_key(&self) -> &VerifyingKey<E> {
        &self.vk
    }

    /// Checks that `qap` is the circuit this key was generated for.
    pub fn check_qap(&self, qap: &QapInstance<E::Scalar>) -> Result<(), Groth16Error> {
        if qap.constraint_system().digest() != self.circuit_hash {
            return Err(Groth16Error::CircuitMismatch);
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![E::PROFILE_BYTE];
        out.extend_from_slice(&self.circuit_hash);
        out.extend((self.num_constraints as u32).to_le_bytes());
        out.extend(self.alpha_g1.to_bytes());
        out.extend(self.beta_g1.to_bytes());
        out.extend(self.beta_g2.to_bytes());
        out.extend(self.delta_g1.to_bytes());
        out.extend(self.delta_g2.to_bytes());
        put_points(&mut out, &self.a_query);
        put_points(&mut out, &self.b_g1_query);
        put_points(&mut out, &self.b_g2_query);
        put_points(&mut out, &self.h_query);
        put_points(&mut out, &self.l_query);
        let vk = self.vk.to_bytes();
        out.extend((vk.len() as u32).to_le_bytes());
        out.extend(vk);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = ByteReader::new(bytes);
        let profile = r.u8()?;
        if profile != E::PROFILE_BYTE {
            return Err(CodecError::Profile {
                expected: E::PROFILE_BYTE,
                got: profile,
            });
        }
        let circuit_hash = r.array()?;
        let num_constraints = r.u32()? as usize;
        let pk = ProvingKey {
            circuit_hash,
            num_constraints,
            alpha_g1: r.point()?,
            beta_g1: r.point()?,
            beta_g2: r.point()?,
            delta_g1: r.point()?,
            delta_g2: r.point()?,
            a_query: r.points()?,
            b_g1_query: r.points()?,
            b_g2_query: r.points()?,
            h_query: r.points()?,
            l_query: r.points()?,
            vk: {
                let len = r.u32()? as usize;
                VerifyingKey::from_bytes(r.take(len)?)?
            },
        };
        r.finish()?;
        let m1 = pk.a_query.len();
        let l = pk.vk.num_public();
        let consistent = pk.b_g1_query.len() == m1
            && pk.b_g2_query.len() == m1
            && pk.l_query.len() + l + 1 == m1
            && pk.h_query.len() + 1 == num_constraints.max(1)
            && pk.vk.circuit_hash == circuit_hash;
        if !consistent {
            return Err(CodecError::Invalid("proving key vector lengths disagree".into()));
        }
        Ok(pk)
    }

    /// Proving-key file; `descriptor` is an opaque description of the
    /// circuit (stored so tools can rebuild it).
    pub fn to_file(&self, descriptor: &[u8]) -> Vec<u8> {
        ContainerWriter::new(PK_MAGIC, E::PROFILE_BYTE)
            .section(ext::PROVING_KEY, &self.to_bytes())
            .section(ext::DESCRIPTOR, descriptor)
            .finish()
    }

    /// Returns the key and the descriptor bytes.
    pub fn from_file(bytes: &[u8]) -> Result<(Self, Vec<u8>), CodecError> {
        let c = Container::parse(bytes, PK_MAGIC, E::PROFILE_BYTE)?;
        c.expect_order(&[ext::PROVING_KEY, ext::DESCRIPTOR])?;
        Ok((
            Self::from_bytes(c.get(ext::PROVING_KEY)?)?,
            c.get(ext::DESCRIPTOR)?.to_vec(),
        ))
    }
}
