//! Commitments `c = H(m ; s)` built on an arithmetic-friendly sponge, the
//! byte-level hash, and statistical harnesses for binding and hiding.

mod gadget;
pub mod games;
mod sponge;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::field::PrimeField;

pub use gadget::{sponge_constraint_count, sponge_gadget};
pub use sponge::{sponge_hash, SpongeParams, RATE, SPONGE_SEED, WIDTH};

/// SHA-256.
pub fn byte_hash(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// The blinding factor `s_sec`: 128 random bits reduced into the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlindingFactor<F>(pub F);

impl<F: PrimeField> BlindingFactor<F> {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; 16];
        rng.fill_bytes(&mut bytes);
        BlindingFactor(F::from_u128(u128::from_le_bytes(bytes)))
    }

    pub fn value(&self) -> F {
        self.0
    }
}

/// A commitment value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Commitment<F>(pub F);

/// An opening `(m, s_sec)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Opening<F> {
    pub message: Vec<F>,
    pub blinding: BlindingFactor<F>,
}

/// `sponge(m || s)`.
pub fn commit<F: PrimeField>(message: &[F], s: &BlindingFactor<F>) -> Commitment<F> {
    let mut input = message.to_vec();
    input.push(s.0);
    Commitment(sponge_hash(&input))
}

/// Recomputes the commitment from an opening.
pub fn verify_commitment<F: PrimeField>(c: &Commitment<F>, message: &[F], s: &BlindingFactor<F>) -> bool {
    commit(message, s) == *c
}

impl<F: PrimeField> Opening<F> {
    pub fn new(message: Vec<F>, blinding: BlindingFactor<F>) -> Self {
        Opening { message, blinding }
    }

    pub fn commitment(&self) -> Commitment<F> {
        commit(&self.message, &self.blinding)
    }

    pub fn verify(&self, c: &Commitment<F>) -> bool {
        verify_commitment(c, &self.message, &self.blinding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TestField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type F = TestField;

    #[test]
    fn sha256_vectors() {
        assert_eq!(
            hex::encode(byte_hash(b"")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            hex::encode(byte_hash(b"abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn commit_open_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m: Vec<F> = (1..=4).map(F::from_u64).collect();
        let s1 = BlindingFactor::random(&mut rng);
        let s2 = BlindingFactor::random(&mut rng);
        let c = commit(&m, &s1);
        assert_eq!(c, commit(&m, &s1));
        assert_ne!(c, commit(&m, &s2));
        let opening = Opening::new(m.clone(), s1);
        assert!(opening.verify(&c));
        for i in 0..m.len() {
            let mut bad = m.clone();
            bad[i] += F::one();
            assert!(!verify_commitment(&c, &bad, &s1));
        }
        assert!(!verify_commitment(&c, &m, &BlindingFactor(s1.0 + F::one())));
    }
}
