//! Schnorr signatures over G1.
//!
//! ```text
//! h = SHA-256(m)
//! k = SHA-256("schnorr-nonce" || sk || h || ctr) mod r   first nonzero ctr
//! R = k G
//! e = SHA-256("schnorr-chal" || R || P || h) mod r
//! s = k + e sk
//! ```
//!
//! A signature is `R || s`; it verifies when `s G = R + e P`.

use rand::RngCore;
use sha2::{Digest, Sha256};

use super::ProtocolError;
use crate::field::PrimeField;
use crate::pairing::{CurveGroup, Fr, G1};

const NONCE_TAG: &[u8] = b"schnorr-nonce";
const CHALLENGE_TAG: &[u8] = b"schnorr-chal";

pub const SIGNATURE_LEN: usize = G1::ENCODED_LEN + Fr::BYTES;
pub const PUBLIC_KEY_LEN: usize = G1::ENCODED_LEN;

/// Secret signing key.
#[derive(Clone, PartialEq, Eq)]
pub struct SigningKey(Fr);

impl std::fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SigningKey(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicKey(pub G1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub r: G1,
    pub s: Fr,
}

fn to_scalar(digest: &[u8]) -> Fr {
    Fr::from_le_bytes_reduce(digest)
}

fn challenge(r: &G1, pk: &G1, h: &[u8; 32]) -> Fr {
    let mut hasher = Sha256::new();
    hasher.update(CHALLENGE_TAG);
    hasher.update(r.to_bytes());
    hasher.update(pk.to_bytes());
    hasher.update(h);
    to_scalar(&hasher.finalize())
}

impl SigningKey {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        loop {
            let x = Fr::random(rng);
            if !x.is_zero() {
                return SigningKey(x);
            }
        }
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(G1::generator().mul_scalar(&self.0))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_le_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        match Fr::from_le_bytes_canonical(bytes) {
            Some(x) if !x.is_zero() => Ok(SigningKey(x)),
            _ => Err(ProtocolError::Malformed("signing key".into())),
        }
    }

    fn nonce(&self, h: &[u8; 32]) -> Fr {
        (0u32..)
            .map(|ctr| {
                let mut hasher = Sha256::new();
                hasher.update(NONCE_TAG);
                hasher.update(self.0.to_le_bytes());
                hasher.update(h);
                hasher.update(ctr.to_le_bytes());
                to_scalar(&hasher.finalize())
            })
            .find(|k| !k.is_zero())
            .expect("a nonzero nonce turns up")
    }

    pub fn sign(&self, message: &[u8]) -> Signature {
        let h: [u8; 32] = Sha256::digest(message).into();
        let k = self.nonce(&h);
        let r = G1::generator().mul_scalar(&k);
        let e = challenge(&r, &self.public_key().0, &h);
        Signature { r, s: k + e * self.0 }
    }
}

impl PublicKey {
    pub fn verify(&self, message: &[u8], sig: &Signature) -> bool {
        if self.0.is_identity() || !self.0.is_in_subgroup() || !sig.r.is_in_subgroup() {
            return false;
        }
        let h: [u8; 32] = Sha256::digest(message).into();
        let e = challenge(&sig.r, &self.0, &h);
        G1::generator().mul_scalar(&sig.s) == sig.r + self.0.mul_scalar(&e)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let p = G1::from_bytes(bytes).map_err(|e| ProtocolError::Malformed(format!("public key: {e}")))?;
        if p.is_identity() {
            return Err(ProtocolError::Malformed("public key is the identity".into()));
        }
        Ok(PublicKey(p))
    }
}

impl Signature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.r.to_bytes();
        out.extend(self.s.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        if bytes.len() != SIGNATURE_LEN {
            return Err(ProtocolError::Malformed(format!(
                "signature of {} bytes, expected {SIGNATURE_LEN}",
                bytes.len()
            )));
        }
        let (r, s) = bytes.split_at(G1::ENCODED_LEN);
        Ok(Signature {
            r: G1::from_bytes(r).map_err(|e| ProtocolError::Malformed(format!("signature: {e}")))?,
            s: Fr::from_le_bytes_canonical(s)
                .ok_or_else(|| ProtocolError::Malformed("signature scalar out of range".into()))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sign_verify_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let sk = SigningKey::generate(&mut rng);
            let pk = sk.public_key();
            let len = rng.gen_range(0..100);
            let msg: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let sig = sk.sign(&msg);
            assert!(pk.verify(&msg, &sig));
            assert_eq!(sig, sk.sign(&msg));
            let decoded = Signature::from_bytes(&sig.to_bytes()).unwrap();
            assert!(pk.verify(&msg, &decoded));
        }
    }

    #[test]
    fn bit_flips_reject() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sk = SigningKey::generate(&mut rng);
        let pk = sk.public_key();
        let msg: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
        let sig = sk.sign(&msg);
        for _ in 0..100 {
            let mut m = msg.clone();
            let i = rng.gen_range(0..m.len());
            m[i] ^= 1 << rng.gen_range(0..8);
            assert!(!pk.verify(&m, &sig));
        }
        let other = SigningKey::generate(&mut rng).public_key();
        assert!(!other.verify(&msg, &sig));
        let bumped = Signature {
            r: sig.r,
            s: sig.s + Fr::one(),
        };
        assert!(!pk.verify(&msg, &bumped));
        let moved = Signature {
            r: sig.r + G1::generator(),
            s: sig.s,
        };
        assert!(!pk.verify(&msg, &moved));
    }

    #[test]
    fn malformed_encodings() {
        assert!(Signature::from_bytes(&[0u8; 3]).is_err());
        assert!(SigningKey::from_bytes(&Fr::zero().to_le_bytes()).is_err());
        assert!(PublicKey::from_bytes(&G1::identity().to_bytes()).is_err());
    }
}
