//! One-level certificates binding a vehicle identity to its signing key,
//! issued by the enforcement authority's root key.
//!
//! ```text
//! vid          u16 LE length, bytes
//! vk_sig       G1 point
//! not_before   u64 LE, Unix seconds
//! not_after    u64 LE, Unix seconds
//! issuer_sig   signature over "HSCERT" || the fields above
//! ```

use rand::RngCore;

use super::schnorr::{PublicKey, Signature, SigningKey, PUBLIC_KEY_LEN, SIGNATURE_LEN};
use super::ProtocolError;
use crate::codec::ByteReader;

const CERT_DOMAIN: &[u8] = b"HSCERT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub vid: Vec<u8>,
    pub vk_sig: PublicKey,
    pub not_before: u64,
    pub not_after: u64,
    pub issuer_sig: Signature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CertError {
    #[error("issuer signature does not verify under the root key")]
    Issuer,
    #[error("certificate not valid until {0}")]
    NotYetValid(u64),
    #[error("certificate expired at {0}")]
    Expired(u64),
}

fn tbs(vid: &[u8], vk_sig: &PublicKey, not_before: u64, not_after: u64) -> Vec<u8> {
    let mut out = CERT_DOMAIN.to_vec();
    out.extend((vid.len() as u16).to_le_bytes());
    out.extend_from_slice(vid);
    out.extend(vk_sig.to_bytes());
    out.extend(not_before.to_le_bytes());
    out.extend(not_after.to_le_bytes());
    out
}

impl Certificate {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = tbs(&self.vid, &self.vk_sig, self.not_before, self.not_after);
        out.drain(..CERT_DOMAIN.len());
        out.extend(self.issuer_sig.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let bad = |e: crate::codec::CodecError| ProtocolError::Malformed(format!("certificate: {e}"));
        let mut r = ByteReader::new(bytes);
        let n = u16::from_le_bytes(r.array().map_err(bad)?) as usize;
        let vid = r.take(n).map_err(bad)?.to_vec();
        let vk_sig = PublicKey::from_bytes(r.take(PUBLIC_KEY_LEN).map_err(bad)?)?;
        let not_before = r.u64().map_err(bad)?;
        let not_after = r.u64().map_err(bad)?;
        let issuer_sig = Signature::from_bytes(r.take(SIGNATURE_LEN).map_err(bad)?)?;
        r.finish().map_err(bad)?;
        Ok(Certificate {
            vid,
            vk_sig,
            not_before,
            not_after,
            issuer_sig,
        })
    }

    /// Checks the issuer signature and the validity window at `now`.
    pub fn verify(&self, root: &PublicKey, now: u64) -> Result<(), CertError> {
        let body = tbs(&self.vid, &self.vk_sig, self.not_before, self.not_after);
        if !root.verify(&body, &self.issuer_sig) {
            return Err(CertError::Issuer);
        }
        if now < self.not_before {
            return Err(CertError::NotYetValid(self.not_before));
        }
        if now > self.not_after {
            return Err(CertError::Expired(self.not_after));
        }
        Ok(())
    }
}

/// The enforcement authority's root signing key.
#[derive(Debug, Clone)]
pub struct Authority {
    key: SigningKey,
}

impl Authority {
    pub fn new(key: SigningKey) -> Self {
        Authority { key }
    }

    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Authority::new(SigningKey::generate(rng))
    }

    pub fn signing_key(&self) -> &SigningKey {
        &self.key
    }

    pub fn root_key(&self) -> PublicKey {
        self.key.public_key()
    }

    pub fn issue(&self, vid: &[u8], vk_sig: PublicKey, not_before: u64, not_after: u64) -> Certificate {
        let issuer_sig = self.key.sign(&tbs(vid, &vk_sig, not_before, not_after));
        Certificate {
            vid: vid.to_vec(),
            vk_sig,
            not_before,
            not_after,
            issuer_sig,
        }
    }
}

/// A vehicle's signing key together with its certificate.
#[derive(Debug, Clone)]
pub struct Identity {
    pub key: SigningKey,
    pub cert: Certificate,
}

impl Identity {
    /// Fresh key pair certified by `authority` for `[not_before, not_after]`.
    pub fn enroll<R: RngCore + ?Sized>(
        authority: &Authority,
        vid: &[u8],
        not_before: u64,
        not_after: u64,
        rng: &mut R,
    ) -> Self {
        let key = SigningKey::generate(rng);
        let cert = authority.issue(vid, key.public_key(), not_before, not_after);
        Identity { key, cert }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn issue_verify_and_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ea = Authority::generate(&mut rng);
        let id = Identity::enroll(&ea, b"VID-0001", 100, 200, &mut rng);
        let root = ea.root_key();
        assert_eq!(id.cert.verify(&root, 150), Ok(()));
        assert_eq!(id.cert.verify(&root, 100), Ok(()));
        assert_eq!(id.cert.verify(&root, 200), Ok(()));
        assert_eq!(id.cert.verify(&root, 99), Err(CertError::NotYetValid(100)));
        assert_eq!(id.cert.verify(&root, 201), Err(CertError::Expired(200)));

        let other = Authority::generate(&mut rng);
        assert_eq!(id.cert.verify(&other.root_key(), 150), Err(CertError::Issuer));

        let mut forged = id.cert.clone();
        forged.not_after = 10_000;
        assert_eq!(forged.verify(&root, 150), Err(CertError::Issuer));
    }

    #[test]
    fn encoding_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ea = Authority::generate(&mut rng);
        let id = Identity::enroll(&ea, b"ego", 0, u64::MAX, &mut rng);
        let bytes = id.cert.to_bytes();
        assert_eq!(Certificate::from_bytes(&bytes).unwrap(), id.cert);
        assert!(Certificate::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(Certificate::from_bytes(&longer).is_err());
    }
}
