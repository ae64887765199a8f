//! Where the commitment, timestamp and nonce sit in a circuit's public
//! inputs.
//!
//! Every circuit that produces packages allocates public wires labelled
//! [`COMMITMENT_LABEL`], [`TIMESTAMP_LABEL`] and `nu/0`, `nu/1`, ... The
//! 16-byte nonce is split little-endian into limbs of `CAPACITY / 8` bytes,
//! so it takes three limbs on the 61-bit profile and one on the 254-bit one.

use super::ProtocolError;
use crate::codec::ByteReader;
use crate::field::{PrimeField, NONCE_LEN};
use crate::r1cs::{Assignment, CircuitBuilder, Variable};

pub const COMMITMENT_LABEL: &str = "c";
pub const TIMESTAMP_LABEL: &str = "T";
pub const NONCE_LABEL: &str = "nu";

pub type Nonce = [u8; NONCE_LEN];

pub fn nonce_limb_bytes<F: PrimeField>() -> usize {
    (F::CAPACITY / 8) as usize
}

pub fn nonce_limb_count<F: PrimeField>() -> usize {
    NONCE_LEN.div_ceil(nonce_limb_bytes::<F>())
}

pub fn nonce_labels<F: PrimeField>() -> Vec<String> {
    (0..nonce_limb_count::<F>())
        .map(|i| format!("{NONCE_LABEL}/{i}"))
        .collect()
}

pub fn nonce_to_limbs<F: PrimeField>(nonce: &Nonce) -> Vec<F> {
    nonce
        .chunks(nonce_limb_bytes::<F>())
        .map(|chunk| F::from_le_bytes_reduce(chunk))
        .collect()
}

pub fn nonce_from_limbs<F: PrimeField>(limbs: &[F]) -> Option<Nonce> {
    let width = nonce_limb_bytes::<F>();
    if limbs.len() != nonce_limb_count::<F>() {
        return None;
    }
    let mut out = Vec::with_capacity(NONCE_LEN);
    for (i, limb) in limbs.iter().enumerate() {
        let take = width.min(NONCE_LEN - i * width);
        let bytes = limb.to_le_bytes();
        if bytes[take..].iter().any(|b| *b != 0) {
            return None;
        }
        out.extend_from_slice(&bytes[..take]);
    }
    out.try_into().ok()
}

/// The freshness wires of a circuit.
#[derive(Debug, Clone)]
pub struct ContextWires {
    pub timestamp: Variable,
    pub nonce: Vec<Variable>,
}

impl ContextWires {
    /// Allocates `T` and the nonce limbs as public inputs.
    pub fn alloc<F: PrimeField>(cs: &mut CircuitBuilder<F>) -> Self {
        let timestamp = cs.alloc_public(TIMESTAMP_LABEL);
        let nonce = nonce_labels::<F>().iter().map(|l| cs.alloc_public(l)).collect();
        ContextWires { timestamp, nonce }
    }

    /// `T` followed by the nonce limbs.
    pub fn variables(&self) -> Vec<Variable> {
        std::iter::once(self.timestamp)
            .chain(self.nonce.iter().copied())
            .collect()
    }
}

/// Sets the `T` and nonce inputs.
pub fn set_context<F: PrimeField>(a: &mut Assignment<F>, timestamp: u64, nonce: &Nonce) {
    a.set(TIMESTAMP_LABEL, F::from_u64(timestamp));
    for (label, limb) in nonce_labels::<F>().into_iter().zip(nonce_to_limbs::<F>(nonce)) {
        a.set(label, limb);
    }
}

/// Indices into the public input vector `X` (0-based, so wire `j` is at
/// `j - 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicLayout {
    pub num_public: usize,
    pub commitment: usize,
    pub timestamp: usize,
    pub nonce: Vec<usize>,
}

/// The context values carried by a public input vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundContext<F> {
    pub commitment: F,
    pub timestamp: u64,
    pub nonce: Nonce,
}

impl PublicLayout {
    /// Locates the labelled wires among the public wire labels.
    pub fn from_labels<F: PrimeField>(labels: &[String]) -> Result<Self, ProtocolError> {
        let find = |want: &str| {
            labels
                .iter()
                .position(|l| l == want)
                .ok_or_else(|| ProtocolError::Layout(format!("no public wire labelled {want:?}")))
        };
        Ok(PublicLayout {
            num_public: labels.len(),
            commitment: find(COMMITMENT_LABEL)?,
            timestamp: find(TIMESTAMP_LABEL)?,
            nonce: nonce_labels::<F>().iter().map(|l| find(l)).collect::<Result<_, _>>()?,
        })
    }

    pub fn extract<F: PrimeField>(&self, x: &[F]) -> Result<BoundContext<F>, ProtocolError> {
        if x.len() != self.num_public {
            return Err(ProtocolError::Layout(format!(
                "{} public inputs, layout expects {}",
                x.len(),
                self.num_public
            )));
        }
        let timestamp = x[self.timestamp]
            .to_u64()
            .ok_or_else(|| ProtocolError::Layout("timestamp exceeds 64 bits".into()))?;
        let limbs: Vec<F> = self.nonce.iter().map(|&i| x[i]).collect();
        let nonce = nonce_from_limbs(&limbs).ok_or_else(|| ProtocolError::Layout("nonce limbs out of range".into()))?;
        Ok(BoundContext {
            commitment: x[self.commitment],
            timestamp,
            nonce,
        })
    }

    /// `u32` counts and indices, little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for v in [self.num_public, self.commitment, self.timestamp, self.nonce.len()] {
            out.extend((v as u32).to_le_bytes());
        }
        for &i in &self.nonce {
            out.extend((i as u32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProtocolError> {
        let bad = |e: crate::codec::CodecError| ProtocolError::Malformed(format!("layout: {e}"));
        let mut r = ByteReader::new(bytes);
        let num_public = r.u32().map_err(bad)? as usize;
        let commitment = r.u32().map_err(bad)? as usize;
        let timestamp = r.u32().map_err(bad)? as usize;
        let n = r.u32().map_err(bad)? as usize;
        if n > NONCE_LEN {
            return Err(ProtocolError::Malformed("layout: too many nonce limbs".into()));
        }
        let nonce = (0..n)
            .map(|_| r.u32().map(|v| v as usize))
            .collect::<Result<Vec<_>, _>>()
            .map_err(bad)?;
        r.finish().map_err(bad)?;
        if std::iter::once(commitment)
            .chain(std::iter::once(timestamp))
            .chain(nonce.iter().copied())
            .any(|i| i >= num_public)
        {
            return Err(ProtocolError::Malformed("layout index out of range".into()));
        }
        Ok(PublicLayout {
            num_public,
            commitment,
            timestamp,
            nonce,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{StandardField, TestField};
    use proptest::prelude::*;

    #[test]
    fn limb_counts() {
        assert_eq!(nonce_limb_bytes::<TestField>(), 7);
        assert_eq!(nonce_limb_count::<TestField>(), 3);
        assert_eq!(nonce_limb_count::<StandardField>(), 1);
    }

    proptest! {
        #[test]
        fn nonce_limbs_roundtrip(nonce in any::<[u8; 16]>()) {
            let limbs = nonce_to_limbs::<TestField>(&nonce);
            prop_assert_eq!(nonce_from_limbs(&limbs), Some(nonce));
            let limbs = nonce_to_limbs::<StandardField>(&nonce);
            prop_assert_eq!(nonce_from_limbs(&limbs), Some(nonce));
        }
    }

    #[test]
    fn oversized_limb_is_rejected() {
        let mut limbs = nonce_to_limbs::<TestField>(&[0xff; 16]);
        limbs[2] = TestField::from_u64(1 << 16);
        assert_eq!(nonce_from_limbs(&limbs), None);
    }

    #[test]
    fn layout_from_circuit_labels() {
        let mut cs = CircuitBuilder::<TestField>::new();
        let ok = cs.alloc_public("SAFE");
        let ctx = ContextWires::alloc(&mut cs);
        let c = cs.alloc_public(COMMITMENT_LABEL);
        cs.enforce_equal("c", c, c);
        cs.enforce_equal("ok", ok, ok);
        let _ = ctx.variables();
        let sys = cs.finalize().unwrap();
        let layout = PublicLayout::from_labels::<TestField>(sys.public_labels()).unwrap();
        assert_eq!(layout.timestamp, 1);
        assert_eq!(layout.nonce, vec![2, 3, 4]);
        assert_eq!(layout.commitment, 5);
        assert_eq!(PublicLayout::from_bytes(&layout.to_bytes()).unwrap(), layout);

        let nonce = [7u8; 16];
        let mut a = Assignment::new();
        a.set("SAFE", TestField::one());
        a.set(COMMITMENT_LABEL, TestField::from_u64(99));
        set_context(&mut a, 1_700_000_000, &nonce);
        let w = sys.generate_witness(&a).unwrap();
        let got = layout.extract(w.public_inputs()).unwrap();
        assert_eq!(
            got,
            BoundContext {
                commitment: TestField::from_u64(99),
                timestamp: 1_700_000_000,
                nonce
            }
        );
    }
}
