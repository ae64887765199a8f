//! Canonical tagged encodings.
//!
//! | tag    | kind          | bytes                                     |
//! |--------|---------------|-------------------------------------------|
//! | CTX    | integer       | 4, little-endian `u32`                    |
//! | R1CS   | bytes         | serialized constraint-system file, as is  |
//! | VK     | bytes         | serialized verification key, as is        |
//! | CERT   | bytes         | serialized certificate, as is             |
//! | PROOF  | bytes         | serialized proof (group elements), as is  |
//! | COMMIT | field element | `F::BYTES`, little-endian, `< p`          |
//! | TS     | integer       | 8, little-endian `u64`                    |
//! | NONCE  | bytes         | exactly 16                                |

use std::fmt;

use super::PrimeField;

pub const TS_LEN: usize = 8;
pub const NONCE_LEN: usize = 16;
const CTX_LEN: usize = 4;

/// Datatype tags. The discriminant is the tag byte used in sectioned files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum DTypeTag {
    Ctx = 1,
    R1cs = 2,
    Vk = 3,
    Cert = 4,
    Proof = 5,
    Commit = 6,
    Ts = 7,
    Nonce = 8,
}

impl DTypeTag {
    pub const ALL: [DTypeTag; 8] = [
        DTypeTag::Ctx,
        DTypeTag::R1cs,
        DTypeTag::Vk,
        DTypeTag::Cert,
        DTypeTag::Proof,
        DTypeTag::Commit,
        DTypeTag::Ts,
        DTypeTag::Nonce,
    ];

    pub fn from_byte(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            DTypeTag::Ctx => "CTX",
            DTypeTag::R1cs => "R1CS",
            DTypeTag::Vk => "VK",
            DTypeTag::Cert => "CERT",
            DTypeTag::Proof => "PROOF",
            DTypeTag::Commit => "COMMIT",
            DTypeTag::Ts => "TS",
            DTypeTag::Nonce => "NONCE",
        }
    }
}

impl fmt::Display for DTypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value to be encoded. Group elements and composite objects are passed as
/// their own serialized bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value<F> {
    Bytes(Vec<u8>),
    Integer(u64),
    Field(F),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("tag {tag} cannot encode a {kind} value")]
    KindMismatch { tag: DTypeTag, kind: &'static str },
    #[error("tag {tag}: expected {expected} bytes, got {got}")]
    Length { tag: DTypeTag, expected: usize, got: usize },
    #[error("tag {tag}: integer {value} out of range")]
    IntegerRange { tag: DTypeTag, value: u64 },
    #[error("tag {tag}: field value not below the modulus")]
    FieldRange { tag: DTypeTag },
}

fn kind_name<F>(v: &Value<F>) -> &'static str {
    match v {
        Value::Bytes(_) => "bytes",
        Value::Integer(_) => "integer",
        Value::Field(_) => "field",
    }
}

/// `Enc_dtype(value)`.
pub fn encode<F: PrimeField>(value: &Value<F>, tag: DTypeTag) -> Result<Vec<u8>, EncodingError> {
    let mismatch = || EncodingError::KindMismatch {
        tag,
        kind: kind_name(value),
    };
    match (tag, value) {
        (DTypeTag::Ctx, Value::Integer(v)) => {
            let v = u32::try_from(*v).map_err(|_| EncodingError::IntegerRange { tag, value: *v })?;
            Ok(v.to_le_bytes().to_vec())
        }
        (DTypeTag::Ts, Value::Integer(v)) => Ok(v.to_le_bytes().to_vec()),
        (DTypeTag::Nonce, Value::Bytes(b)) => {
            if b.len() != NONCE_LEN {
                return Err(EncodingError::Length {
                    tag,
                    expected: NONCE_LEN,
                    got: b.len(),
                });
            }
            Ok(b.clone())
        }
        (DTypeTag::Commit, Value::Field(f)) => Ok(f.to_le_bytes()),
        (DTypeTag::R1cs | DTypeTag::Vk | DTypeTag::Cert | DTypeTag::Proof, Value::Bytes(b)) => Ok(b.clone()),
        _ => Err(mismatch()),
    }
}

/// `Dec_dtype(bytes)`, the exact inverse of [`encode`].
pub fn decode<F: PrimeField>(bytes: &[u8], tag: DTypeTag) -> Result<Value<F>, EncodingError> {
    let want = |expected: usize| {
        if bytes.len() == expected {
            Ok(())
        } else {
            Err(EncodingError::Length {
                tag,
                expected,
                got: bytes.len(),
            })
        }
    };
    match tag {
        DTypeTag::Ctx => {
            want(CTX_LEN)?;
            Ok(Value::Integer(
                u32::from_le_bytes(bytes.try_into().expect("length checked")) as u64,
            ))
        }
        DTypeTag::Ts => {
            want(TS_LEN)?;
            Ok(Value::Integer(u64::from_le_bytes(
                bytes.try_into().expect("length checked"),
            )))
        }
        DTypeTag::Nonce => {
            want(NONCE_LEN)?;
            Ok(Value::Bytes(bytes.to_vec()))
        }
        DTypeTag::Commit => {
            want(F::BYTES)?;
            F::from_le_bytes_canonical(bytes)
                .map(Value::Field)
                .ok_or(EncodingError::FieldRange { tag })
        }
        DTypeTag::R1cs | DTypeTag::Vk | DTypeTag::Cert | DTypeTag::Proof => Ok(Value::Bytes(bytes.to_vec())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{StandardField, TestField};
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    type F = TestField;

    #[test]
    fn timestamp_layout() {
        let bytes = encode::<F>(&Value::Integer(1_700_000_000), DTypeTag::Ts).unwrap();
        assert_eq!(bytes, [0x00, 0xF1, 0x53, 0x65, 0, 0, 0, 0]);
        assert_eq!(
            decode::<F>(&bytes, DTypeTag::Ts).unwrap(),
            Value::Integer(1_700_000_000)
        );
    }

    #[test]
    fn nonce_is_identity() {
        let nonce: Vec<u8> = (0u8..16).collect();
        let bytes = encode::<F>(&Value::Bytes(nonce.clone()), DTypeTag::Nonce).unwrap();
        assert_eq!(bytes, nonce);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            decode::<F>(&[1, 2, 3], DTypeTag::Ts),
            Err(EncodingError::Length { .. })
        ));
        assert!(matches!(
            decode::<F>(&[0xff; 8], DTypeTag::Commit),
            Err(EncodingError::FieldRange { .. })
        ));
        assert!(matches!(
            encode::<F>(&Value::Integer(3), DTypeTag::Nonce),
            Err(EncodingError::KindMismatch { .. })
        ));
        assert!(matches!(
            encode::<F>(&Value::Integer(1 << 40), DTypeTag::Ctx),
            Err(EncodingError::IntegerRange { .. })
        ));
        assert!(matches!(
            encode::<F>(&Value::Bytes(vec![0; 15]), DTypeTag::Nonce),
            Err(EncodingError::Length { .. })
        ));
    }

    fn random_value(tag: DTypeTag, rng: &mut ChaCha8Rng) -> Value<StandardField> {
        match tag {
            DTypeTag::Ctx => Value::Integer(rng.gen::<u32>() as u64),
            DTypeTag::Ts => Value::Integer(rng.gen()),
            DTypeTag::Nonce => {
                let mut b = vec![0u8; 16];
                rng.fill_bytes(&mut b);
                Value::Bytes(b)
            }
            DTypeTag::Commit => Value::Field(StandardField::random(rng)),
            _ => {
                let len = rng.gen_range(0..64);
                let mut b = vec![0u8; len];
                rng.fill_bytes(&mut b);
                Value::Bytes(b)
            }
        }
    }

    #[test]
    fn roundtrip_every_tag() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tag in DTypeTag::ALL {
            for _ in 0..1000 {
                let v = random_value(tag, &mut rng);
                let bytes = encode(&v, tag).unwrap();
                assert_eq!(decode::<StandardField>(&bytes, tag).unwrap(), v);
            }
        }
    }

    #[test]
    fn injective_per_tag() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for tag in [DTypeTag::Ts, DTypeTag::Commit, DTypeTag::Nonce, DTypeTag::Ctx] {
            let mut seen: HashMap<Vec<u8>, Value<StandardField>> = HashMap::new();
            for _ in 0..100_000 {
                let v = random_value(tag, &mut rng);
                let bytes = encode(&v, tag).unwrap();
                if let Some(prev) = seen.insert(bytes, v.clone()) {
                    assert_eq!(prev, v, "two values share an encoding under {tag}");
                }
            }
        }
    }
}
