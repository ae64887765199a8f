//! The `HSR1` binary encoding of a constraint system.
//!
//! ```text
//! magic      "HSR1"
//! version    u8 = 1
//! field      u8 name length, name bytes
//! n          u32 LE   constraints
//! wires      u32 LE   m + 1
//! l          u32 LE   public wires
//! for M in A, B, C:
//!   count    u32 LE
//!   count x  (row u32 LE, wire u32 LE, coeff F::BYTES LE)
//! ```
//!
//! Records are sorted by row, then wire. The SHA-256 of these bytes is the
//! circuit hash bound into keys and packages.

use sha2::{Digest, Sha256};

use super::{ConstraintSystem, LinearCombination, R1csError};
use crate::field::PrimeField;

pub const MAGIC: &[u8; 4] = b"HSR1";
pub const VERSION: u8 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], R1csError> {
        if self.buf.len() - self.pos < n {
            return Err(R1csError::Format(format!(
                "truncated at byte {} (wanted {n} more)",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, R1csError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

impl<F: PrimeField> ConstraintSystem<F> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(F::NAME.len() as u8);
        out.extend_from_slice(F::NAME.as_bytes());
        out.extend((self.num_constraints() as u32).to_le_bytes());
        out.extend((self.num_wires as u32).to_le_bytes());
        out.extend((self.num_public as u32).to_le_bytes());
        for matrix in [&self.a, &self.b, &self.c] {
            let count: usize = matrix.iter().map(|lc| lc.terms().len()).sum();
            out.extend((count as u32).to_le_bytes());
            for (row, lc) in matrix.iter().enumerate() {
                for (wire, coeff) in lc.terms() {
                    out.extend((row as u32).to_le_bytes());
                    out.extend((*wire as u32).to_le_bytes());
                    out.extend(coeff.to_le_bytes());
                }
            }
        }
        out
    }

    /// Parses an `HSR1` file. The result can be checked and proven against
    /// but has no solvers, so it cannot generate witnesses.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, R1csError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(R1csError::Format("bad magic".into()));
        }
        let version = r.take(1)?[0];
        if version != VERSION {
            return Err(R1csError::Format(format!("unsupported version {version}")));
        }
        let name_len = r.take(1)?[0] as usize;
        let name = r.take(name_len)?;
        if name != F::NAME.as_bytes() {
            return Err(R1csError::Format(format!(
                "field profile {:?}, expected {}",
                String::from_utf8_lossy(name),
                F::NAME
            )));
        }
        let n = r.u32()? as usize;
        let num_wires = r.u32()? as usize;
        let num_public = r.u32()? as usize;
        if num_wires == 0 || num_public >= num_wires {
            return Err(R1csError::Format("inconsistent wire counts".into()));
        }
        let mut mats = Vec::with_capacity(3);
        for _ in 0..3 {
            let count = r.u32()? as usize;
            let mut rows: Vec<Vec<(usize, F)>> = vec![Vec::new(); n];
            let mut last: Option<(usize, usize)> = None;
            for _ in 0..count {
                let row = r.u32()? as usize;
                let wire = r.u32()? as usize;
                let coeff = F::from_le_bytes_canonical(r.take(F::BYTES)?)
                    .ok_or_else(|| R1csError::Format("coefficient out of range".into()))?;
                if row >= n || wire >= num_wires {
                    return Err(R1csError::Format(format!("record ({row}, {wire}) out of bounds")));
                }
                if coeff.is_zero() || last.is_some_and(|l| l >= (row, wire)) {
                    return Err(R1csError::Format("records not canonical".into()));
                }
                last = Some((row, wire));
                rows[row].push((wire, coeff));
            }
            mats.push(rows.into_iter().map(LinearCombination::from_terms).collect::<Vec<_>>());
        }
        if r.pos != bytes.len() {
            return Err(R1csError::Format("trailing bytes".into()));
        }
        let c = mats.pop().expect("three matrices");
        let b = mats.pop().expect("three matrices");
        let a = mats.pop().expect("three matrices");
        let mut wire_labels: Vec<String> = (0..num_wires).map(|j| format!("w{j}")).collect();
        wire_labels[0] = "one".into();
        Ok(ConstraintSystem {
            num_wires,
            num_public,
            a,
            b,
            c,
            row_labels: (0..n).map(|i| format!("row {i}")).collect(),
            wire_labels,
            program: None,
        })
    }

    /// SHA-256 of [`ConstraintSystem::to_bytes`].
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }

    /// Structural equality of the matrices and layout, ignoring labels and
    /// solvers.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.num_wires == other.num_wires
            && self.num_public == other.num_public
            && self.a == other.a
            && self.b == other.b
            && self.c == other.c
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Assignment, CircuitBuilder};
    use super::*;
    use crate::field::{StandardField, TestField};

    fn sample<F: PrimeField>() -> ConstraintSystem<F> {
        let mut cs = CircuitBuilder::<F>::new();
        let x = cs.alloc_private("x");
        let t = cs.alloc_public("t");
        let y = cs.mul(x, x);
        let ge = cs.geq(y, LinearCombination::constant(F::from_u64(9)), 8);
        cs.enforce_equal("t", ge, t);
        cs.finalize().unwrap()
    }

    #[test]
    fn roundtrip_and_hash_stability() {
        let cs = sample::<TestField>();
        let bytes = cs.to_bytes();
        assert_eq!(&bytes[..4], MAGIC);
        let back = ConstraintSystem::<TestField>::from_bytes(&bytes).unwrap();
        assert!(back.same_structure(&cs));
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.digest(), cs.digest());
        assert!(!back.has_witness_program());
        assert_eq!(
            back.generate_witness(&Assignment::new()).unwrap_err(),
            R1csError::NoWitnessProgram
        );

        let std_cs = sample::<StandardField>();
        let back = ConstraintSystem::<StandardField>::from_bytes(&std_cs.to_bytes()).unwrap();
        assert!(back.same_structure(&std_cs));
    }

    #[test]
    fn loaded_system_checks_witnesses() {
        let cs = sample::<TestField>();
        let mut a = Assignment::new();
        a.set("x", TestField::from_u64(4)).set("t", TestField::one());
        let w = cs.generate_witness(&a).unwrap();
        let back = ConstraintSystem::<TestField>::from_bytes(&cs.to_bytes()).unwrap();
        assert!(back.is_satisfied(w.values()).unwrap());
    }

    #[test]
    fn rejects_malformed_files() {
        let cs = sample::<TestField>();
        let bytes = cs.to_bytes();
        let parse = |b: &[u8]| ConstraintSystem::<TestField>::from_bytes(b);
        assert!(parse(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(parse(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(parse(&extra).is_err());
        assert!(ConstraintSystem::<StandardField>::from_bytes(&bytes).is_err());
    }
}
