//! Poseidon-style sponge over a prime field: width 3, rate 2.
//!
//! Parameters come from a published seed string through counter-mode
//! SHA-256: block `k` is `SHA-256(seed || k as u32 big-endian)`, read as a
//! little-endian integer and reduced mod `p`. Round constants are drawn
//! first (round-major, lane-minor), then the 3x3 mixing matrix row-major. A
//! matrix with any singular square submatrix is discarded and the next nine
//! blocks are drawn.
//!
//! Hashing `n` elements: the state starts as `[n, 0, 0]` (lane 0 is the
//! capacity), the input is absorbed two elements at a time into lanes 1
//! and 2 with zero padding of the last chunk, each chunk is followed by one
//! permutation, and the output is lane 1. The empty input still runs one
//! permutation.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use sha2::{Digest, Sha256};

use crate::field::PrimeField;

pub const SPONGE_SEED: &str = "HERMES-SEAL-POSEIDON-v1";
pub const WIDTH: usize = 3;
pub const RATE: usize = 2;

/// Permutation parameters for one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpongeParams<F> {
    pub alpha: u64,
    pub full_rounds: usize,
    pub partial_rounds: usize,
    /// `(full_rounds + partial_rounds) * WIDTH` constants.
    pub round_constants: Vec<F>,
    pub mds: [[F; WIDTH]; WIDTH],
}

fn det<F: PrimeField>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut d = F::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return F::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        let inv = m[col][col].inverse().expect("nonzero pivot");
        for r in col + 1..n {
            let factor = m[r][col] * inv;
            for c in col..n {
                let sub = factor * m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    d
}

/// Every square submatrix is invertible.
fn all_minors_nonzero<F: PrimeField>(m: &[[F; WIDTH]; WIDTH]) -> bool {
    for rows in 1u32..(1 << WIDTH) {
        for cols in 1u32..(1 << WIDTH) {
            if rows.count_ones() != cols.count_ones() {
                continue;
            }
            let sub: Vec<Vec<F>> = (0..WIDTH)
                .filter(|r| rows >> r & 1 == 1)
                .map(|r| (0..WIDTH).filter(|c| cols >> c & 1 == 1).map(|c| m[r][c]).collect())
                .collect();
            if det(sub).is_zero() {
                return false;
            }
        }
    }
    true
}

struct Stream {
    seed: Vec<u8>,
    counter: u32,
}

impl Stream {
    fn next<F: PrimeField>(&mut self) -> F {
        let mut h = Sha256::new();
        h.update(&self.seed);
        h.update(self.counter.to_be_bytes());
        self.counter += 1;
        F::from_le_bytes_reduce(&h.finalize())
    }
}

impl<F: PrimeField> SpongeParams<F> {
    /// Derives the parameters for `F` from [`SPONGE_SEED`].
    ///
    /// `alpha` is the smallest odd integer `>= 3` coprime to `p - 1`. Fields
    /// up to 64 bits use 8 full and 22 partial rounds; larger fields 8 full
    /// and 57 partial rounds.
    pub fn derive() -> Self {
        Self::derive_from_seed(SPONGE_SEED.as_bytes())
    }

    pub fn derive_from_seed(seed: &[u8]) -> Self {
        let pm1 = F::modulus() - 1u32;
        let alpha = (3u64..)
            .step_by(2)
            .find(|a| pm1.gcd(&(*a).into()) == 1u32.into())
            .expect("some odd exponent is coprime to p - 1");
        let full_rounds = 8;
        let partial_rounds = if F::NUM_BITS <= 64 { 22 } else { 57 };
        let mut stream = Stream {
            seed: seed.to_vec(),
            counter: 0,
        };
        let round_constants = (0..(full_rounds + partial_rounds) * WIDTH)
            .map(|_| stream.next())
            .collect();
        let mds = loop {
            let mut m = [[F::zero(); WIDTH]; WIDTH];
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x = stream.next();
                }
            }
            if all_minors_nonzero(&m) {
                break m;
            }
        };
        SpongeParams {
            alpha,
            full_rounds,
            partial_rounds,
            round_constants,
            mds,
        }
    }

    /// Cached [`SpongeParams::derive`].
    pub fn get() -> Arc<Self> {
        type Cache = Mutex<HashMap<TypeId, Arc<dyn Any + Send + Sync>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("sponge cache poisoned");
        let entry = map
            .entry(TypeId::of::<F>())
            .or_insert_with(|| Arc::new(Self::derive()) as Arc<dyn Any + Send + Sync>)
            .clone();
        entry.downcast::<Self>().expect("keyed by type")
    }

    pub fn total_rounds(&self) -> usize {
        self.full_rounds + self.partial_rounds
    }

    /// Whether round `r` applies the S-box to every lane.
    pub fn is_full_round(&self, r: usize) -> bool {
        let half = self.full_rounds / 2;
        r < half || r >= half + self.partial_rounds
    }

    pub fn sbox(&self, x: F) -> F {
        x.pow_u64(self.alpha)
    }

    pub fn permute(&self, state: &mut [F; WIDTH]) {
        for r in 0..self.total_rounds() {
            for (i, s) in state.iter_mut().enumerate() {
                *s += self.round_constants[r * WIDTH + i];
            }
            if self.is_full_round(r) {
                for s in state.iter_mut() {
                    *s = self.sbox(*s);
                }
            } else {
                state[0] = self.sbox(state[0]);
            }
            let old = *state;
            for (i, s) in state.iter_mut().enumerate() {
                *s = (0..WIDTH).map(|k| self.mds[i][k] * old[k]).sum();
            }
        }
    }

    pub fn hash(&self, inputs: &[F]) -> F {
        let mut state = [F::zero(); WIDTH];
        state[0] = F::from_u64(inputs.len() as u64);
        if inputs.is_empty() {
            self.permute(&mut state);
        }
        for chunk in inputs.chunks(RATE) {
            for (k, x) in chunk.iter().enumerate() {
                state[1 + k] += *x;
            }
            self.permute(&mut state);
        }
        state[1]
    }
}

/// Sponge hash with the cached parameters of `F`.
pub fn sponge_hash<F: PrimeField>(inputs: &[F]) -> F {
    SpongeParams::<F>::get().hash(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{StandardField, TestField};

    #[test]
    fn parameters_have_expected_shape() {
        let p = SpongeParams::<TestField>::derive();
        assert_eq!(p.alpha, 3);
        assert_eq!((p.full_rounds, p.partial_rounds), (8, 22));
        assert_eq!(p.round_constants.len(), 90);
        assert!(all_minors_nonzero(&p.mds));
        let s = SpongeParams::<StandardField>::derive();
        assert_eq!(s.alpha, 5);
        assert_eq!((s.full_rounds, s.partial_rounds), (8, 57));
        assert_eq!(*SpongeParams::<TestField>::get(), p);
    }

    #[test]
    fn determinant_oracle() {
        type F = TestField;
        let f = |v: i64| F::from_i128(v as i128);
        let m = vec![vec![f(2), f(0), f(1)], vec![f(1), f(3), f(2)], vec![f(1), f(1), f(1)]];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert!(det(m).is_zero());
        let m = vec![vec![f(4), f(7)], vec![f(2), f(6)]];
        assert_eq!(det(m), f(10));
    }

    #[test]
    fn length_padding_distinguishes() {
        type F = TestField;
        let a = F::from_u64(42);
        assert_ne!(sponge_hash(&[a]), sponge_hash(&[a, F::zero()]));
        assert_ne!(sponge_hash::<F>(&[]), sponge_hash(&[F::zero()]));
        assert_eq!(sponge_hash(&[a, a, a]), sponge_hash(&[a, a, a]));
    }
}
