//! Binding and hiding games run as randomized experiments.
//!
//! [`game_bind`] searches for two distinct openings of one commitment.
//! [`game_collision`] runs the same search on a truncated output so the
//! harness itself can be seen to find collisions when they are cheap.
//! [`game_hide`] commits to one of two chosen messages under a hidden bit and
//! scores a distinguisher.

use std::collections::HashMap;

use rand::{Rng, RngCore};

use super::{commit, BlindingFactor, Commitment, SpongeParams};
use crate::field::PrimeField;

/// Messages used by the binding search have this many elements.
pub const BIND_MESSAGE_LEN: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    pub attempts: u64,
    /// Output bits compared.
    pub output_bits: u32,
    pub collisions: u64,
    /// 1-based attempt index of the first collision.
    pub first_collision_at: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HideReport {
    pub samples: u64,
    pub correct: u64,
    /// `|Pr[b' = b] - 1/2|`.
    pub advantage: f64,
    /// Standard deviation of the success rate under a blind guesser.
    pub sigma: f64,
}

impl HideReport {
    pub fn within_sigmas(&self, k: f64) -> bool {
        self.advantage <= k * self.sigma
    }
}

fn truncate<F: PrimeField>(c: &Commitment<F>, bits: u32) -> Vec<u8> {
    let mut bytes = c.0.to_le_bytes();
    let full = (bits / 8) as usize;
    let rem = bits % 8;
    if rem == 0 {
        bytes.truncate(full);
    } else {
        bytes.truncate(full + 1);
        bytes[full] &= (1u8 << rem) - 1;
    }
    bytes
}

/// Searches `attempts` random openings `(m, s)` for two distinct ones whose
/// commitments agree on the low `output_bits` bits.
pub fn game_collision<F: PrimeField, R: RngCore + ?Sized>(
    attempts: u64,
    output_bits: u32,
    rng: &mut R,
) -> CollisionReport {
    let output_bits = output_bits.min(F::NUM_BITS);
    let mut seen: HashMap<Vec<u8>, (Vec<F>, F)> = HashMap::new();
    let mut collisions = 0;
    let mut first_collision_at = None;
    let params = SpongeParams::<F>::get();
    let mut input = vec![F::zero(); BIND_MESSAGE_LEN + 1];
    for i in 1..=attempts {
        let m: Vec<F> = (0..BIND_MESSAGE_LEN).map(|_| F::random(rng)).collect();
        let s = BlindingFactor::<F>::random(rng);
        input[..BIND_MESSAGE_LEN].copy_from_slice(&m);
        input[BIND_MESSAGE_LEN] = s.0;
        let key = truncate(&Commitment(params.hash(&input)), output_bits);
        match seen.get(&key) {
            Some((m0, s0)) if *m0 != m || *s0 != s.0 => {
                collisions += 1;
                first_collision_at.get_or_insert(i);
            }
            Some(_) => {}
            None => {
                seen.insert(key, (m, s.0));
            }
        }
    }
    CollisionReport {
        attempts,
        output_bits,
        collisions,
        first_collision_at,
    }
}

/// [`game_collision`] on the full commitment.
pub fn game_bind<F: PrimeField, R: RngCore + ?Sized>(attempts: u64, rng: &mut R) -> CollisionReport {
    game_collision::<F, R>(attempts, F::NUM_BITS, rng)
}

/// Guesses the least significant bit of the first encoded byte.
pub fn first_byte_distinguisher<F: PrimeField>(c: &Commitment<F>) -> bool {
    c.0.to_le_bytes()[0] & 1 == 1
}

/// Commits to `m_b` for a uniformly random `b` and fresh blinding, asks
/// `distinguisher` for `b`, and reports its advantage over `samples` rounds.
pub fn game_hide<F, R, D>(samples: u64, m0: &[F], m1: &[F], distinguisher: D, rng: &mut R) -> HideReport
where
    F: PrimeField,
    R: RngCore + ?Sized,
    D: Fn(&Commitment<F>) -> bool,
{
    let mut correct = 0;
    for _ in 0..samples {
        let b: bool = rng.gen();
        let s = BlindingFactor::random(rng);
        let c = commit(if b { m1 } else { m0 }, &s);
        if distinguisher(&c) == b {
            correct += 1;
        }
    }
    let n = samples.max(1) as f64;
    HideReport {
        samples,
        correct,
        advantage: (correct as f64 / n - 0.5).abs(),
        sigma: 0.5 / n.sqrt(),
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
    fn truncation_masks_high_bits() {
        let c = Commitment(F::from_u64(0x1_ffff));
        assert_eq!(truncate(&c, 16), vec![0xff, 0xff]);
        assert_eq!(truncate(&c, 12), vec![0xff, 0x0f]);
        assert_eq!(truncate(&c, 8), vec![0xff]);
    }

    #[test]
    fn truncated_search_finds_collisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = game_collision::<F, _>(2000, 16, &mut rng);
        assert!(r.collisions > 0);
        assert!(r.first_collision_at.unwrap() <= 1000);
    }

    #[test]
    fn constant_distinguisher_has_no_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m0 = [F::from_u64(1)];
        let m1 = [F::from_u64(2)];
        let r = game_hide(2000, &m0, &m1, |_| true, &mut rng);
        assert!(r.within_sigmas(3.0), "{r:?}");
        let s = BlindingFactor(F::from_u64(7));
        let r = game_hide(2000, &m0, &m1, |c| *c == commit(&m1, &s), &mut rng);
        assert!(r.within_sigmas(3.0), "{r:?}");
    }
}
