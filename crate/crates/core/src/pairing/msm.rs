//! Multi-scalar multiplication `sum_i s_i * P_i`.

use num_bigint::BigUint;

use super::{CurveGroup, GroupError};
use crate::field::PrimeField;

/// Straightforward fold, kept as a reference for the bucketed version.
pub fn naive_multi_scalar_mul<G: CurveGroup>(scalars: &[G::Scalar], points: &[G]) -> Result<G, GroupError> {
    if scalars.len() != points.len() {
        return Err(GroupError::LengthMismatch(scalars.len(), points.len()));
    }
    Ok(scalars
        .iter()
        .zip(points)
        .fold(G::identity(), |acc, (s, p)| acc + p.mul_scalar(s)))
}

fn window_bits(n: usize) -> usize {
    if n < 32 {
        3
    } else {
        ((n as f64).ln().ceil() as usize).clamp(4, 16)
    }
}

/// Pippenger's bucket method.
pub fn multi_scalar_mul<G: CurveGroup>(scalars: &[G::Scalar], points: &[G]) -> Result<G, GroupError> {
    if scalars.len() != points.len() {
        return Err(GroupError::LengthMismatch(scalars.len(), points.len()));
    }
    if scalars.is_empty() {
        return Ok(G::identity());
    }
    let c = window_bits(scalars.len());
    let num_bits = G::Scalar::NUM_BITS as usize;
    let digits: Vec<Vec<u64>> = scalars.iter().map(|s| to_limbs(&s.to_biguint())).collect();
    let windows = num_bits.div_ceil(c);

    let mut total = G::identity();
    for w in (0..windows).rev() {
        for _ in 0..c {
            total = total.double();
        }
        let mut buckets = vec![G::identity(); (1 << c) - 1];
        let start = w * c;
        for (limbs, p) in digits.iter().zip(points) {
            let d = extract(limbs, start, c);
            if d != 0 {
                buckets[d - 1] += *p;
            }
        }
        let mut running = G::identity();
        let mut acc = G::identity();
        for b in buckets.into_iter().rev() {
            running += b;
            acc += running;
        }
        total += acc;
    }
    Ok(total)
}

fn to_limbs(v: &BigUint) -> Vec<u64> {
    v.to_u64_digits()
}

fn extract(limbs: &[u64], start: usize, c: usize) -> usize {
    let mut out = 0usize;
    for k in 0..c {
        let bit = start + k;
        let limb = bit / 64;
        if limb < limbs.len() && (limbs[limb] >> (bit % 64)) & 1 == 1 {
            out |= 1 << k;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TestField;
    use crate::pairing::{ToyG1, ToyG2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_naive_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [0usize, 1, 2, 7, 33, 100] {
            let scalars: Vec<TestField> = (0..n).map(|_| TestField::random(&mut rng)).collect();
            let points: Vec<ToyG1> = (0..n).map(|_| ToyG1::random(&mut rng)).collect();
            assert_eq!(
                multi_scalar_mul(&scalars, &points).unwrap(),
                naive_multi_scalar_mul(&scalars, &points).unwrap()
            );
        }
    }

    #[test]
    fn edge_scalars() {
        let g = ToyG2::generator();
        let s = [TestField::zero(), TestField::one(), -TestField::one()];
        let p = [g, g, g.double()];
        assert_eq!(multi_scalar_mul(&s, &p).unwrap(), g - g.double());
    }

    #[test]
    fn length_mismatch() {
        let r = multi_scalar_mul::<ToyG1>(&[TestField::one()], &[]);
        assert_eq!(r, Err(GroupError::LengthMismatch(1, 0)));
    }
}
