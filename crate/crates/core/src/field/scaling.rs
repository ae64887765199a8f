//! Fixed-point maps between reals and field elements.
//!
//! `scale(x, rho) = floor(x * rho) mod p`; `unscale` reads the upper half of
//! the field as negative numbers.

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

use super::PrimeField;

/// Fixed-point scaling factor, always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalingFactor(u64);

impl ScalingFactor {
    pub fn new(rho: u64) -> Result<Self, ScaleError> {
        if rho == 0 {
            return Err(ScaleError::ZeroFactor);
        }
        Ok(ScalingFactor(rho))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScaleError {
    #[error("cannot scale non-finite value {0}")]
    NonFinite(f64),
    #[error("scaled value of {0} does not fit in 128 bits")]
    Overflow(f64),
    #[error("scaling factor must be at least 1")]
    ZeroFactor,
}

/// Maps a real into the field. Values with `|floor(x * rho)| >= p / 2` wrap
/// silently; callers are expected to keep inputs in range.
pub fn scale<F: PrimeField>(x: f64, rho: ScalingFactor) -> Result<F, ScaleError> {
    if !x.is_finite() {
        return Err(ScaleError::NonFinite(x));
    }
    let scaled = (x * rho.0 as f64).floor();
    if scaled.abs() >= 1.7e38 {
        return Err(ScaleError::Overflow(x));
    }
    Ok(F::from_i128(scaled as i128))
}

/// Inverse of [`scale`] up to the `1 / rho` quantisation step.
pub fn unscale<F: PrimeField>(z: F, rho: ScalingFactor) -> f64 {
    signed_value(&z).to_f64().expect("BigInt to f64 is total") / rho.0 as f64
}

/// The representative of `z` in `(-p/2, p/2]`.
pub fn signed_value<F: PrimeField>(z: &F) -> BigInt {
    let p = F::modulus();
    let v = z.to_biguint();
    let half = (&p - 1u32) >> 1;
    if v <= half {
        BigInt::from_biguint(Sign::Plus, v)
    } else {
        BigInt::from_biguint(Sign::Plus, v) - BigInt::from_biguint(Sign::Plus, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{StandardField, TestField};
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rho(v: u64) -> ScalingFactor {
        ScalingFactor::new(v).unwrap()
    }

    #[test]
    fn worked_example() {
        let z: TestField = scale(0.75, rho(100)).unwrap();
        assert_eq!(z, TestField::from_u64(75));
        assert_eq!(unscale(z, rho(100)), 0.75);
        let z: TestField = scale(0.0, rho(1000)).unwrap();
        assert_eq!(z, TestField::zero());
    }

    #[test]
    fn negative_values_use_upper_half() {
        let z: TestField = scale(-0.5, rho(10)).unwrap();
        assert_eq!(z.to_biguint(), TestField::modulus() - BigUint::from(5u32));
        assert_eq!(unscale(z, rho(10)), -0.5);
        let z: StandardField = scale(-0.5, rho(10)).unwrap();
        assert_eq!(unscale(z, rho(10)), -0.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            scale::<TestField>(f64::NAN, rho(10)),
            Err(ScaleError::NonFinite(_))
        ));
        assert!(matches!(
            scale::<TestField>(f64::INFINITY, rho(10)),
            Err(ScaleError::NonFinite(_))
        ));
        assert_eq!(ScalingFactor::new(0), Err(ScaleError::ZeroFactor));
    }

    #[test]
    fn random_roundtrip_within_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = rho(10_000);
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-1e3..1e3);
            let back = unscale(scale::<TestField>(x, r).unwrap(), r);
            // direct evaluation of floor(x * rho) / rho
            let expected = (x * 10_000.0).floor() / 10_000.0;
            assert_eq!(back, expected);
            assert!((back - x).abs() <= 1e-4);
        }
    }
}
