//! Prime-field arithmetic, fixed-point scaling of reals into the field, and the
//! canonical tagged byte encodings used on the wire.
//!
//! Two field profiles are provided:
//!
//! * [`TestField`]: a 61-bit prime, the scalar field of the toy pairing curve.
//!   Fast enough for exhaustive and property testing.
//! * [`StandardField`]: the 254-bit BN254 scalar field, for realistic sizing.

mod encoding;
mod mont;
mod scaling;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigUint;
use rand::RngCore;

pub use encoding::{decode, encode, DTypeTag, EncodingError, Value, NONCE_LEN, TS_LEN};
pub use mont::{Fp, MontParams};
pub use scaling::{scale, unscale, ScaleError, ScalingFactor};

/// Behaviour shared by every prime field in the crate.
pub trait PrimeField:
    'static
    + Copy
    + Clone
    + Default
    + Debug
    + Display
    + Eq
    + Hash
    + Ord
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + std::iter::Sum
{
    /// Profile name.
    const NAME: &'static str;
    /// Width of the canonical little-endian encoding, `ceil(log2(p) / 8)`.
    const BYTES: usize;
    /// Bit length of the modulus.
    const NUM_BITS: u32;
    /// Number of bits that always fit below the modulus.
    const CAPACITY: u32 = Self::NUM_BITS - 1;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
    /// `self^exp` with the exponent given as little-endian 64-bit limbs.
    fn pow(&self, exp: &[u64]) -> Self;
    fn to_le_bytes(&self) -> Vec<u8>;
    /// Parses exactly `BYTES` little-endian bytes, rejecting values `>= p`.
    fn from_le_bytes_canonical(bytes: &[u8]) -> Option<Self>;
    fn modulus() -> BigUint;
    fn to_biguint(&self) -> BigUint;
    /// Reduces an arbitrary integer modulo `p`.
    fn from_biguint(v: &BigUint) -> Self;
    /// Bit `i` of the canonical representative.
    fn bit(&self, i: u32) -> bool;
    /// The canonical value if it fits in a `u64`.
    fn to_u64(&self) -> Option<u64>;
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self;

    fn square(&self) -> Self {
        *self * *self
    }

    fn double(&self) -> Self {
        *self + *self
    }

    fn from_u128(v: u128) -> Self {
        let shift = Self::from_u64(1 << 32) * Self::from_u64(1 << 32);
        Self::from_u64((v >> 64) as u64) * shift + Self::from_u64(v as u64)
    }

    /// Signed embedding: negative integers map to `p - |v|`.
    fn from_i128(v: i128) -> Self {
        if v < 0 {
            -Self::from_u128(v.unsigned_abs())
        } else {
            Self::from_u128(v as u128)
        }
    }

    /// Reduces arbitrary little-endian bytes modulo `p`.
    fn from_le_bytes_reduce(bytes: &[u8]) -> Self {
        Self::from_biguint(&BigUint::from_bytes_le(bytes))
    }

    /// `2^k` as a field element.
    fn pow2(k: u32) -> Self {
        Self::from_u64(2).pow(&[k as u64])
    }

    fn pow_u64(&self, e: u64) -> Self {
        self.pow(&[e])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TestFieldParams;

impl MontParams<1> for TestFieldParams {
    // q = 2^61 - 403; 4q - 1 is also prime, which the toy curve relies on.
    const MODULUS: [u64; 1] = [2_305_843_009_213_693_613];
    const NAME: &'static str = "test61";
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct StandardFieldParams;

impl MontParams<4> for StandardFieldParams {
    // BN254 scalar field order.
    const MODULUS: [u64; 4] = [
        0x43e1_f593_f000_0001,
        0x2833_e848_79b9_7091,
        0xb850_45b6_8181_585d,
        0x3064_4e72_e131_a029,
    ];
    const NAME: &'static str = "bn254-fr";
}

/// The 61-bit "test" profile.
pub type TestField = Fp<TestFieldParams, 1>;
/// The 254-bit "standard" profile.
pub type StandardField = Fp<StandardFieldParams, 4>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TinyFieldParams;

impl MontParams<1> for TinyFieldParams {
    const MODULUS: [u64; 1] = [257];
    const NAME: &'static str = "tiny257";
}

/// `F_257`, small enough to enumerate every value of a wire. Only meant for
/// exhaustive gadget checks.
pub type TinyField = Fp<TinyFieldParams, 1>;

/// Errors from fallible field operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
}

/// `a / b`, failing on a zero divisor.
pub fn div<F: PrimeField>(a: F, b: F) -> Result<F, FieldError> {
    b.inverse().map(|inv| a * inv).ok_or(FieldError::DivisionByZero)
}

/// Inverse that reports the zero case as an error instead of `None`.
pub fn inv<F: PrimeField>(a: F) -> Result<F, FieldError> {
    a.inverse().ok_or(FieldError::DivisionByZero)
}
