//! Bilinear groups `(G1, G2, GT)` with a pairing map.
//!
//! [`PairingEngine`] is the interface the proof system and the signature
//! scheme are written against. [`ToyPairing`] is the self-contained
//! instantiation: a supersingular curve with embedding degree 2 over a 63-bit
//! prime. It exercises the full algebra at desk scale and is **not**
//! cryptographically secure; every artifact produced with it carries the
//! [`ToyPairing::PROFILE_BYTE`] marker.

mod msm;
mod toy;

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::RngCore;

use crate::field::PrimeField;

pub use msm::{multi_scalar_mul, naive_multi_scalar_mul};
pub use toy::{ToyBaseField, ToyG1, ToyG2, ToyGt, ToyPairing, ToyPoint, GT_BYTES, POINT_BYTES};

/// Errors from decoding or combining group elements.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid infinity flag {0:#04x}")]
    Flag(u8),
    #[error("coordinate not in the base field")]
    Coordinate,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("scalar and point slices differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// A prime-order group written additively.
pub trait CurveGroup:
    'static
    + Copy
    + Clone
    + Debug
    + PartialEq
    + Eq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    type Scalar: PrimeField;

    /// Length of [`CurveGroup::to_bytes`].
    const ENCODED_LEN: usize;

    fn identity() -> Self;
    fn generator() -> Self;
    fn is_identity(&self) -> bool;
    fn double(&self) -> Self;
    fn mul_scalar(&self, s: &Self::Scalar) -> Self;
    /// Whether the element lies in the subgroup of order `|Scalar|`.
    fn is_in_subgroup(&self) -> bool;
    fn to_bytes(&self) -> Vec<u8>;
    /// Decodes and validates curve and subgroup membership.
    fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError>;

    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self::generator().mul_scalar(&Self::Scalar::random(rng))
    }
}

/// Target group, written multiplicatively.
pub trait TargetGroup: 'static + Copy + Clone + Debug + PartialEq + Eq + Send + Sync + Mul<Output = Self> {
    type Scalar: PrimeField;
    fn one() -> Self;
    fn pow(&self, s: &Self::Scalar) -> Self;
    fn to_bytes(&self) -> Vec<u8>;
}

/// A bilinear group triple.
pub trait PairingEngine: 'static + Copy + Clone + Debug + Send + Sync + PartialEq + Eq + Hash {
    type Scalar: PrimeField;
    type G1: CurveGroup<Scalar = Self::Scalar>;
    type G2: CurveGroup<Scalar = Self::Scalar>;
    type Gt: TargetGroup<Scalar = Self::Scalar>;

    /// Profile marker written into every serialized artifact.
    const PROFILE_BYTE: u8;
    const PROFILE_NAME: &'static str;
    /// False for parameter sets that are only fit for testing.
    const SECURE: bool;

    fn pair(p: &Self::G1, q: &Self::G2) -> Self::Gt;

    fn multi_pair(terms: &[(Self::G1, Self::G2)]) -> Self::Gt {
        terms.iter().fold(Self::Gt::one(), |acc, (p, q)| acc * Self::pair(p, q))
    }
}

/// The instantiation used by the rest of the crate.
pub type Engine = ToyPairing;
/// Scalar field of the active engine.
pub type Fr = <Engine as PairingEngine>::Scalar;
pub type G1 = <Engine as PairingEngine>::G1;
pub type G2 = <Engine as PairingEngine>::G2;
pub type Gt = <Engine as PairingEngine>::Gt;

/// `s * P`; provided as free functions for symmetry with the MSM helpers.
pub fn scalar_mul_g1<E: PairingEngine>(s: &E::Scalar, p: &E::G1) -> E::G1 {
    p.mul_scalar(s)
}

pub fn scalar_mul_g2<E: PairingEngine>(s: &E::Scalar, p: &E::G2) -> E::G2 {
    p.mul_scalar(s)
}
