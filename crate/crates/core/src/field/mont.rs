//! Fixed-width Montgomery arithmetic over `N` 64-bit limbs.
//!
//! The multiplication is the "no-carry" CIOS variant, which is valid when the
//! most significant limb of the modulus is below `2^63 - 1`. Every modulus in
//! this crate satisfies that; `MontParams` implementors must as well.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigUint;
use rand::RngCore;

use super::PrimeField;

/// Compile-time description of a prime modulus.
pub trait MontParams<const N: usize>:
    'static + Send + Sync + Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Hash
{
    /// Little-endian limbs of the modulus.
    const MODULUS: [u64; N];
    /// Profile name used in diagnostics and artifact headers.
    const NAME: &'static str;
}

#[inline(always)]
fn mac(a: u64, b: u64, c: u64, carry: &mut u64) -> u64 {
    let t = (a as u128) + (b as u128) * (c as u128);
    *carry = (t >> 64) as u64;
    t as u64
}

#[inline(always)]
fn mac_with_carry(a: u64, b: u64, c: u64, carry: &mut u64) -> u64 {
    let t = (a as u128) + (b as u128) * (c as u128) + (*carry as u128);
    *carry = (t >> 64) as u64;
    t as u64
}

#[inline(always)]
fn adc(a: u64, b: u64, carry: &mut u64) -> u64 {
    let t = (a as u128) + (b as u128) + (*carry as u128);
    *carry = (t >> 64) as u64;
    t as u64
}

#[inline(always)]
fn sbb(a: u64, b: u64, borrow: &mut u64) -> u64 {
    let t = (a as u128).wrapping_sub((b as u128) + ((*borrow >> 63) as u128));
    *borrow = (t >> 64) as u64;
    t as u64
}

const fn geq_limbs<const N: usize>(a: &[u64; N], b: &[u64; N]) -> bool {
    let mut i = N;
    while i > 0 {
        i -= 1;
        if a[i] > b[i] {
            return true;
        }
        if a[i] < b[i] {
            return false;
        }
    }
    true
}

const fn sub_limbs<const N: usize>(a: &mut [u64; N], b: &[u64; N]) {
    let mut borrow = 0u64;
    let mut i = 0;
    while i < N {
        let t = (a[i] as u128).wrapping_sub((b[i] as u128) + (borrow as u128));
        a[i] = t as u64;
        borrow = ((t >> 64) as u64) & 1;
        i += 1;
    }
}

/// `2^bits mod m`, by repeated doubling.
const fn pow2_mod<const N: usize>(bits: usize, m: &[u64; N]) -> [u64; N] {
    let mut r = [0u64; N];
    r[0] = 1;
    let mut k = 0;
    while k < bits {
        // r = 2r mod m; r < m < 2^(64N - 1) so the shift never overflows.
        let mut carry = 0u64;
        let mut i = 0;
        while i < N {
            let hi = r[i] >> 63;
            r[i] = (r[i] << 1) | carry;
            carry = hi;
            i += 1;
        }
        if geq_limbs(&r, m) {
            sub_limbs(&mut r, m);
        }
        k += 1;
    }
    r
}

const fn neg_inv(m0: u64) -> u64 {
    let mut inv = 1u64;
    let mut i = 0;
    while i < 63 {
        inv = inv.wrapping_mul(inv);
        inv = inv.wrapping_mul(m0);
        i += 1;
    }
    inv.wrapping_neg()
}

const fn num_bits<const N: usize>(m: &[u64; N]) -> u32 {
    let mut i = N;
    while i > 0 {
        i -= 1;
        if m[i] != 0 {
            return (i as u32) * 64 + (64 - m[i].leading_zeros());
        }
    }
    0
}

/// Element of the prime field described by `P`, stored in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<P: MontParams<N>, const N: usize> {
    limbs: [u64; N],
    _p: PhantomData<P>,
}

impl<P: MontParams<N>, const N: usize> Fp<P, N> {
    const INV: u64 = neg_inv(P::MODULUS[0]);
    const R: [u64; N] = pow2_mod(64 * N, &P::MODULUS);
    const R2: [u64; N] = pow2_mod(128 * N, &P::MODULUS);
    const BITS: u32 = num_bits(&P::MODULUS);

    /// The additive identity, usable in `const` contexts.
    pub const ZERO_CONST: Self = Fp {
        limbs: [0u64; N],
        _p: PhantomData,
    };

    const fn from_mont(limbs: [u64; N]) -> Self {
        Fp { limbs, _p: PhantomData }
    }

    #[inline]
    fn mont_mul(a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let m = &P::MODULUS;
        let mut r = [0u64; N];
        for i in 0..N {
            let mut carry1 = 0u64;
            r[0] = mac(r[0], a[0], b[i], &mut carry1);
            let k = r[0].wrapping_mul(Self::INV);
            let mut carry2 = 0u64;
            mac(r[0], k, m[0], &mut carry2);
            for j in 1..N {
                r[j] = mac_with_carry(r[j], a[j], b[i], &mut carry1);
                r[j - 1] = mac_with_carry(r[j], k, m[j], &mut carry2);
            }
            r[N - 1] = carry1.wrapping_add(carry2);
        }
        if geq_limbs(&r, m) {
            sub_limbs(&mut r, m);
        }
        r
    }

    /// Builds an element from canonical little-endian limbs (must be `< p`).
    fn from_canonical_limbs(limbs: [u64; N]) -> Option<Self> {
        if geq_limbs(&limbs, &P::MODULUS) {
            return None;
        }
        Some(Self::from_mont(Self::mont_mul(&limbs, &Self::R2)))
    }

    /// Canonical little-endian limbs.
    pub fn to_canonical_limbs(&self) -> [u64; N] {
        let mut one = [0u64; N];
        one[0] = 1;
        Self::mont_mul(&self.limbs, &one)
    }

    fn pow_limbs(&self, exp: &[u64]) -> Self {
        let mut acc = Self::one();
        let mut started = false;
        for limb in exp.iter().rev() {
            for bit in (0..64).rev() {
                if started {
                    acc = acc * acc;
                }
                if (limb >> bit) & 1 == 1 {
                    acc *= *self;
                    started = true;
                }
            }
        }
        acc
    }
}

impl<P: MontParams<N>, const N: usize> Default for Fp<P, N> {
    fn default() -> Self {
        Self::from_mont([0u64; N])
    }
}

impl<P: MontParams<N>, const N: usize> PartialOrd for Fp<P, N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by canonical integer value.
impl<P: MontParams<N>, const N: usize> Ord for Fp<P, N> {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.to_canonical_limbs();
        let b = other.to_canonical_limbs();
        for i in (0..N).rev() {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl<P: MontParams<N>, const N: usize> fmt::Debug for Fp<P, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", P::NAME, self.to_biguint())
    }
}

impl<P: MontParams<N>, const N: usize> fmt::Display for Fp<P, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_biguint())
    }
}

impl<P: MontParams<N>, const N: usize> Add for Fp<P, N> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut r = [0u64; N];
        let mut carry = 0u64;
        for i in 0..N {
            r[i] = adc(self.limbs[i], rhs.limbs[i], &mut carry);
        }
        if geq_limbs(&r, &P::MODULUS) {
            sub_limbs(&mut r, &P::MODULUS);
        }
        Self::from_mont(r)
    }
}

impl<P: MontParams<N>, const N: usize> Sub for Fp<P, N> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut r = [0u64; N];
        let mut borrow = 0u64;
        for i in 0..N {
            r[i] = sbb(self.limbs[i], rhs.limbs[i], &mut borrow);
        }
        if borrow != 0 {
            let mut carry = 0u64;
            for i in 0..N {
                r[i] = adc(r[i], P::MODULUS[i], &mut carry);
            }
        }
        Self::from_mont(r)
    }
}

impl<P: MontParams<N>, const N: usize> Mul for Fp<P, N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::from_mont(Self::mont_mul(&self.limbs, &rhs.limbs))
    }
}

impl<P: MontParams<N>, const N: usize> Neg for Fp<P, N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::default() - self
    }
}

impl<P: MontParams<N>, const N: usize> AddAssign for Fp<P, N> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<P: MontParams<N>, const N: usize> SubAssign for Fp<P, N> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<P: MontParams<N>, const N: usize> MulAssign for Fp<P, N> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<P: MontParams<N>, const N: usize> std::iter::Sum for Fp<P, N> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<P: MontParams<N>, const N: usize> PrimeField for Fp<P, N> {
    const NAME: &'static str = P::NAME;
    const BYTES: usize = 8 * N - (Self::BITS_FREE_BYTES);
    const NUM_BITS: u32 = Self::BITS;

    fn zero() -> Self {
        Self::default()
    }

    fn one() -> Self {
        Self::from_mont(Self::R)
    }

    fn from_u64(v: u64) -> Self {
        let mut limbs = [0u64; N];
        limbs[0] = v;
        if N == 1 && v >= P::MODULUS[0] {
            limbs[0] = v % P::MODULUS[0];
        }
        Self::from_mont(Self::mont_mul(&limbs, &Self::R2))
    }

    fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut e = P::MODULUS;
        // p - 2; p is odd and > 2 so the low limb never underflows past limb 0
        // except when it is exactly 1, which no supported modulus has.
        e[0] -= 2;
        Some(self.pow_limbs(&e))
    }

    fn pow(&self, exp: &[u64]) -> Self {
        self.pow_limbs(exp)
    }

    fn to_le_bytes(&self) -> Vec<u8> {
        let limbs = self.to_canonical_limbs();
        let mut out = Vec::with_capacity(8 * N);
        for l in limbs {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.truncate(Self::BYTES);
        out
    }

    fn from_le_bytes_canonical(bytes: &[u8]) -> Option<Self> {
        if bytes.len() != Self::BYTES {
            return None;
        }
        let mut buf = vec![0u8; 8 * N];
        buf[..bytes.len()].copy_from_slice(bytes);
        let mut limbs = [0u64; N];
        for (i, chunk) in buf.chunks_exact(8).enumerate() {
            limbs[i] = u64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        }
        Self::from_canonical_limbs(limbs)
    }

    fn modulus() -> BigUint {
        let bytes: Vec<u8> = P::MODULUS.iter().flat_map(|l| l.to_le_bytes()).collect();
        BigUint::from_bytes_le(&bytes)
    }

    fn to_biguint(&self) -> BigUint {
        let bytes: Vec<u8> = self.to_canonical_limbs().iter().flat_map(|l| l.to_le_bytes()).collect();
        BigUint::from_bytes_le(&bytes)
    }

    fn from_biguint(v: &BigUint) -> Self {
        let reduced = v % Self::modulus();
        let mut bytes = reduced.to_bytes_le();
        bytes.resize(8 * N, 0);
        let mut limbs = [0u64; N];
        for (i, chunk) in bytes.chunks_exact(8).enumerate() {
            limbs[i] = u64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        }
        Self::from_canonical_limbs(limbs).expect("reduced below modulus")
    }

    fn bit(&self, i: u32) -> bool {
        let limbs = self.to_canonical_limbs();
        let (w, b) = ((i / 64) as usize, i % 64);
        w < N && (limbs[w] >> b) & 1 == 1
    }

    fn to_u64(&self) -> Option<u64> {
        let limbs = self.to_canonical_limbs();
        if limbs[1..].iter().all(|&l| l == 0) {
            Some(limbs[0])
        } else {
            None
        }
    }

    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        // Rejection sampling over NUM_BITS-bit integers keeps the draw uniform.
        loop {
            let mut limbs = [0u64; N];
            for l in limbs.iter_mut() {
                *l = rng.next_u64();
            }
            let top_bits = Self::BITS - 64 * (N as u32 - 1);
            if top_bits < 64 {
                limbs[N - 1] &= (1u64 << top_bits) - 1;
            }
            if let Some(v) = Self::from_canonical_limbs(limbs) {
                return v;
            }
        }
    }
}

impl<P: MontParams<N>, const N: usize> Fp<P, N> {
    const BITS_FREE_BYTES: usize = (8 * N * 8 - Self::BITS as usize) / 8;
}
