//! Toy type-1 pairing on `E: y^2 = x^3 + x` over `F_p`, `p = 4q - 1`.
//!
//! `p ≡ 3 (mod 4)` makes `E` supersingular with `#E(F_p) = p + 1 = 4q`, so the
//! order-`q` subgroup has embedding degree 2 and the reduced Tate pairing
//! lands in `F_{p^2} = F_p[i] / (i^2 + 1)`. The distortion map
//! `(x, y) -> (-x, i*y)` turns the degenerate self-pairing into a
//! non-degenerate one, so G2 is represented by points of the same subgroup.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::field::{Fp, MontParams, PrimeField, TestField, TestFieldParams};

use super::{CurveGroup, GroupError, PairingEngine, TargetGroup};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ToyBaseParams;

impl MontParams<1> for ToyBaseParams {
    const MODULUS: [u64; 1] = [9_223_372_036_854_774_451];
    const NAME: &'static str = "toy-base63";
}

/// Base field of the toy curve.
pub type ToyBaseField = Fp<ToyBaseParams, 1>;

/// Encoded point: infinity flag byte, then `x` and `y` little-endian.
pub const POINT_BYTES: usize = 1 + 2 * 8;
/// Encoded target-group element: `c0`, `c1` little-endian.
pub const GT_BYTES: usize = 16;

const COFACTOR: u64 = 4;
const GROUP_ORDER: u64 = TestFieldParams::MODULUS[0];

type Fq = ToyBaseField;

fn scalar_bits(s: &TestField) -> impl DoubleEndedIterator<Item = bool> {
    let v = s.to_u64().expect("61-bit scalar");
    (0..64).map(move |i| (v >> i) & 1 == 1)
}

/// Jacobian point `(X : Y : Z)` with `x = X/Z^2`, `y = Y/Z^3`; `Z = 0` is
/// the point at infinity.
#[derive(Clone, Copy, Debug)]
pub struct ToyPoint {
    x: Fq,
    y: Fq,
    z: Fq,
}

impl ToyPoint {
    pub const fn identity() -> Self {
        ToyPoint {
            x: Fq::ZERO_CONST,
            y: Fq::ZERO_CONST,
            z: Fq::ZERO_CONST,
        }
    }

    fn from_affine(x: Fq, y: Fq) -> Self {
        ToyPoint { x, y, z: Fq::one() }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    /// Affine coordinates, `None` at infinity.
    pub fn to_affine(&self) -> Option<(Fq, Fq)> {
        if self.is_identity() {
            return None;
        }
        let zinv = self.z.inverse().expect("nonzero z");
        let zinv2 = zinv.square();
        Some((self.x * zinv2, self.y * zinv2 * zinv))
    }

    fn on_curve_affine(x: Fq, y: Fq) -> bool {
        y.square() == x.square() * x + x
    }

    pub fn is_on_curve(&self) -> bool {
        match self.to_affine() {
            None => true,
            Some((x, y)) => Self::on_curve_affine(x, y),
        }
    }

    pub fn double(&self) -> Self {
        if self.is_identity() || self.y.is_zero() {
            return Self::identity();
        }
        let xx = self.x.square();
        let yy = self.y.square();
        let yyyy = yy.square();
        let zz = self.z.square();
        let s = ((self.x + yy).square() - xx - yyyy).double();
        // a = 1
        let m = xx.double() + xx + zz.square();
        let t = m.square() - s.double();
        let y3 = m * (s - t) - yyyy.double().double().double();
        let z3 = (self.y + self.z).square() - yy - zz;
        ToyPoint { x: t, y: y3, z: z3 }
    }

    pub fn add_point(&self, other: &Self) -> Self {
        if self.is_identity() {
            return *other;
        }
        if other.is_identity() {
            return *self;
        }
        let z1z1 = self.z.square();
        let z2z2 = other.z.square();
        let u1 = self.x * z2z2;
        let u2 = other.x * z1z1;
        let s1 = self.y * other.z * z2z2;
        let s2 = other.y * self.z * z1z1;
        if u1 == u2 {
            return if s1 == s2 { self.double() } else { Self::identity() };
        }
        let h = u2 - u1;
        let i = h.double().square();
        let j = h * i;
        let r = (s2 - s1).double();
        let v = u1 * i;
        let x3 = r.square() - j - v.double();
        let y3 = r * (v - x3) - (s1 * j).double();
        let z3 = ((self.z + other.z).square() - z1z1 - z2z2) * h;
        ToyPoint { x: x3, y: y3, z: z3 }
    }

    pub fn negate(&self) -> Self {
        ToyPoint {
            x: self.x,
            y: -self.y,
            z: self.z,
        }
    }

    /// Multiplication by an arbitrary 64-bit integer.
    pub fn mul_u64(&self, k: u64) -> Self {
        let mut acc = Self::identity();
        for i in (0..64).rev() {
            acc = acc.double();
            if (k >> i) & 1 == 1 {
                acc = acc.add_point(self);
            }
        }
        acc
    }

    pub fn mul_scalar(&self, s: &TestField) -> Self {
        let mut acc = Self::identity();
        for bit in scalar_bits(s).rev() {
            acc = acc.double();
            if bit {
                acc = acc.add_point(self);
            }
        }
        acc
    }

    pub fn is_in_subgroup(&self) -> bool {
        self.is_on_curve() && self.mul_u64(GROUP_ORDER).is_identity()
    }

    pub fn to_bytes(&self) -> [u8; POINT_BYTES] {
        let mut out = [0u8; POINT_BYTES];
        match self.to_affine() {
            None => out[0] = 1,
            Some((x, y)) => {
                out[1..9].copy_from_slice(&x.to_le_bytes());
                out[9..17].copy_from_slice(&y.to_le_bytes());
            }
        }
        out
    }

    /// Decodes a point, checking the curve equation only.
    pub fn from_bytes_unchecked(bytes: &[u8]) -> Result<Self, GroupError> {
        if bytes.len() != POINT_BYTES {
            return Err(GroupError::Length {
                expected: POINT_BYTES,
                got: bytes.len(),
            });
        }
        match bytes[0] {
            1 => {
                if bytes[1..].iter().any(|&b| b != 0) {
                    return Err(GroupError::Coordinate);
                }
                Ok(Self::identity())
            }
            0 => {
                let x = Fq::from_le_bytes_canonical(&bytes[1..9]).ok_or(GroupError::Coordinate)?;
                let y = Fq::from_le_bytes_canonical(&bytes[9..17]).ok_or(GroupError::Coordinate)?;
                if !Self::on_curve_affine(x, y) {
                    return Err(GroupError::NotOnCurve);
                }
                Ok(Self::from_affine(x, y))
            }
            f => Err(GroupError::Flag(f)),
        }
    }

    /// Lifts `x` to a curve point if `x^3 + x` is a square, choosing the
    /// smaller square root.
    pub fn lift_x(x: Fq) -> Option<Self> {
        let rhs = x.square() * x + x;
        // p ≡ 3 (mod 4): sqrt(a) = a^((p+1)/4)
        let y = rhs.pow(&[(ToyBaseParams::MODULUS[0] + 1) / 4]);
        if y.square() != rhs {
            return None;
        }
        let y = std::cmp::min(y, -y);
        Some(Self::from_affine(x, y))
    }

    /// The canonical generator: the cofactor multiple of the lift of the
    /// smallest admissible `x >= 1`.
    pub fn generator() -> Self {
        static GEN: OnceLock<ToyPoint> = OnceLock::new();
        *GEN.get_or_init(|| {
            let mut x = 1u64;
            loop {
                if let Some(p) = Self::lift_x(Fq::from_u64(x)) {
                    let g = p.mul_u64(COFACTOR);
                    if !g.is_identity() {
                        let (gx, gy) = g.to_affine().expect("not identity");
                        return Self::from_affine(gx, gy);
                    }
                }
                x += 1;
            }
        })
    }
}

impl PartialEq for ToyPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self.is_identity(), other.is_identity()) {
            (true, true) => true,
            (false, false) => {
                let z1z1 = self.z.square();
                let z2z2 = other.z.square();
                self.x * z2z2 == other.x * z1z1 && self.y * z2z2 * other.z == other.y * z1z1 * self.z
            }
            _ => false,
        }
    }
}

impl Eq for ToyPoint {}

macro_rules! toy_group {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub struct $name(pub ToyPoint);

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                $name(self.0.add_point(&rhs.0))
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                self.0 = self.0.add_point(&rhs.0);
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                $name(self.0.add_point(&rhs.0.negate()))
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(self.0.negate())
            }
        }

        impl CurveGroup for $name {
            type Scalar = TestField;
            const ENCODED_LEN: usize = POINT_BYTES;

            fn identity() -> Self {
                $name(ToyPoint::identity())
            }
            fn generator() -> Self {
                $name(ToyPoint::generator())
            }
            fn is_identity(&self) -> bool {
                self.0.is_identity()
            }
            fn double(&self) -> Self {
                $name(self.0.double())
            }
            fn mul_scalar(&self, s: &TestField) -> Self {
                $name(self.0.mul_scalar(s))
            }
            fn is_in_subgroup(&self) -> bool {
                self.0.is_in_subgroup()
            }
            fn to_bytes(&self) -> Vec<u8> {
                self.0.to_bytes().to_vec()
            }
            fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
                let p = ToyPoint::from_bytes_unchecked(bytes)?;
                if !p.is_in_subgroup() {
                    return Err(GroupError::NotInSubgroup);
                }
                Ok($name(p))
            }
        }
    };
}

toy_group!(ToyG1, "First source group of the toy pairing.");
toy_group!(
    ToyG2,
    "Second source group: points of the same subgroup, sent through the distortion map inside the pairing."
);

/// Element of `F_{p^2}`, `c0 + c1 * i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToyGt {
    c0: Fq,
    c1: Fq,
}

impl ToyGt {
    fn new(c0: Fq, c1: Fq) -> Self {
        ToyGt { c0, c1 }
    }

    fn square(&self) -> Self {
        // (a + bi)^2 = (a+b)(a-b) + 2ab i
        ToyGt::new((self.c0 + self.c1) * (self.c0 - self.c1), (self.c0 * self.c1).double())
    }

    fn conjugate(&self) -> Self {
        ToyGt::new(self.c0, -self.c1)
    }

    fn inverse(&self) -> Option<Self> {
        let norm = self.c0.square() + self.c1.square();
        let inv = norm.inverse()?;
        Some(ToyGt::new(self.c0 * inv, -self.c1 * inv))
    }

    fn pow_u64(&self, e: u64) -> Self {
        let mut acc = ToyGt::one();
        for i in (0..64).rev() {
            acc = acc.square();
            if (e >> i) & 1 == 1 {
                acc = acc * *self;
            }
        }
        acc
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GroupError> {
        if bytes.len() != GT_BYTES {
            return Err(GroupError::Length {
                expected: GT_BYTES,
                got: bytes.len(),
            });
        }
        let c0 = Fq::from_le_bytes_canonical(&bytes[..8]).ok_or(GroupError::Coordinate)?;
        let c1 = Fq::from_le_bytes_canonical(&bytes[8..]).ok_or(GroupError::Coordinate)?;
        Ok(ToyGt::new(c0, c1))
    }
}

impl Mul for ToyGt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let aa = self.c0 * rhs.c0;
        let bb = self.c1 * rhs.c1;
        let c1 = (self.c0 + self.c1) * (rhs.c0 + rhs.c1) - aa - bb;
        ToyGt::new(aa - bb, c1)
    }
}

impl TargetGroup for ToyGt {
    type Scalar = TestField;

    fn one() -> Self {
        ToyGt::new(Fq::one(), Fq::zero())
    }

    fn pow(&self, s: &TestField) -> Self {
        self.pow_u64(s.to_u64().expect("61-bit scalar"))
    }

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.c0.to_le_bytes();
        out.extend(self.c1.to_le_bytes());
        out
    }
}

/// Reduced Tate pairing with the distortion map applied to the second
/// argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ToyPairing;

impl ToyPairing {
    /// Miller loop `f_{q,P}` evaluated at `(-xq, i*yq)`. Vertical-line
    /// factors lie in `F_p` and vanish under the final exponentiation, so
    /// they are skipped.
    fn miller_loop(p: (Fq, Fq), q: (Fq, Fq)) -> ToyGt {
        let (px, py) = p;
        let (qx, qy) = q;
        let order = GROUP_ORDER;
        let top = 63 - order.leading_zeros();
        let mut f = ToyGt::one();
        let mut t: Option<(Fq, Fq)> = Some((px, py));
        let line = |lambda: Fq, tx: Fq, ty: Fq| ToyGt::new(lambda * (qx + tx) - ty, qy);
        for i in (0..top).rev() {
            let (tx, ty) = t.expect("T stays finite before the last step");
            f = f.square();
            if ty.is_zero() {
                t = None;
            } else {
                let lambda =
                    (tx.square().double() + tx.square() + Fq::one()) * (ty.double()).inverse().expect("nonzero");
                f = f * line(lambda, tx, ty);
                let x3 = lambda.square() - tx.double();
                let y3 = lambda * (tx - x3) - ty;
                t = Some((x3, y3));
            }
            if (order >> i) & 1 == 1 {
                let (tx, ty) = t.expect("T finite");
                if tx == px {
                    // T = -P: vertical line, T + P = O
                    t = None;
                } else {
                    let lambda = (py - ty) * (px - tx).inverse().expect("distinct x");
                    f = f * line(lambda, tx, ty);
                    let x3 = lambda.square() - tx - px;
                    let y3 = lambda * (tx - x3) - ty;
                    t = Some((x3, y3));
                }
            }
        }
        f
    }

    /// `f^((p^2 - 1) / q) = (conj(f) / f)^4`.
    fn final_exponentiation(f: ToyGt) -> ToyGt {
        let g = f.conjugate() * f.inverse().expect("Miller value is nonzero");
        g.pow_u64(COFACTOR)
    }
}

impl PairingEngine for ToyPairing {
    type Scalar = TestField;
    type G1 = ToyG1;
    type G2 = ToyG2;
    type Gt = ToyGt;

    const PROFILE_BYTE: u8 = 0x7E;
    const PROFILE_NAME: &'static str = "toy-ss63-INSECURE";
    const SECURE: bool = false;

    fn pair(p: &ToyG1, q: &ToyG2) -> ToyGt {
        match (p.0.to_affine(), q.0.to_affine()) {
            (Some(pa), Some(qa)) => Self::final_exponentiation(Self::miller_loop(pa, qa)),
            _ => ToyGt::one(),
        }
    }
}
