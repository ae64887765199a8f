//! Dense univariate polynomials, low degree first.

use std::ops::{Add, Mul, Sub};

use super::QapError;
use crate::field::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: PrimeField> Polynomial<F> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn evaluate(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * *x + *c)
    }

    pub fn scale(&self, k: F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| *c * k).collect())
    }

    /// `(q, r)` with `self = q * divisor + r` and `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), QapError> {
        let dd = divisor.degree().ok_or(QapError::DivisionByZero)?;
        let Some(sd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if sd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = divisor.coeffs[dd].inverse().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![F::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let q = rem[k + dd] * lead_inv;
            if q.is_zero() {
                continue;
            }
            quot[k] = q;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * *d;
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }
}

impl<F: PrimeField> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial<F>, i: usize| p.coeffs.get(i).copied().unwrap_or_else(F::zero);
        Polynomial::from_coeffs((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }
}

impl<F: PrimeField> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial<F>, i: usize| p.coeffs.get(i).copied().unwrap_or_else(F::zero);
        Polynomial::from_coeffs((0..n).map(|i| get(self, i) - get(rhs, i)).collect())
    }
}

impl<F: PrimeField> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: Self) -> Polynomial<F> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TestField;
    use proptest::prelude::*;

    type F = TestField;

    fn p(c: &[i64]) -> Polynomial<F> {
        Polynomial::from_coeffs(c.iter().map(|&v| F::from_i128(v as i128)).collect())
    }

    #[test]
    fn examples() {
        let (q, r) = p(&[-1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&[1, 0, 1]).evaluate(&F::from_u64(2)), F::from_u64(5));
        assert_eq!(p(&[1]).div_rem(&Polynomial::zero()), Err(QapError::DivisionByZero));
        assert_eq!(p(&[0, 0]).degree(), None);
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial<F>> {
        proptest::collection::vec(any::<u64>(), 0..12)
            .prop_map(|v| Polynomial::from_coeffs(v.into_iter().map(F::from_u64).collect()))
    }

    proptest! {
        #[test]
        fn mul_then_divide_roundtrips(a in arb_poly(), b in arb_poly(), r in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (_, r) = r.div_rem(&b).unwrap();
            let n = &(&a * &b) + &r;
            let (q, rem) = n.div_rem(&b).unwrap();
            prop_assert_eq!(q, a);
            prop_assert_eq!(rem, r);
        }

        #[test]
        fn evaluation_is_a_ring_homomorphism(a in arb_poly(), b in arb_poly(), x in any::<u64>()) {
            let x = F::from_u64(x);
            prop_assert_eq!((&a * &b).evaluate(&x), a.evaluate(&x) * b.evaluate(&x));
            prop_assert_eq!((&a + &b).evaluate(&x), a.evaluate(&x) + b.evaluate(&x));
            prop_assert_eq!((&a - &b).evaluate(&x), a.evaluate(&x) - b.evaluate(&x));
        }
    }
}
