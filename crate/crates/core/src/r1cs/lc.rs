//! Sparse linear combinations over wires.

use std::ops::{Add, Mul, Neg, Sub};

use crate::field::PrimeField;

/// Handle to a wire allocated by a [`super::CircuitBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(usize);

impl Variable {
    /// The constant-one wire.
    pub const ONE: Variable = Variable(0);

    pub(crate) fn new(index: usize) -> Self {
        Variable(index)
    }

    /// Builder-side index (allocation order).
    pub fn index(&self) -> usize {
        self.0
    }
}

/// `sum_j coeff_j * w_j`, sorted by wire index with no duplicate indices and
/// no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearCombination<F> {
    terms: Vec<(usize, F)>,
}

impl<F: PrimeField> LinearCombination<F> {
    pub fn zero() -> Self {
        LinearCombination { terms: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_terms(vec![(0, c)])
    }

    /// Builds a combination from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms(mut terms: Vec<(usize, F)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, F)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        LinearCombination { terms: out }
    }

    pub fn terms(&self) -> &[(usize, F)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the combination only involves the constant-one wire.
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.as_slice() {
            [] => Some(F::zero()),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.last().map(|t| t.0)
    }

    pub fn evaluate(&self, w: &[F]) -> F {
        self.terms.iter().map(|(i, c)| *c * w[*i]).sum()
    }

    pub fn scale(&self, k: F) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinearCombination {
            terms: self.terms.iter().map(|(i, c)| (*i, *c * k)).collect(),
        }
    }

    fn merge(&self, other: &Self, sign: F) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = j >= other.terms.len() || (i < self.terms.len() && self.terms[i].0 < other.terms[j].0);
            let take_right = i >= self.terms.len() || (j < other.terms.len() && other.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i]);
                i += 1;
            } else if take_right {
                out.push((other.terms[j].0, other.terms[j].1 * sign));
                j += 1;
            } else {
                let c = self.terms[i].1 + other.terms[j].1 * sign;
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        LinearCombination { terms: out }
    }

    pub(crate) fn remap(&self, perm: &[usize]) -> Self {
        let mut terms: Vec<(usize, F)> = self.terms.iter().map(|(i, c)| (perm[*i], *c)).collect();
        terms.sort_by_key(|t| t.0);
        LinearCombination { terms }
    }
}

impl<F: PrimeField> From<Variable> for LinearCombination<F> {
    fn from(v: Variable) -> Self {
        LinearCombination {
            terms: vec![(v.0, F::one())],
        }
    }
}

impl<F: PrimeField> From<&LinearCombination<F>> for LinearCombination<F> {
    fn from(lc: &LinearCombination<F>) -> Self {
        lc.clone()
    }
}

impl<F: PrimeField, R: Into<LinearCombination<F>>> Add<R> for LinearCombination<F> {
    type Output = Self;
    fn add(self, rhs: R) -> Self {
        self.merge(&rhs.into(), F::one())
    }
}

impl<F: PrimeField, R: Into<LinearCombination<F>>> Sub<R> for LinearCombination<F> {
    type Output = Self;
    fn sub(self, rhs: R) -> Self {
        self.merge(&rhs.into(), -F::one())
    }
}

impl<F: PrimeField> Mul<F> for LinearCombination<F> {
    type Output = Self;
    fn mul(self, k: F) -> Self {
        self.scale(k)
    }
}

impl<F: PrimeField> Neg for LinearCombination<F> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-F::one())
    }
}
