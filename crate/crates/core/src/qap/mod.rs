//! Reduction of an R1CS to a quadratic arithmetic program.
//!
//! Constraint `i` is attached to the domain point `r_i = i` (1-based). For
//! each wire `j` the column `A[.][j]` is interpolated into `A_j(x)` with
//! `A_j(r_i) = A[i][j]`, and likewise for `B` and `C`. A witness `w`
//! satisfies the system iff the vanishing polynomial `t(x) = prod (x - r_i)`
//! divides `A(x) B(x) - C(x)`, where `A(x) = sum w_j A_j(x)`.
//!
//! Interpolation uses barycentric weights and costs `O(n^2)`.

mod poly;

use crate::field::PrimeField;
use crate::r1cs::{ConstraintSystem, LinearCombination};

pub use poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QapError {
    #[error("evaluation domain contains duplicate point at positions {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("domain has {domain} points but the system has {constraints} constraints")]
    DomainSize { domain: usize, constraints: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("witness does not satisfy the system: A*B - C is not divisible by t")]
    InvalidWitness,
    #[error("witness has {got} entries, the system expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("evaluation point lies in the domain")]
    PointInDomain,
}

/// Distinct interpolation points `r_1..r_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationDomain<F> {
    points: Vec<F>,
    weights: Vec<F>,
}

impl<F: PrimeField> EvaluationDomain<F> {
    /// `{1, 2, ..., n}`, with closed-form barycentric weights
    /// `w_i = (-1)^(n-i) / ((i-1)! (n-i)!)`.
    pub fn standard(n: usize) -> Self {
        let mut fact = Vec::with_capacity(n);
        let mut acc = F::one();
        fact.push(acc);
        for k in 1..n {
            acc *= F::from_u64(k as u64);
            fact.push(acc);
        }
        let weights = (1..=n)
            .map(|i| {
                let w = (fact[i - 1] * fact[n - i])
                    .inverse()
                    .expect("n is below the characteristic");
                if (n - i) % 2 == 1 {
                    -w
                } else {
                    w
                }
            })
            .collect();
        EvaluationDomain {
            points: (1..=n).map(|i| F::from_u64(i as u64)).collect(),
            weights,
        }
    }

    /// An arbitrary domain; weights cost `O(n^2)`.
    pub fn new(points: Vec<F>) -> Result<Self, QapError> {
        let mut sorted: Vec<(F, usize)> = points.iter().copied().zip(0..).collect();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(QapError::DuplicatePoint(pair[0].1, pair[1].1));
            }
        }
        let weights = points
            .iter()
            .enumerate()
            .map(|(i, ri)| {
                let prod = points
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .fold(F::one(), |acc, (_, rk)| acc * (*ri - *rk));
                prod.inverse().expect("points are distinct")
            })
            .collect();
        Ok(EvaluationDomain { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    pub fn contains(&self, x: &F) -> bool {
        self.points.contains(x)
    }

    /// `t(x) = prod_i (x - r_i)`.
    pub fn vanishing_poly(&self) -> Polynomial<F> {
        vanishing_poly(self)
    }

    /// Interpolates several value vectors at once, sharing the quotients
    /// `t(x) / (x - r_i)`.
    pub fn interpolate_many(&self, values: &[&[F]]) -> Vec<Polynomial<F>> {
        let n = self.len();
        let t = self.vanishing_poly();
        let tc = t.coeffs();
        let mut acc = vec![vec![F::zero(); n]; values.len()];
        let mut q = vec![F::zero(); n];
        for (i, (ri, wi)) in self.points.iter().zip(&self.weights).enumerate() {
            let scales: Vec<F> = values.iter().map(|v| v[i] * *wi).collect();
            if scales.iter().all(|s| s.is_zero()) {
                continue;
            }
            // synthetic division of t by (x - r_i)
            q[n - 1] = tc[n];
            for k in (1..n).rev() {
                q[k - 1] = tc[k] + *ri * q[k];
            }
            for (a, s) in acc.iter_mut().zip(&scales) {
                if s.is_zero() {
                    continue;
                }
                for (ak, qk) in a.iter_mut().zip(&q) {
                    *ak += *s * *qk;
                }
            }
        }
        acc.into_iter().map(Polynomial::from_coeffs).collect()
    }

    pub fn interpolate(&self, values: &[F]) -> Polynomial<F> {
        self.interpolate_many(&[values]).pop().expect("one polynomial")
    }

    /// `L_i(x)` for every `i`, at a point outside the domain.
    pub fn lagrange_at(&self, x: &F) -> Result<Vec<F>, QapError> {
        let t = self.vanishing_poly().evaluate(x);
        if t.is_zero() {
            return Err(QapError::PointInDomain);
        }
        Ok(self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(ri, wi)| *wi * t * (*x - *ri).inverse().expect("x is outside the domain"))
            .collect())
    }
}

/// Monic polynomial of degree `n` vanishing exactly on the domain.
pub fn vanishing_poly<F: PrimeField>(domain: &EvaluationDomain<F>) -> Polynomial<F> {
    let mut coeffs = vec![F::one()];
    for r in domain.points() {
        // multiply by (x - r)
        let mut next = vec![F::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += *c;
            next[k] -= *r * *c;
        }
        coeffs = next;
    }
    Polynomial::from_coeffs(coeffs)
}

/// The QAP of a constraint system. Per-wire polynomials are produced on
/// demand; the prover only needs the row evaluations.
#[derive(Clone, Debug)]
pub struct QapInstance<F: PrimeField> {
    cs: ConstraintSystem<F>,
    domain: EvaluationDomain<F>,
    t: Polynomial<F>,
}

fn column<F: PrimeField>(rows: &[LinearCombination<F>], j: usize) -> Vec<F> {
    rows.iter()
        .map(|lc| {
            lc.terms()
                .binary_search_by_key(&j, |t| t.0)
                .map(|k| lc.terms()[k].1)
                .unwrap_or_else(|_| F::zero())
        })
        .collect()
}

fn row_values<F: PrimeField>(rows: &[LinearCombination<F>], w: &[F]) -> Vec<F> {
    rows.iter().map(|lc| lc.evaluate(w)).collect()
}

/// Builds the QAP over `domain`, which must have one point per constraint.
pub fn r1cs_to_qap<F: PrimeField>(
    cs: &ConstraintSystem<F>,
    domain: EvaluationDomain<F>,
) -> Result<QapInstance<F>, QapError> {
    if domain.len() != cs.num_constraints() {
        return Err(QapError::DomainSize {
            domain: domain.len(),
            constraints: cs.num_constraints(),
        });
    }
    let t = domain.vanishing_poly();
    Ok(QapInstance {
        cs: cs.clone(),
        domain,
        t,
    })
}

impl<F: PrimeField> QapInstance<F> {
    /// The QAP over the standard domain `{1..n}`.
    pub fn from_r1cs(cs: &ConstraintSystem<F>) -> Self {
        r1cs_to_qap(cs, EvaluationDomain::standard(cs.num_constraints())).expect("standard domain has n points")
    }

    pub fn num_constraints(&self) -> usize {
        self.domain.len()
    }

    pub fn num_wires(&self) -> usize {
        self.cs.num_wires()
    }

    pub fn num_public(&self) -> usize {
        self.cs.num_public()
    }

    pub fn domain(&self) -> &EvaluationDomain<F> {
        &self.domain
    }

    pub fn constraint_system(&self) -> &ConstraintSystem<F> {
        &self.cs
    }

    pub fn vanishing(&self) -> &Polynomial<F> {
        &self.t
    }

    pub fn a_poly(&self, j: usize) -> Polynomial<F> {
        self.domain.interpolate(&column(self.cs.a_rows(), j))
    }

    pub fn b_poly(&self, j: usize) -> Polynomial<F> {
        self.domain.interpolate(&column(self.cs.b_rows(), j))
    }

    pub fn c_poly(&self, j: usize) -> Polynomial<F> {
        self.domain.interpolate(&column(self.cs.c_rows(), j))
    }

    /// `(A_j(x), B_j(x), C_j(x))` for every wire `j`, evaluated at a point
    /// outside the domain, together with `t(x)`. Costs `O(n + nnz)`.
    pub fn evaluate_at(&self, x: &F) -> Result<(Vec<F>, Vec<F>, Vec<F>, F), QapError> {
        let lag = self.domain.lagrange_at(x)?;
        let m = self.num_wires();
        let fold = |rows: &[LinearCombination<F>]| {
            let mut out = vec![F::zero(); m];
            for (li, lc) in lag.iter().zip(rows) {
                for (j, c) in lc.terms() {
                    out[*j] += *li * *c;
                }
            }
            out
        };
        Ok((
            fold(self.cs.a_rows()),
            fold(self.cs.b_rows()),
            fold(self.cs.c_rows()),
            self.t.evaluate(x),
        ))
    }

    /// `H(x)` with `A(x) B(x) - C(x) = H(x) t(x)`, of degree at most
    /// `n - 2`. A nonzero remainder means the witness is invalid.
    pub fn compute_quotient(&self, w: &[F]) -> Result<Polynomial<F>, QapError> {
        if w.len() != self.num_wires() {
            return Err(QapError::Dimension {
                expected: self.num_wires(),
                got: w.len(),
            });
        }
        let av = row_values(self.cs.a_rows(), w);
        let bv = row_values(self.cs.b_rows(), w);
        let cv = row_values(self.cs.c_rows(), w);
        let mut polys = self.domain.interpolate_many(&[&av, &bv, &cv]);
        let c = polys.pop().expect("three");
        let b = polys.pop().expect("three");
        let a = polys.pop().expect("three");
        let p = &(&a * &b) - &c;
        let (h, r) = p.div_rem(&self.t)?;
        if !r.is_zero() {
            return Err(QapError::InvalidWitness);
        }
        debug_assert!(h.degree().is_none_or(|d| d + 2 <= self.num_constraints()));
        Ok(h)
    }
}
