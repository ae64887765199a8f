//! Gadget library: equality, comparison, bit decomposition and boolean
//! logic.
//!
//! Hint wires (inverses, bits) are produced by solvers and then checked by
//! constraints; no gadget relies on the solver being honest.
//!
//! Constraint counts, for `k = bits`:
//!
//! | gadget                 | rows                     |
//! |------------------------|--------------------------|
//! | `is_equal`             | 2                        |
//! | `bit_decompose`        | k + 1                    |
//! | `geq_unchecked`        | k + 2                    |
//! | `geq` (two wires)      | 3k + 4                   |
//! | `geq` (wire, constant) | 2k + 3                   |
//! | `and`, `or`, `mul`     | 1                        |
//! | `not`                  | 0                        |

use super::{CircuitBuilder, LinearCombination, Variable};
use crate::field::PrimeField;

/// Default comparator width for scaled probabilities.
pub const PROB_BITS: u32 = 16;
/// Default comparator width for scaled distances and coordinates.
pub const DIST_BITS: u32 = 32;

fn bit_of<F: PrimeField>(v: &F, i: u32) -> F {
    if v.bit(i) {
        F::one()
    } else {
        F::zero()
    }
}

impl<F: PrimeField> CircuitBuilder<F> {
    /// `x * (x - 1) = 0`.
    pub fn assert_boolean(&mut self, x: impl Into<LinearCombination<F>>) {
        let x = x.into();
        self.enforce_labeled("boolean", x.clone(), x - Variable::ONE, LinearCombination::zero());
    }

    /// A fresh wire constrained to `x * y`.
    pub fn mul(&mut self, x: impl Into<LinearCombination<F>>, y: impl Into<LinearCombination<F>>) -> Variable {
        let (x, y) = (x.into(), y.into());
        let (xs, ys) = (x.clone(), y.clone());
        let out = self.alloc_private_with("product", move |v| Ok(v.eval(&xs) * v.eval(&ys)));
        self.enforce_labeled("product", x, y, out);
        out
    }

    /// Boolean wire equal to 1 iff `x = y`, by the inverse trick:
    /// `d * inv = 1 - out` and `d * out = 0` with `d = x - y`.
    pub fn is_equal(&mut self, x: impl Into<LinearCombination<F>>, y: impl Into<LinearCombination<F>>) -> Variable {
        let d = x.into() - y.into();
        self.scoped("is_equal", |cs| {
            let ds = d.clone();
            let inv = cs.alloc_private_with("inverse", move |v| Ok(v.eval(&ds).inverse().unwrap_or_else(F::zero)));
            let ds = d.clone();
            let out = cs.alloc_private_with("out", move |v| {
                Ok(if v.eval(&ds).is_zero() { F::one() } else { F::zero() })
            });
            cs.enforce_labeled("inverse", d.clone(), inv, LinearCombination::constant(F::one()) - out);
            cs.enforce_labeled("zero-product", d, out, LinearCombination::zero());
            out
        })
    }

    /// Little-endian bits of `x`, each boolean-constrained, with
    /// `sum b_i 2^i = x`. Unsatisfiable when `x >= 2^bits`.
    pub fn bit_decompose(&mut self, x: impl Into<LinearCombination<F>>, bits: u32) -> Vec<Variable> {
        assert!(bits <= F::CAPACITY, "{bits} bits exceed the field capacity");
        let x = x.into();
        self.scoped("bits", |cs| {
            let mut out = Vec::with_capacity(bits as usize);
            let mut recomposed = LinearCombination::zero();
            for i in 0..bits {
                let xs = x.clone();
                let b = cs.alloc_private_with(&format!("b{i}"), move |v| Ok(bit_of(&v.eval(&xs), i)));
                cs.assert_boolean(b);
                recomposed = recomposed + LinearCombination::from(b).scale(F::pow2(i));
                out.push(b);
            }
            cs.enforce_equal("recompose", recomposed, x);
            out
        })
    }

    /// Asserts `x < 2^bits`. Constants are checked natively and cost nothing.
    pub fn range_check(&mut self, x: impl Into<LinearCombination<F>>, bits: u32) {
        let x = x.into();
        if let Some(c) = x.as_constant() {
            assert!(
                c.to_biguint().bits() <= bits as u64,
                "constant {c} does not fit in {bits} bits"
            );
            return;
        }
        self.bit_decompose(x, bits);
    }

    /// `[x >= y]` for operands already known to be below `2^bits`.
    ///
    /// Decomposes `x - y + 2^bits` into `bits + 1` bits; the top bit is the
    /// result.
    pub fn geq_unchecked(
        &mut self,
        x: impl Into<LinearCombination<F>>,
        y: impl Into<LinearCombination<F>>,
        bits: u32,
    ) -> Variable {
        assert!(
            bits + 2 <= F::CAPACITY,
            "comparator width {bits} too large for {}",
            F::NAME
        );
        let shifted = x.into() - y.into() + LinearCombination::constant(F::pow2(bits));
        self.scoped("geq", |cs| {
            let b = cs.bit_decompose(shifted, bits + 1);
            b[bits as usize]
        })
    }

    /// `[x >= y]` as integers, range-checking both operands to `bits` bits.
    pub fn geq(
        &mut self,
        x: impl Into<LinearCombination<F>>,
        y: impl Into<LinearCombination<F>>,
        bits: u32,
    ) -> Variable {
        let (x, y) = (x.into(), y.into());
        self.scoped("geq_range", |cs| {
            cs.range_check(x.clone(), bits);
            cs.range_check(y.clone(), bits);
        });
        self.geq_unchecked(x, y, bits)
    }

    /// `x * y` for boolean inputs.
    pub fn and(&mut self, x: impl Into<LinearCombination<F>>, y: impl Into<LinearCombination<F>>) -> Variable {
        let (x, y) = (x.into(), y.into());
        self.scoped("and", |cs| cs.mul(x, y))
    }

    /// `x + y - x * y` for boolean inputs, as `x * y = x + y - out`.
    pub fn or(&mut self, x: impl Into<LinearCombination<F>>, y: impl Into<LinearCombination<F>>) -> Variable {
        let (x, y) = (x.into(), y.into());
        self.scoped("or", |cs| {
            let (xs, ys) = (x.clone(), y.clone());
            let out = cs.alloc_private_with("out", move |v| {
                let (a, b) = (v.eval(&xs), v.eval(&ys));
                Ok(a + b - a * b)
            });
            cs.enforce_labeled("or", x.clone(), y.clone(), x + y - out);
            out
        })
    }

    /// `1 - x`; linear, so no wire is allocated.
    pub fn not(&self, x: impl Into<LinearCombination<F>>) -> LinearCombination<F> {
        LinearCombination::constant(F::one()) - x.into()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Assignment, ConstraintSystem};
    use super::*;
    use crate::field::{TestField, TinyField};

    fn count<F: PrimeField>(build: impl FnOnce(&mut CircuitBuilder<F>)) -> usize {
        let mut cs = CircuitBuilder::<F>::new();
        build(&mut cs);
        cs.num_constraints()
    }

    #[test]
    fn constraint_counts_are_pinned() {
        type F = TestField;
        let k = 16;
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                cs.is_equal(x, LinearCombination::constant(F::from_u64(11)));
            }),
            2
        );
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                cs.bit_decompose(x, k);
            }),
            k as usize + 1
        );
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                let y = cs.alloc_private("y");
                cs.geq_unchecked(x, y, k);
            }),
            k as usize + 2
        );
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                let y = cs.alloc_private("y");
                cs.geq(x, y, k);
            }),
            3 * k as usize + 4
        );
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                cs.geq(x, LinearCombination::constant(F::from_u64(75)), k);
            }),
            2 * k as usize + 3
        );
        assert_eq!(
            count::<F>(|cs| {
                let x = cs.alloc_private("x");
                let y = cs.alloc_private("y");
                cs.and(x, y);
                cs.or(x, y);
                let _ = cs.not(x);
            }),
            2
        );
    }

    /// Honest evaluation of a single-output gadget over named inputs.
    fn eval_gadget<F: PrimeField>(
        build: impl FnOnce(&mut CircuitBuilder<F>) -> Variable,
        inputs: &[(&str, u64)],
    ) -> Result<F, super::super::R1csError> {
        let mut cs = CircuitBuilder::<F>::new();
        let out = build(&mut cs);
        let cs = cs.finalize().unwrap();
        let mut a = Assignment::new();
        for (k, v) in inputs {
            a.set(*k, F::from_u64(*v));
        }
        let w = cs.generate_witness(&a)?;
        Ok(w.values()[cs.wire_index(out)])
    }

    #[test]
    fn worked_examples() {
        type F = TestField;
        let eq = |x: u64, y: u64| {
            eval_gadget::<F>(
                |cs| {
                    let x = cs.alloc_private("x");
                    cs.is_equal(x, LinearCombination::constant(F::from_u64(y)))
                },
                &[("x", x)],
            )
            .unwrap()
        };
        assert_eq!(eq(11, 11), F::one());
        assert_eq!(eq(11, 12), F::zero());

        let geq = |x: u64, y: u64| {
            eval_gadget::<F>(
                |cs| {
                    let x = cs.alloc_private("x");
                    let y = cs.alloc_private("y");
                    cs.geq(x, y, 8)
                },
                &[("x", x), ("y", y)],
            )
            .unwrap()
        };
        assert_eq!(geq(80, 75), F::one());
        assert_eq!(geq(20, 25), F::zero());

        let or_not = |d: u64, far: u64| {
            eval_gadget::<F>(
                |cs| {
                    let d = cs.alloc_private("d");
                    let far = cs.alloc_private("far");
                    let nd = cs.not(d);
                    cs.or(nd, far)
                },
                &[("d", d), ("far", far)],
            )
            .unwrap()
        };
        assert_eq!(or_not(0, 0), F::one());
        assert_eq!(or_not(1, 0), F::zero());
    }

    #[test]
    fn bit_decomposition_examples() {
        type F = TestField;
        let bits_of = |x: u64| {
            let mut cs = CircuitBuilder::<F>::new();
            let xv = cs.alloc_private("x");
            let bits = cs.bit_decompose(xv, 4);
            let cs = cs.finalize().unwrap();
            let mut a = Assignment::new();
            a.set("x", F::from_u64(x));
            cs.generate_witness(&a).map(|w| {
                bits.iter()
                    .map(|b| w.values()[cs.wire_index(*b)].to_u64().unwrap())
                    .collect::<Vec<_>>()
            })
        };
        assert_eq!(bits_of(5).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(bits_of(0).unwrap(), vec![0, 0, 0, 0]);
        match bits_of(16) {
            Err(super::super::R1csError::Unsatisfied { label, .. }) => assert_eq!(label, "bits/recompose"),
            other => panic!("expected range failure, got {other:?}"),
        }
    }

    #[test]
    fn truth_tables() {
        type F = TestField;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let and = eval_gadget::<F>(
                    |cs| {
                        let a = cs.alloc_private("x");
                        let b = cs.alloc_private("y");
                        cs.and(a, b)
                    },
                    &[("x", x), ("y", y)],
                )
                .unwrap();
                let or = eval_gadget::<F>(
                    |cs| {
                        let a = cs.alloc_private("x");
                        let b = cs.alloc_private("y");
                        cs.or(a, b)
                    },
                    &[("x", x), ("y", y)],
                )
                .unwrap();
                assert_eq!(and.to_u64(), Some(x & y));
                assert_eq!(or.to_u64(), Some(x | y));
            }
            let mut cs = CircuitBuilder::<F>::new();
            let a = cs.alloc_private("x");
            let n = cs.not(a);
            assert_eq!(n.evaluate(&[F::one(), F::from_u64(x)]).to_u64(), Some(1 - x));
        }
    }

    /// Every value of the listed wires, over the whole tiny field, for which
    /// the system is satisfied with the remaining wires taken from `base`.
    fn satisfying<F: PrimeField>(cs: &ConstraintSystem<F>, base: &[F], free: &[(usize, Vec<F>)], out: usize) -> Vec<F> {
        let mut w = base.to_vec();
        let mut found = Vec::new();
        let mut idx = vec![0usize; free.len()];
        loop {
            for (k, (wire, domain)) in free.iter().enumerate() {
                w[*wire] = domain[idx[k]];
            }
            if cs.is_satisfied(&w).unwrap() && !found.contains(&w[out]) {
                found.push(w[out]);
            }
            let mut k = 0;
            loop {
                if k == free.len() {
                    return found;
                }
                idx[k] += 1;
                if idx[k] < free[k].1.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn all_tiny() -> Vec<TinyField> {
        (0..257).map(TinyField::from_u64).collect()
    }

    #[test]
    fn is_equal_sound_by_exhaustion() {
        type F = TinyField;
        let mut cs = CircuitBuilder::<F>::new();
        let x = cs.alloc_private("x");
        let y = cs.alloc_private("y");
        let out = cs.is_equal(x, y);
        let cs = cs.finalize().unwrap();
        let inv = cs.find_wire("is_equal/inverse").unwrap();
        let o = cs.wire_index(out);
        for xv in 0..16u64 {
            for yv in 0..16u64 {
                let mut a = Assignment::new();
                a.set("x", F::from_u64(xv)).set("y", F::from_u64(yv));
                let w = cs.generate_witness(&a).unwrap();
                let outs = satisfying(&cs, w.values(), &[(inv, all_tiny()), (o, all_tiny())], o);
                assert_eq!(outs, vec![F::from_u64((xv == yv) as u64)], "x={xv} y={yv}");
            }
        }
    }

    #[test]
    fn bit_decompose_unique_by_exhaustion() {
        type F = TinyField;
        let bits = 2;
        let mut cs = CircuitBuilder::<F>::new();
        let x = cs.alloc_private("x");
        let b = cs.bit_decompose(x, bits);
        let cs = cs.finalize().unwrap();
        let wires: Vec<usize> = b.iter().map(|v| cs.wire_index(*v)).collect();
        let xw = cs.wire_index(x);
        // every assignment of every bit wire over the whole field
        let mut solutions = Vec::new();
        let mut w = vec![F::zero(); cs.num_wires()];
        w[0] = F::one();
        for xv in 0..257u64 {
            w[xw] = F::from_u64(xv);
            for combo in 0..257u64.pow(bits) {
                let mut c = combo;
                for &bw in &wires {
                    w[bw] = F::from_u64(c % 257);
                    c /= 257;
                }
                if cs.is_satisfied(&w).unwrap() {
                    solutions.push((xv, wires.iter().map(|&bw| w[bw].to_u64().unwrap()).collect::<Vec<_>>()));
                }
            }
        }
        let expected: Vec<(u64, Vec<u64>)> = (0..4u64)
            .map(|v| (v, (0..bits).map(|i| (v >> i) & 1).collect()))
            .collect();
        assert_eq!(solutions, expected);
    }

    #[test]
    fn geq_unchecked_sound_by_exhaustion() {
        // Bits are boolean-constrained, so only {0, 1} can satisfy those rows;
        // the enumeration covers every boolean assignment of the hint bits
        // plus the full field for the output bit.
        type F = TinyField;
        let bits = 6;
        let mut cs = CircuitBuilder::<F>::new();
        let x = cs.alloc_private("x");
        let y = cs.alloc_private("y");
        let out = cs.geq_unchecked(x, y, bits);
        let cs = cs.finalize().unwrap();
        let o = cs.wire_index(out);
        let hints: Vec<usize> = (0..bits)
            .map(|i| cs.find_wire(&format!("geq/bits/b{i}")).unwrap())
            .collect();
        let boolean = vec![F::zero(), F::one()];
        let mut free: Vec<(usize, Vec<F>)> = hints.iter().map(|&h| (h, boolean.clone())).collect();
        free.push((o, all_tiny()));
        for xv in 0..64u64 {
            for yv in 0..64u64 {
                let mut a = Assignment::new();
                a.set("x", F::from_u64(xv)).set("y", F::from_u64(yv));
                let w = cs.generate_witness(&a).unwrap();
                let outs = satisfying(&cs, w.values(), &free, o);
                assert_eq!(outs, vec![F::from_u64((xv >= yv) as u64)], "x={xv} y={yv}");
            }
        }
    }

    #[test]
    fn boolean_gates_sound_by_exhaustion() {
        type F = TinyField;
        for gate in ["and", "or"] {
            let mut cs = CircuitBuilder::<F>::new();
            let x = cs.alloc_private("x");
            let y = cs.alloc_private("y");
            let out = if gate == "and" { cs.and(x, y) } else { cs.or(x, y) };
            let cs = cs.finalize().unwrap();
            let o = cs.wire_index(out);
            for xv in 0..2u64 {
                for yv in 0..2u64 {
                    let mut a = Assignment::new();
                    a.set("x", F::from_u64(xv)).set("y", F::from_u64(yv));
                    let w = cs.generate_witness(&a).unwrap();
                    let outs = satisfying(&cs, w.values(), &[(o, all_tiny())], o);
                    let expect = if gate == "and" { xv & yv } else { xv | yv };
                    assert_eq!(outs, vec![F::from_u64(expect)], "{gate}({xv},{yv})");
                }
            }
        }
    }

    #[test]
    fn geq_rejects_out_of_range_operand() {
        type F = TestField;
        let r = eval_gadget::<F>(
            |cs| {
                let x = cs.alloc_private("x");
                let y = cs.alloc_private("y");
                cs.geq(x, y, 8)
            },
            &[("x", 300), ("y", 2)],
        );
        assert!(
            matches!(r, Err(super::super::R1csError::Unsatisfied { label, .. }) if label.starts_with("geq_range/bits"))
        );
    }
}
