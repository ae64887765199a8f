//! In-circuit sponge, constraint-for-constraint equal to the native one.
//!
//! Round constants and the mixing layer are linear and folded into linear
//! combinations; only S-boxes cost constraints (2 for `x^3`, 3 for `x^5`).

use super::sponge::{SpongeParams, RATE, WIDTH};
use crate::field::PrimeField;
use crate::r1cs::{CircuitBuilder, LinearCombination, Variable};

/// `x^alpha` by square-and-multiply, one constraint per multiplication.
fn sbox_gadget<F: PrimeField>(cs: &mut CircuitBuilder<F>, x: LinearCombination<F>, alpha: u64) -> LinearCombination<F> {
    let top = 63 - alpha.leading_zeros();
    let mut acc = x.clone();
    for i in (0..top).rev() {
        acc = cs.mul(acc.clone(), acc).into();
        if alpha >> i & 1 == 1 {
            acc = cs.mul(acc, x.clone()).into();
        }
    }
    acc
}

fn permute_gadget<F: PrimeField>(
    cs: &mut CircuitBuilder<F>,
    params: &SpongeParams<F>,
    state: &mut [LinearCombination<F>; WIDTH],
) {
    for r in 0..params.total_rounds() {
        for (i, s) in state.iter_mut().enumerate() {
            *s = s.clone() + LinearCombination::constant(params.round_constants[r * WIDTH + i]);
        }
        let lanes = if params.is_full_round(r) { WIDTH } else { 1 };
        for s in state.iter_mut().take(lanes) {
            *s = sbox_gadget(cs, s.clone(), params.alpha);
        }
        let old = state.clone();
        for (i, s) in state.iter_mut().enumerate() {
            *s = (0..WIDTH).fold(LinearCombination::zero(), |acc, k| acc + old[k].scale(params.mds[i][k]));
        }
    }
}

/// Constrains a fresh wire to the sponge hash of `inputs`.
pub fn sponge_gadget<F: PrimeField>(cs: &mut CircuitBuilder<F>, inputs: &[LinearCombination<F>]) -> Variable {
    let params = SpongeParams::<F>::get();
    cs.scoped("sponge", |cs| {
        let mut state: [LinearCombination<F>; WIDTH] = [
            LinearCombination::constant(F::from_u64(inputs.len() as u64)),
            LinearCombination::zero(),
            LinearCombination::zero(),
        ];
        if inputs.is_empty() {
            permute_gadget(cs, &params, &mut state);
        }
        for chunk in inputs.chunks(RATE) {
            for (k, x) in chunk.iter().enumerate() {
                state[1 + k] = state[1 + k].clone() + x;
            }
            permute_gadget(cs, &params, &mut state);
        }
        let out_lc = state[1].clone();
        let solver_lc = out_lc.clone();
        let out = cs.alloc_private_with("out", move |v| Ok(v.eval(&solver_lc)));
        cs.enforce_equal("out", out_lc, out);
        out
    })
}

/// Constraints used by [`sponge_gadget`] for `n` inputs.
pub fn sponge_constraint_count<F: PrimeField>(n: usize) -> usize {
    let p = SpongeParams::<F>::get();
    let per_sbox = (64 - p.alpha.leading_zeros() - 1 + p.alpha.count_ones() - 1) as usize;
    let per_perm = per_sbox * (p.full_rounds * WIDTH + p.partial_rounds);
    per_perm * n.div_ceil(RATE).max(1) + 1
}

#[cfg(test)]
mod tests {
    use super::super::sponge::sponge_hash;
    use super::*;
    use crate::field::TestField;
    use crate::r1cs::Assignment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type F = TestField;

    fn circuit(n: usize) -> (crate::r1cs::ConstraintSystem<F>, Variable) {
        let mut cs = CircuitBuilder::<F>::new();
        let xs: Vec<LinearCombination<F>> = (0..n).map(|i| cs.alloc_private(&format!("x{i}")).into()).collect();
        let out = sponge_gadget(&mut cs, &xs);
        (cs.finalize().unwrap(), out)
    }

    #[test]
    fn native_and_circuit_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [0usize, 1, 2, 3, 5, 12] {
            let (cs, out) = circuit(n);
            for _ in 0..(100 / 6 + 1) {
                let xs: Vec<F> = (0..n).map(|_| F::random(&mut rng)).collect();
                let mut a = Assignment::new();
                for (i, x) in xs.iter().enumerate() {
                    a.set(format!("x{i}"), *x);
                }
                let w = cs.generate_witness(&a).unwrap();
                assert_eq!(w.values()[cs.wire_index(out)], sponge_hash(&xs), "n = {n}");
            }
        }
    }

    #[test]
    fn forged_output_is_unsatisfiable() {
        let (cs, out) = circuit(3);
        let mut a = Assignment::new();
        for i in 0..3 {
            a.set(format!("x{i}"), F::from_u64(i as u64 + 1));
        }
        let mut w = cs.generate_witness(&a).unwrap();
        w.values_mut()[cs.wire_index(out)] += F::one();
        assert!(!cs.is_satisfied(w.values()).unwrap());
    }

    #[test]
    fn constraint_count_is_pinned() {
        let mut cs = CircuitBuilder::<F>::new();
        let xs: Vec<LinearCombination<F>> = (0..12).map(|i| cs.alloc_private(&format!("x{i}")).into()).collect();
        sponge_gadget(&mut cs, &xs);
        // 2 constraints per cubic S-box, 46 S-boxes per permutation, 6 permutations
        assert_eq!(cs.num_constraints(), 553);
        assert_eq!(sponge_constraint_count::<F>(12), 553);
        assert_eq!(sponge_constraint_count::<F>(0), 93);
    }
}
