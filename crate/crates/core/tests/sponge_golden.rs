//! Golden vectors produced by `tools/sponge_reference.py`, an independent
//! reimplementation of the parameter derivation and permutation.

use num_bigint::BigUint;
use v2x_zk::commitment::sponge_hash;
use v2x_zk::field::{PrimeField, StandardField, TestField};

const GOLDEN: &str = include_str!("data/sponge_golden.txt");

fn parse<F: PrimeField>(s: &str) -> F {
    F::from_biguint(&s.parse::<BigUint>().unwrap())
}

fn check<F: PrimeField>() -> usize {
    let mut n = 0;
    for line in GOLDEN.lines().filter(|l| l.starts_with(F::NAME)) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts[0], F::NAME);
        let inputs: Vec<F> = match parts[1] {
            "-" => vec![],
            list => list.split(',').map(parse).collect(),
        };
        assert_eq!(sponge_hash(&inputs), parse::<F>(parts[2]), "{line}");
        n += 1;
    }
    n
}

#[test]
fn test_profile_matches_reference() {
    assert_eq!(check::<TestField>(), 11);
}

#[test]
fn standard_profile_matches_reference() {
    assert_eq!(check::<StandardField>(), 11);
}

#[test]
fn single_zero_is_pinned() {
    assert_eq!(
        sponge_hash(&[TestField::zero()]),
        TestField::from_u64(274_213_107_473_188_756)
    );
}
