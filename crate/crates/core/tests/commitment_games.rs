use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use v2x_zk::commitment::games::{first_byte_distinguisher, game_bind, game_collision, game_hide};
use v2x_zk::commitment::{commit, BlindingFactor};
use v2x_zk::field::{PrimeField, TestField};

type F = TestField;

#[test]
fn binding_search_finds_nothing_on_full_output() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xb1d);
    let r = game_bind::<F, _>(1 << 20, &mut rng);
    assert_eq!(r.attempts, 1 << 20);
    assert_eq!(r.collisions, 0, "{r:?}");
}

#[test]
fn truncated_output_collides_near_birthday_bound() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x16);
    let r = game_collision::<F, _>(1000, 16, &mut rng);
    assert!(r.collisions > 0, "{r:?}");
}

#[test]
fn first_byte_distinguisher_has_no_advantage() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x41de);
    let m0 = vec![F::zero(); 4];
    let m1 = vec![F::from_u64(u64::MAX); 4];
    let r = game_hide(10_000, &m0, &m1, first_byte_distinguisher::<F>, &mut rng);
    assert_eq!(r.samples, 10_000);
    assert!(r.within_sigmas(3.0), "{r:?}");
}

#[test]
fn commitment_bytes_are_uniform_under_fresh_blinding() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xc41);
    let m: Vec<F> = (0..6).map(F::from_u64).collect();
    let n = 256 * 100;
    let mut counts = [0u64; 256];
    for _ in 0..n {
        let c = commit(&m, &BlindingFactor::random(&mut rng));
        counts[c.0.to_le_bytes()[0] as usize] += 1;
    }
    let expected = n as f64 / 256.0;
    let stat: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(255.0).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat}, p = {p}");
}
