use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use v2x_zk::commitment::{commit, BlindingFactor};
use v2x_zk::field::PrimeField;
use v2x_zk::groth16::{self, setup_for};
use v2x_zk::pairing::{Engine, Fr};
use v2x_zk::r1cs::Assignment;
use v2x_zk::rss::{
    build_rss_circuit, circuit_outcome, commitment_message, labels, make_rss_inputs, RssConfig, RssScaling, RssScenario,
};

fn random_scenario<R: Rng>(rng: &mut R) -> RssScenario {
    RssScenario {
        pr: rng.gen_range(0.0..=1.0),
        v: rng.gen_range(0.0..40.0),
        d_current: rng.gen_range(0.0..200.0),
        psi: rng.gen_range(0.0..360.0),
        phi_v: rng.gen_range(-90.0..90.0),
        lambda_v: rng.gen_range(-180.0..180.0),
        ..RssScenario::default()
    }
}

#[test]
fn random_instances_prove_and_verify() {
    let mut rng = ChaCha20Rng::seed_from_u64(31);
    let cfg = RssConfig::default();
    let circuit = build_rss_circuit(&cfg).unwrap();
    let prover = setup_for::<Engine, _>(&circuit.cs, &mut rng).unwrap();
    let start = Instant::now();
    for i in 0..20u64 {
        let sc = random_scenario(&mut rng);
        let (x, w) = make_rss_inputs(
            &sc,
            &cfg,
            1_700_000_000 + i,
            rng.gen(),
            BlindingFactor::random(&mut rng),
        )
        .unwrap();
        let wit = circuit.cs.generate_witness(&circuit.assignment(&x, &w)).unwrap();
        let publics = wit.public_inputs();
        assert_eq!(publics[circuit.safe_position()], Fr::from_u64(x.safe as u64));
        assert_eq!(publics[circuit.commitment_position()], x.commitment.0);
        assert_eq!(commit(&commitment_message(&x, &w), &w.s_sec), x.commitment);
        let proof = prover.prove(wit.values(), &mut rng).unwrap();
        assert!(groth16::verify(prover.verifying_key(), &proof, publics).unwrap());
    }
    eprintln!("20 prove+verify in {:?}", start.elapsed());
}

#[test]
fn exhaustive_outcome_at_four_bits() {
    let cfg = RssConfig {
        theta_s: 9,
        prob_bits: 4,
        dist_bits: 4,
        scaling: RssScaling {
            prob: 15,
            ..RssScaling::default()
        },
        ..RssConfig::default()
    };
    let circuit = build_rss_circuit(&cfg).unwrap();
    let (x, w) = make_rss_inputs(
        &RssScenario {
            pr: 0.0,
            v: 0.0,
            d_current: 0.0,
            bbox: [0.0; 4],
            weather: [0.0; 3],
            ..RssScenario::default()
        },
        &cfg,
        0,
        [0; 16],
        BlindingFactor(Fr::one()),
    )
    .unwrap();
    let base = circuit.assignment(&x, &w);
    for pr in 0..16u64 {
        for dc in 0..16u64 {
            for ds in 0..16u64 {
                let mut a = base.clone();
                a.set(labels::PR, Fr::from_u64(pr))
                    .set(labels::D_S_CURRENT, Fr::from_u64(dc))
                    .set(labels::D_S, Fr::from_u64(ds));
                let wit = circuit.cs.generate_witness(&a).unwrap();
                let expected = circuit_outcome(pr, cfg.theta_s, dc, ds);
                assert_eq!(
                    wit.public_inputs()[circuit.safe_position()],
                    Fr::from_u64(expected as u64)
                );
                let mut flip = Assignment::new();
                let other = Fr::from_u64(!expected as u64);
                flip.set(labels::SAFE, other).set("or/out", other);
                let forged = circuit.cs.solve(&a, &flip).unwrap();
                assert!(!circuit.cs.is_satisfied(forged.values()).unwrap());
            }
        }
    }
}
