use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use v2x_zk::commitment::BlindingFactor;
use v2x_zk::field::PrimeField;
use v2x_zk::groth16::{setup_for, Prover};
use v2x_zk::pairing::{Engine, Fr};
use v2x_zk::protocol::{
    audit_open, create_package, fresh_nonce, registry_entry, Authority, CertError, DomainSeparator, Identity,
    ProofPackage, RejectReason, Stage, VerifierState, APP_AUDIT, APP_RSS,
};
use v2x_zk::rss::{build_rss_circuit, commitment_message, make_rss_inputs, RssCircuit, RssConfig, RssScenario};

const NOW: u64 = 1_700_000_000;

struct Fixture {
    rng: ChaCha20Rng,
    authority: Authority,
    identity: Identity,
    circuit: RssCircuit,
    prover: Prover<Engine>,
}

impl Fixture {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let authority = Authority::generate(&mut rng);
        let identity = Identity::enroll(&authority, b"VID-0042", NOW - 100, NOW + 100, &mut rng);
        let circuit = build_rss_circuit(&RssConfig::default()).unwrap();
        let prover = setup_for::<Engine, _>(&circuit.cs, &mut rng).unwrap();
        Fixture {
            rng,
            authority,
            identity,
            circuit,
            prover,
        }
    }

    fn verifier(&self) -> VerifierState {
        let mut v = VerifierState::new(self.authority.root_key());
        v.register(registry_entry(&self.prover, &self.circuit.cs, DomainSeparator::sign(APP_RSS)).unwrap())
            .unwrap();
        v
    }

    fn package_at(&mut self, t: u64, delta: DomainSeparator) -> ProofPackage {
        let s = BlindingFactor::random(&mut self.rng);
        let nonce = fresh_nonce(&mut self.rng);
        let (x, w) = make_rss_inputs(&RssScenario::default(), &self.circuit.config, t, nonce, s).unwrap();
        let a = self.circuit.assignment(&x, &w);
        create_package(&self.prover, &self.circuit.cs, &a, &self.identity, delta, &mut self.rng).unwrap()
    }

    fn package(&mut self) -> ProofPackage {
        self.package_at(NOW, DomainSeparator::sign(APP_RSS))
    }
}

#[test]
fn honest_package_is_accepted_then_replay_rejected() {
    let mut f = Fixture::new(1);
    let mut v = f.verifier();
    let pkg = f.package();
    let ok = v.verify_package(&pkg, NOW + 1).unwrap();
    assert_eq!(ok.app_id, APP_RSS);
    assert_eq!(ok.public_inputs[f.circuit.safe_position()], Fr::one());
    let err = v.verify_package(&pkg, NOW + 2).unwrap_err();
    assert_eq!(err, RejectReason::NonceReplay);
    assert_eq!(err.stage(), Stage::Nonce);
}

#[test]
fn check_does_not_record_nonce() {
    let mut f = Fixture::new(2);
    let mut v = f.verifier();
    let pkg = f.package();
    v.check_package(&pkg, NOW).unwrap();
    v.check_package(&pkg, NOW).unwrap();
    v.verify_package(&pkg, NOW).unwrap();
}

#[test]
fn stale_and_future_timestamps_are_rejected() {
    let mut f = Fixture::new(3);
    let mut v = f.verifier();
    let pkg = f.package();
    for now in [NOW + 6, NOW - 6] {
        let err = v.verify_package(&pkg, now).unwrap_err();
        assert_eq!(err.code(), "stale-timestamp");
    }
    v.verify_package(&pkg, NOW + 5).unwrap();
}

#[test]
fn expired_certificate_is_rejected_first() {
    let mut f = Fixture::new(4);
    let mut v = f.verifier();
    let pkg = f.package_at(NOW + 150, DomainSeparator::sign(APP_RSS));
    let err = v.verify_package(&pkg, NOW + 150).unwrap_err();
    assert_eq!(err, RejectReason::Certificate(CertError::Expired(NOW + 100)));
    assert_eq!(err.stage(), Stage::Certificate);
}

#[test]
fn cross_context_packages_are_rejected() {
    let mut f = Fixture::new(5);
    let mut v = f.verifier();
    let pkg = f.package_at(NOW, DomainSeparator::sign(APP_AUDIT));
    assert_eq!(v.verify_package(&pkg, NOW).unwrap_err(), RejectReason::BadSignature);

    let honest = f.package();
    let mut audit_only = f.verifier();
    audit_only.expect_app(APP_AUDIT);
    let err = audit_only.verify_package(&honest, NOW).unwrap_err();
    assert_eq!(err.stage(), Stage::Context);
    assert_eq!(err.code(), "context-mismatch");
}

#[test]
fn every_single_field_tamper_is_rejected_at_its_stage() {
    let mut f = Fixture::new(6);
    let pkg = f.package();
    let other = f.package();
    let stranger = Identity::enroll(&f.authority, b"VID-0043", NOW - 100, NOW + 100, &mut f.rng);
    let rogue = Authority::generate(&mut f.rng);

    let mut cases: Vec<(&str, ProofPackage, &str)> = Vec::new();
    let mut push = |name, edit: &dyn Fn(&mut ProofPackage), code| {
        let mut p = pkg.clone();
        edit(&mut p);
        cases.push((name, p, code));
    };
    push("proof", &|p| p.proof = other.proof.clone(), "bad-signature");
    push("commitment", &|p| p.commitment += Fr::one(), "bad-signature");
    push("timestamp", &|p| p.timestamp += 1, "bad-signature");
    push("nonce", &|p| p.nonce[0] ^= 1, "bad-signature");
    push("signature", &|p| p.signature = other.signature, "bad-signature");
    push("cert", &|p| p.cert.not_after += 1, "certificate");
    push(
        "foreign cert",
        &|p| p.cert = rogue.issue(b"VID-0042", pkg.vk_sig, NOW - 100, NOW + 100),
        "certificate",
    );
    push(
        "sig key",
        &|p| p.vk_sig = stranger.key.public_key(),
        "key-not-certified",
    );
    push(
        "cert and key",
        &|p| {
            p.cert = stranger.cert.clone();
            p.vk_sig = stranger.key.public_key();
        },
        "bad-signature",
    );
    push("vk hash", &|p| p.vk_hash[0] ^= 1, "context-mismatch");
    push("r1cs hash", &|p| p.r1cs_hash[31] ^= 1, "context-mismatch");
    push(
        "public SAFE",
        &|p| p.public_inputs[13 + 3] = Fr::zero(),
        "proof-invalid",
    );
    push("public d_S", &|p| p.public_inputs[2] += Fr::one(), "proof-invalid");
    push("public c", &|p| p.public_inputs[17] += Fr::one(), "proof-invalid");
    push("public nu", &|p| p.public_inputs[13] += Fr::one(), "proof-invalid");
    push(
        "public length",
        &|p| {
            p.public_inputs.pop();
        },
        "proof-invalid",
    );

    assert_eq!(f.circuit.safe_position(), 16);
    assert_eq!(f.circuit.commitment_position(), 17);
    for (name, p, code) in cases {
        let mut v = f.verifier();
        let err = v.verify_package(&p, NOW).unwrap_err();
        assert_eq!(err.code(), code, "{name}: {err}");
        assert!(v.nonces.is_empty(), "{name}");
    }
    f.verifier().verify_package(&pkg, NOW).unwrap();
}

#[test]
fn package_bytes_roundtrip() {
    let mut f = Fixture::new(7);
    let pkg = f.package();
    let bytes = pkg.to_bytes();
    assert_eq!(&bytes[..4], b"HSPG");
    let back = ProofPackage::from_bytes(&bytes).unwrap();
    assert_eq!(back, pkg);
    f.verifier().verify_package(&back, NOW).unwrap();
    for cut in [0, 4, bytes.len() / 2, bytes.len() - 1] {
        assert!(ProofPackage::from_bytes(&bytes[..cut]).is_err());
    }
}

#[test]
fn audit_opening() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let cfg = RssConfig::default();
    let s = BlindingFactor::random(&mut rng);
    let (x, w) = make_rss_inputs(&RssScenario::default(), &cfg, NOW, rng.gen(), s).unwrap();
    let m = commitment_message(&x, &w);
    assert!(audit_open(&x.commitment, &m, &w.s_sec));

    let mut altered = m.clone();
    altered[7] += Fr::one();
    assert!(!audit_open(&x.commitment, &altered, &w.s_sec));
    let wrong = BlindingFactor(w.s_sec.value() + Fr::one());
    assert!(!audit_open(&x.commitment, &m, &wrong));
}
