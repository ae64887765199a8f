//! Discrete-event broadcast simulation.
//!
//! Egos prove and broadcast safe-distance claims over a lossy bus, verifiers
//! run the full package checks, and adversaries capture every honest package
//! and replay, delay, re-sign or tamper with it. Every run is a function of
//! the scenario (including its seed) and the shared [`SimArtifacts`].
//!
//! Logical time is in milliseconds. A package sent at `t` carries the
//! timestamp `start_time + t / 1000`, and a verifier checks it against the
//! same clock at delivery.

mod report;
mod scenario;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;
use v2x_zk::commitment::BlindingFactor;
use v2x_zk::field::PrimeField;
use v2x_zk::groth16::{setup_for, Prover};
use v2x_zk::pairing::{CurveGroup, Engine, Fr};
use v2x_zk::protocol::{
    create_package, fresh_nonce, registry_entry, Authority, DomainSeparator, Identity, ProofPackage, ProtocolError,
    RegistryEntry, RejectReason, Stage, VerifierState, APP_AUDIT, APP_RSS, DEFAULT_NONCE_CAPACITY,
};
use v2x_zk::rss::{build_rss_circuit, labels, make_rss_inputs, RssCircuit, RssConfig, RssError, STOP_SIGN_ID};

pub use report::{NodeReport, SimReport};
pub use scenario::{make_scenario, AdversarySpec, Attack, BusParams, EgoSpec, SimScenario, VerifierSpec, TEMPLATES};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown scenario template `{0}`")]
    UnknownTemplate(String),
    #[error("bad override `{0}`")]
    Override(String),
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Rss(#[from] RssError),
}

/// Keys and circuit shared by every run: one authority, one RSS prover.
pub struct SimArtifacts {
    pub authority: Authority,
    pub circuit: RssCircuit,
    pub prover: Prover<Engine>,
    pub entry: RegistryEntry,
    id_position: usize,
}

impl SimArtifacts {
    pub fn new(seed: u64) -> Result<Self, SimError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let authority = Authority::generate(&mut rng);
        let circuit = build_rss_circuit(&RssConfig::default())?;
        let prover = setup_for::<Engine, _>(&circuit.cs, &mut rng).map_err(ProtocolError::from)?;
        let entry = registry_entry(&prover, &circuit.cs, DomainSeparator::sign(APP_RSS))?;
        let id_position = circuit
            .cs
            .public_labels()
            .iter()
            .position(|l| l == labels::ID)
            .expect("RSS circuit exposes the object id");
        Ok(SimArtifacts {
            authority,
            circuit,
            prover,
            entry,
            id_position,
        })
    }

    fn verifier(&self, window: u64) -> VerifierState {
        let mut v = VerifierState::with_window(self.authority.root_key(), window, DEFAULT_NONCE_CAPACITY);
        v.register(self.entry.clone()).expect("entry matches its key");
        v.expect_app(APP_RSS);
        v
    }
}

/// Single-field changes a tampering adversary picks from, with the reason a
/// verifier that has not seen the nonce gives.
const TAMPERS: [(&str, &str); 11] = [
    ("proof", "bad-signature"),
    ("commitment", "bad-signature"),
    ("timestamp", "bad-signature"),
    ("nonce", "bad-signature"),
    ("cert", "certificate"),
    ("sig-key", "key-not-certified"),
    ("cert-and-key", "bad-signature"),
    ("vk-hash", "context-mismatch"),
    ("r1cs-hash", "context-mismatch"),
    ("public-safe", "proof-invalid"),
    ("public-distance", "proof-invalid"),
];

fn tamper(pkg: &mut ProofPackage, kind: &str, own: &Identity, safe_position: usize) {
    match kind {
        "proof" => pkg.proof.a = pkg.proof.a.double(),
        "commitment" => pkg.commitment += Fr::one(),
        "timestamp" => pkg.timestamp += 1,
        "nonce" => pkg.nonce[0] ^= 1,
        "cert" => pkg.cert.not_after += 1,
        "sig-key" => pkg.vk_sig = own.key.public_key(),
        "cert-and-key" => {
            pkg.cert = own.cert.clone();
            pkg.vk_sig = own.key.public_key();
        }
        "vk-hash" => pkg.vk_hash[0] ^= 1,
        "r1cs-hash" => pkg.r1cs_hash[31] ^= 1,
        "public-safe" => {
            let s = &mut pkg.public_inputs[safe_position];
            *s = Fr::one() - *s;
        }
        "public-distance" => pkg.public_inputs[2] += Fr::one(),
        other => unreachable!("unknown tamper {other}"),
    }
}

#[derive(Debug, Clone)]
enum Origin {
    Honest,
    Adversarial {
        adversary: usize,
        label: &'static str,
        expected: &'static str,
    },
}

struct Message {
    pkg: ProofPackage,
    origin: Origin,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Broadcast { ego: usize },
    Attack { adversary: usize, message: usize },
    Deliver { verifier: usize, message: usize, sent: u64 },
}

struct Run<'a> {
    art: &'a SimArtifacts,
    sc: &'a SimScenario,
    rng: ChaCha20Rng,
    queue: BTreeMap<(u64, u64), Event>,
    seq: u64,
    messages: Vec<Message>,
    ego_ids: Vec<Identity>,
    ego_sent: Vec<u32>,
    adversary_ids: Vec<Identity>,
    verifiers: Vec<VerifierState>,
    report: SimReport,
}

impl<'a> Run<'a> {
    fn schedule(&mut self, at: u64, event: Event) {
        self.queue.insert((at, self.seq), event);
        self.seq += 1;
    }

    fn clock(&self, t: u64) -> u64 {
        self.sc.start_time + t / 1000
    }

    fn send(&mut self, now: u64, message: usize) {
        for verifier in 0..self.verifiers.len() {
            if self.rng.gen_bool(self.sc.bus.drop_prob) {
                self.report.lost += 1;
                self.report.nodes[verifier].drops += 1;
                continue;
            }
            let lat = self
                .rng
                .gen_range(self.sc.bus.latency_min_ms..=self.sc.bus.latency_max_ms);
            self.schedule(
                now + lat,
                Event::Deliver {
                    verifier,
                    message,
                    sent: now,
                },
            );
        }
    }

    fn broadcast(&mut self, now: u64, ego: usize) -> Result<(), SimError> {
        let spec = &self.sc.egos[ego];
        let s = BlindingFactor::random(&mut self.rng);
        let nonce = fresh_nonce(&mut self.rng);
        let (x, w) = make_rss_inputs(&spec.scenario, &self.art.circuit.config, self.clock(now), nonce, s)?;
        let a = self.art.circuit.assignment(&x, &w);
        let pkg = create_package(
            &self.art.prover,
            &self.art.circuit.cs,
            &a,
            &self.ego_ids[ego],
            DomainSeparator::sign(APP_RSS),
            &mut self.rng,
        )?;
        let message = self.messages.len();
        self.messages.push(Message {
            pkg,
            origin: Origin::Honest,
        });
        self.report.honest_messages += 1;
        self.send(now, message);
        for adversary in 0..self.sc.adversaries.len() {
            self.schedule(
                now + self.sc.adversaries[adversary].delay_ms,
                Event::Attack { adversary, message },
            );
        }
        self.ego_sent[ego] += 1;
        if self.ego_sent[ego] < spec.broadcasts {
            self.schedule(now + spec.interval_ms, Event::Broadcast { ego });
        }
        Ok(())
    }

    fn attack(&mut self, now: u64, adversary: usize, message: usize) {
        let mut pkg = self.messages[message].pkg.clone();
        let own = &self.adversary_ids[adversary];
        let (label, expected) = match self.sc.adversaries[adversary].attack {
            Attack::Replay => ("replay", "nonce-replay"),
            Attack::StaleTimestamp => ("stale", "stale-timestamp"),
            Attack::CrossContext => {
                pkg.cert = own.cert.clone();
                pkg.vk_sig = own.key.public_key();
                pkg.signature = own
                    .key
                    .sign(&pkg.payload(DomainSeparator::sign(APP_AUDIT), &pkg.vk_hash));
                ("cross-context", "bad-signature")
            }
            Attack::Tamper => {
                let (kind, expected) = TAMPERS[self.rng.gen_range(0..TAMPERS.len())];
                tamper(&mut pkg, kind, own, self.art.circuit.safe_position());
                (kind, expected)
            }
        };
        let message = self.messages.len();
        self.messages.push(Message {
            pkg,
            origin: Origin::Adversarial {
                adversary,
                label,
                expected,
            },
        });
        self.report.adversarial_messages += 1;
        self.send(now, message);
    }

    fn deliver(&mut self, now: u64, verifier: usize, message: usize, sent: u64) {
        self.report.delivered += 1;
        self.report.latencies_ms.push(now - sent);
        let clock = self.clock(now);
        let Message { pkg, origin } = &self.messages[message];
        let state = &mut self.verifiers[verifier];
        let seen = state.nonces.contains(&pkg.nonce);
        let outcome = state.verify_package(pkg, clock);
        let node = &mut self.report.nodes[verifier];
        match &outcome {
            Ok(acc) => {
                node.accepts += 1;
                if acc.public_inputs[self.art.id_position] == Fr::from_u64(STOP_SIGN_ID) {
                    node.stop_sign_flag = true;
                }
            }
            Err(r) => *node.rejects.entry(r.code()).or_default() += 1,
        }
        let got = outcome.as_ref().map_or_else(RejectReason::code, |_| "accept");
        let (who, want) = match origin {
            Origin::Honest => ("honest".to_string(), "accept"),
            Origin::Adversarial {
                adversary,
                label,
                expected,
            } => {
                let name = &self.sc.adversaries[*adversary].name;
                let want = match (*label, seen) {
                    // a verifier that lost the original learns nothing new
                    ("replay", false) => "accept",
                    (_, true) if RejectReason::stage_of_code(expected) > Some(Stage::Nonce) => "nonce-replay",
                    _ => expected,
                };
                if outcome.is_ok() {
                    if *label == "replay" && !seen {
                        self.report.replay_first_deliveries += 1;
                    } else {
                        self.report.attack_successes += 1;
                    }
                }
                (format!("{name}/{label}"), want)
            }
        };
        if got != want {
            let line = format!(
                "t={now} {} <- {who}: expected {want}, got {got}",
                self.sc.verifiers[verifier].name
            );
            log::warn!("{line}");
            self.report.unexpected.push(line);
        }
    }
}

/// Runs a scenario to completion.
pub fn run_scenario(art: &SimArtifacts, sc: &SimScenario) -> Result<SimReport, SimError> {
    sc.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(sc.seed);
    let (from, to) = (sc.start_time.saturating_sub(3600), sc.start_time + 86_400);
    let mut enroll = |name: &str| Identity::enroll(&art.authority, name.as_bytes(), from, to, &mut rng);
    let ego_ids = sc.egos.iter().map(|e| enroll(&e.name)).collect();
    let adversary_ids = sc.adversaries.iter().map(|a| enroll(&a.name)).collect();
    let mut run = Run {
        art,
        sc,
        rng,
        queue: BTreeMap::new(),
        seq: 0,
        messages: Vec::new(),
        ego_ids,
        ego_sent: vec![0; sc.egos.len()],
        adversary_ids,
        verifiers: sc.verifiers.iter().map(|_| art.verifier(sc.window_secs)).collect(),
        report: SimReport {
            scenario: sc.name.clone(),
            seed: sc.seed,
            nodes: sc
                .verifiers
                .iter()
                .map(|v| NodeReport {
                    name: v.name.clone(),
                    ..NodeReport::default()
                })
                .collect(),
            ..SimReport::default()
        },
    };
    for (ego, spec) in sc.egos.iter().enumerate() {
        if spec.broadcasts > 0 {
            run.schedule(spec.start_ms, Event::Broadcast { ego });
        }
    }
    while let Some(((now, _), event)) = run.queue.pop_first() {
        match event {
            Event::Broadcast { ego } => run.broadcast(now, ego)?,
            Event::Attack { adversary, message } => run.attack(now, adversary, message),
            Event::Deliver {
                verifier,
                message,
                sent,
            } => run.deliver(now, verifier, message, sent),
        }
    }
    Ok(run.report)
}
