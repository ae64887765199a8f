use std::sync::OnceLock;

use v2x_zk_sim::{make_scenario, run_scenario, AdversarySpec, Attack, SimArtifacts, SimError, SimScenario, TEMPLATES};

fn artifacts() -> &'static SimArtifacts {
    static ART: OnceLock<SimArtifacts> = OnceLock::new();
    ART.get_or_init(|| SimArtifacts::new(7).unwrap())
}

fn fleet(broadcasts: &str) -> SimScenario {
    let mut s = make_scenario("replay-storm", &[("drop_prob", "0"), ("broadcasts", broadcasts)]).unwrap();
    s.adversaries.clear();
    s
}

#[test]
fn lossless_bus_accepts_every_copy() {
    let r = run_scenario(artifacts(), &fleet("10")).unwrap();
    assert_eq!(r.honest_messages, 10);
    assert_eq!(r.accepts(), 30);
    assert_eq!(r.rejects(), 0);
    assert_eq!(r.lost, 0);
    assert!(r.unexpected.is_empty(), "{:?}", r.unexpected);
    assert!(r.is_conserved());
    for n in &r.nodes {
        assert_eq!(n.accepts, 10);
        assert!(n.stop_sign_flag);
    }
}

#[test]
fn replays_are_rejected_by_nonce() {
    let mut s = fleet("4");
    s.adversaries.push(AdversarySpec {
        name: "replayer".into(),
        attack: Attack::Replay,
        delay_ms: 1000,
    });
    let r = run_scenario(artifacts(), &s).unwrap();
    assert_eq!(r.adversarial_messages, 4);
    assert_eq!(r.accepts(), 12);
    assert_eq!(r.rejects_for("nonce-replay"), 12);
    assert_eq!(r.attack_successes, 0);
    assert_eq!(r.replay_first_deliveries, 0);
    assert!(r.unexpected.is_empty(), "{:?}", r.unexpected);
}

#[test]
fn replay_reaching_a_verifier_that_lost_the_original_is_a_first_delivery() {
    let mut seen = false;
    for seed in 0..40 {
        let mut s = make_scenario("replay-storm", &[("seed", &seed.to_string()), ("drop_prob", "0.5")]).unwrap();
        s.adversaries.retain(|a| a.attack == Attack::Replay);
        let r = run_scenario(artifacts(), &s).unwrap();
        assert_eq!(r.attack_successes, 0);
        assert!(r.unexpected.is_empty(), "{:?}", r.unexpected);
        seen |= r.replay_first_deliveries > 0;
    }
    assert!(seen);
}

#[test]
fn stale_and_cross_context_packages_never_verify() {
    let mut s = fleet("3");
    s.adversaries = vec![
        AdversarySpec {
            name: "hoarder".into(),
            attack: Attack::StaleTimestamp,
            delay_ms: 7000,
        },
        AdversarySpec {
            name: "insider".into(),
            attack: Attack::CrossContext,
            delay_ms: 200,
        },
    ];
    let r = run_scenario(artifacts(), &s).unwrap();
    assert_eq!(r.accepts(), 9);
    assert_eq!(r.rejects_for("stale-timestamp"), 9);
    assert_eq!(r.rejects_for("bad-signature"), 9);
    assert_eq!(r.attack_successes, 0);
    assert!(r.unexpected.is_empty(), "{:?}", r.unexpected);

    s.adversaries.retain(|a| a.attack == Attack::CrossContext);
    let r = run_scenario(artifacts(), &s).unwrap();
    assert_eq!(r.adversarial_messages, 3);
    assert_eq!((r.accepts(), r.rejects(), r.rejects_for("bad-signature")), (9, 9, 9));
}

#[test]
fn equal_seeds_give_identical_reports() {
    let s = make_scenario("mixed-fleet", &[("seed", "11")]).unwrap();
    let a = run_scenario(artifacts(), &s).unwrap();
    let b = run_scenario(artifacts(), &s).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    let c = run_scenario(artifacts(), &make_scenario("mixed-fleet", &[("seed", "12")]).unwrap()).unwrap();
    assert_ne!(a.to_bytes(), c.to_bytes());
}

#[test]
fn no_attack_succeeds_on_any_template() {
    for name in TEMPLATES {
        let mut adversarial = 0;
        for seed in 0..50 {
            let s = make_scenario(name, &[("seed", &seed.to_string())]).unwrap();
            let r = run_scenario(artifacts(), &s).unwrap();
            assert!(r.is_conserved(), "{name} seed {seed}");
            assert_eq!(r.attack_successes, 0, "{name} seed {seed}");
            assert!(r.unexpected.is_empty(), "{name} seed {seed}: {:?}", r.unexpected);
            adversarial += r.adversarial_messages;
        }
        println!("{name}: 50 seeds, {adversarial} adversarial packages, 0 accepted");
    }
}

#[test]
fn occluded_stop_sign_reaches_the_trailer() {
    let r = run_scenario(artifacts(), &make_scenario("occluded-stop-sign", &[]).unwrap()).unwrap();
    assert!(r.node("trailer").unwrap().stop_sign_flag);
    let r = run_scenario(
        artifacts(),
        &make_scenario("occluded-stop-sign", &[("drop_prob", "1")]).unwrap(),
    )
    .unwrap();
    let t = r.node("trailer").unwrap();
    assert!(!t.stop_sign_flag);
    assert_eq!((t.drops, r.lost, r.delivered), (1, 1, 0));
    assert!(r.is_conserved());
}

#[test]
fn csv_has_one_row_per_verifier() {
    let r = run_scenario(artifacts(), &make_scenario("replay-storm", &[]).unwrap()).unwrap();
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "node,accepts,drops,certificate,key-not-certified,context-mismatch,bad-signature,\
         stale-timestamp,nonce-replay,nonce-store-full,proof-invalid,stop_sign_flag"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("v1,"));
    assert!(r.summary().contains("attack successes 0"));
}

#[test]
fn scenario_files_match_templates() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");
    for name in TEMPLATES {
        let text = std::fs::read_to_string(format!("{dir}/{name}.toml")).unwrap();
        let s = SimScenario::from_toml(&text).unwrap();
        assert_eq!(s, SimScenario::template(name).unwrap());
        assert_eq!(SimScenario::from_toml(&s.to_toml()).unwrap(), s);
    }
}

#[test]
fn bad_configurations_are_refused() {
    assert!(matches!(
        make_scenario("rush-hour", &[]),
        Err(SimError::UnknownTemplate(_))
    ));
    assert!(matches!(
        make_scenario("mixed-fleet", &[("speed", "3")]),
        Err(SimError::Override(_))
    ));
    assert!(matches!(
        make_scenario("mixed-fleet", &[("drop_prob", "1.5")]),
        Err(SimError::Config(_))
    ));
    // replays must trail the original, and stale copies must clear the window
    assert!(make_scenario("replay-storm", &[("latency_max_ms", "1200")]).is_err());
    assert!(make_scenario("mixed-fleet", &[("window_secs", "9")]).is_err());
    assert!(make_scenario("mixed-fleet", &[("window_secs", "7")]).is_ok());
}
