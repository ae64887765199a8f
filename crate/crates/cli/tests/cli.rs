use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use v2x_zk::audit::{sample_audit, write_detections};
use v2x_zk::field::TestField;
use v2x_zk::field::{decode, DTypeTag, Value};
use v2x_zk::rss::RssScenario;
use v2x_zk_cli::bench::cmd_bench;
use v2x_zk_cli::circuit::CircuitSpec;
use v2x_zk_cli::commands::{
    cmd_audit_open, cmd_authority, cmd_enroll, cmd_prove, cmd_provision, cmd_setup, cmd_verify, CircuitChoice,
    CommitmentSource, EnrollArgs, ProveArgs, SetupArgs, SetupFiles, VerifyArgs,
};
use v2x_zk_cli::vectors::{cmd_vectors, sponge};
use v2x_zk_cli::{exit_code, CliError, Outcome, STATE_ENV};

const NOW: u64 = 1_700_000_000;
const BIN: &str = env!("CARGO_BIN_EXE_v2xzk");

fn sink() -> Vec<u8> {
    Vec::new()
}

/// Authority, one enrolled ego and a provisioned RSS setup in `dir`.
struct World {
    dir: PathBuf,
    rss: SetupFiles,
}

impl World {
    fn new(dir: &Path) -> Self {
        let mut out = sink();
        cmd_authority(dir, Some(1), &mut out).unwrap();
        cmd_enroll(
            &EnrollArgs {
                authority: dir.join("authority.key"),
                vid: "VID-0042".into(),
                not_before: NOW - 1000,
                not_after: NOW + 1000,
                seed: Some(2),
                out: dir.join("ego.id"),
            },
            &mut out,
        )
        .unwrap();
        let keys = dir.join("keys");
        let setup = SetupArgs {
            circuit: CircuitChoice::Rss { theta: 0.75 },
            seed: Some(3),
            out_dir: keys.clone(),
        };
        cmd_setup(&setup, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("constraints 901\n"), "{text}");
        let rss = SetupFiles::in_dir(&keys, "rss");
        cmd_provision(
            &dir.join("state"),
            &dir.join("authority.pub"),
            std::slice::from_ref(&rss.entry),
            &mut sink(),
        )
        .unwrap();
        fs::write(
            dir.join("scenario.toml"),
            toml::to_string(&RssScenario::default()).unwrap(),
        )
        .unwrap();
        World { dir: dir.into(), rss }
    }

    fn prove(&self, name: &str, seed: u64) -> PathBuf {
        let out = self.dir.join(name);
        let args = ProveArgs {
            pk: self.rss.pk.clone(),
            identity: self.dir.join("ego.id"),
            input: self.dir.join("scenario.toml"),
            timestamp: NOW,
            seed: Some(seed),
            out: out.clone(),
            opening: Some(self.dir.join(format!("{name}.open"))),
        };
        let mut text = sink();
        assert_eq!(cmd_prove(&args, &mut text).unwrap(), Outcome::Success);
        assert!(String::from_utf8(text).unwrap().contains("SAFE 1\n"));
        out
    }

    fn verify(&self, vk: &Path, pkg: &Path, now: u64) -> (Outcome, String) {
        let mut text = sink();
        let args = VerifyArgs::new(vk.into(), pkg.into(), self.dir.join("state"), now);
        let o = cmd_verify(&args, &mut text).unwrap();
        (o, String::from_utf8(text).unwrap())
    }
}

#[test]
fn setup_is_deterministic_under_a_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        let args = SetupArgs {
            circuit: CircuitChoice::Rss { theta: 0.75 },
            seed: Some(9),
            out_dir: d.into(),
        };
        cmd_setup(&args, &mut sink()).unwrap();
    }
    for ext in ["r1cs", "pk", "vk", "entry"] {
        let name = format!("rss.{ext}");
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{ext}"
        );
    }
    let bad = SetupArgs {
        circuit: CircuitChoice::Rss { theta: 1.5 },
        seed: Some(9),
        out_dir: a.path().into(),
    };
    let r = cmd_setup(&bad, &mut sink());
    assert!(matches!(r, Err(CliError::Rss(_))));
    assert_eq!(exit_code(&r), 2);
}

#[test]
fn prove_verify_replay_and_openings() {
    let tmp = tempfile::tempdir().unwrap();
    let w = World::new(tmp.path());
    let pkg = w.prove("a.pkg", 4);
    let again = w.prove("b.pkg", 4);
    assert_eq!(fs::read(&pkg).unwrap(), fs::read(&again).unwrap());

    let (o, text) = w.verify(&w.rss.vk, &pkg, NOW + 1);
    assert_eq!(o, Outcome::Success);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        &lines[..7],
        [
            "PASS certificate",
            "PASS context",
            "PASS signature",
            "PASS freshness",
            "PASS nonce",
            "PASS proof",
            "ACCEPT"
        ]
    );
    assert!(text.contains("public Delta_commit 65536\n"));
    assert!(text.contains("public SAFE 1\n"));

    // the nonce store persists between invocations
    let (o, text) = w.verify(&w.rss.vk, &pkg, NOW + 2);
    assert_eq!(o, Outcome::Reject);
    assert!(text.contains("FAIL nonce nonce-replay\n"), "{text}");
    assert!(!text.contains("PASS nonce"));

    let stale = w.prove("c.pkg", 5);
    let (o, text) = w.verify(&w.rss.vk, &stale, NOW + 6);
    assert_eq!(o, Outcome::Reject);
    assert!(text.contains("FAIL freshness stale-timestamp\n"), "{text}");

    let open = w.dir.join("a.pkg.open");
    let from_pkg = CommitmentSource::Package(pkg.clone());
    assert_eq!(cmd_audit_open(&from_pkg, &open, &mut sink()).unwrap(), Outcome::Success);
    let text = fs::read_to_string(&open).unwrap();
    let altered = w.dir.join("altered.open");
    fs::write(&altered, text.replacen("m 65536\n", "m 65537\n", 1)).unwrap();
    assert_eq!(
        cmd_audit_open(&from_pkg, &altered, &mut sink()).unwrap(),
        Outcome::Reject
    );
    let wrong = CommitmentSource::Value("12345".into());
    assert_eq!(cmd_audit_open(&wrong, &open, &mut sink()).unwrap(), Outcome::Reject);
    fs::write(&altered, "opening 1\ns_sec nope\n").unwrap();
    let r = cmd_audit_open(&from_pkg, &altered, &mut sink());
    assert_eq!(exit_code(&r), 2);
}

#[test]
fn tampered_proving_key_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let w = World::new(tmp.path());
    let mut bytes = fs::read(&w.rss.pk).unwrap();
    // container header (11 bytes), profile byte, then the circuit hash
    bytes[11 + 1 + 5] ^= 1;
    fs::write(&w.rss.pk, bytes).unwrap();
    let args = ProveArgs {
        pk: w.rss.pk.clone(),
        identity: w.dir.join("ego.id"),
        input: w.dir.join("scenario.toml"),
        timestamp: NOW,
        seed: Some(1),
        out: w.dir.join("x.pkg"),
        opening: None,
    };
    let r = cmd_prove(&args, &mut sink());
    assert_eq!(exit_code(&r), 2, "{:?}", r.err());
    assert!(!w.dir.join("x.pkg").exists());
}

#[test]
fn unsatisfiable_scenario_names_the_problem() {
    let tmp = tempfile::tempdir().unwrap();
    let w = World::new(tmp.path());
    let s = RssScenario {
        pr: 1e6,
        ..RssScenario::default()
    };
    fs::write(w.dir.join("scenario.toml"), toml::to_string(&s).unwrap()).unwrap();
    let args = ProveArgs {
        pk: w.rss.pk.clone(),
        identity: w.dir.join("ego.id"),
        input: w.dir.join("scenario.toml"),
        timestamp: NOW,
        seed: Some(1),
        out: w.dir.join("x.pkg"),
        opening: None,
    };
    let err = cmd_prove(&args, &mut sink()).unwrap_err();
    assert!(err.to_string().starts_with("pr = 1000000 does not fit"), "{err}");
}

#[test]
fn failing_audit_proves_and_foreign_key_is_a_context_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let w = World::new(tmp.path());
    let (challenge, dets) = sample_audit();
    fs::write(w.dir.join("challenge.txt"), challenge.to_canonical()).unwrap();
    fs::write(w.dir.join("detections.txt"), write_detections(&dets)).unwrap();
    let setup = SetupArgs {
        circuit: CircuitChoice::Audit {
            challenge: w.dir.join("challenge.txt"),
        },
        seed: Some(5),
        out_dir: w.dir.join("keys"),
    };
    cmd_setup(&setup, &mut sink()).unwrap();
    let audit = SetupFiles::in_dir(&w.dir.join("keys"), "audit");
    cmd_provision(
        &w.dir.join("state"),
        &w.dir.join("authority.pub"),
        std::slice::from_ref(&audit.entry),
        &mut sink(),
    )
    .unwrap();

    let pkg = w.dir.join("audit.pkg");
    let args = ProveArgs {
        pk: audit.pk.clone(),
        identity: w.dir.join("ego.id"),
        input: w.dir.join("detections.txt"),
        timestamp: NOW,
        seed: Some(6),
        out: pkg.clone(),
        opening: None,
    };
    let mut text = sink();
    assert_eq!(cmd_prove(&args, &mut text).unwrap(), Outcome::Success);
    assert!(String::from_utf8(text).unwrap().contains("PASS 0\n"));
    let (o, text) = w.verify(&audit.vk, &pkg, NOW);
    assert_eq!(o, Outcome::Success, "{text}");
    assert!(text.contains("public Delta_commit 16842752\n"));

    let rss_pkg = w.prove("r.pkg", 7);
    let (o, text) = w.verify(&audit.vk, &rss_pkg, NOW);
    assert_eq!(o, Outcome::Reject);
    assert!(text.contains("FAIL context context-mismatch\n"), "{text}");
    let (o, _) = w.verify(&w.rss.vk, &rss_pkg, NOW);
    assert_eq!(o, Outcome::Success);
}

#[test]
fn bench_reports_three_stages() {
    let input = toml::to_string(&RssScenario::default()).unwrap();
    let spec = CircuitSpec::Rss(Default::default());
    let r = cmd_bench(&spec, &input, 1, Some(1)).unwrap();
    assert_eq!(r.runs, 1);
    let csv = r.to_csv();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "stage,mean-ms,share-percent");
    assert_eq!(rows.len(), 4);
    let mut total = 0.0;
    let means: f64 = r.mean_ms.iter().sum();
    for (row, m) in rows[1..].iter().zip(r.mean_ms) {
        let share: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((share - 100.0 * m / means).abs() < 0.01, "{row}");
        total += share;
    }
    assert!((total - 100.0).abs() <= 0.5);
    assert!(cmd_bench(&spec, &input, 0, None).is_err());
}

#[test]
fn golden_vectors() {
    let tmp = tempfile::tempdir().unwrap();
    let files = cmd_vectors(tmp.path()).unwrap();
    assert_eq!(files.len(), 3);
    let ds = fs::read_to_string(tmp.path().join("domain_separators.txt")).unwrap();
    for v in ["65536", "131072", "16842752", "16908288"] {
        assert!(ds.lines().any(|l| l.split(' ').nth(2) == Some(v)), "{v}");
    }
    let golden = include_str!("../../core/tests/data/sponge_golden.txt");
    assert_eq!(sponge(), golden);

    for l in fs::read_to_string(tmp.path().join("encodings.txt")).unwrap().lines() {
        let f: Vec<&str> = l.split(' ').collect();
        let tag = DTypeTag::ALL.into_iter().find(|t| t.name() == f[0]).unwrap();
        let bytes: Vec<u8> = (0..f[2].len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&f[2][i..i + 2], 16).unwrap())
            .collect();
        let shown = match decode::<TestField>(&bytes, tag).unwrap() {
            Value::Integer(n) => n.to_string(),
            Value::Field(x) => v2x_zk_cli::files::fr_to_string(&x),
            Value::Bytes(b) => b.iter().map(|b| format!("{b:02x}")).collect(),
        };
        assert_eq!(shown, f[1], "{l}");
    }
}

fn bin(args: &[&str], cwd: &Path, state: Option<&Path>) -> (i32, String) {
    let mut c = Command::new(BIN);
    c.args(args).current_dir(cwd).env_remove(STATE_ENV);
    if let Some(s) = state {
        c.env(STATE_ENV, s);
    }
    let out = c.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn binary_exit_codes_and_state_variable() {
    let tmp = tempfile::tempdir().unwrap();
    let w = World::new(tmp.path());
    let pkg = w.prove("a.pkg", 4);
    let (pkg, vk) = (pkg.to_str().unwrap(), w.rss.vk.to_str().unwrap());
    let state = w.dir.join("state");
    let verify = ["verify", "--vk", vk, "--package", pkg, "--now", "1700000001"];
    let (code, text) = bin(&verify, &w.dir, Some(&state));
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("ACCEPT"));
    let (code, text) = bin(&verify, &w.dir, Some(&state));
    assert_eq!(code, 1);
    assert!(text.contains("REJECT nonce-replay"));
    // without the variable the default directory is empty
    let (code, _) = bin(&verify, &w.dir, None);
    assert_eq!(code, 2);
    assert_eq!(bin(&["verify", "--bogus"], &w.dir, None).0, 2);
    assert_eq!(
        bin(
            &["setup", "--circuit", "rss", "--theta", "2", "--out", "x"],
            &w.dir,
            None
        )
        .0,
        2
    );
    let (code, text) = bin(&["sim", "--template", "occluded-stop-sign"], &w.dir, None);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("attack successes 0"));
}
