//! Key management, setup, proving, verification and openings.

use std::io::Write;
use std::path::{Path, PathBuf};

use v2x_zk::audit::parse_challenge;
use v2x_zk::commitment::Commitment;
use v2x_zk::groth16::{setup_for, Prover, ProvingKey, VerifyingKey};
use v2x_zk::pairing::Engine;
use v2x_zk::protocol::{
    audit_open, create_package, registry_entry, Authority, DomainSeparator, Identity, ProofPackage, Stage,
    VerifierState, DEFAULT_NONCE_CAPACITY, DEFAULT_WINDOW_SECS,
};
use v2x_zk::qap::QapInstance;
use v2x_zk::rss::RssConfig;
use v2x_zk_sim::{make_scenario, run_scenario, SimArtifacts, SimScenario};

use crate::circuit::CircuitSpec;
use crate::files::{self, fr_to_string, parse_fr, LabeledEntry, OpeningFile, StateDir};
use crate::{make_rng, CliError, Outcome};

type Out<'a> = &'a mut dyn Write;

fn line(out: Out, s: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", s.as_ref()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `authority.key` and `authority.pub` into `dir`.
pub fn cmd_authority(dir: &Path, seed: Option<u64>, out: Out) -> Result<Outcome, CliError> {
    let a = Authority::generate(&mut make_rng(seed));
    files::write_authority(&dir.join("authority.key"), &a)?;
    files::write_root(&dir.join("authority.pub"), &a.root_key())?;
    line(out, format!("root {}", hex(&a.root_key().to_bytes())))?;
    Ok(Outcome::Success)
}

pub struct EnrollArgs {
    pub authority: PathBuf,
    pub vid: String,
    pub not_before: u64,
    pub not_after: u64,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn cmd_enroll(a: &EnrollArgs, out: Out) -> Result<Outcome, CliError> {
    if a.not_before > a.not_after {
        return Err(CliError::Usage("validity interval is empty".into()));
    }
    let ea = files::read_authority(&a.authority)?;
    let id = Identity::enroll(&ea, a.vid.as_bytes(), a.not_before, a.not_after, &mut make_rng(a.seed));
    files::write_identity(&a.out, &id)?;
    line(
        out,
        format!("identity {} valid {}..{}", a.vid, a.not_before, a.not_after),
    )?;
    Ok(Outcome::Success)
}

pub enum CircuitChoice {
    /// Detection threshold as a fraction.
    Rss { theta: f64 },
    /// Path of a challenge-set file.
    Audit { challenge: PathBuf },
}

impl CircuitChoice {
    pub fn spec(&self) -> Result<CircuitSpec, CliError> {
        Ok(match self {
            CircuitChoice::Rss { theta } => CircuitSpec::Rss(RssConfig::with_threshold(*theta)?),
            CircuitChoice::Audit { challenge } => CircuitSpec::Audit(parse_challenge(&files::read_text(challenge)?)?),
        })
    }
}

pub struct SetupArgs {
    pub circuit: CircuitChoice,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

/// Paths of the files written by setup.
pub struct SetupFiles {
    pub r1cs: PathBuf,
    pub pk: PathBuf,
    pub vk: PathBuf,
    pub entry: PathBuf,
}

impl SetupFiles {
    pub fn in_dir(dir: &Path, name: &str) -> Self {
        SetupFiles {
            r1cs: dir.join(format!("{name}.r1cs")),
            pk: dir.join(format!("{name}.pk")),
            vk: dir.join(format!("{name}.vk")),
            entry: dir.join(format!("{name}.entry")),
        }
    }
}

/// Builds the circuit, runs setup and writes `<name>.r1cs`, `.pk`, `.vk`
/// and the registry entry `.entry`.
pub fn cmd_setup(a: &SetupArgs, out: Out) -> Result<Outcome, CliError> {
    let spec = a.circuit.spec()?;
    let circuit = spec.build()?;
    let cs = circuit.cs();
    let prover = setup_for::<Engine, _>(cs, &mut make_rng(a.seed))?;
    let f = SetupFiles::in_dir(&a.out_dir, spec.name());
    files::write(&f.r1cs, cs.to_bytes())?;
    files::write(&f.pk, prover.proving_key().to_file(&spec.descriptor()))?;
    files::write(&f.vk, prover.verifying_key().to_file())?;
    let entry = LabeledEntry {
        entry: registry_entry(&prover, cs, DomainSeparator::sign(circuit.app_id()))?,
        labels: cs.public_labels().to_vec(),
    };
    files::write(&f.entry, entry.to_file())?;
    line(out, format!("circuit {}", spec.name()))?;
    line(out, format!("constraints {}", cs.num_constraints()))?;
    line(out, format!("wires {}", cs.num_wires()))?;
    line(out, format!("public {}", cs.num_public()))?;
    line(out, format!("hash {}", hex(&cs.digest())))?;
    Ok(Outcome::Success)
}

/// Writes the root key and registry entries into a state directory.
pub fn cmd_provision(state: &Path, root: &Path, entries: &[PathBuf], out: Out) -> Result<Outcome, CliError> {
    let dir = StateDir::new(state);
    dir.set_root(&files::read_root(root)?)?;
    for p in entries {
        let e = LabeledEntry::from_file(p)?;
        let stored = dir.add_entry(&e)?;
        line(out, format!("registered {}", stored.display()))?;
    }
    Ok(Outcome::Success)
}

pub struct ProveArgs {
    pub pk: PathBuf,
    pub identity: PathBuf,
    /// Scenario (RSS) or detections (audit).
    pub input: PathBuf,
    pub timestamp: u64,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub opening: Option<PathBuf>,
}

/// Rebuilds the circuit from the key's descriptor, proves, signs and writes
/// the package (and the commitment opening, if asked).
pub fn cmd_prove(a: &ProveArgs, out: Out) -> Result<Outcome, CliError> {
    let (pk, descriptor) =
        ProvingKey::<Engine>::from_file(&files::read(&a.pk)?).map_err(|e| CliError::format(&a.pk, e))?;
    let spec = CircuitSpec::from_descriptor(&descriptor)?;
    let circuit = spec.build()?;
    let cs = circuit.cs();
    if pk.circuit_hash != cs.digest() {
        return Err(CliError::format(
            &a.pk,
            "key does not belong to the circuit it describes",
        ));
    }
    let prover = Prover::new(pk, QapInstance::from_r1cs(cs))?;
    let identity = files::read_identity(&a.identity)?;
    let mut rng = make_rng(a.seed);
    let inputs = circuit.inputs(&files::read_text(&a.input)?, a.timestamp, &mut rng)?;
    let pkg = create_package(
        &prover,
        cs,
        &inputs.assignment,
        &identity,
        DomainSeparator::sign(circuit.app_id()),
        &mut rng,
    )?;
    files::write(&a.out, pkg.to_bytes())?;
    if let Some(p) = &a.opening {
        let o = OpeningFile {
            message: inputs.message,
            s_sec: inputs.s_sec,
        };
        files::write(p, o.to_text())?;
    }
    let (label, pos) = circuit.outcome();
    line(out, format!("package {}", a.out.display()))?;
    line(out, format!("commitment {}", fr_to_string(&pkg.commitment)))?;
    line(out, format!("{label} {}", fr_to_string(&pkg.public_inputs[pos])))?;
    Ok(Outcome::Success)
}

pub struct VerifyArgs {
    pub vk: PathBuf,
    pub package: PathBuf,
    pub state: PathBuf,
    pub now: u64,
    pub window: u64,
}

impl VerifyArgs {
    pub fn new(vk: PathBuf, package: PathBuf, state: PathBuf, now: u64) -> Self {
        VerifyArgs {
            vk,
            package,
            state,
            now,
            window: DEFAULT_WINDOW_SECS,
        }
    }
}

/// Runs every check in order, one line per stage, and on accept records the
/// nonce and lists the public inputs.
pub fn cmd_verify(a: &VerifyArgs, out: Out) -> Result<Outcome, CliError> {
    let vk = VerifyingKey::<Engine>::from_file(&files::read(&a.vk)?).map_err(|e| CliError::format(&a.vk, e))?;
    let pkg = ProofPackage::from_bytes(&files::read(&a.package)?).map_err(|e| CliError::format(&a.package, e))?;
    let state = StateDir::new(&a.state);
    let entry = state.entries()?.into_iter().find(|e| e.entry.vk == vk).ok_or_else(|| {
        CliError::Usage(format!(
            "{} is not provisioned in {}",
            a.vk.display(),
            a.state.display()
        ))
    })?;
    let mut v = VerifierState::with_window(state.root()?, a.window, DEFAULT_NONCE_CAPACITY);
    v.nonces = state.nonces(a.window)?;
    v.register(entry.entry.clone())?;
    match v.verify_package(&pkg, a.now) {
        Ok(acc) => {
            for s in Stage::ALL {
                line(out, format!("PASS {s}"))?;
            }
            line(out, "ACCEPT")?;
            for (label, x) in entry.labels.iter().zip(&acc.public_inputs) {
                line(out, format!("public {label} {}", fr_to_string(x)))?;
            }
            state.save_nonces(&v.nonces)?;
            Ok(Outcome::Success)
        }
        Err(r) => {
            for s in Stage::ALL.into_iter().take_while(|s| *s < r.stage()) {
                line(out, format!("PASS {s}"))?;
            }
            line(out, format!("FAIL {} {}", r.stage(), r.code()))?;
            line(out, format!("REJECT {}: {r}", r.code()))?;
            Ok(Outcome::Reject)
        }
    }
}

/// Where the commitment to check comes from.
pub enum CommitmentSource {
    Value(String),
    Package(PathBuf),
}

pub fn cmd_audit_open(commitment: &CommitmentSource, opening: &Path, out: Out) -> Result<Outcome, CliError> {
    let c = match commitment {
        CommitmentSource::Value(s) => {
            parse_fr(s).ok_or_else(|| CliError::Usage(format!("`{s}` is not a field element")))?
        }
        CommitmentSource::Package(p) => {
            ProofPackage::from_bytes(&files::read(p)?)
                .map_err(|e| CliError::format(p, e))?
                .commitment
        }
    };
    let o = OpeningFile::parse(&files::read_text(opening)?).map_err(|m| CliError::format(opening, m))?;
    let ok = audit_open(&Commitment(c), &o.message, &o.s_sec);
    line(out, format!("{} opening", if ok { "PASS" } else { "FAIL" }))?;
    Ok(if ok { Outcome::Success } else { Outcome::Reject })
}

pub struct SimArgs {
    pub template: Option<String>,
    pub scenario: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
    pub csv: Option<PathBuf>,
    /// Seed of the shared keys.
    pub setup_seed: u64,
}

/// Runs a simulation; rejects when an attack succeeded or an outcome was
/// unexpected.
pub fn cmd_sim(a: &SimArgs, out: Out) -> Result<Outcome, CliError> {
    let scenario = match (&a.template, &a.scenario) {
        (Some(t), None) => {
            let o: Vec<(&str, &str)> = a.overrides.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            make_scenario(t, &o)?
        }
        (None, Some(p)) => {
            let mut s = SimScenario::from_toml(&files::read_text(p)?)?;
            for (k, v) in &a.overrides {
                s.apply_override(k, v)?;
            }
            s
        }
        _ => return Err(CliError::Usage("give exactly one of --template and --scenario".into())),
    };
    let art = SimArtifacts::new(a.setup_seed)?;
    let report = run_scenario(&art, &scenario)?;
    if let Some(p) = &a.csv {
        files::write(p, report.to_csv())?;
    }
    write!(out, "{}", report.summary()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    let clean = report.attack_successes == 0 && report.unexpected.is_empty();
    Ok(if clean { Outcome::Success } else { Outcome::Reject })
}
