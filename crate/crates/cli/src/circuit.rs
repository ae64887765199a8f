//! Circuit choices and the descriptor stored in proving-key files.
//!
//! A descriptor is text: a `circuit rss` line followed by the circuit's
//! configuration as TOML, or a `circuit audit` line followed by the
//! canonical challenge set.

use rand::RngCore;
use v2x_zk::audit::{
    audit_commitment_message, build_audit_circuit, make_audit_inputs, parse_challenge, parse_detections, AuditCircuit,
    ChallengeSet,
};
use v2x_zk::commitment::BlindingFactor;
use v2x_zk::pairing::Fr;
use v2x_zk::protocol::{fresh_nonce, APP_AUDIT, APP_RSS};
use v2x_zk::r1cs::{Assignment, ConstraintSystem};
use v2x_zk::rss::{build_rss_circuit, commitment_message, make_rss_inputs, RssCircuit, RssConfig, RssScenario};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSpec {
    Rss(RssConfig),
    Audit(ChallengeSet),
}

impl CircuitSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CircuitSpec::Rss(_) => "rss",
            CircuitSpec::Audit(_) => "audit",
        }
    }

    pub fn descriptor(&self) -> Vec<u8> {
        let body = match self {
            CircuitSpec::Rss(c) => toml::to_string(c).expect("config serializes"),
            CircuitSpec::Audit(c) => c.to_canonical(),
        };
        format!("circuit {}\n{body}", self.name()).into_bytes()
    }

    pub fn from_descriptor(bytes: &[u8]) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Usage(format!("proving key descriptor: {m}"));
        let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
        let (head, body) = text.split_once('\n').ok_or_else(|| bad("empty".into()))?;
        match head {
            "circuit rss" => {
                let c: RssConfig = toml::from_str(body).map_err(|e| bad(e.to_string()))?;
                c.validate()?;
                Ok(CircuitSpec::Rss(c))
            }
            "circuit audit" => Ok(CircuitSpec::Audit(parse_challenge(body)?)),
            other => Err(bad(format!("unknown circuit line `{other}`"))),
        }
    }

    pub fn build(&self) -> Result<Circuit, CliError> {
        Ok(match self {
            CircuitSpec::Rss(c) => Circuit::Rss(build_rss_circuit(c)?),
            CircuitSpec::Audit(c) => Circuit::Audit(build_audit_circuit(c)?),
        })
    }
}

pub enum Circuit {
    Rss(RssCircuit),
    Audit(AuditCircuit),
}

/// Everything a prover needs for one package.
pub struct ProverInputs {
    pub assignment: Assignment<Fr>,
    pub message: Vec<Fr>,
    pub s_sec: BlindingFactor<Fr>,
}

impl Circuit {
    pub fn cs(&self) -> &ConstraintSystem<Fr> {
        match self {
            Circuit::Rss(c) => &c.cs,
            Circuit::Audit(c) => &c.cs,
        }
    }

    pub fn app_id(&self) -> u8 {
        match self {
            Circuit::Rss(_) => APP_RSS,
            Circuit::Audit(_) => APP_AUDIT,
        }
    }

    /// Label and index of the outcome bit among the public inputs.
    pub fn outcome(&self) -> (&'static str, usize) {
        match self {
            Circuit::Rss(c) => ("SAFE", c.safe_position()),
            Circuit::Audit(c) => ("PASS", c.pass_position()),
        }
    }

    /// Parses a scenario (RSS, TOML) or a detections file (audit) and fills
    /// the inputs for timestamp `t` with a fresh nonce and blinding factor.
    pub fn inputs<R: RngCore + ?Sized>(&self, text: &str, t: u64, rng: &mut R) -> Result<ProverInputs, CliError> {
        let s_sec = BlindingFactor::random(rng);
        let nonce = fresh_nonce(rng);
        match self {
            Circuit::Rss(c) => {
                let scenario: RssScenario =
                    toml::from_str(text).map_err(|e| CliError::Usage(format!("scenario: {e}")))?;
                let (x, w) = make_rss_inputs(&scenario, &c.config, t, nonce, s_sec)?;
                Ok(ProverInputs {
                    assignment: c.assignment(&x, &w),
                    message: commitment_message(&x, &w),
                    s_sec,
                })
            }
            Circuit::Audit(c) => {
                let dets = parse_detections(text)?;
                let (x, w) = make_audit_inputs(&c.challenge, &dets, t, nonce, s_sec)?;
                Ok(ProverInputs {
                    assignment: c.assignment(&x, &w),
                    message: audit_commitment_message(&x, &w),
                    s_sec,
                })
            }
        }
    }
}
