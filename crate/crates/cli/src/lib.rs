//! The `v2xzk` command-line tool as a library.
//!
//! Each command takes its arguments as a plain struct, writes its
//! line-oriented report to a writer, and returns an [`Outcome`]. The binary
//! maps outcomes and errors to exit codes with [`exit_code`].

pub mod bench;
pub mod circuit;
pub mod commands;
pub mod files;
pub mod vectors;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;
use v2x_zk::audit::AuditError;
use v2x_zk::codec::CodecError;
use v2x_zk::groth16::Groth16Error;
use v2x_zk::protocol::ProtocolError;
use v2x_zk::r1cs::R1csError;
use v2x_zk::rss::RssError;
use v2x_zk_sim::SimError;

/// Overrides the verifier state directory.
pub const STATE_ENV: &str = "V2XZK_STATE";
/// State directory used when neither `--state` nor [`STATE_ENV`] is given.
pub const DEFAULT_STATE_DIR: &str = ".v2xzk-state";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Rss(#[from] RssError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    R1cs(#[from] R1csError),
    #[error(transparent)]
    Groth16(#[from] Groth16Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// How a command ended when it ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Reject,
}

/// 0 success or accept, 1 reject, 2 usage or I/O error.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Reject) => 1,
        Err(_) => 2,
    }
}

/// Seeded when a seed is given, from the OS otherwise.
pub fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

/// Seconds since the Unix epoch.
pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// `--state`, else [`STATE_ENV`], else [`DEFAULT_STATE_DIR`].
pub fn state_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(STATE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_STATE_DIR))
}
