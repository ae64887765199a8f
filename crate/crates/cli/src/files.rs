//! On-disk formats owned by the tool: authority and identity keys, registry
//! entries, commitment openings, and the verifier state directory.
//!
//! Binary files are tagged containers with their own magic:
//!
//! | file            | magic  | sections                              |
//! |-----------------|--------|---------------------------------------|
//! | authority key   | `HSEA` | SECRET_KEY                            |
//! | root public key | `HSRT` | SIG_KEY                               |
//! | identity        | `HSID` | CERT, SECRET_KEY                      |
//! | registry entry  | `HSRE` | REGISTRY_ENTRY, LABELS                |
//!
//! `LABELS` holds the public wire labels, one per line.
//!
//! An opening is text:
//!
//! ```text
//! opening 1
//! s_sec <decimal>
//! m <decimal>
//! ...
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;
use v2x_zk::codec::{ext, tag, Container, ContainerWriter};
use v2x_zk::commitment::BlindingFactor;
use v2x_zk::field::{DTypeTag, PrimeField};
use v2x_zk::pairing::{Engine, Fr, PairingEngine};
use v2x_zk::protocol::{
    Authority, Certificate, Identity, NonceStore, PublicKey, RegistryEntry, SigningKey, DEFAULT_NONCE_CAPACITY,
};

use crate::CliError;

pub const AUTHORITY_MAGIC: &[u8; 4] = b"HSEA";
pub const ROOT_MAGIC: &[u8; 4] = b"HSRT";
pub const IDENTITY_MAGIC: &[u8; 4] = b"HSID";
pub const ENTRY_MAGIC: &[u8; 4] = b"HSRE";
pub const LABELS: u8 = 0x20;

const PROFILE: u8 = <Engine as PairingEngine>::PROFILE_BYTE;

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.into(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

fn container(path: &Path, magic: &[u8; 4]) -> Result<Container, CliError> {
    Container::parse(&read(path)?, magic, PROFILE).map_err(|e| CliError::format(path, e))
}

fn section<'a>(c: &'a Container, path: &Path, t: u8) -> Result<&'a [u8], CliError> {
    c.get(t).map_err(|e| CliError::format(path, e))
}

pub fn write_authority(path: &Path, a: &Authority) -> Result<(), CliError> {
    let bytes = ContainerWriter::new(AUTHORITY_MAGIC, PROFILE)
        .section(ext::SECRET_KEY, &a.signing_key().to_bytes())
        .finish();
    write(path, bytes)
}

pub fn read_authority(path: &Path) -> Result<Authority, CliError> {
    let c = container(path, AUTHORITY_MAGIC)?;
    let key = SigningKey::from_bytes(section(&c, path, ext::SECRET_KEY)?).map_err(|e| CliError::format(path, e))?;
    Ok(Authority::new(key))
}

pub fn write_root(path: &Path, root: &PublicKey) -> Result<(), CliError> {
    let bytes = ContainerWriter::new(ROOT_MAGIC, PROFILE)
        .section(ext::SIG_KEY, &root.to_bytes())
        .finish();
    write(path, bytes)
}

pub fn read_root(path: &Path) -> Result<PublicKey, CliError> {
    let c = container(path, ROOT_MAGIC)?;
    PublicKey::from_bytes(section(&c, path, ext::SIG_KEY)?).map_err(|e| CliError::format(path, e))
}

pub fn write_identity(path: &Path, id: &Identity) -> Result<(), CliError> {
    let bytes = ContainerWriter::new(IDENTITY_MAGIC, PROFILE)
        .section(tag(DTypeTag::Cert), &id.cert.to_bytes())
        .section(ext::SECRET_KEY, &id.key.to_bytes())
        .finish();
    write(path, bytes)
}

pub fn read_identity(path: &Path) -> Result<Identity, CliError> {
    let c = container(path, IDENTITY_MAGIC)?;
    let bad = |e: v2x_zk::protocol::ProtocolError| CliError::format(path, e);
    let cert = Certificate::from_bytes(section(&c, path, tag(DTypeTag::Cert))?).map_err(bad)?;
    let key = SigningKey::from_bytes(section(&c, path, ext::SECRET_KEY)?).map_err(bad)?;
    if key.public_key() != cert.vk_sig {
        return Err(CliError::format(path, "key does not match its certificate"));
    }
    Ok(Identity { key, cert })
}

/// A registry entry with the public wire labels of its circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledEntry {
    pub entry: RegistryEntry,
    pub labels: Vec<String>,
}

impl LabeledEntry {
    pub fn to_file(&self) -> Vec<u8> {
        ContainerWriter::new(ENTRY_MAGIC, PROFILE)
            .section(ext::REGISTRY_ENTRY, &self.entry.to_bytes())
            .section(LABELS, self.labels.join("\n").as_bytes())
            .finish()
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let c = container(path, ENTRY_MAGIC)?;
        let entry = RegistryEntry::from_bytes(section(&c, path, ext::REGISTRY_ENTRY)?)
            .map_err(|e| CliError::format(path, e))?;
        let text = std::str::from_utf8(section(&c, path, LABELS)?).map_err(|e| CliError::format(path, e))?;
        let labels: Vec<String> = text.split('\n').map(str::to_string).collect();
        if labels.len() != entry.layout.num_public {
            return Err(CliError::format(
                path,
                "label count differs from the public input count",
            ));
        }
        Ok(LabeledEntry { entry, labels })
    }
}

pub fn fr_to_string(x: &Fr) -> String {
    x.to_biguint().to_string()
}

pub fn parse_fr(s: &str) -> Option<Fr> {
    let v = BigUint::from_str(s).ok()?;
    (v < Fr::modulus()).then(|| Fr::from_biguint(&v))
}

/// A commitment opening: the message and the blinding factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningFile {
    pub message: Vec<Fr>,
    pub s_sec: BlindingFactor<Fr>,
}

impl OpeningFile {
    pub fn to_text(&self) -> String {
        let mut s = format!("opening 1\ns_sec {}\n", fr_to_string(&self.s_sec.value()));
        for m in &self.message {
            s.push_str(&format!("m {}\n", fr_to_string(m)));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("opening 1") {
            return Err("first line must be `opening 1`".into());
        }
        let mut s_sec = None;
        let mut message = Vec::new();
        for l in lines {
            let (key, value) = l.split_once(' ').ok_or_else(|| format!("malformed line `{l}`"))?;
            let v = parse_fr(value).ok_or_else(|| format!("`{value}` is not a field element"))?;
            match key {
                "s_sec" if s_sec.is_none() && message.is_empty() => s_sec = Some(v),
                "m" if s_sec.is_some() => message.push(v),
                _ => return Err(format!("unexpected line `{l}`")),
            }
        }
        let s_sec = s_sec.ok_or("missing `s_sec`")?;
        if message.is_empty() {
            return Err("empty message".into());
        }
        Ok(OpeningFile {
            message,
            s_sec: BlindingFactor(s_sec),
        })
    }
}

/// A verifier's provisioned state: `root.pub`, `entries/*.entry` and
/// `nonces.bin`.
pub struct StateDir {
    pub path: PathBuf,
}

impl StateDir {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        StateDir { path: path.into() }
    }

    fn root_path(&self) -> PathBuf {
        self.path.join("root.pub")
    }

    fn nonce_path(&self) -> PathBuf {
        self.path.join("nonces.bin")
    }

    fn entry_dir(&self) -> PathBuf {
        self.path.join("entries")
    }

    pub fn set_root(&self, root: &PublicKey) -> Result<(), CliError> {
        write_root(&self.root_path(), root)
    }

    pub fn root(&self) -> Result<PublicKey, CliError> {
        let p = self.root_path();
        if !p.exists() {
            return Err(CliError::Usage(format!(
                "state directory {} has no root key; run `provision` first",
                self.path.display()
            )));
        }
        read_root(&p)
    }

    pub fn add_entry(&self, e: &LabeledEntry) -> Result<PathBuf, CliError> {
        let name: String = e.entry.vk.circuit_hash[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let p = self.entry_dir().join(format!("{name}.entry"));
        write(&p, e.to_file())?;
        Ok(p)
    }

    pub fn entries(&self) -> Result<Vec<LabeledEntry>, CliError> {
        let dir = self.entry_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let io = |source| CliError::Io {
            path: dir.clone(),
            source,
        };
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io)?
            .map(|d| d.map(|d| d.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        paths.retain(|p| p.extension().is_some_and(|x| x == "entry"));
        paths.sort();
        paths.iter().map(|p| LabeledEntry::from_file(p)).collect()
    }

    /// The stored nonce store, or an empty one retaining `2 * window`.
    pub fn nonces(&self, window: u64) -> Result<NonceStore, CliError> {
        let p = self.nonce_path();
        if !p.exists() {
            return Ok(NonceStore::new(DEFAULT_NONCE_CAPACITY, 2 * window));
        }
        NonceStore::from_bytes(&read(&p)?).map_err(|e| CliError::format(p, e))
    }

    pub fn save_nonces(&self, store: &NonceStore) -> Result<(), CliError> {
        write(&self.nonce_path(), store.to_bytes())
    }
}
