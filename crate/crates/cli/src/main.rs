use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use v2x_zk_cli::bench::cmd_bench;
use v2x_zk_cli::commands::{
    cmd_audit_open, cmd_authority, cmd_enroll, cmd_prove, cmd_provision, cmd_setup, cmd_sim, cmd_verify, CircuitChoice,
    CommitmentSource, EnrollArgs, ProveArgs, SetupArgs, SimArgs, VerifyArgs,
};
use v2x_zk_cli::vectors::cmd_vectors;
use v2x_zk_cli::{exit_code, files, state_dir, unix_now, CliError, Outcome};

#[derive(Parser)]
#[command(name = "v2xzk", version, about = "Zero-knowledge proofs for V2X perception claims")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rss,
    Audit,
}

#[derive(Subcommand)]
enum Command {
    /// Create an enforcement authority key pair.
    Authority {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Certify a fresh vehicle signing key.
    Enroll {
        #[arg(long)]
        authority: PathBuf,
        #[arg(long)]
        vid: String,
        #[arg(long)]
        not_before: u64,
        #[arg(long)]
        not_after: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a circuit and generate its keys.
    Setup {
        #[arg(long, value_enum)]
        circuit: Kind,
        /// Detection threshold of the RSS circuit.
        #[arg(long, default_value_t = 0.75)]
        theta: f64,
        /// Challenge-set file of the audit circuit.
        #[arg(long)]
        challenge: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Install the root key and registry entries into a verifier state.
    Provision {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        root: PathBuf,
        #[arg(long = "entry")]
        entries: Vec<PathBuf>,
    },
    /// Prove a claim and write a signed package.
    Prove {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        identity: PathBuf,
        /// RSS scenario (TOML) or audit detections.
        #[arg(long)]
        input: PathBuf,
        /// Package timestamp; defaults to now.
        #[arg(long)]
        time: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the commitment opening here.
        #[arg(long)]
        opening: Option<PathBuf>,
    },
    /// Verify a package against a provisioned state.
    Verify {
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        package: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        /// Verifier clock; defaults to now.
        #[arg(long)]
        now: Option<u64>,
        #[arg(long, default_value_t = v2x_zk::protocol::DEFAULT_WINDOW_SECS)]
        window: u64,
    },
    /// Check a commitment opening.
    AuditOpen {
        #[arg(long, conflicts_with = "package", required_unless_present = "package")]
        commitment: Option<String>,
        #[arg(long)]
        package: Option<PathBuf>,
        #[arg(long)]
        opening: PathBuf,
    },
    /// Time witness generation, proving and verification.
    Bench {
        #[arg(long, value_enum, default_value = "rss")]
        circuit: Kind,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Challenge set and detections for the audit circuit; the built-in
        /// sample when omitted.
        #[arg(long)]
        challenge: Option<PathBuf>,
        /// Scenario (RSS) or detections (audit); built-in defaults when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write golden-vector files.
    Vectors {
        #[arg(long, default_value = "vectors")]
        out: PathBuf,
    },
    /// Run a broadcast simulation.
    Sim {
        #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
        template: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// `key=value` override, repeatable.
        #[arg(long = "set")]
        overrides: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        setup_seed: u64,
    },
}

fn bench(
    kind: Kind,
    runs: usize,
    challenge: Option<PathBuf>,
    input: Option<PathBuf>,
    seed: Option<u64>,
    csv: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    use v2x_zk::audit::{parse_challenge, sample_audit, write_detections};
    use v2x_zk::rss::{RssConfig, RssScenario};
    use v2x_zk_cli::circuit::CircuitSpec;

    let text = |p: &Option<PathBuf>| p.as_deref().map(files::read_text).transpose();
    let (spec, input) = match kind {
        Kind::Rss => {
            let default = || toml::to_string(&RssScenario::default()).expect("scenario serializes");
            (
                CircuitSpec::Rss(RssConfig::default()),
                text(&input)?.unwrap_or_else(default),
            )
        }
        Kind::Audit => {
            let (c, d) = sample_audit();
            let c = match text(&challenge)? {
                Some(t) => parse_challenge(&t)?,
                None => c,
            };
            (
                CircuitSpec::Audit(c),
                text(&input)?.unwrap_or_else(|| write_detections(&d)),
            )
        }
    };
    let report = cmd_bench(&spec, &input, runs, seed)?;
    if let Some(p) = csv {
        files::write(&p, report.to_csv())?;
    }
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    write!(out, "{}\n{}", report.to_csv(), report.to_table()).map_err(io)?;
    Ok(Outcome::Success)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Authority { out: dir, seed } => cmd_authority(&dir, seed, out),
        Command::Enroll {
            authority,
            vid,
            not_before,
            not_after,
            seed,
            out: path,
        } => cmd_enroll(
            &EnrollArgs {
                authority,
                vid,
                not_before,
                not_after,
                seed,
                out: path,
            },
            out,
        ),
        Command::Setup {
            circuit,
            theta,
            challenge,
            seed,
            out: out_dir,
        } => {
            let circuit = match (circuit, challenge) {
                (Kind::Rss, _) => CircuitChoice::Rss { theta },
                (Kind::Audit, Some(challenge)) => CircuitChoice::Audit { challenge },
                (Kind::Audit, None) => return Err(CliError::Usage("audit setup needs --challenge".into())),
            };
            cmd_setup(&SetupArgs { circuit, seed, out_dir }, out)
        }
        Command::Provision { state, root, entries } => cmd_provision(&state_dir(state), &root, &entries, out),
        Command::Prove {
            pk,
            identity,
            input,
            time,
            seed,
            out: path,
            opening,
        } => cmd_prove(
            &ProveArgs {
                pk,
                identity,
                input,
                timestamp: time.unwrap_or_else(unix_now),
                seed,
                out: path,
                opening,
            },
            out,
        ),
        Command::Verify {
            vk,
            package,
            state,
            now,
            window,
        } => cmd_verify(
            &VerifyArgs {
                vk,
                package,
                state: state_dir(state),
                now: now.unwrap_or_else(unix_now),
                window,
            },
            out,
        ),
        Command::AuditOpen {
            commitment,
            package,
            opening,
        } => {
            let source = match (commitment, package) {
                (Some(c), _) => CommitmentSource::Value(c),
                (None, Some(p)) => CommitmentSource::Package(p),
                (None, None) => return Err(CliError::Usage("give --commitment or --package".into())),
            };
            cmd_audit_open(&source, &opening, out)
        }
        Command::Bench {
            circuit,
            runs,
            challenge,
            input,
            seed,
            csv,
        } => bench(circuit, runs, challenge, input, seed, csv, out),
        Command::Vectors { out: dir } => {
            for p in cmd_vectors(&dir)? {
                writeln!(out, "wrote {p}").map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
            }
            Ok(Outcome::Success)
        }
        Command::Sim {
            template,
            scenario,
            overrides,
            csv,
            setup_seed,
        } => {
            let overrides = overrides
                .iter()
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| CliError::Usage(format!("override `{kv}` is not key=value")))
                })
                .collect::<Result<_, _>>()?;
            cmd_sim(
                &SimArgs {
                    template,
                    scenario,
                    overrides,
                    csv,
                    setup_seed,
                },
                out,
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let result = run(cli, &mut stdout.lock());
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&result) as u8)
}
