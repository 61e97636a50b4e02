//! Argument handling and subcommand dispatch for the `bezout-owf` binary.
//!
//! Exit codes: 0 success or accept, 1 reject, 2 malformed input, 3 attack found
//! no preimage, 4 search space over the limit, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use bezout_owf::codec::{write_atomic, Artifact};
use bezout_owf::lab::{Pairing, SearchMode, DEFAULT_LIMIT};
use bezout_owf::otsig::{SigError, SigVerdict};
use bezout_owf::owf::experimental_warning;
use bezout_owf::{
    brute_force_invert, count_search_space, keygen, lamport_keygen, sign, uniqueness_survey,
    verify_proof, verify_signature, AttackOptions, AttackResult, BitString, KeyPair, LabError,
    LamportKeySet, LamportPublicKey, Prime, Proof, PublicKey, Signature, SurveyOptions, Verdict,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_NO_PREIMAGE: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "bezout-owf", version)]
#[command(about = "One-way function from balanced factorizations of x^(p-1) - 1 over GF(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair from a prime and a seed
    Keygen {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long = "pub", value_name = "FILE")]
        public: PathBuf,
        #[arg(long = "priv", value_name = "FILE")]
        private: PathBuf,
    },
    /// Write the proof (the private factor P) for a private key
    Prove {
        #[arg(long = "priv", value_name = "FILE")]
        private: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check a proof against a public key
    Verify {
        #[arg(long = "pub", value_name = "FILE")]
        public: PathBuf,
        #[arg(long, value_name = "FILE")]
        proof: PathBuf,
    },
    /// Exhaustively search for private factors matching a public key
    Attack {
        #[arg(long = "pub", value_name = "FILE")]
        public: PathBuf,
        /// Largest search space to attempt
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Disable the root and value-consistency filters
        #[arg(long)]
        no_prune: bool,
        /// Write wall_ms as 0 so the report is byte-reproducible
        #[arg(long)]
        no_timing: bool,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Map every factorization to its public key and report collisions
    Survey {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_mode)]
        mode: SearchMode,
        #[arg(long, value_parser = parse_pairing)]
        pairing: Pairing,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Generate a one-time signing key set for K-bit messages
    LamportKeygen {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bits: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long = "pub", value_name = "FILE")]
        public: PathBuf,
        #[arg(long = "priv", value_name = "FILE")]
        private: PathBuf,
    },
    /// Sign a bit string; the key set is marked used before the signature is written
    LamportSign {
        #[arg(long = "priv", value_name = "FILE")]
        private: PathBuf,
        #[arg(long, value_name = "BITSTRING")]
        msg: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Verify a one-time signature
    LamportVerify {
        #[arg(long = "pub", value_name = "FILE")]
        public: PathBuf,
        #[arg(long, value_name = "BITSTRING")]
        msg: String,
        #[arg(long, value_name = "FILE")]
        sig: PathBuf,
    },
    /// Print the number of ordered factor pairs
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_mode)]
        mode: SearchMode,
    },
}

fn parse_mode(s: &str) -> Result<SearchMode, String> {
    s.parse()
}

fn parse_pairing(s: &str) -> Result<Pairing, String> {
    s.parse()
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn malformed(message: impl ToString) -> Self {
        Failure::new(EXIT_MALFORMED, message.to_string())
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::SearchSpaceTooLarge { .. } => Failure::new(EXIT_TOO_LARGE, e.to_string()),
            other => Failure::malformed(other),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Keygen {
            p,
            seed,
            public,
            private,
        } => {
            let p = prime(p)?;
            warn_if_small(p, err);
            let kp = keygen(p, seed).map_err(Failure::malformed)?;
            save(&private, &kp.to_text())?;
            save(&public, &kp.public().to_text())?;
            Ok(EXIT_OK)
        }
        Command::Prove { private, out: path } => {
            let kp: KeyPair = load(&private)?;
            save(&path, &kp.proof().to_text())?;
            let _ = writeln!(
                err,
                "warning: this proof reveals the private factor P; the key is spent once the proof is shown"
            );
            Ok(EXIT_OK)
        }
        Command::Verify { public, proof } => {
            let key: PublicKey = load(&public)?;
            let proof: Proof = load(&proof)?;
            if proof.modulus() != key.modulus() {
                return Err(Failure::malformed(format!(
                    "proof is for p = {}, key is for p = {}",
                    proof.modulus(),
                    key.modulus()
                )));
            }
            match verify_proof(&key, proof.factor()).map_err(Failure::malformed)? {
                Verdict::Accept => {
                    let _ = writeln!(out, "accept");
                    Ok(EXIT_OK)
                }
                Verdict::Reject(r) => Err(Failure::new(EXIT_REJECT, format!("reject: {r}"))),
            }
        }
        Command::Attack {
            public,
            limit,
            workers,
            no_prune,
            no_timing,
            out: path,
        } => {
            let key: PublicKey = load(&public)?;
            let opts = AttackOptions {
                limit,
                workers: workers as usize,
                prune: !no_prune,
            };
            let mut res = brute_force_invert(&key, &opts)?;
            if no_timing {
                res = AttackResult::from_parts(
                    res.target().clone(),
                    res.preimages().to_vec(),
                    res.candidates_tested(),
                    res.pruned(),
                    Duration::ZERO,
                )
                .map_err(Failure::malformed)?;
            }
            save(&path, &res.to_text())?;
            let _ = writeln!(
                out,
                "preimages={} candidates_tested={} pruned={}",
                res.preimages().len(),
                res.candidates_tested(),
                res.pruned()
            );
            Ok(if res.preimages().is_empty() {
                EXIT_NO_PREIMAGE
            } else {
                EXIT_OK
            })
        }
        Command::Survey {
            p,
            mode,
            pairing,
            limit,
            workers,
            out: path,
        } => {
            let p = prime(p)?;
            let opts = SurveyOptions {
                limit,
                workers: workers as usize,
            };
            let report = uniqueness_survey(p, mode, pairing, &opts)?;
            save(&path, &report.to_text())?;
            let _ = writeln!(
                out,
                "rows={} collision_groups={} colliding_rows={}",
                report.rows.len(),
                report.collision_count(),
                report.colliding_rows()
            );
            Ok(EXIT_OK)
        }
        Command::LamportKeygen {
            p,
            bits,
            seed,
            public,
            private,
        } => {
            let p = prime(p)?;
            warn_if_small(p, err);
            let (pk, keys) = lamport_keygen(p, bits, seed).map_err(Failure::malformed)?;
            save(&private, &keys.to_text())?;
            save(&public, &pk.to_text())?;
            Ok(EXIT_OK)
        }
        Command::LamportSign {
            private,
            msg,
            out: path,
        } => {
            let mut keys: LamportKeySet = load(&private)?;
            let msg: BitString = msg.parse().map_err(Failure::malformed)?;
            let sig = match sign(&mut keys, &msg) {
                Ok(sig) => sig,
                Err(e @ SigError::KeyAlreadyUsed) => {
                    return Err(Failure::new(EXIT_REJECT, e.to_string()))
                }
                Err(e) => return Err(Failure::malformed(e)),
            };
            // persist the used flag before the signature exists anywhere
            save(&private, &keys.to_text())?;
            save(&path, &sig.to_text())?;
            Ok(EXIT_OK)
        }
        Command::LamportVerify { public, msg, sig } => {
            let pk: LamportPublicKey = load(&public)?;
            let sig: Signature = load(&sig)?;
            let msg: BitString = msg.parse().map_err(Failure::malformed)?;
            if sig.modulus() != pk.modulus() {
                return Err(Failure::malformed("signature and key disagree on p"));
            }
            match verify_signature(&pk, &msg, &sig).map_err(Failure::malformed)? {
                SigVerdict::Accept => {
                    let _ = writeln!(out, "accept");
                    Ok(EXIT_OK)
                }
                v => Err(Failure::new(EXIT_REJECT, format!("reject: {v}"))),
            }
        }
        Command::Count { p, mode } => {
            let p = prime(p)?;
            let _ = writeln!(out, "{}", count_search_space(p, mode));
            Ok(EXIT_OK)
        }
    }
}

fn prime(p: u64) -> Result<Prime, Failure> {
    Prime::new(p).map_err(Failure::malformed)
}

fn warn_if_small(p: Prime, err: &mut dyn Write) {
    if let Some(w) = experimental_warning(p) {
        let _ = writeln!(err, "{w}");
    }
}

fn load<T: Artifact>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    T::from_text(&text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn save(path: &Path, text: &str) -> Result<(), Failure> {
    write_atomic(path, text.as_bytes())
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}
