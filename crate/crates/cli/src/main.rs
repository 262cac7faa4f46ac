use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use commel::commutative::{decrypt_full, reencrypt, Order};
use commel::elgamal::{decrypt, encrypt, keygen};
use commel::group::{
    decode_message, encode_message, generate_params, validate_params, GroupElement,
};
use commel::transport::{choose_ot, OtServer};
use commel::wire::{ciphertext2_to_bytes, ciphertext3_to_bytes, decode_int_list};
use commel::{Ciphertext2, Ciphertext3, GroupParams, KeyFile, KeyPair, ParamGenConfig};

mod selftest;

/// Commutative-like ElGamal and 1-out-of-n oblivious transfer.
///
/// Ciphertexts are NOT authenticated: decrypting with the wrong key prints a
/// wrong value and exits 0.
#[derive(Debug, Parser)]
#[command(name = "commel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate or check group parameters.
    #[command(subcommand)]
    Params(ParamsCmd),
    /// Generate a key pair (private key file).
    Keygen(KeygenArgs),
    /// Encrypt a payload in [1, Q]; prints the ciphertext as hex.
    Encrypt(EncryptArgs),
    /// Add a second layer to a ciphertext read as hex from stdin.
    Reencrypt(ReencryptArgs),
    /// Decrypt a one- or two-layer ciphertext read as hex from stdin.
    Decrypt(DecryptArgs),
    /// Oblivious transfer over TCP.
    #[command(subcommand)]
    Ot(OtCmd),
    /// Run the exhaustive small-group oracle checks.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum ParamsCmd {
    Gen(ParamsGenArgs),
    Check {
        #[arg(long)]
        params: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Hex seed (up to 32 bytes) for reproducible output.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Debug, Args)]
struct ParamsGenArgs {
    #[arg(long)]
    bits: u64,
    #[arg(long, default_value_t = 2)]
    gamma: u32,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KeygenArgs {
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the public half here.
    #[arg(long)]
    public_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncryptArgs {
    /// Public or private key file.
    #[arg(long)]
    key: PathBuf,
    /// Decimal payload in [1, Q].
    #[arg(long)]
    message: BigUint,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReencryptArgs {
    /// Public or private key file of the second layer.
    #[arg(long)]
    key: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    /// Strip the A layer first.
    Ab,
    /// Strip the B layer first.
    Ba,
}

#[derive(Debug, Args)]
struct DecryptArgs {
    /// Private key for a single layer, or the A key for two layers.
    #[arg(long, visible_alias = "key-a")]
    key: PathBuf,
    /// Private B key, required for two-layer ciphertexts.
    #[arg(long)]
    key_b: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ab")]
    order: OrderArg,
    /// Print the group element instead of the decoded payload.
    #[arg(long)]
    raw: bool,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum OtCmd {
    Serve(ServeArgs),
    Choose(ChooseArgs),
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    listen: String,
    #[arg(long)]
    params: PathBuf,
    /// LF-separated decimal payloads.
    #[arg(long)]
    payloads: PathBuf,
    /// Exit after this many sessions.
    #[arg(long)]
    sessions: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct ChooseArgs {
    #[arg(long)]
    connect: String,
    /// 0-based item index.
    #[arg(long)]
    index: usize,
    /// Only accept offers in this group; otherwise the offered group is validated.
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

enum Failure {
    Validation(String),
    Io(String),
}

impl From<commel::Error> for Failure {
    fn from(err: commel::Error) -> Self {
        if err.is_io() {
            Failure::Io(err.to_string())
        } else {
            Failure::Validation(err.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn io_err(path: &Path, err: io::Error) -> Failure {
    Failure::Io(format!("{}: {err}", path.display()))
}

fn rng_from(seed: &SeedArg) -> CliResult<ChaCha20Rng> {
    match &seed.seed {
        None => Ok(ChaCha20Rng::from_entropy()),
        Some(text) => {
            let bytes = hex::decode(text)
                .map_err(|e| Failure::Validation(format!("bad --seed: {e}")))?;
            if bytes.len() > 32 {
                return Err(Failure::Validation("--seed longer than 32 bytes".into()));
            }
            let mut seed = [0u8; 32];
            seed[..bytes.len()].copy_from_slice(&bytes);
            Ok(ChaCha20Rng::from_seed(seed))
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_params(path: &Path) -> CliResult<GroupParams> {
    Ok(GroupParams::from_file_str(&read_text(path)?)?)
}

fn read_key(path: &Path) -> CliResult<KeyFile> {
    Ok(KeyFile::from_file_str(&read_text(path)?)?)
}

fn read_private(path: &Path) -> CliResult<KeyPair> {
    match read_key(path)? {
        KeyFile::Private(kp) => Ok(kp),
        KeyFile::Public(_) => Err(Failure::Validation(format!(
            "{}: private key required",
            path.display()
        ))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn read_input(input: Option<&Path>) -> CliResult<String> {
    match input {
        Some(path) => read_text(path),
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Io(e.to_string()))?;
            Ok(text)
        }
    }
}

fn read_ints(input: Option<&Path>) -> CliResult<Vec<BigUint>> {
    let text = read_input(input)?;
    let bytes = hex::decode(text.trim())
        .map_err(|e| Failure::Validation(format!("ciphertext is not hex: {e}")))?;
    Ok(decode_int_list(&bytes)?)
}

fn element(v: BigUint, params: &GroupParams) -> CliResult<GroupElement> {
    Ok(GroupElement::new(v, params)?)
}

fn read_c2(input: Option<&Path>, params: &GroupParams) -> CliResult<Ciphertext2> {
    let ints = read_ints(input)?;
    match <[BigUint; 2]>::try_from(ints) {
        Ok([y1, y2]) => Ok(Ciphertext2::new(element(y1, params)?, element(y2, params)?)),
        Err(v) => Err(Failure::Validation(format!(
            "expected 2 ciphertext components, got {}",
            v.len()
        ))),
    }
}

fn parse_payloads(text: &str) -> CliResult<Vec<BigUint>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            line.parse::<BigUint>().map_err(|_| {
                Failure::Validation(format!("payload line {}: `{line}` is not a decimal", i + 1))
            })
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Params(ParamsCmd::Gen(args)) => {
            let mut rng = rng_from(&args.seed)?;
            let cfg = ParamGenConfig::new(args.bits).with_gamma(args.gamma);
            let params = generate_params(&cfg, &mut rng)?;
            emit(args.out.as_deref(), &params.to_file_string())
        }
        Command::Params(ParamsCmd::Check { params }) => {
            let p = read_params(&params)?;
            if validate_params(&p) {
                println!("ok: {}-bit group, gamma = {}", p.bits(), p.gamma());
                Ok(())
            } else {
                Err(Failure::Validation("parameters failed validation".into()))
            }
        }
        Command::Keygen(args) => {
            let params = read_params(&args.params)?;
            if !validate_params(&params) {
                return Err(Failure::Validation("parameters failed validation".into()));
            }
            let mut rng = rng_from(&args.seed)?;
            let kp = keygen(&params, &mut rng);
            if let Some(path) = &args.public_out {
                fs::write(path, kp.public().to_file_string()).map_err(|e| io_err(path, e))?;
            }
            emit(args.out.as_deref(), &kp.to_file_string())
        }
        Command::Encrypt(args) => {
            let key = read_key(&args.key)?;
            let pk = key.public();
            let mut rng = rng_from(&args.seed)?;
            let m = encode_message(&args.message, pk.params())?;
            let c = encrypt(pk, &m, &mut rng)?;
            emit(
                args.out.as_deref(),
                &format!("{}\n", hex::encode(ciphertext2_to_bytes(&c))),
            )
        }
        Command::Reencrypt(args) => {
            let key = read_key(&args.key)?;
            let pk = key.public();
            let c = read_c2(args.input.as_deref(), pk.params())?;
            let mut rng = rng_from(&args.seed)?;
            let c3 = reencrypt(pk, &c, &mut rng)?;
            emit(
                args.out.as_deref(),
                &format!("{}\n", hex::encode(ciphertext3_to_bytes(&c3))),
            )
        }
        Command::Decrypt(args) => {
            let key_a = read_private(&args.key)?;
            let params = key_a.params().clone();
            let ints = read_ints(args.input.as_deref())?;
            let m = match ints.len() {
                2 => {
                    let [y1, y2] = <[BigUint; 2]>::try_from(ints).expect("length checked");
                    let c = Ciphertext2::new(element(y1, &params)?, element(y2, &params)?);
                    decrypt(&key_a, &c)?
                }
                3 => {
                    let key_b = args.key_b.as_deref().ok_or_else(|| {
                        Failure::Validation("two-layer ciphertext needs --key-b".into())
                    })?;
                    let key_b = read_private(key_b)?;
                    let [c1, c2, c3] = <[BigUint; 3]>::try_from(ints).expect("length checked");
                    let c = Ciphertext3::new(
                        element(c1, &params)?,
                        element(c2, &params)?,
                        element(c3, &params)?,
                    );
                    let order = match args.order {
                        OrderArg::Ab => Order::AFirst,
                        OrderArg::Ba => Order::BFirst,
                    };
                    decrypt_full(&key_a, &key_b, &c, order)?
                }
                n => {
                    return Err(Failure::Validation(format!(
                        "expected 2 or 3 ciphertext components, got {n}"
                    )))
                }
            };
            let value = if args.raw || !params.is_safe_prime_form() {
                m.into_value()
            } else {
                decode_message(&m, &params)?
            };
            emit(args.out.as_deref(), &format!("{value}\n"))
        }
        Command::Ot(OtCmd::Serve(args)) => {
            let params = read_params(&args.params)?;
            if !validate_params(&params) {
                return Err(Failure::Validation("parameters failed validation".into()));
            }
            let payloads = parse_payloads(&read_text(&args.payloads)?)?;
            let mut server = OtServer::bind(args.listen.as_str(), params, payloads)?;
            if args.seed.seed.is_some() {
                let mut seed = [0u8; 32];
                rng_from(&args.seed)?.fill_bytes(&mut seed);
                server = server.with_seed(seed);
            }
            log::info!("listening on {}", server.local_addr()?);
            eprintln!("listening on {}", server.local_addr()?);
            let results = server.serve(args.sessions);
            let failed = results.iter().filter(|r| r.is_err()).count();
            for r in results.iter().filter_map(|r| r.as_ref().err()) {
                log::warn!("session failed: {r}");
            }
            if failed > 0 {
                eprintln!("{failed} session(s) failed");
            }
            Ok(())
        }
        Command::Ot(OtCmd::Choose(args)) => {
            let trusted = args.params.as_deref().map(read_params).transpose()?;
            let mut rng = rng_from(&args.seed)?;
            let payload = choose_ot(args.connect.as_str(), args.index, trusted.as_ref(), &mut rng)?;
            println!("{payload}");
            Ok(())
        }
        Command::Selftest => {
            if selftest::run() {
                Ok(())
            } else {
                Err(Failure::Validation("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage errors are validation errors; clap would otherwise exit 2.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(2)
        }
    }
}
