//! The `permcodec` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::batch::{roundtrip_batch, summarize, EncoderKind};
use crate::corpus::CorpusSpec;
use crate::error::{Error, Result};
use crate::ident::{IdentCodec, IdentLatent, Identifier, PRIME_LOG};
use crate::io::{self, LatentDoc};
use crate::multiset::{matching_distance, Multiset};
use crate::par::Execution;
use crate::poly::decoder::{decode_poly_with, decode_variable_with};
use crate::poly::{DecodeOptions, DomainBox, PolyCodec, PolyLatent};
use crate::tensor::{congruent, encoder_dims, latent_dims, TensorMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DECODE: i32 = 3;
pub const EXIT_IDENTIFIABILITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "permcodec", version, about = "Injective permutation-invariant multiset and tensor encoders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncoderArg {
    Poly,
    Ident,
}

impl From<EncoderArg> for EncoderKind {
    fn from(e: EncoderArg) -> Self {
        match e {
            EncoderArg::Poly => EncoderKind::Poly,
            EncoderArg::Ident => EncoderKind::Ident,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rational,
    Real,
}

impl From<ModeArg> for TensorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rational => TensorMode::Rational,
            ModeArg::Real => TensorMode::Real,
        }
    }
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long, value_enum, default_value = "poly")]
    pub encoder: EncoderArg,
    /// Capacity N; defaults to the element count, or the file's capacity with --box.
    #[arg(short = 'N', long = "capacity")]
    pub capacity: Option<usize>,
    /// Encode 1..=N elements of the box [lo, hi]^D with a sentinel outside it.
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a multiset JSON file into a latent JSON file.
    Encode {
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Decode a latent JSON file into a multiset JSON file.
    Decode {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Encode and decode a multiset and report the matching distance.
    Roundtrip {
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Test whether two tensor JSON files are congruent.
    Congruent { first: PathBuf, second: PathBuf },
    /// Print the per-level tensor latent dimensions.
    Dims {
        #[arg(short = 'K', long)]
        order: usize,
        #[arg(short = 'N', long = "capacity")]
        capacity: usize,
        #[arg(short = 'M', long, default_value_t = 1)]
        labels: usize,
        #[arg(short = 'D', long)]
        dim: usize,
        #[arg(long, value_enum, default_value = "rational")]
        mode: ModeArg,
    },
    /// Round trip a seeded random corpus and print timing and error percentiles.
    Bench {
        #[arg(long, value_enum, default_value = "poly")]
        encoder: EncoderArg,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        Error::DecodeVerificationFailed { .. } => EXIT_DECODE,
        Error::IdentifierCollision | Error::NotIdentifiable => EXIT_IDENTIFIABILITY,
        _ => EXIT_FAILURE,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}"))),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("--tol must be positive".into()))
    }
}

/// A latent of either kind.
enum Latent {
    Poly(PolyLatent),
    Ident(IdentLatent),
}

fn encode(x: &Multiset, codec: &CodecArgs) -> Result<Latent> {
    let default = if codec.domain.is_some() { x.capacity() } else { x.len() };
    let n = codec.capacity.unwrap_or(default);
    if n == 0 {
        return Err(Error::InvalidArgument("capacity must be at least 1".into()));
    }
    let domain = codec
        .domain
        .as_ref()
        .map(|b| DomainBox::uniform(b[0], b[1], x.dim()))
        .transpose()?;
    Ok(match codec.encoder {
        EncoderArg::Poly => {
            let c = PolyCodec::new(n, x.dim())?;
            Latent::Poly(match &domain {
                Some(b) => c.shift_encode(x, b)?,
                None => c.encode(x)?,
            })
        }
        EncoderArg::Ident => {
            let c = IdentCodec::prime_log(n, x.dim())?;
            Latent::Ident(match &domain {
                Some(b) => c.shift_encode(x, b)?,
                None => c.encode(x)?,
            })
        }
    })
}

fn decode(latent: &Latent, seed: u64, tol: f64) -> Result<Multiset> {
    match latent {
        Latent::Poly(l) => {
            let codec = PolyCodec::for_latent(l)?;
            let opts = DecodeOptions {
                verify_tol: tol,
                ..DecodeOptions::default()
            };
            if l.is_shifted() {
                decode_variable_with(&codec, l, seed, &opts)
            } else {
                decode_poly_with(&codec, l, seed, &opts)
            }
        }
        Latent::Ident(z) => {
            if z.identifier != PRIME_LOG {
                return Err(Error::Schema(format!("unsupported identifier {:?}", z.identifier)));
            }
            let codec = IdentCodec::new(z.n, z.d, Identifier::PrimeLog)?.with_verify_tol(tol);
            if z.is_shifted() {
                codec.decode_variable(z)
            } else {
                codec.decode(z)
            }
        }
    }
}

fn latent_json(latent: &Latent) -> Result<String> {
    match latent {
        Latent::Poly(l) => io::poly_latent_to_json(l),
        Latent::Ident(z) => io::ident_latent_to_json(z),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let w = |out: &mut dyn Write, s: String| -> Result<()> {
        writeln!(out, "{s}").map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
    };
    match command {
        Command::Encode { input, codec, output } => {
            let x = io::multiset_from_json(&read(&input)?)?;
            emit(&latent_json(&encode(&x, &codec)?)?, output.as_deref(), out)?;
        }
        Command::Decode {
            input,
            seed,
            tol,
            output,
        } => {
            check_tol(tol)?;
            let latent = match io::read_latent(&read(&input)?)? {
                LatentDoc::Poly(l) => Latent::Poly(l),
                LatentDoc::Ident(z) => Latent::Ident(z),
            };
            let x = decode(&latent, seed, tol)?;
            emit(&io::multiset_to_json(&x)?, output.as_deref(), out)?;
        }
        Command::Roundtrip { input, codec, seed, tol } => {
            check_tol(tol)?;
            let x = io::multiset_from_json(&read(&input)?)?;
            let back = decode(&encode(&x, &codec)?, seed, tol)?;
            let dm = matching_distance(&x, &back);
            w(out, format!("d_M = {}", io::format_f64(dm)))?;
            if !(dm <= tol) {
                return Ok(EXIT_FAILURE);
            }
        }
        Command::Congruent { first, second } => {
            let a = io::tensor_from_json(&read(&first)?)?;
            let b = io::tensor_from_json(&read(&second)?)?;
            w(out, congruent(&a, &b)?.to_string())?;
        }
        Command::Dims {
            order,
            capacity,
            labels,
            dim,
            mode,
        } => {
            let mode = TensorMode::from(mode);
            let dims = latent_dims(order, capacity, labels, dim, mode)?;
            w(out, "k\tD_k".into())?;
            for (k, d) in dims.iter().enumerate() {
                w(out, format!("{}\t{d}", k + 1))?;
            }
            match encoder_dims(order, capacity, labels, dim, mode) {
                Ok(e) => w(out, format!("output\t{}", e[0]))?,
                Err(_) => w(out, "output\toverflow".into())?,
            }
        }
        Command::Bench {
            encoder,
            count,
            seed,
            sequential,
        } => {
            let kind = EncoderKind::from(encoder);
            let spec = match kind {
                EncoderKind::Poly => CorpusSpec::standard(count),
                EncoderKind::Ident => CorpusSpec::rational(count),
            };
            let items = spec.generate(seed);
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let start = Instant::now();
            let results = roundtrip_batch(&items, kind, exec);
            let elapsed = start.elapsed();
            let s = summarize(&results);
            w(out, format!("encoder\t{kind}"))?;
            w(out, format!("items\t{}", s.count))?;
            w(out, format!("failures\t{}", s.failures))?;
            w(out, format!("threads\t{}", if exec.is_parallel() { "parallel" } else { "sequential" }))?;
            w(out, format!("elapsed_ms\t{:.3}", elapsed.as_secs_f64() * 1e3))?;
            w(out, format!("p50\t{:e}", s.p50))?;
            w(out, format!("p90\t{:e}", s.p90))?;
            w(out, format!("p99\t{:e}", s.p99))?;
            w(out, format!("max\t{:e}", s.max))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to stderr. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("permcodec: {e}");
            exit_code(&e)
        }
    }
}
