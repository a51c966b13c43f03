//! `tq`: batch front end for the tensor toolkit. Every command writes one
//! JSON artifact (or CSV for bound curves) that records the schema version
//! and the resolved run configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tq_core::bounds::{CurveMode, Precision};
use tq_core::io::{envelope, SCHEMA_VERSION};
use tq_core::tensor::{DEFAULT_ORACLE_CAP, DEFAULT_POWER_CAP};
use tq_core::Error;

mod commands;
mod config;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "tq", version, about = "Exact tensor algebra for structural tensors and the exponent bounds they imply")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// Key-value file presetting flags; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Working precision in decimal digits [default: $TQ_PRECISION, else 50].
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Largest tensor power (in terms or variables) that may be built.
    #[arg(long, global = true, default_value_t = DEFAULT_POWER_CAP as u64)]
    power_cap: u64,
    /// Largest tensor handed to the exact independence oracle, in terms.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
    /// Write the artifact to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

const GLOBAL_IDS: [&str; 6] = ["config", "precision", "power_cap", "oracle_cap", "out", "format"];

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    /// Only for `bounds curve`.
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Built-in tensors and degenerations.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Check a degeneration or a rank expression.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Tensor power of a catalog tensor or a tensor file.
    Power {
        /// Catalog name (T3, CW2, MM(2,2,2), ...) or a tensor JSON file.
        #[arg(long)]
        tensor: String,
        #[arg(long)]
        n: usize,
    },
    /// Independent triples inside powers of matrix multiplication tensors.
    Construct {
        #[command(subcommand)]
        cmd: ConstructCmd,
    },
    /// Move an independent zeroing through a degeneration power.
    Transfer {
        /// Degeneration JSON file or a builtin such as `cw:1`.
        #[arg(long)]
        degen: String,
        #[arg(long)]
        n: usize,
        /// Kill sets on the small tensor's power [default: exact oracle].
        #[arg(long, value_name = "FILE")]
        kills: Option<PathBuf>,
    },
    /// Tri-colored sum-free sets.
    Sumfree {
        #[command(subcommand)]
        cmd: SumfreeCmd,
    },
    /// Capacity constants and exponent bounds.
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCmd,
    },
    /// Check a claimed exponent bound, optionally replaying a zeroing chain.
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Print a catalog tensor.
    Show { name: String },
    /// List tensor names and named degenerations.
    List,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Verify a monomial degeneration from a file or a builtin family.
    Degeneration {
        /// Degeneration JSON file.
        file: Option<PathBuf>,
        /// Builtin family: cw, strassen or strassen-as-printed.
        #[arg(long, conflicts_with = "file", requires = "q")]
        builtin: Option<String>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Expand the rank-p expression of T_p and compare with T_p.
    RankExpr {
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = RingChoice::Cyclotomic)]
        ring: RingChoice,
        /// Relabel z indices by this shift.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        z_offset: i64,
        /// Include the expression itself in the output.
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RingChoice {
    /// Z[ζ_p].
    Cyclotomic,
    /// GF(p + 1); needs p + 1 prime.
    Prime,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Three-phase random construction in <q, m, q>^{⊗n}.
    Indep {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hash modulus, an odd prime [default: smallest odd prime >= 12 K_1].
        #[arg(long)]
        modulus: Option<u64>,
        /// Include the kill sets realising the result.
        #[arg(long)]
        emit_kills: bool,
        /// Sweep this many consecutive seeds starting at --seed and summarise.
        #[arg(long)]
        seeds: Option<u64>,
    },
}

#[derive(Subcommand)]
enum SumfreeCmd {
    /// Check a sum-free set file and compare its size with c_q^n.
    Check {
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
    /// Read the sum-free set off an independent zeroing of T_p^{⊗N}.
    Extract {
        #[arg(long)]
        p: usize,
        #[arg(long = "N", visible_alias = "power")]
        n_power: usize,
        #[arg(long, value_name = "FILE")]
        kills: PathBuf,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// All constants for one q.
    Profile {
        #[arg(long)]
        q: u64,
    },
    /// Bounds over a range of q, as JSON or CSV.
    Curve {
        #[arg(long, default_value_t = 2)]
        qmin: u64,
        #[arg(long, default_value_t = 64)]
        qmax: u64,
        /// prime-power-only or general.
        #[arg(long, default_value = "prime-power-only")]
        mode: CurveMode,
        /// Extra ε columns, comma separated; ε = 1 is always present.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        eps: Vec<f64>,
    },
}

#[derive(Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long = "N", visible_alias = "power")]
    pub n_power: usize,
    /// Kill sets on T^{⊗N}, where T is the degeneration's small tensor.
    #[arg(long, value_name = "FILE")]
    pub kills: Option<PathBuf>,
    /// Degeneration of T_p [default: the identity on T_p]; file or builtin `cw:1`.
    #[arg(long)]
    pub degen: Option<String>,
    /// Claimed number of copies F.
    #[arg(long = "F", requires = "g")]
    pub f: Option<String>,
    /// Claimed outer dimension G.
    #[arg(long = "G", requires = "f")]
    pub g: Option<String>,
    /// Claimed limiting exponent, e.g. 2.3.
    #[arg(long, conflicts_with_all = ["f", "g"])]
    pub omega: Option<String>,
}

/// A finished command: its artifact and whether it verified.
pub struct Artifact {
    pub kind: &'static str,
    pub body: Value,
    pub ok: bool,
    pub csv: Option<String>,
}

impl Artifact {
    pub fn ok(kind: &'static str, body: Value) -> Self {
        Artifact { kind, body, ok: true, csv: None }
    }

    pub fn checked(kind: &'static str, body: Value, ok: bool) -> Self {
        Artifact { kind, body, ok, csv: None }
    }
}

pub struct Ctx {
    pub prec: Precision,
    pub power_cap: u128,
    pub oracle_cap: usize,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Structural(_) | Error::NotIndependent(_) | Error::DegenerationInvalid(_) | Error::BorderOrderViolated { .. } => {
                Failure::Verification(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn dispatch(cmd: Cmd, ctx: &Ctx, format: Format) -> Result<Artifact, Failure> {
    use commands as c;
    if format == Format::Csv && !matches!(cmd, Cmd::Bounds { cmd: BoundsCmd::Curve { .. } }) {
        return Err(Failure::Usage("--format csv is only available for `bounds curve`".into()));
    }
    Ok(match cmd {
        Cmd::Catalog { cmd: CatalogCmd::Show { name } } => c::catalog_show(&name)?,
        Cmd::Catalog { cmd: CatalogCmd::List } => c::catalog_list()?,
        Cmd::Verify { cmd: VerifyCmd::Degeneration { file, builtin, q } } => {
            let d = match (file, builtin, q) {
                (Some(f), None, _) => c::Source::File(f),
                (None, Some(b), Some(q)) => c::Source::Builtin(b, q),
                _ => return Err(Failure::Usage("give a degeneration file or --builtin FAMILY --q Q".into())),
            };
            c::verify_degen(d)?
        }
        Cmd::Verify { cmd: VerifyCmd::RankExpr { p, ring, z_offset, emit } } => c::verify_rank_expr(p, ring, z_offset, emit)?,
        Cmd::Power { tensor, n } => c::power(&tensor, n, ctx)?,
        Cmd::Construct { cmd: ConstructCmd::Indep { q, m, n, seed, modulus, emit_kills, seeds } } => {
            c::construct(q, m, n, seed, modulus, emit_kills, seeds, ctx)?
        }
        Cmd::Transfer { degen, n, kills } => c::transfer(&degen, n, kills.as_deref(), ctx)?,
        Cmd::Sumfree { cmd: SumfreeCmd::Check { file } } => c::sumfree_check(&file, ctx)?,
        Cmd::Sumfree { cmd: SumfreeCmd::Extract { p, n_power, kills } } => c::sumfree_extract(p, n_power, &kills, ctx)?,
        Cmd::Bounds { cmd: BoundsCmd::Profile { q } } => c::bounds_profile(q, ctx)?,
        Cmd::Bounds { cmd: BoundsCmd::Curve { qmin, qmax, mode, eps } } => {
            c::bounds_curve(qmin, qmax, mode, &eps, format == Format::Csv, ctx)?
        }
        Cmd::Pipeline(args) => c::pipeline(&args, ctx).map_err(|e| match e {
            c::PipelineError::Usage(s) => Failure::Usage(s),
            c::PipelineError::Core(e) => Failure::from(e),
        })?,
    })
}

fn render(artifact: &Artifact, run: &RunConfig) -> String {
    if let Some(csv) = &artifact.csv {
        let config = serde_json::to_string(&run.to_json()).expect("config serializes");
        return format!("# schema {SCHEMA_VERSION}, kind {}\n# config {config}\n{csv}", artifact.kind);
    }
    let mut doc = envelope(artifact.kind, artifact.body.clone());
    doc["config"] = run.to_json();
    let mut s = serde_json::to_string_pretty(&doc).expect("artifact serializes");
    s.push('\n');
    s
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    eprintln!("For more information, try '--help'.");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let root = Cli::command();
    let argv = match config::merge(&root, std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return usage_error(&e),
    };
    let matches = match root.clone().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => e.exit(),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let prec = match cli.global.precision {
        Some(d) => Precision::new(d),
        None => Precision::from_env(),
    };
    let prec = match prec {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let g = &cli.global;
    let resolved = RunConfig {
        command: String::new(),
        args: Default::default(),
        precision: prec.digits,
        power_cap: g.power_cap,
        oracle_cap: g.oracle_cap,
        format: g.format.to_possible_value().expect("no skipped variants").get_name().to_string(),
        out: g.out.as_ref().map(|p| p.display().to_string()),
    };
    let run = RunConfig::from_matches(&root, &matches, &GLOBAL_IDS, resolved);
    let ctx = Ctx { prec, power_cap: g.power_cap as u128, oracle_cap: g.oracle_cap };
    let out = g.out.clone();
    let format = g.format;

    let artifact = match dispatch(cli.command, &ctx, format) {
        Ok(a) => a,
        Err(Failure::Usage(msg)) => return usage_error(&msg),
        Err(Failure::Verification(msg)) => {
            let doc = json!({"schema": SCHEMA_VERSION, "kind": "failure", "error": msg, "config": run.to_json()});
            println!("{}", serde_json::to_string_pretty(&doc).expect("failure serializes"));
            eprintln!("verification failed: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = render(&artifact, &run);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if artifact.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed; see the report");
        ExitCode::from(1)
    }
}
