//! `cfqc`: sweeps, compilation, counterfactuality certification and protocol
//! demos on top of `cfqc-core`.

mod commands;
mod config;
mod sweep;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process;

use anyhow::Context;
use cfqc_core::optics::GateVariant;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CompileOptions, Device, ExampleName};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Failure = 1,
    Usage = 2,
    Verification = 3,
    Budget = 4,
}

#[derive(Debug)]
pub struct Exit {
    pub status: Status,
    pub error: anyhow::Error,
}

impl Exit {
    pub fn new(status: Status, error: anyhow::Error) -> Self {
        Self { status, error }
    }
}

/// Tags an error with the exit status it should produce.
pub trait Code<T> {
    fn code(self, status: Status) -> Result<T, Exit>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, status: Status) -> Result<T, Exit> {
        self.map_err(|e| Exit::new(status, e.into()))
    }
}

#[derive(Parser)]
#[command(name = "cfqc", version, about = "Counterfactual quantum computation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Efficiency/fidelity of the finite gate over an (M, N, gamma, eta) grid, as CSV.
    Sweep(SweepArgs),
    /// Rewrite a circuit file into special form and verify it.
    Compile(CompileArgs),
    /// Two-state-vector presence check of the gate's optical network.
    Certify(CertifyArgs),
    /// Run a worked protocol and its verifier.
    Example(ExampleArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Outer cycle counts, e.g. `10,20` or `10:50:10`.
    #[arg(long)]
    m: Option<String>,
    /// N/M ratios (exclusive with --n).
    #[arg(long)]
    ratios: Option<String>,
    /// Inner cycle counts (exclusive with --ratios).
    #[arg(long)]
    n: Option<String>,
    /// Photon-loss grid, e.g. `0:0.1:0.02`.
    #[arg(long)]
    gamma: Option<String>,
    /// Atom-missing grid.
    #[arg(long)]
    eta: Option<String>,
    /// Amplitude of |g⟩, e.g. `0.6` or `0.6+0.1i`.
    #[arg(long, allow_hyphen_values = true)]
    atom_g: Option<String>,
    /// Amplitude of |e⟩.
    #[arg(long, allow_hyphen_values = true)]
    atom_e: Option<String>,
    /// CSV destination (stdout if absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    /// Where to write the compiled circuit; without it the circuit goes to
    /// stdout and the report to stderr.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Lower onto this many relocation atoms and report the depth.
    #[arg(long)]
    atoms: Option<usize>,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sabotage {
    NoDoubleMirror,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(short = 'M', long = "m")]
    m: u32,
    #[arg(short = 'N', long = "n")]
    n: u32,
    /// Build the variant without double-sided mirrors.
    #[arg(long, value_enum)]
    sabotage: Option<Sabotage>,
    /// Also report the two reference interferometers.
    #[arg(long)]
    interferometers: bool,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(value_enum)]
    name: ExampleName,
    /// Rerun on the finite gate, e.g. `M=10,N=200,gamma=0.01,eta=0`.
    #[arg(long)]
    device: Option<String>,
    /// Also write the checks as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn write_file(path: &Path, content: &str) -> Result<(), Exit> {
    std::fs::write(path, content)
        .with_context(|| format!("writing {}", path.display()))
        .code(Status::Failure)
}

fn run_sweep(args: SweepArgs) -> Result<(), Exit> {
    let mut settings = match &args.config {
        Some(p) => config::read_config(p).code(Status::Usage)?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("m", args.m),
        ("ratios", args.ratios),
        ("n", args.n),
        ("gamma", args.gamma),
        ("eta", args.eta),
        ("atom_g", args.atom_g),
        ("atom_e", args.atom_e),
        ("output", args.output.map(|p| p.display().to_string())),
        ("jobs", args.jobs.map(|j| j.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            if k == "n" {
                settings.remove("ratios");
            } else if k == "ratios" {
                settings.remove("n");
            }
            settings.insert(k.to_owned(), v);
        }
    }
    let cfg = sweep::SweepConfig::from_settings(&settings).code(Status::Usage)?;
    let rows = sweep::run_sweep(&cfg).code(Status::Usage)?;
    let csv = sweep::to_csv(&rows);
    match &cfg.output_path {
        Some(p) => write_file(p, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run_compile(args: CompileArgs) -> Result<(), Exit> {
    let opts = CompileOptions {
        input: &args.input,
        output: args.output.as_deref(),
        atoms: args.atoms,
        verify: !args.no_verify,
    };
    let (report, circuit, verified) = commands::compile(&opts)?;
    match opts.output {
        Some(p) => {
            write_file(p, &circuit)?;
            print!("{report}");
            println!("wrote {}", p.display());
        }
        None => {
            eprint!("{report}");
            print!("{circuit}");
        }
    }
    if verified {
        Ok(())
    } else {
        Err(Exit::new(
            Status::Verification,
            anyhow::anyhow!("compiled circuit is not equivalent"),
        ))
    }
}

fn run_certify(args: CertifyArgs) -> Result<(), Exit> {
    let variant = match args.sabotage {
        Some(Sabotage::NoDoubleMirror) => GateVariant::NoDoubleMirror,
        None => GateVariant::DoubleMirror,
    };
    let report = commands::certify(args.m, args.n, variant)?;
    print!("{report}");
    if args.interferometers {
        print!("{}", commands::interferometer_summary()?);
    }
    if report.certified() {
        Ok(())
    } else {
        Err(Exit::new(
            Status::Verification,
            anyhow::anyhow!("channel presence detected"),
        ))
    }
}

fn run_example(args: ExampleArgs) -> Result<(), Exit> {
    let device = args.device.as_deref().map(Device::parse).transpose()?;
    let report = commands::example_report(args.name)?;
    print!("{report}");
    if let Some(p) = &args.output {
        write_file(p, &report.to_csv())?;
    }
    if let Some(d) = &device {
        print!("{}", commands::device_report(args.name, d)?);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Exit::new(Status::Verification, anyhow::anyhow!("some checks failed")))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Compile(a) => run_compile(a),
        Command::Certify(a) => run_certify(a),
        Command::Example(a) => run_example(a),
    };
    if let Err(e) = result {
        eprintln!("error: {:#}", e.error);
        process::exit(e.status as i32);
    }
}
