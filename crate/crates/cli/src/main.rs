use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qae_core::harness::{dump_poly, run_sweep, Algorithm, ParamGrid, PolyRequest, SweepConfig};
use qae_core::{bhmt_queries, fit_models, Error, PolyMode};

#[derive(Parser)]
#[command(name = "qae", version, about = "Amplitude-estimation simulation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator over a parameter grid (lists are comma-separated).
    Run(RunArgs),
    /// Run a sweep described by a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a polynomial on [-1, 1].
    Poly {
        #[command(subcommand)]
        command: PolyCommand,
    },
    /// Closed-form tables.
    Table {
        #[command(subcommand)]
        command: TableCommand,
    },
    /// Fit query-complexity models to a sweep CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Chebae,
    RepairChebae,
    Unbiased,
    Hybrid,
    Mlae,
    Classical,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Chebae => Algorithm::Chebae,
            AlgoArg::RepairChebae => Algorithm::RepairChebae,
            AlgoArg::Unbiased => Algorithm::Unbiased,
            AlgoArg::Hybrid => Algorithm::Hybrid,
            AlgoArg::Mlae => Algorithm::Mlae,
            AlgoArg::Classical => Algorithm::Classical,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum ModeArg {
    #[default]
    Ideal,
    Polynomial,
}

impl From<ModeArg> for PolyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ideal => PolyMode::Ideal,
            ModeArg::Polynomial => PolyMode::Polynomial,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    algorithm: AlgoArg,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    eta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    mu: Vec<f64>,
    /// MLAE schedule exponent K.
    #[arg(long = "mlae-k", value_delimiter = ',', default_value = "6")]
    mlae_k: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    mode: ModeArg,
    #[arg(long)]
    workers: Option<usize>,
    /// Simulate (1 + a)/2 in place of a.
    #[arg(long)]
    shift_amplitude: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PolyCommand {
    Dump(DumpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Chebyshev,
    Line,
    Erf,
    Hybrid,
    FixedPointJ,
    FixedPointK,
}

#[derive(Args)]
struct DumpArgs {
    family: FamilyArg,
    #[arg(long, default_value_t = 5)]
    d: u64,
    #[arg(long, default_value_t = 4.0)]
    k: f64,
    #[arg(long, default_value_t = 0.025)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    tau: f64,
    #[arg(long = "a-mid", default_value_t = 0.5)]
    a_mid: f64,
    #[arg(long = "a-min", default_value_t = 0.3)]
    a_min: f64,
    #[arg(long = "a-max", default_value_t = 0.6)]
    a_max: f64,
    #[arg(long, default_value_t = 0.25)]
    kappa: f64,
    #[arg(long, value_enum, default_value_t)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1001)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl DumpArgs {
    fn request(&self) -> PolyRequest {
        let mode = self.mode.into();
        match self.family {
            FamilyArg::Chebyshev => PolyRequest::Chebyshev { d: self.d },
            FamilyArg::Line => PolyRequest::Line {
                a_min: self.a_min,
                a_max: self.a_max,
                eta: self.eta,
                mode,
            },
            FamilyArg::Erf => PolyRequest::Erf { k: self.k, eta: self.eta },
            FamilyArg::Hybrid => PolyRequest::Hybrid {
                tau: self.tau,
                eta: self.eta,
                k: self.k,
                a_mid: self.a_mid,
                mode,
            },
            FamilyArg::FixedPointJ => PolyRequest::FixedPointJ {
                kappa: self.kappa,
                eta: self.eta,
            },
            FamilyArg::FixedPointK => PolyRequest::FixedPointK {
                kappa: self.kappa,
                eta: self.eta,
            },
        }
    }
}

#[derive(Subcommand)]
enum TableCommand {
    /// Phase-estimation query count for each (eps, delta) pair.
    Bhmt {
        #[arg(long, value_delimiter = ',', default_value = "0.001")]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        delta: Vec<f64>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::ConstructionFailed(_) => 4,
        Error::Domain { .. } | Error::Config(_) | Error::KindMismatch { .. } | Error::InsufficientData(_) => 2,
        _ => 1,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn sweep(cfg: &SweepConfig) -> Result<(), Error> {
    let summary = run_sweep(cfg)?;
    eprintln!(
        "{}: {} cells, {} rows, {} failures",
        cfg.algorithm, summary.cells, summary.rows, summary.failures
    );
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let mut cfg = SweepConfig::new(args.algorithm.into(), args.runs);
            cfg.grid = ParamGrid {
                a: args.a,
                eps: args.eps,
                delta: args.delta,
                beta: args.beta,
                eta: args.eta,
                mu: args.mu,
                mlae_k: args.mlae_k,
            };
            cfg.mode = args.mode.into();
            cfg.seed = args.seed;
            cfg.workers = args.workers;
            cfg.shift_amplitude = args.shift_amplitude;
            cfg.out = args.out;
            sweep(&cfg)
        }
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if out.is_some() {
                cfg.out = out;
            }
            sweep(&cfg)
        }
        Command::Poly {
            command: PolyCommand::Dump(args),
        } => {
            let mut sink = output(&args.out)?;
            let p = dump_poly(&args.request(), args.points, &mut sink)?;
            sink.flush()?;
            if args.out.is_some() {
                eprintln!("degree {}", p.degree());
            }
            Ok(())
        }
        Command::Table {
            command: TableCommand::Bhmt { eps, delta },
        } => {
            if let ([e], [d]) = (eps.as_slice(), delta.as_slice()) {
                println!("{}", bhmt_queries(*e, *d)?);
                return Ok(());
            }
            println!("eps,delta,q_pi");
            for &e in &eps {
                for &d in &delta {
                    println!("{e},{d},{}", bhmt_queries(e, d)?);
                }
            }
            Ok(())
        }
        Command::Fit { input, out } => {
            let report = fit_models(BufReader::new(File::open(&input)?))?;
            let mut sink = output(&out)?;
            serde_json::to_writer_pretty(&mut sink, &report)?;
            writeln!(sink)?;
            sink.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
