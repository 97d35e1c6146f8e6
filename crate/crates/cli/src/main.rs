use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use visidense::lattice::Norm;
use visidense::Error;

mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(name = "visidense", version, about = "Exact counts and densities of visible elements in free-abelian, free and surface groups")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized self-checks
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Visible lattice points in a ball, or the visible measure of a scaled region
    Lattice(LatticeArgs),
    /// Sphere censuses of the free group F_k
    Free(FreeArgs),
    /// Sphere censuses of the genus-g surface group
    Surface(SurfaceArgs),
    /// Mapping ratios and their bounds
    Ratio(RatioArgs),
    /// Solvability bounds and verdict counts for homogeneous equations
    Equations(EquationArgs),
    /// Limit densities for abelianization rank r
    Limits(LimitArgs),
    /// Registered counting methods
    Methods,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value = "linf")]
    norm: Norm,
    #[arg(long, default_value_t = 100)]
    radius: u64,
    /// Also report every radius from this one up to --radius
    #[arg(long)]
    from: Option<u64>,
    /// Count points whose coordinate gcd is exactly t
    #[arg(long, default_value_t = 1)]
    t_visible: u64,
    /// Count visible points of even l1 norm and add the parity table
    #[arg(long)]
    parity: bool,
    /// Region for the measure μ_t(Ω): box:0..1,0..1 or ball:0,0@1/2
    #[arg(long, requires = "scale")]
    omega: Option<String>,
    /// Dilation t for --omega (integer or p/q)
    #[arg(long)]
    scale: Option<Rational64>,
    /// Counter: brute or mobius (default mobius for l1/linf, brute for l2)
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct FreeArgs {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Largest sphere radius (default: 60 for rank 2, capped by the state budget otherwise)
    #[arg(long)]
    max_n: Option<usize>,
    /// Engine: free-dp or free-enumerate
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    #[arg(long, default_value_t = 2)]
    genus: usize,
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Level file to write after each sphere and resume from
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Engine: surface-normal-form or surface-oracle
    #[arg(long)]
    method: Option<String>,
    /// Frontier memory budget in MiB
    #[arg(long, default_value_t = 2048)]
    memory_mib: u64,
    /// Check this many seeded random words against the word problem
    #[arg(long, default_value_t = 0)]
    verify_samples: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RatioMode {
    Lattice,
    Sphere,
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[arg(long, value_enum, default_value_t = RatioMode::Lattice)]
    mode: RatioMode,
    #[arg(long)]
    s: u64,
    #[arg(long)]
    t: u64,
    /// Rank of the source (free-abelian or free)
    #[arg(long, default_value_t = 2)]
    rank_n: usize,
    /// Rank of the target (free-abelian or free)
    #[arg(long, default_value_t = 2)]
    rank_k: usize,
    /// Use the surface group of this genus as source (sphere mode)
    #[arg(long)]
    genus_n: Option<usize>,
    /// Use the surface group of this genus as target (sphere mode)
    #[arg(long)]
    genus_k: Option<usize>,
    #[arg(long, default_value = "linf")]
    norm: Norm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Free,
    Surface,
}

#[derive(Args, Debug)]
struct EquationArgs {
    /// Number of variables
    #[arg(long, default_value_t = 2)]
    vars: usize,
    /// Length of the left-hand side
    #[arg(long)]
    s: u64,
    /// Length of the right-hand side
    #[arg(long)]
    t: u64,
    #[arg(long, value_enum, default_value_t = Target::Free)]
    target: Target,
    /// Rank of a free target
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Genus of a surface target
    #[arg(long, default_value_t = 2)]
    genus: usize,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long, default_value_t = 2)]
    rank: u32,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Unsupported(_) => 2,
        Error::Resource(_) => 3,
        Error::Checkpoint(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let written = match cli.format {
        Format::Json => report.write_json(&mut out).map_err(|e| e.to_string()),
        Format::Csv => report.write_csv(&mut out).map_err(|e| e.to_string()),
    };
    if let Err(e) = written.and_then(|_| out.flush().map_err(|e| e.to_string())) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
