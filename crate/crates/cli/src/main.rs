//! `zigzag`: drives the simulator and writes plot-ready CSV files with a JSON manifest.

mod commands;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "zigzag", version, about = "Extended Zig-Zag chain and polarization transmon simulator")]
pub struct Cli {
    /// Output path prefix; every file of the command starts with it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep commands.
    #[arg(long, global = true, env = "ZIGZAG_WORKERS")]
    workers: Option<usize>,
    /// Also write a gnuplot script per CSV.
    #[arg(long, global = true)]
    gnuplot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bloch bands E1..E4 over the Brillouin zone.
    Band(BandArgs),
    /// Winding number of det Q and its contour.
    Winding(WindingArgs),
    /// Finite-chain spectrum and eigenstates.
    Chain(ChainArgs),
    /// IPR of the selected state over a (t_perp, g) grid.
    PhaseDiagram(PhaseArgs),
    /// Ensemble dispersion of edge and bulk levels under hopping disorder.
    Disorder(DisorderArgs),
    /// Charge-basis transmon and polarization transmon analysis.
    Circuit(CircuitArgs),
    /// SSH chain spectrum, zero-mode profile and ratio path.
    Ssh(SshArgs),
    /// Re-runs the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct Couplings {
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    t_par: f64,
    #[arg(long, default_value_t = 0.037, allow_hyphen_values = true)]
    t_perp: f64,
    #[arg(long, default_value_t = 0.016, allow_hyphen_values = true)]
    g: f64,
}

#[derive(Args, Debug)]
struct BandArgs {
    #[command(flatten)]
    couplings: Couplings,
    /// Bond angle in degrees.
    #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 501)]
    k_points: usize,
}

#[derive(Args, Debug)]
struct WindingArgs {
    #[command(flatten)]
    couplings: Couplings,
    /// Number of K intervals on [−π, π].
    #[arg(long, default_value_t = 1024)]
    k_points: usize,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[command(flatten)]
    couplings: Couplings,
    #[arg(long, default_value_t = 101)]
    n: usize,
    /// all, mid-spectrum, mid-bulk or a 0-based state index.
    #[arg(long)]
    states: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    MidSpectrum,
    MidBulk,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    t_par: f64,
    /// lo:hi:steps
    #[arg(long, allow_hyphen_values = true)]
    t_perp_range: String,
    /// lo:hi:steps
    #[arg(long, allow_hyphen_values = true)]
    g_range: String,
    #[arg(long, default_value_t = 101)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Rule::MidSpectrum)]
    rule: Rule,
    /// IPR threshold for reporting the localized/delocalized boundary per column.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Bond,
    Global,
}

#[derive(Args, Debug)]
struct DisorderArgs {
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    t_par: f64,
    #[arg(long, default_value_t = 0.037, allow_hyphen_values = true)]
    t_perp: f64,
    #[arg(long, default_value_t = 1000)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative half-width r of the multipliers drawn from [1 − r, 1 + r).
    #[arg(long, default_value_t = 0.2)]
    range: f64,
    /// lo:hi:steps
    #[arg(long, default_value = "0:0.1:51", allow_hyphen_values = true)]
    g_range: String,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    sg_window: usize,
    #[arg(long, value_enum, default_value_t = Mode::Bond)]
    mode: Mode,
    /// Keep the g bonds at their nominal value.
    #[arg(long)]
    freeze_g: bool,
}

#[derive(Args, Debug)]
struct CircuitArgs {
    #[command(subcommand)]
    kind: CircuitCommand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Probe {
    /// Offset n_g = 1/2 on the first charge axis.
    Ng1,
    /// Root-sum-square over the three charge axes.
    Rss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Panel {
    Dispersion,
    Levels,
    Anharmonicity,
}

#[derive(Args, Debug, Clone)]
struct CircuitCommon {
    /// E_J over the charging energy, lo:hi:steps.
    #[arg(long)]
    ratio_range: String,
    /// Number of levels in the dispersion panel.
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// Number of transitions E_n0 in the level panel (defaults to the maximum).
    #[arg(long)]
    transitions: Option<usize>,
    #[arg(long, value_enum, default_value_t = Probe::Ng1)]
    probe: Probe,
    /// Panels to compute.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dispersion,levels,anharmonicity")]
    panels: Vec<Panel>,
}

#[derive(Subcommand, Debug)]
enum CircuitCommand {
    Transmon(CircuitCommon),
    Ptransmon {
        #[command(flatten)]
        common: CircuitCommon,
        /// Axial capacitance C in fF.
        #[arg(long, default_value_t = 33.9)]
        c: f64,
        /// Diagonal capacitance C' in fF.
        #[arg(long, default_value_t = 7.7)]
        cprime: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cell {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Band {
    Lower,
    Upper,
}

#[derive(Args, Debug)]
struct SshArgs {
    #[arg(long, default_value_t = 0.037, allow_hyphen_values = true)]
    v: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    w: f64,
    #[arg(long, default_value_t = 17)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Cell::Left)]
    cell: Cell,
    #[arg(long, value_enum, default_value_t = Band::Lower)]
    bulk_band: Band,
}

/// Failure classes mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Validation(String),
    /// Exit code 3.
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<zigzag::Error> for Failure {
    fn from(e: zigzag::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("cannot write output: {e}"))
    }
}

fn parse(argv: &[String]) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(2)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn run(argv: Vec<String>) -> ExitCode {
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let result = match &cli.command {
        Command::Replay { manifest } => return replay(manifest),
        _ => commands::dispatch(&cli, argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn replay(path: &PathBuf) -> ExitCode {
    let argv = fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).map_err(|e| e.to_string()))
        .and_then(|v| {
            serde_json::from_value::<Vec<String>>(v["command_line"].clone()).map_err(|e| e.to_string())
        });
    match argv {
        Ok(argv) if argv.len() > 1 && argv[1] != "replay" => run(argv),
        Ok(_) => {
            eprintln!("error: manifest does not record a runnable command");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: cannot read manifest {}: {e}", path.display());
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args().collect())
}
