use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metrrc::params::{CodeParams, Mode};
use metrrc_cli::commands::{self, CodeSpec, FieldArg, SimulateWhat};
use metrrc_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "metrrc", version, about = "Rack-aware regenerating codes: encode, repair, simulate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Msrr,
    Mbrr,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Msrr => Mode::Msrr,
            ModeArg::Mbrr => Mode::Mbrr,
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Total nodes.
    #[arg(short)]
    n: usize,
    /// Nodes per rack.
    #[arg(short)]
    u: usize,
    /// Nodes needed to recover the file.
    #[arg(short)]
    k: usize,
    /// Local helpers per repair.
    #[arg(short)]
    l: usize,
    /// Helper racks per repair.
    #[arg(short, long = "dbar")]
    d: usize,
}

impl ParamArgs {
    fn params(&self) -> Result<CodeParams> {
        Ok(CodeParams::new(self.n, self.u, self.k, self.l, self.d)?)
    }
}

#[derive(Args)]
struct CodeArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "msrr")]
    mode: ModeArg,
    /// auto, p:<prime> or gf2^<m>[:<poly>].
    #[arg(long, default_value = "auto")]
    field: FieldArg,
}

impl CodeArgs {
    fn spec(&self) -> Result<CodeSpec> {
        Ok(CodeSpec { params: self.params.params()?, mode: self.mode.into(), field: self.field })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Derived parameters, overhead and repair bandwidth.
    Params {
        #[command(flatten)]
        params: ParamArgs,
        /// Only this mode; both by default.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Stripe a file into one chunk per node.
    Encode {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        systematic: bool,
    },
    /// Rebuild a file from the chunks present in a directory.
    Decode {
        dir: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Regenerate missing (or listed) chunks in place.
    Repair {
        dir: PathBuf,
        /// Nodes to regenerate, as indices or rack:slot; missing files by default.
        #[arg(long, value_delimiter = ',')]
        failed: Option<Vec<String>>,
        /// Helper racks to use first.
        #[arg(long, value_delimiter = ',')]
        helpers: Vec<usize>,
    },
    /// Inject failures into an in-memory cluster and repair them.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        /// spread:RxF, none, or a comma list of nodes.
        #[arg(long, conflicts_with = "failures")]
        pattern: Option<String>,
        /// Random patterns of this many failures.
        #[arg(long)]
        failures: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cut-set bound over an (alpha, beta) grid and the two extreme points.
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "1..3")]
        alpha: String,
        #[arg(long, default_value = "1..3")]
        beta: String,
        /// Check every value against the flow-graph min-cut.
        #[arg(long)]
        flow: bool,
    },
}

fn run(cli: Cli) -> Result<Vec<String>> {
    match cli.command {
        Command::Params { params, mode } => commands::cmd_params(&params.params()?, mode.map(Mode::from)),
        Command::Encode { input, out, code, systematic } => {
            commands::cmd_encode(&input, &out, &code.spec()?, systematic)
        }
        Command::Decode { dir, out } => commands::cmd_decode(&dir, &out),
        Command::Repair { dir, failed, helpers } => commands::cmd_repair(&dir, failed.as_deref(), &helpers),
        Command::Simulate { code, pattern, failures, trials, seed } => {
            let what = match (pattern, failures) {
                (Some(p), _) => SimulateWhat::Pattern(p),
                (None, Some(failures)) => SimulateWhat::Random { failures, trials },
                (None, None) => return Err(CliError::Param("give --pattern or --failures".into())),
            };
            commands::cmd_simulate(&code.spec()?, &what, seed)
        }
        Command::Bounds { params, alpha, beta, flow } => {
            commands::cmd_bounds(&params.params()?, commands::parse_range(&alpha)?, commands::parse_range(&beta)?, flow)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
