use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyext::lifting::DEFAULT_NODE_LIMIT;
use polyext_cli::cache::Cache;
use polyext_cli::commands::{self, Context};
use polyext_cli::report::{render, Format, ReportRecord};
use polyext_cli::CliError;

#[derive(Parser)]
#[command(name = "polyext", version, about = "Hom, Ext and Troesch complex computations for strict polynomial functors over F_p")]
struct Cli {
    /// The prime.
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// Ambient dimension N for realizations (hom, troesch).
    #[arg(long, global = true)]
    ambient: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Directory of the persistent realization and Hom basis cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Memory budget; computations predicted to exceed it are refused.
    #[arg(long = "budget-mb", global = true)]
    budget_mb: Option<usize>,
    /// Leave wall_time_ms out of reports so identical runs are byte-identical.
    #[arg(long = "no-wall-time", global = true)]
    no_wall_time: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graded dimensions of Hom(F, G).
    Hom { f: String, g: String },
    /// Ext*(F, G).
    Ext { f: String, g: String },
    /// Ext*(F^(r), G^(r)).
    ExtTw {
        f: String,
        g: String,
        #[arg(long)]
        r: u32,
    },
    /// Second page Ext*(F, G(E_r (x) I)) of the twisting spectral sequence.
    E2 {
        f: String,
        g: String,
        #[arg(long)]
        r: u32,
    },
    /// Collapse check over all equal-degree pairs of a catalog.
    Collapse {
        /// deg<=D[:S,L,G,T,x]
        #[arg(long, default_value = "deg<=3")]
        catalog: String,
        #[arg(long)]
        r: u32,
    },
    /// Build the Troesch p-complex B_d(r) at the ambient dimension.
    Troesch {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        /// Check p-exactness against the expected kernel.
        #[arg(long)]
        verify: bool,
    },
    /// Twist compatibility of the bar coresolution differentials.
    Twistcompat {
        #[arg(long)]
        bar: u32,
        #[arg(long)]
        r: u32,
    },
    /// Search for a twist-compatible lift of a coresolution.
    Lift {
        #[arg(long)]
        target: String,
        #[arg(long)]
        r: u32,
        #[arg(long = "node-limit", default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Vec<ReportRecord>, CliError> {
    let cache = cli.cache.map(|dir| Cache::open(dir, polyext::ENGINE_VERSION)).transpose()?;
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let ctx = Context { p: cli.p, ambient: cli.ambient, cache, jobs, budget_mb: cli.budget_mb, wall_time: !cli.no_wall_time };
    if !polyext::linalg::is_prime(ctx.p) || ctx.p > 251 {
        return Err(CliError::Usage(format!("--p {} is not a prime below 256", ctx.p)));
    }
    match cli.command {
        Command::Hom { f, g } => commands::hom(&ctx, &f, &g),
        Command::Ext { f, g } => commands::ext(&ctx, &f, &g),
        Command::ExtTw { f, g, r } => commands::ext_tw(&ctx, &f, &g, r),
        Command::E2 { f, g, r } => commands::e2(&ctx, &f, &g, r),
        Command::Collapse { catalog, r } => commands::collapse(&ctx, &catalog, r),
        Command::Troesch { d, r, verify } => commands::troesch(&ctx, d, r, verify),
        Command::Twistcompat { bar, r } => commands::twistcompat(&ctx, bar, r),
        Command::Lift { target, r, node_limit } => commands::lift(&ctx, &target, r, node_limit),
        Command::Selftest { criterion } => commands::run_selftest(&ctx, criterion.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(records) => {
            print!("{}", render(&records, format));
            let code = records.iter().map(|r| r.status.exit_code()).max().unwrap_or(0);
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
