use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use widescan::cli::{
    cmd_baseline, cmd_fov, cmd_gen_fixture, cmd_report, cmd_synthesize, CliError, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "widescan",
    version,
    about = "Wide-angle scanning array excitation synthesis with reflected-power control"
)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides [output].directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master RNG seed; overrides [moea].seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the sweep; overrides [output].workers.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Re-derive every emitted number from the emitted excitations.
    #[arg(long, global = true)]
    audit: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic coupling and pattern fixtures as files.
    GenFixture,
    /// Evaluate the linear-phase baseline over the scan grid.
    Baseline,
    /// Synthesize excitations for every scan angle and report the FoV.
    Synthesize,
    /// Recompute the field of view from an emitted CSV.
    Fov {
        /// Input CSV; defaults to <out>/summary.csv.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Tabulate psi/zeta/SLL/gain/pointing error at selected scan indices.
    Report {
        /// Directory holding a synthesize run; defaults to <out>.
        #[arg(long)]
        run: Option<PathBuf>,
        /// Comma-separated scan indices, e.g. --q 4,8,30.
        #[arg(long)]
        q: Option<String>,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    let config_path = args
        .config
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut config = RunConfig::from_path(&config_path)?;
    if let Some(seed) = args.seed {
        config.moea.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.output.workers = workers;
    }
    if let Some(out) = args.out {
        config.output.directory = out;
    }
    let base_dir = config_path
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = config.output.directory.clone();

    match args.command {
        Command::GenFixture => cmd_gen_fixture(&config, &base_dir, &out_dir),
        Command::Baseline => cmd_baseline(&config, &base_dir, &out_dir),
        Command::Synthesize => cmd_synthesize(&config, &base_dir, &out_dir, args.audit),
        Command::Fov { summary } => {
            let summary_path = summary.unwrap_or_else(|| out_dir.join("summary.csv"));
            cmd_fov(&config, &summary_path, &out_dir, args.audit)
        }
        Command::Report { run, q } => {
            let run_dir = run.unwrap_or_else(|| out_dir.clone());
            let q_values = match q {
                Some(list) => list
                    .split(',')
                    .map(|tok| {
                        tok.trim().parse::<usize>().map_err(|_| {
                            CliError::Config(format!("bad scan index '{tok}' in --q"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => Vec::new(),
            };
            cmd_report(&config, &base_dir, &run_dir, &q_values, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
