use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use depminer_cli::{
    default_jobs, mine_exit_code, run_batch, RunConfig, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE,
};
use depminer_core::model::Granularity;

#[derive(Parser)]
#[command(
    name = "depminer",
    version,
    about = "Mine intra-project dependencies from source code"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine one project.
    Mine(MineArgs),
    /// Mine every project listed in a manifest.
    Batch { manifest: PathBuf },
}

#[derive(Args)]
struct MineArgs {
    root: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "token")]
    granularity: Granularity,
    #[arg(long)]
    scope: Option<PathBuf>,
    #[arg(long = "index-cache")]
    index_cache: Option<PathBuf>,
    #[arg(long = "emit-dot")]
    emit_dot: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[arg(long = "absolute-paths")]
    absolute_paths: bool,
    #[arg(long, default_value = "auto")]
    lang: String,
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Mine(a) => mine_exit_code(&RunConfig {
            root: a.root,
            out: a.out,
            granularity: a.granularity,
            scope: a.scope,
            index_cache: a.index_cache,
            dot: a.emit_dot,
            jobs: a.jobs.map_or_else(default_jobs, usize::from),
            absolute_paths: a.absolute_paths,
            language: a.lang,
        }),
        Command::Batch { manifest } => run_batch(&manifest),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = std::panic::catch_unwind(run).unwrap_or(EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
