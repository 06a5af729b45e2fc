use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use daemb::error::Result;
use daemb::pipeline::{self, PipelineConfig};

/// Domain-adapted word embeddings: train, align, evaluate.
#[derive(Parser)]
#[command(name = "daemb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train LSA embeddings from the dataset corpus
    Lsa(Common),
    /// Fuse generic and domain-specific embeddings into DA embeddings
    Adapt(Common),
    /// Evaluate all configured embedding sources with shared CV folds
    Eval(Common),
    /// Run lsa -> adapt -> eval end to end
    Pipeline(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Lsa(c) | Command::Adapt(c) | Command::Eval(c) | Command::Pipeline(c) => c,
        }
    }
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn init_thread_pool() {
    if let Ok(v) = std::env::var("DAEMB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring invalid DAEMB_THREADS value {v:?}"),
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_thread_pool() {}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli.command.common())?;
    match &cli.command {
        Command::Lsa(_) => {
            let path = pipeline::cmd_lsa(&cfg)?;
            println!("{}", path.display());
        }
        Command::Adapt(_) => {
            for path in pipeline::cmd_adapt(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Eval(_) | Command::Pipeline(_) => {
            let path = if matches!(cli.command, Command::Eval(_)) {
                pipeline::cmd_eval(&cfg)?
            } else {
                pipeline::cmd_pipeline(&cfg)?
            };
            println!("{}", path.display());
            let text_path = path.with_file_name("metrics.txt");
            if let Ok(text) = std::fs::read_to_string(&text_path) {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    init_thread_pool();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
