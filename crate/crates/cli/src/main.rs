use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use thue_tree_cli::{run, threads_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = threads_from_env() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("thue-tree: cannot size thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(outcome) => {
            let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("thue-tree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
