use std::path::PathBuf;
use std::process::ExitCode;

use atomlaser_cli::{load_config, run, Command};
use clap::Parser;

/// Atom-laser output coupling scenarios.
#[derive(Parser, Debug)]
#[command(name = "atomlaser", version)]
struct Args {
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for internal parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = load_config(args.config.as_deref(), &args.set).and_then(|cfg| run(args.command, &cfg, &args.out));
    match result {
        Ok(m) => {
            println!(
                "{}: wrote {} files to {}",
                args.command.name(),
                m["files"].as_array().map_or(0, |f| f.len()),
                args.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
