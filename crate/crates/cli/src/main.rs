use clap::Parser;
use latgas_cli::cli::{run, Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            if let Command::FitKappa(_) = cli.command {
                if let Some(json) = files.first().and_then(|p| std::fs::read_to_string(p).ok()) {
                    print!("{json}");
                }
            }
        }
        Err(e) => {
            log::error!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
