use clap::Parser;
use interface_lab_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Err(e) = run(&cli, &argv[1..]) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
