use clap::Parser;
use helpsys_cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = helpsys_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
