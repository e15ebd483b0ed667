use clap::Parser;

fn main() {
    let cli = spikescope_cli::cli::Cli::parse();
    if let Err(e) = spikescope_cli::run(cli) {
        eprintln!("spikescope: {e}");
        std::process::exit(e.exit_code());
    }
}
