use clap::Parser;
use pckit::cli;

fn main() {
    cli::init_threads();
    let parsed = cli::Cli::parse();
    std::process::exit(cli::run(parsed));
}
