use clap::Parser;
use tvpreg::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error kind={} exit={} detail=\"{}\"", err.kind(), err.exit_code(), err);
        std::process::exit(err.exit_code());
    }
}
