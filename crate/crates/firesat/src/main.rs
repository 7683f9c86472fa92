use clap::Parser;
use firesat::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FIRESAT_LOG", "warn")).init();
    std::process::exit(run(Cli::parse()));
}
