use clap::Parser;

fn main() {
    env_logger::init();
    let cli = gauss_festoon::cli::Cli::parse();
    std::process::exit(gauss_festoon::cli::run(cli));
}
