use clap::Parser;

fn main() {
    let cli = modkron::cli::Cli::parse();
    std::process::exit(modkron::cli::run(&cli));
}
