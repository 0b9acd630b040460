use clap::Parser;

fn main() {
    let cli = refracted_cli::Cli::parse();
    std::process::exit(refracted_cli::run(&cli));
}
