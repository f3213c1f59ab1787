use clap::Parser;

fn main() {
    let cli = hodp::cli::Cli::parse();
    std::process::exit(hodp::cli::run(cli));
}
