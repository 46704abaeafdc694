use clap::Parser;

fn main() {
    let cli = charfront::cli::Cli::parse();
    std::process::exit(charfront::cli::run(cli));
}
