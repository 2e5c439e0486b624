use clap::Parser;

fn main() {
    let args = trajeval::cli::Cli::parse();
    std::process::exit(trajeval::cli::run(args));
}
