use clap::Parser;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = gstwalk_cli::Cli::parse();
    std::process::exit(gstwalk_cli::run(&cli, &argv[1..]));
}
