use clap::Parser;

fn main() {
    std::process::exit(seqcert::cli::main_with(seqcert::cli::Cli::parse()));
}
