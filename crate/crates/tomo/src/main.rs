use clap::Parser;

fn main() {
    let cli = tomo::cli::Cli::parse();
    if let Err(e) = tomo::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
