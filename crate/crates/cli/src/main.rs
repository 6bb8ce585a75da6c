use clap::Parser;

fn main() {
    let cli = p1spin_cli::Cli::parse();
    if let Err(e) = p1spin_cli::run(&cli) {
        eprintln!("p1spin: {e}");
        std::process::exit(e.exit_code());
    }
}
