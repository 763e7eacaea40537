use clap::Parser;
use nfft_cli::Cli;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = nfft_cli::run(cli.command, &mut stdout.lock()) {
        eprintln!("nfft: {e}");
        std::process::exit(e.exit_code());
    }
}
