use clap::Parser;
use promc::cli::{emit, execute, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = execute(&cli);
    let code = emit(&outcome, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
