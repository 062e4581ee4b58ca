use clap::Parser;
use psi_calc::{apply_env, run, CliConfig};

fn main() {
    let mut cli = CliConfig::parse();
    if let Err(f) = apply_env(&mut cli) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
    let code = run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
