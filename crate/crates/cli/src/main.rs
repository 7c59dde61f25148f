use clap::Parser;

use bifurc_cli::commands::{run, Cli};
use bifurc_cli::exit;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bifurc: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
