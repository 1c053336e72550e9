use clap::Parser;

use prc_bounds::cli::{main_with, Cli, EXIT_CONFIG};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own status would collide with the partial-failure code
            std::process::exit(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    std::process::exit(main_with(cli));
}
