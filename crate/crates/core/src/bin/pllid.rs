//! `pllid` — simulation and system identification for a phase-locked loop
//! with a band-pass filter.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure, 4 degenerate data.

use clap::Parser;
use pll_ident::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
