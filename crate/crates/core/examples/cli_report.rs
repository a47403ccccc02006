//! Drives the command-line entry points in-process and prints the geodesic CSV.

use finsleroid::cli::{execute, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse_from(["finsleroid", "geodesic", "--g", "0.6", "--t1", "1,0,0.5", "--t2", "0,1,0.4", "--samples", "5", "--format", "csv"]);
    match execute(cli) {
        Ok(out) => print!("{}", out.stdout),
        Err(fail) => eprintln!("exit {}: {}", fail.code, fail.message),
    }
}
