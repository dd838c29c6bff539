//! Drive a CLI campaign from code and print its CSV.
//!
//! ```bash
//! cargo run --release --example run_config
//! ```

use clap::Parser;
use hardylab::cli::{render_csv, run, RunConfig};

fn main() -> hardylab::error::Result<()> {
    let cfg = RunConfig::parse_from(["hardylab", "sharpness", "--alpha", "0.5", "--k-grid", "16:256:x2", "--format", "csv"]);
    let art = run(&cfg)?;
    print!("{}", render_csv(&cfg, &art));
    Ok(())
}
