//! Load and execute a TOML scenario file.
//!
//! ```bash
//! cargo run --example run_scenario [-- path/to/scenario.toml]
//! ```
//!
//! Without an argument this runs the shipped Monte Carlo smoke scenario.

use fbal::{run_scenario, Scenario};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{}/scenarios/mc_smoke.toml", env!("CARGO_MANIFEST_DIR")));
    println!("running {path}\n");
    let scenario = Scenario::from_path(&path).unwrap();
    let out = run_scenario(&scenario).unwrap();
    print!("{}", out.csv());
    println!();
    print!("{}", out.summary());
    std::process::exit(if out.all_passed() { 0 } else { 1 });
}
