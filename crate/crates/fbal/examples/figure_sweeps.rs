//! Generate all four canned sweep CSVs into ./sweeps/.
//!
//! ```bash
//! cargo run --example figure_sweeps
//! ```

use fbal::run_figure;

fn main() {
    std::fs::create_dir_all("sweeps").unwrap();
    for id in 1u8..=4 {
        let out = run_figure(id).unwrap();
        let path = format!("sweeps/figure{id}.csv");
        std::fs::write(&path, out.csv()).unwrap();
        println!("wrote {path} ({} rows)", out.rows.len());
        print!("{}", out.summary());
        assert!(out.all_passed());
        println!();
    }
}
