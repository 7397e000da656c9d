//! How many feedback bits does an interference cap cost?
//!
//! ```bash
//! cargo run --example min_feedback_bits
//! ```

use fbal::{min_bits_for_threshold, SystemParams};

fn main() {
    println!(
        "{:>10} {:>6} {:>18} {:>14} {:>12}",
        "cap_w", "N", "bits per user", "total", "unrounded"
    );
    for n in [2usize, 4, 8] {
        let params = SystemParams::new(n, 1.0, vec![100.0, 10.0, 1.0]).unwrap();
        for cap in [10.0, 1.0, 0.1, 0.01] {
            let ta = min_bits_for_threshold(&params, cap).unwrap();
            let bits = ta
                .report
                .bits()
                .iter()
                .map(|b| format!("{b:.0}"))
                .collect::<Vec<_>>()
                .join("/");
            println!(
                "{cap:>10} {n:>6} {bits:>18} {:>14.0} {:>12.3}",
                ta.report.allocation().total(),
                ta.unrounded_total
            );
        }
    }
    println!("\ntighter caps and more antennas both raise the bill; every user sits at");
    println!("or below the cap and loses it if you take one bit away.");
}
