//! A_p characteristic of power weights |x|^a on nested cubes around the origin.
//!
//! In one dimension |x|^a is in A_2 exactly when -1 < a < 1. Inside the range
//! the estimates settle; outside they keep climbing as cubes shrink.

use lpsq::weights::{ap_level_trend, relative_changes};
use lpsq::Weight;

fn main() -> lpsq::Result<()> {
    for a in [0.5, 0.9, 1.1] {
        let trend = ap_level_trend(&Weight::power(a), 2.0, 1.0, 8)?;
        let changes = relative_changes(&trend);
        println!("a = {a}  in A_2: {}", Weight::power_in_ap(a, 1, 2.0));
        for (i, (v, c)) in trend.iter().skip(1).zip(&changes).enumerate() {
            println!(
                "  levels {:>2}  [w] = {v:>9.4}  change {:>6.2}%",
                i + 2,
                100.0 * c
            );
        }
    }
    Ok(())
}
