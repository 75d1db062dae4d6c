//! Ranks every DMU, first with the unscaled models and then with chosen
//! intensity-sum scalars.

use std::collections::BTreeMap;
use vga_core::dataset::example_matrix;
use vga_core::procedure::{rank, RankingTable};

fn print(t: &RankingTable) {
    for r in &t.rows {
        println!(
            "{:>2}. {:<2} {:<5} {:>7.4}   weakest/strongest criterion {} ({:.3})",
            r.rank, r.dmu, r.model, r.score, r.criterion, r.criterion_ratio
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_matrix();
    print(&rank(&m, &BTreeMap::new())?);
    println!();
    let scalars = BTreeMap::from([("K".to_string(), 0.718), ("B".to_string(), 0.4273)]);
    print(&rank(&m, &scalars)?);
    Ok(())
}
