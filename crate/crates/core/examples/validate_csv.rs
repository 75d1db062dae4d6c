//! Reading a decision matrix from CSV and reporting what the validator finds.

use vga_core::dataset::{validate, validate_source, DecisionMatrix, Format};

const GOOD: &str = "\
dmu,in:staff[fte],in:cost[k$],out:visits,out:rating[%]
North,12,340,5100,82
South,9,295,4300,88
East,15,410,6200,79
West,11,300,3900,91
Harbor,8,260,3500,85
";

const BAD: &str = "dmu,in:staff,out:visits\nNorth,12,5100\nSouth,0,4300\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = DecisionMatrix::parse(GOOD, Format::Csv)?;
    let report = validate(&m);
    println!("{} DMUs, hash {}", report.n, report.hash.as_deref().unwrap_or("-"));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for c in &report.criteria {
        println!("  {:<6} {:<7} {:>8} .. {:<8} {}", c.role, c.label, c.min, c.max, c.unit);
    }
    let bad = validate_source(BAD, Format::Csv);
    println!("rejected: {:?}", bad.errors);
    Ok(())
}
