//! Additive DEA next to the VGA classification, under both returns to scale.

use vga_core::dataset::example_matrix;
use vga_core::dea::{compare, AdditiveConfig, Rts};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_matrix();
    for rts in [Rts::Crs, Rts::Vrs] {
        println!("{rts:?}");
        let cfg = AdditiveConfig::new(rts);
        for o in 0..m.n() {
            let c = compare(&m, o, &cfg)?;
            println!(
                "  {:<2} additive slack {:>9.4}  efficient {:<5}  PT E {:.4}  agree {}  peers {:?}",
                c.dmu,
                c.additive.multiplier.unwrap_or(f64::NAN),
                c.additive.efficient,
                c.pt_efficiency,
                c.classification_agrees,
                c.dea_reference_set
            );
        }
    }
    Ok(())
}
