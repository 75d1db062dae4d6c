//! Virtual-scale plot of one evaluation, as JSON geometry and as SVG.
//!
//!     cargo run -p vga-core --example plot_svg -- k.svg

use vga_core::analysis::{plot_geometry, render_svg};
use vga_core::dataset::example_matrix;
use vga_core::models::{evaluate, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "plot.svg".into());
    let m = example_matrix();
    let sol = evaluate(&m, &ModelKind::Tsc { kappa: 0.718 }, m.dmu_index("K")?, None)?;
    let g = plot_geometry(&m, &sol);
    println!(
        "DMU at ({:.3}, {:.3}) in quadrant {}, anchor ({:.3}, {:.3}) in quadrant {}",
        g.evaluated[0], g.evaluated[1], g.evaluated_quadrant, g.anchor[0], g.anchor[1], g.anchor_quadrant
    );
    for v in &g.vectors {
        println!("  {:<17} {:?} -> {:?}", v.name, v.from, v.to);
    }
    std::fs::write(&out, render_svg(&g))?;
    println!("wrote {out}");
    Ok(())
}
