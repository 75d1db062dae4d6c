//! The four models on the built-in example: an inefficient DMU under the
//! unscaled and scaled adjustment models, an efficient one under the super
//! variants.

use vga_core::analysis::report;
use vga_core::dataset::example_matrix;
use vga_core::models::{evaluate, first_scalar, ModelKind};
use vga_core::procedure::prepare;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_matrix();
    let k = m.dmu_index("K")?;
    let pt = evaluate(&m, &ModelKind::Pt, k, None)?;
    let kappa1 = first_scalar(&pt);
    println!("K  PT            E = {:.4}   kappa1 = {kappa1:.4}", pt.efficiency());
    for kappa in [kappa1, 0.718, 0.515] {
        let sol = evaluate(&m, &ModelKind::Tsc { kappa }, k, None)?;
        let r = report(&m, &sol);
        println!(
            "K  TSc({kappa:.4})   E = {:.4}   w = {:+.4}   anchor ({:+.3}, {:+.3})",
            r.efficiency,
            r.w.unwrap_or(0.0),
            r.anchor_point[0],
            r.anchor_point[1]
        );
    }

    let b = m.dmu_index("B")?;
    let spt = evaluate(&m, &ModelKind::Spt, b, None)?;
    let kappa1 = first_scalar(&spt);
    println!("B  sPT           E = {:.4}   kappa1 = {kappa1:.4}", spt.efficiency());
    // the second scalar is a basis breakpoint, so take it exactly rather than rounded
    let kappa2 = prepare(&m, "B")?.phase3.unwrap().kappa2;
    let stsc = evaluate(&m, &ModelKind::Stsc { kappa: kappa2 }, b, None)?;
    println!("B  sTSc({kappa2:.4})  E = {:.4}", stsc.efficiency());

    let r = report(&m, &pt);
    println!("K benchmark: inputs {:?}, outputs {:?}", r.benchmark_inputs, r.benchmark_outputs);
    Ok(())
}
