//! The four-phase scalar selection for one DMU, then a search for the scalar
//! that reproduces the unscaled score.

use vga_core::dataset::example_matrix;
use vga_core::procedure::{find_matching_scalar, ProcedureState, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = example_matrix();
    let dmu = std::env::args().nth(1).unwrap_or_else(|| "K".into());
    let mut st = ProcedureState::new(&m, &dmu, Scenario::Inefficiency)?;
    let p1 = st.run_phase1(&m)?;
    if p1.efficient {
        println!("{dmu} is efficient; switching to the super-efficiency scenario");
        st = ProcedureState::new(&m, &dmu, Scenario::Super)?;
        st.run_phase1(&m)?;
    }
    let p1 = st.phase1.clone().unwrap();
    println!("phase 1: {} E = {:.4}, kappa1 = {:.4}", p1.report.model, p1.report.efficiency, p1.kappa1);

    let p2 = st.run_phase2(&m)?;
    println!("phase 2: E = {:.4} at kappa1, {} usable side(s)", p2.report.efficiency, p2.sides.len());

    let p3 = st.run_phase3(&m)?;
    println!(
        "phase 3: kappa2 = {:.4} ({:?}), E = {:.4}, interval [{:.4}, {:.4}]",
        p3.kappa2, p3.direction, p3.report.efficiency, p3.interval[0], p3.interval[1]
    );
    let [lo, hi] = p3.interval;

    for step in 0..=4 {
        let kappa = lo + (hi - lo) * step as f64 / 4.0;
        let t = st.try_kappa(&m, kappa, false)?;
        println!("phase 4: try {kappa:.4} -> E = {:.4}", t.report.efficiency);
    }
    let mid = 0.5 * (lo + hi);
    let c = st.commit(mid)?;
    println!("committed kappa = {:.4}, E = {:.4}", c.kappa, c.efficiency);

    if !p1.efficient {
        let target = p1.report.efficiency;
        match find_matching_scalar(&m, &dmu, target) {
            Ok(found) => println!("E = {target:.4} is reached at kappa = {:.4}", found.kappa),
            Err(e) => println!("no scalar reproduces E = {target:.4}: {e}"),
        }
    }
    Ok(())
}
