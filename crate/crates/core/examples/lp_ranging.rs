//! The simplex solver on its own: a small production plan, its shadow prices,
//! and how far each capacity can move before the optimal basis changes.

use vga_core::simplex::{rhs_range, solve, LinearProgram, Relation, Sense};

fn main() {
    // maximize 3a + 5b  subject to  a <= 4,  2b <= 12,  3a + 2b <= 18
    let mut lp = LinearProgram::new(Sense::Maximize, vec![3.0, 5.0]);
    lp.add_constraint(vec![1.0, 0.0], Relation::Le, 4.0);
    lp.add_constraint(vec![0.0, 2.0], Relation::Le, 12.0);
    lp.add_constraint(vec![3.0, 2.0], Relation::Le, 18.0);

    let sol = solve(&lp).expect("well-formed program");
    println!("status {:?}, objective {}, x = {:?}", sol.status, sol.objective, sol.x);
    for row in 0..lp.num_rows() {
        let r = rhs_range(&lp, &sol, row).unwrap();
        println!(
            "row {row}: rhs {:>4}  dual {:>6.3}  rhs may fall by {:>6}  rise by {}",
            r.rhs, r.dual, r.allowable_decrease, r.allowable_increase
        );
    }
}
