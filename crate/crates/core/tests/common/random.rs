//! Seeded generators for random decision matrices and small linear programs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vga_core::dataset::{Criterion, DecisionMatrix};
use vga_core::simplex::{Domain, LinearProgram, Relation, Sense};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive matrix with entries spread over two orders of magnitude.
pub fn matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, s: usize) -> DecisionMatrix {
    let dmus: Vec<String> = (0..n).map(|j| format!("D{j:02}")).collect();
    let inputs: Vec<Criterion> = (0..m).map(|i| Criterion::new(&format!("x{}", i + 1), "")).collect();
    let outputs: Vec<Criterion> = (0..s).map(|r| Criterion::new(&format!("y{}", r + 1), "")).collect();
    let mut draw = |k: usize| -> Vec<Vec<f64>> {
        (0..k)
            .map(|_| (0..n).map(|_| 10f64.powf(rng.gen_range(0.0..2.0))).collect())
            .collect()
    };
    let x = draw(m);
    let y = draw(s);
    DecisionMatrix::new(dmus, inputs, outputs, x, y).expect("random matrix")
}

/// A feasible, bounded program with mixed relations, a free variable and
/// explicit bounds, small enough for vertex enumeration.
pub fn program(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(2..=5);
    let rows = rng.gen_range(1..=4);
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-5i32..=5) as f64).collect();
    let mut lp = LinearProgram::new(sense, objective);
    // An interior reference point keeps the program feasible.
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
    for _ in 0..rows {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4i32..=4) as f64).collect();
        let ax: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        let (rel, rhs) = match rng.gen_range(0..3) {
            0 => (Relation::Le, (ax + rng.gen_range(0.0..2.0)).round()),
            1 => (Relation::Ge, (ax - rng.gen_range(0.0..2.0)).round()),
            _ => (Relation::Eq, ax),
        };
        let rhs = match rel {
            Relation::Le if rhs < ax => rhs + 1.0,
            Relation::Ge if rhs > ax => rhs - 1.0,
            _ => rhs,
        };
        lp.add_constraint(a, rel, rhs);
    }
    let free = rng.gen_range(0..n);
    lp.set_domain(free, Domain::Free);
    for j in 0..n {
        let lo = if j == free { Some(-10.0) } else { None };
        let hi = if rng.gen_bool(0.3) { x0[j].ceil() + 1.0 } else { 10.0 };
        lp.set_bounds(j, lo, Some(hi));
    }
    lp
}
