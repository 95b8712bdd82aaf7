// QUBO to Ising and back, plus the color classes used for parallel sweeps.

use latfold::objective::{ising_to_qubo, qubo_to_ising, Assignment, QuadraticObjective};
use latfold::solvers::color_graph;
use latfold::Result;

pub fn run() -> Result<usize> {
    let mut q = QuadraticObjective::new(4);
    q.add_linear(0, 2.0);
    q.add_linear(3, -1.0);
    q.add_quadratic(0, 1, -3.0);
    q.add_quadratic(1, 2, 1.0);
    q.add_quadratic(2, 3, 0.5);
    let ising = qubo_to_ising(&q);
    let back = ising_to_qubo(&ising);
    for x in 0..16u8 {
        let a = Assignment::boolean((0..4).map(|i| x >> i & 1));
        let s = Assignment::spins(a.to_spins());
        assert!((q.evaluate(&a)? - ising.evaluate(&s)?).abs() < 1e-12);
        assert!((back.evaluate(&a)? - q.evaluate(&a)?).abs() < 1e-12);
    }
    let classes = color_graph(q.as_polynomial());
    println!("{} color classes: {:?}", classes.len(), classes.classes);
    Ok(classes.len())
}

fn main() -> Result<()> {
    run().map(|_| ())
}
