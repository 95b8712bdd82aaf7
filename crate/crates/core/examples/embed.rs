// Embed a five-variable QUBO into a 4x4 grid and read a ground state back.

use latfold::embedding::{apply_embedding, unembed, ChainStrength, CouplerPlacement, EmbeddingMap, HardwareGraph};
use latfold::objective::{ising_to_qubo, qubo_to_ising, QuadraticObjective};
use latfold::solvers::{brute_force, Sample};
use latfold::Result;

pub fn run() -> Result<(Vec<u8>, f64)> {
    let mut q = QuadraticObjective::new(5);
    for i in 0..5 {
        q.add_linear(i, -1.0);
    }
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)] {
        q.add_quadratic(i, j, 1.5);
    }
    let hw = HardwareGraph::grid(4, 4);
    let emb = EmbeddingMap::parse(r#"{"0": [5, 6], "1": [1], "2": [2, 3, 7], "3": [10, 11], "4": [9, 13]}"#)?;
    let ising = qubo_to_ising(&q);
    let e = apply_embedding(&ising, &emb, &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest)?;
    let phys = ising_to_qubo(&e.ising).into_polynomial();
    let ground = brute_force(&phys, 20)?;
    let bits = &ground.minimizers[0];
    let spins: Vec<i8> = bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect();
    let u = unembed(&spins, &e.nodes, &emb, 0, 0)?;
    let logical: Vec<u8> = u.spins.iter().map(|&s| (s > 0) as u8).collect();
    let s = Sample { energy: q.as_polynomial().evaluate_bits(&logical), bits: logical.clone(), replica: 0, sweep: 0 };
    println!(
        "{} physical qubits, chain strength {}, ground {} -> logical {} (E = {}, broken {})",
        e.nodes.len(),
        e.chain_strength,
        ground.ground_energy,
        s.bitstring(),
        s.energy,
        u.chain_break_fraction
    );
    Ok((logical, s.energy))
}

fn main() -> Result<()> {
    run().map(|_| ())
}
