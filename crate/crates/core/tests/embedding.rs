use latfold::embedding::{
    apply_embedding, unembed, validate_embedding, ChainStrength, CouplerPlacement, EmbeddingMap, HardwareGraph,
};
use latfold::encoders::oracle::ground_state_in_grid;
use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::objective::{ising_to_qubo, qubo_to_ising, IsingProblem, QuadraticObjective};
use latfold::solvers::{brute_force, simulated_annealing, SaConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn spins(x: u32, n: usize) -> Vec<i8> {
    (0..n).map(|i| if x >> i & 1 == 1 { 1 } else { -1 }).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs())
}

fn random_ising(rng: &mut ChaCha8Rng, n: usize, edges: &[(usize, usize)]) -> IsingProblem {
    let mut s = IsingProblem::new(n);
    for h in &mut s.fields {
        *h = rng.gen_range(-2.0..2.0);
    }
    for &(i, j) in edges {
        s.add_coupling(i, j, rng.gen_range(-2.0..2.0));
    }
    s.offset = rng.gen_range(-1.0..1.0);
    s
}

#[test]
fn identity_embedding_is_a_copy() {
    let mut s = IsingProblem::new(3);
    s.fields = vec![0.5, -1.0, 0.25];
    s.add_coupling(0, 1, 1.5);
    s.add_coupling(1, 2, -0.5);
    let hw = HardwareGraph::complete(3);
    let e = apply_embedding(&s, &EmbeddingMap::identity(3), &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest).unwrap();
    assert_eq!(e.chain_edges, 0);
    assert_eq!(e.ising, s);
}

#[test]
fn two_node_chain_exhaustive() {
    // x0 on the chain {0, 1}, x1 on node 2; hardware path 0-1-2
    let mut s = IsingProblem::new(2);
    s.fields = vec![1.0, -0.5];
    s.add_coupling(0, 1, 0.75);
    let hw = HardwareGraph::from_edges([(0, 1), (1, 2)]).unwrap();
    let emb = EmbeddingMap::parse(r#"{"0": [0, 1], "1": [2]}"#).unwrap();
    let e = apply_embedding(&s, &emb, &hw, ChainStrength::Fixed(2.0), CouplerPlacement::Lowest).unwrap();
    assert_eq!(e.nodes, vec![0, 1, 2]);
    assert_eq!(e.ising.fields, vec![0.5, 0.5, -0.5]);
    assert_eq!(e.ising.couplings[&(0, 1)], -2.0);
    assert_eq!(e.ising.couplings[&(1, 2)], 0.75);
    for x in 0..4 {
        let l = spins(x, 2);
        assert!(close(s.evaluate_spins(&l), e.ising.evaluate_spins(&e.lift(&emb, &l))));
    }
    // flipping node 1 breaks the chain: +2cs, less its field and coupling
    let broken = [1, -1, 1];
    let intact = [1, 1, 1];
    let gap = e.ising.evaluate_spins(&broken) - e.ising.evaluate_spins(&intact);
    assert!((gap - (4.0 - 2.0 * 0.5 - 2.0 * 0.75)).abs() < 1e-12, "{gap}");
}

#[test]
fn fixture_embedding_is_valid() {
    let hw = HardwareGraph::parse(&fixture("hw16.txt")).unwrap();
    assert_eq!(hw.nodes.len(), 16);
    assert_eq!(hw.edges.len(), 24);
    assert_eq!(hw, HardwareGraph::grid(4, 4));
    let emb = EmbeddingMap::parse(&fixture("embedding5.json")).unwrap();
    let mut s = IsingProblem::new(5);
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)] {
        s.add_coupling(i, j, 1.0);
    }
    let r = validate_embedding(&emb, &s, &hw);
    assert!(r.valid, "{:?}", r.violations);
    assert_eq!(r.physical_qubits, emb.chains.values().map(Vec::len).sum::<usize>());
    assert_eq!((r.physical_qubits, r.max_chain), (10, 3));
    assert_eq!(EmbeddingMap::parse(&emb.to_json()).unwrap(), emb);
}

#[test]
fn invalid_embeddings_are_reported() {
    let hw = HardwareGraph::grid(4, 4);
    let mut s = IsingProblem::new(2);
    s.add_coupling(0, 1, 1.0);
    let disconnected = EmbeddingMap::parse(r#"{"0": [0, 2], "1": [1]}"#).unwrap();
    let r = validate_embedding(&disconnected, &s, &hw);
    assert!(!r.valid);
    assert!(r.violations.iter().any(|v| v.contains("disconnected")), "{:?}", r.violations);
    let shared = EmbeddingMap::parse(r#"{"0": [0, 1], "1": [1]}"#).unwrap();
    assert!(validate_embedding(&shared, &s, &hw).violations.iter().any(|v| v.contains("shared")));
    let missing = EmbeddingMap::parse(r#"{"0": [0]}"#).unwrap();
    assert!(!validate_embedding(&missing, &s, &hw).valid);
    let far = EmbeddingMap::parse(r#"{"0": [0], "1": [15]}"#).unwrap();
    assert!(validate_embedding(&far, &s, &hw).violations.iter().any(|v| v.contains("no hardware edge")));
    let off_graph = EmbeddingMap::parse(r#"{"0": [0], "1": [99]}"#).unwrap();
    assert!(!validate_embedding(&off_graph, &s, &hw).valid);
    assert!(apply_embedding(&s, &far, &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest).is_err());
    assert!(HardwareGraph::parse("0 0\n").is_err());
    assert!(EmbeddingMap::parse(r#"{"x": [1]}"#).is_err());
}

#[test]
fn majority_vote() {
    let emb = EmbeddingMap::parse(r#"{"0": [0, 1, 2], "1": [3, 4, 5]}"#).unwrap();
    let nodes = emb.physical_nodes();
    let u = unembed(&[1, 1, 1, -1, -1, -1], &nodes, &emb, 0, 0).unwrap();
    assert_eq!((u.spins, u.chain_break_fraction), (vec![1, -1], 0.0));
    let u = unembed(&[1, 1, -1, -1, -1, -1], &nodes, &emb, 0, 0).unwrap();
    assert_eq!((u.spins, u.chain_break_fraction), (vec![1, -1], 0.5));
    assert!(unembed(&[1, 1], &nodes, &emb, 0, 0).is_err());
}

#[test]
fn ties_are_broken_reproducibly() {
    let emb = EmbeddingMap::parse(r#"{"0": [0, 1]}"#).unwrap();
    let nodes = emb.physical_nodes();
    let draws: Vec<i8> = (0..64).map(|k| unembed(&[1, -1], &nodes, &emb, 7, k).unwrap().spins[0]).collect();
    let again: Vec<i8> = (0..64).map(|k| unembed(&[1, -1], &nodes, &emb, 7, k).unwrap().spins[0]).collect();
    assert_eq!(draws, again);
    assert!(draws.contains(&1) && draws.contains(&-1));
}

#[test]
fn energy_identity_on_random_problems() {
    let hw = HardwareGraph::parse(&fixture("hw16.txt")).unwrap();
    let emb = EmbeddingMap::parse(&fixture("embedding5.json")).unwrap();
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for trial in 0..50 {
        let s = random_ising(&mut rng, 5, &edges);
        let placement = if trial % 2 == 0 { CouplerPlacement::Lowest } else { CouplerPlacement::Split };
        let e = apply_embedding(&s, &emb, &hw, ChainStrength::HalfMaxQubo, placement).unwrap();
        assert_eq!(e.chain_strength, ising_to_qubo(&s).max_abs_coefficient() / 2.0);
        for x in 0..32 {
            let l = spins(x, 5);
            let (a, b) = (s.evaluate_spins(&l), e.ising.evaluate_spins(&e.lift(&emb, &l)));
            assert!(close(a, b), "trial {trial}, state {x}: {a} vs {b}");
        }
    }
}

/// Each logical variable on a two-node chain {2i, 2i+1}; every coupling gets
/// an edge between the chain heads.
fn doubled(q: &QuadraticObjective) -> (HardwareGraph, EmbeddingMap) {
    let n = q.num_vars();
    let mut hw = HardwareGraph::from_edges((0..n).map(|i| (2 * i, 2 * i + 1))).unwrap();
    let s = qubo_to_ising(q);
    for &(i, j) in s.couplings.keys() {
        hw.add_edge(2 * i, 2 * j).unwrap();
    }
    let json = format!(
        "{{{}}}",
        (0..n).map(|i| format!("\"{i}\": [{}, {}]", 2 * i, 2 * i + 1)).collect::<Vec<_>>().join(", ")
    );
    (hw, EmbeddingMap::parse(&json).unwrap())
}

#[test]
fn embedded_ground_states_unembed_to_logical_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut q = QuadraticObjective::new(8);
    for i in 0..8 {
        q.add_linear(i, rng.gen_range(-1.0..1.0));
        for j in i + 1..8 {
            if rng.gen_bool(0.4) {
                q.add_quadratic(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    let (hw, emb) = doubled(&q);
    let e = apply_embedding(&qubo_to_ising(&q), &emb, &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest).unwrap();
    let phys = brute_force(&ising_to_qubo(&e.ising).into_polynomial(), 30).unwrap();
    let logical = brute_force(q.as_polynomial(), 30).unwrap();
    assert!((phys.ground_energy - logical.ground_energy).abs() < 1e-9);
    for m in &phys.minimizers {
        let s: Vec<i8> = m.iter().map(|&b| 2 * b as i8 - 1).collect();
        let u = unembed(&s, &e.nodes, &emb, 0, 0).unwrap();
        assert_eq!(u.chain_break_fraction, 0.0);
        let bits: Vec<u8> = u.spins.iter().map(|&s| (s > 0) as u8).collect();
        assert!(logical.minimizers.contains(&bits));
    }
}

#[test]
fn annealing_an_embedded_problem() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut q = QuadraticObjective::new(14);
    for i in 0..14 {
        q.add_linear(i, rng.gen_range(-1.0..1.0));
        for j in i + 1..14 {
            if rng.gen_bool(0.3) {
                q.add_quadratic(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    let logical = brute_force(q.as_polynomial(), 30).unwrap();
    let (hw, emb) = doubled(&q);
    let e = apply_embedding(&qubo_to_ising(&q), &emb, &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest).unwrap();
    let p = ising_to_qubo(&e.ising).into_polynomial();
    let r = simulated_annealing(&p, &SaConfig { seed: 11, restarts: 64, ..Default::default() }).unwrap();
    let s: Vec<i8> = r.best().unwrap().bits.iter().map(|&b| 2 * b as i8 - 1).collect();
    let u = unembed(&s, &e.nodes, &emb, 0, 0).unwrap();
    let bits: Vec<u8> = u.spins.iter().map(|&s| (s > 0) as u8).collect();
    assert!((q.as_polynomial().evaluate_bits(&bits) - logical.ground_energy).abs() < 1e-9);
}

#[test]
fn default_chains_are_too_weak_for_one_hot_encodings() {
    // one-hot groups build Ising fields far above max|Q|, so breaking chains pays
    let mj = InteractionModel::miyazawa_jernigan();
    let seq = PeptideSequence::new("LKDEF").unwrap();
    let m = encode_default(ModelKind::CoordTetrahedral, &seq, &mj, None).unwrap();
    let ground = ground_state_in_grid(&m.lattice().unwrap(), &seq, &mj).unwrap().energy;
    let q = QuadraticObjective::try_from(m.objective.clone()).unwrap();
    let (hw, emb) = doubled(&q);
    let e = apply_embedding(&qubo_to_ising(&q), &emb, &hw, ChainStrength::HalfMaxQubo, CouplerPlacement::Lowest).unwrap();
    let p = ising_to_qubo(&e.ising).into_polynomial();
    let r = simulated_annealing(&p, &SaConfig { sweeps: 50, restarts: 8, seed: 1, ..Default::default() }).unwrap();
    let best = r.best().unwrap();
    assert!(best.energy < ground - 100.0, "{} vs {ground}", best.energy);
    let s: Vec<i8> = best.bits.iter().map(|&b| 2 * b as i8 - 1).collect();
    assert!(unembed(&s, &e.nodes, &emb, 0, 0).unwrap().chain_break_fraction > 0.0);
}
