use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::objective::PolynomialObjective;
use latfold::reduction::{quadratize, verify_quadratization, AlphaPolicy, VerifyMethod};
use proptest::prelude::*;

#[test]
fn cubic_term_gadget() {
    let mut h = PolynomialObjective::new(3);
    h.add_term(&[0, 1, 2], 1.0);
    let r = quadratize(&h, AlphaPolicy::WorstCase).unwrap();
    assert_eq!(r.alpha, 2.0);
    assert_eq!(r.aux_map.len(), 1);
    let a = r.aux_map[0];
    assert_eq!(a.aux, 3);
    let (i, j) = a.pair;
    let k = 3 - i - j;
    // x_k·y + α(x_i x_j − 2y(x_i + x_j) + 3y)
    let mut want = PolynomialObjective::new(4);
    want.add_term(&[k, 3], 1.0);
    want.add_term(&[i, j], 2.0);
    want.add_term(&[i, 3], -4.0);
    want.add_term(&[j, 3], -4.0);
    want.add_term(&[3], 6.0);
    assert_eq!(r.qubo.as_polynomial(), &want);
    let rep = verify_quadratization(&h, &r, 20).unwrap();
    assert!(rep.passed && rep.method == VerifyMethod::Exhaustive);
}

#[test]
fn quadratic_input_unchanged() {
    let mut p = PolynomialObjective::new(3);
    p.add_term(&[0, 2], -1.5);
    p.add_term(&[1], 2.0);
    p.add_offset(0.25);
    let r = quadratize(&p, AlphaPolicy::WorstCase).unwrap();
    assert!(r.aux_map.is_empty());
    assert_eq!(r.qubo.as_polynomial(), &p);
}

#[test]
fn turn_tetrahedral_six_beads_verifies_exhaustively() {
    let seq = PeptideSequence::new("LKDEFG").unwrap();
    let m = encode_default(ModelKind::TurnTetrahedral, &seq, &InteractionModel::miyazawa_jernigan(), None).unwrap();
    assert_eq!(m.objective.degree(), 3);
    let r = quadratize(&m.objective, AlphaPolicy::WorstCase).unwrap();
    let rep = verify_quadratization(&m.objective, &r, 24).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.method, VerifyMethod::Exhaustive);
    assert!(rep.max_discrepancy <= 1e-9);
}

#[test]
fn halved_alpha_opens_a_negative_gap() {
    let mut h = PolynomialObjective::new(3);
    h.add_term(&[0, 1, 2], -4.0);
    let worst = AlphaPolicy::WorstCase.alpha(&h).unwrap();
    let ok = quadratize(&h, AlphaPolicy::WorstCase).unwrap();
    assert!(verify_quadratization(&h, &ok, 20).unwrap().min_inconsistency_gap > 0.0);
    let weak = quadratize(&h, AlphaPolicy::Fixed(worst / 2.0)).unwrap();
    let rep = verify_quadratization(&h, &weak, 20).unwrap();
    assert!(!rep.passed);
    // x_k = 1 with a lone pair bit set: −4 + α/2·1 against 0
    assert!((rep.min_inconsistency_gap - (-4.0 + worst / 2.0)).abs() < 1e-12, "{}", rep.min_inconsistency_gap);
}

#[test]
fn large_problems_verify_by_sampling() {
    let mut h = PolynomialObjective::new(30);
    for i in 0..28 {
        h.add_term(&[i, i + 1, i + 2], if i % 2 == 0 { 1.0 } else { -1.0 });
    }
    let r = quadratize(&h, AlphaPolicy::WorstCase).unwrap();
    let rep = verify_quadratization(&h, &r, 20).unwrap();
    assert_eq!(rep.method, VerifyMethod::Sampled);
    assert!(rep.checked >= 100_000);
    assert!(rep.passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn consistent_extension_preserves_energy(
        terms in prop::collection::vec((prop::collection::btree_set(0usize..8, 1..=4), -4i32..=4), 1..12),
        x in 0u32..256,
    ) {
        let mut h = PolynomialObjective::new(8);
        for (vars, c) in &terms {
            h.add_term(&vars.iter().copied().collect::<Vec<_>>(), *c as f64 * 0.5);
        }
        let r = quadratize(&h, AlphaPolicy::WorstCase).unwrap();
        prop_assert!(r.qubo.as_polynomial().is_quadratic());
        let bits: Vec<u8> = (0..8).map(|i| (x >> i & 1) as u8).collect();
        let e = h.evaluate_bits(&bits);
        prop_assert!((r.qubo.as_polynomial().evaluate_bits(&r.extend(&bits)) - e).abs() <= 1e-9 * (1.0 + e.abs()));
    }
}
