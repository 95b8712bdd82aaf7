//! Turn-based model on the cubic lattice with a dense 3-bit turn code.

use serde::{Deserialize, Serialize};

use super::{
    Bit, Component, ComponentRole, EncodedModel, InteractionModel, Layout, ModelKind, PairQubit, PenaltySet,
    PeptideSequence, SlackBlock, TurnLayout,
};
use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

/// Unit step and its 3-bit code. Codes 000 and 110 encode no direction.
pub const CART_DIRECTIONS: [([i32; 3], [u8; 3]); 6] = [
    ([1, 0, 0], [1, 0, 1]),
    ([-1, 0, 0], [0, 1, 1]),
    ([0, 1, 0], [0, 1, 0]),
    ([0, -1, 0], [1, 0, 0]),
    ([0, 0, 1], [1, 1, 1]),
    ([0, 0, -1], [0, 0, 1]),
];

const INVALID_CODES: [[u8; 3]; 2] = [[0, 0, 0], [1, 1, 0]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnCartesianPenalties {
    pub back: f64,
    pub turn: f64,
    pub overlap: f64,
}

impl Default for TurnCartesianPenalties {
    fn default() -> Self {
        TurnCartesianPenalties { back: 20.0, turn: 20.0, overlap: 20.0 }
    }
}

/// Step encoded by a 3-bit code, `None` for the two unused codes.
pub fn direction_of(code: [u8; 3]) -> Option<[i32; 3]> {
    CART_DIRECTIONS.iter().find(|(_, c)| *c == code).map(|(d, _)| *d)
}

/// Number of slack bits for beads `sep` apart (0 unless `sep` is even and at least 4).
pub fn slack_bits(sep: usize) -> usize {
    if sep < 4 || sep % 2 == 1 {
        return 0;
    }
    let sq = sep * sep;
    (usize::BITS - (sq - 1).leading_zeros()) as usize
}

fn indicator(bits: &[Bit], code: [u8; 3], n: usize) -> PolynomialObjective {
    let mut p = PolynomialObjective::constant(n, 1.0);
    for (b, &c) in bits.iter().zip(code.iter()) {
        let mut f = b.poly(n);
        if c == 0 {
            f.scale(-1.0);
            f.add_offset(1.0);
        }
        p = p.product(&f);
    }
    p
}

pub fn encode_turn_cartesian(
    seq: &PeptideSequence,
    interaction: &InteractionModel,
    penalties: &TurnCartesianPenalties,
) -> Result<EncodedModel> {
    interaction.check_sequence(seq)?;
    interaction.check_non_positive(seq)?;
    for (name, v) in [("back", penalties.back), ("turn", penalties.turn), ("overlap", penalties.overlap)] {
        if !(v > 0.0) {
            return Err(Error::input(format!("penalty {name} must be positive, got {v}")));
        }
    }
    let beads = seq.len();
    let num_turns = beads - 1;

    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let mut turns = Vec::with_capacity(num_turns);
    for t in 0..num_turns {
        let bits = match t {
            0 => vec![Bit::Fixed(1), Bit::Fixed(0), Bit::Fixed(1)],
            1 => vec![Bit::Var(fresh()), Bit::Fixed(0), Bit::Fixed(1)],
            _ => vec![Bit::Var(fresh()), Bit::Var(fresh()), Bit::Var(fresh())],
        };
        turns.push(bits);
    }
    let mut slack = Vec::new();
    for j in 0..beads {
        for k in j + 4..beads {
            let mu = slack_bits(k - j);
            if mu > 0 {
                slack.push(SlackBlock { beads: (j, k), vars: (0..mu).map(|_| fresh()).collect() });
            }
        }
    }
    let mut qubits = Vec::new();
    for j in 0..beads {
        for k in (j + 3..beads).step_by(2) {
            if interaction.pair(seq, j, k) != 0.0 {
                qubits.push(PairQubit { beads: (j, k), var: fresh() });
            }
        }
    }
    let n = next;

    let ind = |t: usize, code: [u8; 3]| indicator(&turns[t], code, n);
    // per-turn displacement along each axis, as polynomials
    let steps: Vec<[PolynomialObjective; 3]> = (0..num_turns)
        .map(|t| {
            let mut axes: [PolynomialObjective; 3] = Default::default();
            for (dir, code) in CART_DIRECTIONS {
                let a = dir.iter().position(|&x| x != 0).unwrap();
                axes[a].add_scaled(&ind(t, code), dir[a] as f64);
            }
            for p in &mut axes {
                p.set_num_vars(n).unwrap();
            }
            axes
        })
        .collect();
    let dist2 = |j: usize, k: usize| {
        let mut d = PolynomialObjective::new(n);
        for a in 0..3 {
            let mut delta = PolynomialObjective::new(n);
            for step in &steps[j..k] {
                delta.add_scaled(&step[a], 1.0);
            }
            d.add_scaled(&delta.square(), 1.0);
        }
        d
    };

    let mut components = Vec::new();
    let penalty = |poly: PolynomialObjective| Component {
        role: ComponentRole::Penalty,
        poly,
        lower_bound: Some(0.0),
        eliminable: None,
    };
    for t in 0..num_turns {
        let mut p = PolynomialObjective::new(n);
        for code in INVALID_CODES {
            p.add_scaled(&ind(t, code), penalties.turn);
        }
        if p.num_terms() > 0 || p.offset() != 0.0 {
            components.push(penalty(p));
        }
    }
    for t in 0..num_turns.saturating_sub(1) {
        let mut p = PolynomialObjective::new(n);
        for a in 0..3 {
            let plus = CART_DIRECTIONS[2 * a].1;
            let minus = CART_DIRECTIONS[2 * a + 1].1;
            p.add_scaled(&ind(t, plus).product(&ind(t + 1, minus)), penalties.back);
            p.add_scaled(&ind(t, minus).product(&ind(t + 1, plus)), penalties.back);
        }
        if p.num_terms() > 0 || p.offset() != 0.0 {
            components.push(penalty(p));
        }
    }
    for block in &slack {
        let (j, k) = block.beads;
        let mu = block.vars.len();
        // (2^μ − D − α)², α the binary value of the slack bits
        let mut inner = PolynomialObjective::constant(n, (1u64 << mu) as f64);
        inner.add_scaled(&dist2(j, k), -1.0);
        for (l, &v) in block.vars.iter().enumerate() {
            inner.add_term(&[v], -((1u64 << l) as f64));
        }
        components.push(penalty(inner.square().scaled(penalties.overlap)));
    }
    for q in &qubits {
        let (j, k) = q.beads;
        let eps = interaction.pair(seq, j, k);
        let mut c = PolynomialObjective::constant(n, 2.0);
        c.add_scaled(&dist2(j, k), -1.0);
        let poly = c.product(&PolynomialObjective::variable(n, q.var)).scaled(eps);
        components.push(Component {
            role: ComponentRole::Interaction,
            poly,
            lower_bound: Some(2.0 * eps),
            eliminable: Some(q.var),
        });
    }

    Ok(EncodedModel::assemble(
        ModelKind::TurnCartesian,
        seq.clone(),
        interaction.clone(),
        PenaltySet::TurnCartesian(*penalties),
        n,
        Layout::Turn(TurnLayout { turns, slack, interaction: qubits }),
        components,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_bit_counts() {
        assert_eq!(slack_bits(4), 4);
        assert_eq!(slack_bits(6), 6);
        assert_eq!(slack_bits(8), 6);
        assert_eq!(slack_bits(10), 7);
        assert_eq!(slack_bits(5), 0);
        assert_eq!(slack_bits(2), 0);
    }

    #[test]
    fn codes_cover_six_directions() {
        let mut seen = std::collections::BTreeSet::new();
        for b in 0..8u8 {
            let code = [b >> 2 & 1, b >> 1 & 1, b & 1];
            match direction_of(code) {
                Some(d) => assert!(seen.insert(d)),
                None => assert!(INVALID_CODES.contains(&code)),
            }
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn n4_layout() {
        let seq = PeptideSequence::new("HHHH").unwrap();
        let m = encode_turn_cartesian(&seq, &InteractionModel::hp(-1.0).unwrap(), &Default::default()).unwrap();
        let Layout::Turn(t) = &m.layout else { panic!() };
        assert_eq!(t.interaction.len(), 1);
        assert_eq!(t.interaction[0].beads, (0, 3));
        assert!(t.slack.is_empty());
        // 1 bit for turn 2, 3 for turn 3, one interaction qubit
        assert_eq!(m.num_vars(), 5);
    }
}
