//! Turn-based model on the diamond lattice with one-hot turns.

use serde::{Deserialize, Serialize};

use super::{
    Bit, Component, ComponentRole, EncodedModel, InteractionModel, Layout, ModelKind, PairQubit, PenaltySet,
    PeptideSequence, TurnLayout,
};
use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

/// Rule for the global penalty λ_turn = λ_gc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalScaling {
    /// 21·N³
    Strict,
    /// 21·N²
    Tuned,
    Fixed(f64),
}

impl GlobalScaling {
    pub fn value(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            GlobalScaling::Strict => 21.0 * n * n * n,
            GlobalScaling::Tuned => 21.0 * n * n,
            GlobalScaling::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnTetrahedralPenalties {
    /// Weight of the neighbour-overlap terms around a contact.
    pub lambda2: f64,
    pub global: GlobalScaling,
    /// Fixed contact-distance penalty; derived per pair when `None`.
    pub lambda1: Option<f64>,
}

impl Default for TurnTetrahedralPenalties {
    fn default() -> Self {
        TurnTetrahedralPenalties { lambda2: 10.0, global: GlobalScaling::Strict, lambda1: None }
    }
}

impl TurnTetrahedralPenalties {
    /// λ₁(i,j) = 4(j−i−1)·λ₂ + |ε| + 1 unless overridden.
    pub fn lambda1(&self, i: usize, j: usize, eps: f64) -> f64 {
        self.lambda1.unwrap_or(4.0 * (j - i - 1) as f64 * self.lambda2 + eps.abs() + 1.0)
    }
}

/// Axis of turn 0 and turn 1; turn 2 may not use [`MIRROR_AXIS`].
pub const FIXED_AXES: [usize; 2] = [3, 2];
pub const MIRROR_AXIS: usize = 1;

pub fn encode_turn_tetrahedral(
    seq: &PeptideSequence,
    interaction: &InteractionModel,
    penalties: &TurnTetrahedralPenalties,
) -> Result<EncodedModel> {
    interaction.check_sequence(seq)?;
    interaction.check_non_positive(seq)?;
    let beads = seq.len();
    let global = penalties.global.value(beads);
    if !(penalties.lambda2 > 0.0) || !(global > 0.0) || penalties.lambda1.is_some_and(|v| !(v > 0.0)) {
        return Err(Error::input("turn-tetrahedral penalties must be positive"));
    }
    let num_turns = beads - 1;

    let mut next = 0usize;
    let mut turns: Vec<Vec<Bit>> = Vec::with_capacity(num_turns);
    for t in 0..num_turns {
        let bits = (0..4)
            .map(|a| {
                if t < 2 {
                    Bit::Fixed((a == FIXED_AXES[t]) as u8)
                } else if t == 2 && a == MIRROR_AXIS {
                    Bit::Fixed(0)
                } else {
                    next += 1;
                    Bit::Var(next - 1)
                }
            })
            .collect();
        turns.push(bits);
    }
    let mut qubits = Vec::new();
    for i in 0..beads {
        for j in (i + 5..beads).step_by(2) {
            if interaction.pair(seq, i, j) != 0.0 {
                qubits.push(PairQubit { beads: (i, j), var: next });
                next += 1;
            }
        }
    }
    let n = next;

    // Δn_a(i,j) = Σ_{t=i}^{j−1} (−1)^t t_a(t)
    let dist2 = |i: usize, j: usize| {
        let mut d = PolynomialObjective::new(n);
        for a in 0..4 {
            let mut delta = PolynomialObjective::new(n);
            for (t, bits) in turns.iter().enumerate().take(j).skip(i) {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                delta.add_scaled(&bits[a].poly(n), sign);
            }
            d.add_scaled(&delta.square(), 1.0);
        }
        d
    };

    let mut components = Vec::new();
    for bits in &turns {
        if bits.iter().all(|b| b.var().is_none()) {
            continue;
        }
        let mut s = PolynomialObjective::constant(n, -1.0);
        for b in bits {
            s.add_scaled(&b.poly(n), 1.0);
        }
        components.push(Component {
            role: ComponentRole::Penalty,
            poly: s.square().scaled(global),
            lower_bound: Some(0.0),
            eliminable: None,
        });
    }
    for t in 0..num_turns.saturating_sub(1) {
        let mut p = PolynomialObjective::new(n);
        for a in 0..4 {
            p.add_scaled(&turns[t][a].poly(n).product(&turns[t + 1][a].poly(n)), global);
        }
        if p.num_terms() > 0 || p.offset() != 0.0 {
            components.push(Component { role: ComponentRole::Penalty, poly: p, lower_bound: Some(0.0), eliminable: None });
        }
    }
    for q in &qubits {
        let (i, j) = q.beads;
        let eps = interaction.pair(seq, i, j);
        let l1 = penalties.lambda1(i, j, eps);
        let mut h = PolynomialObjective::constant(n, eps - l1);
        h.add_scaled(&dist2(i, j), l1);
        for r in [j.checked_sub(1), Some(j + 1)].into_iter().flatten().filter(|&r| r < beads) {
            h.add_offset(2.0 * penalties.lambda2);
            h.add_scaled(&dist2(i, r), -penalties.lambda2);
        }
        for m in [i.checked_sub(1), Some(i + 1)].into_iter().flatten() {
            h.add_offset(2.0 * penalties.lambda2);
            h.add_scaled(&dist2(m, j), -penalties.lambda2);
        }
        components.push(Component {
            role: ComponentRole::Interaction,
            poly: h.product(&PolynomialObjective::variable(n, q.var)),
            lower_bound: None,
            eliminable: Some(q.var),
        });
    }

    Ok(EncodedModel::assemble(
        ModelKind::TurnTetrahedral,
        seq.clone(),
        interaction.clone(),
        PenaltySet::TurnTetrahedral(*penalties),
        n,
        Layout::Turn(TurnLayout { turns, slack: Vec::new(), interaction: qubits }),
        components,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_chains_have_no_interaction_qubits() {
        let hp = InteractionModel::hp(-1.0).unwrap();
        let m = encode_turn_tetrahedral(&PeptideSequence::new("HPH").unwrap(), &hp, &Default::default()).unwrap();
        assert!(m.interaction_qubits().is_empty());
        assert_eq!(m.num_vars(), 0);
    }

    #[test]
    fn degree_three_and_layout() {
        let mj = InteractionModel::miyazawa_jernigan();
        let seq = PeptideSequence::new("LKKKKLKKKKL").unwrap();
        let m = encode_turn_tetrahedral(&seq, &mj, &Default::default()).unwrap();
        assert_eq!(m.objective.degree(), 3);
        // turn 2 has 3 free bits, turns 3..9 have 4 each
        let pairs = (0..11).flat_map(|i| (i + 5..11).step_by(2).map(move |j| (i, j))).count();
        assert_eq!(m.num_vars(), 3 + 7 * 4 + pairs);
    }

    #[test]
    fn lambda1_bound() {
        let p = TurnTetrahedralPenalties::default();
        let eps = -0.737;
        assert!(p.lambda1(0, 5, eps) > 4.0 * 4.0 * p.lambda2 + eps.abs());
    }
}
