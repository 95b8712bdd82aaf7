//! Coordinate-based models: one indicator per (bead, site), beads split by parity class.

use serde::{Deserialize, Serialize};

use super::{
    BeadBlock, Component, ComponentRole, CoordLayout, EncodedModel, InteractionModel, Layout, ModelKind,
    PenaltySet, PeptideSequence,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Site, Sublattice};
use crate::objective::PolynomialObjective;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinatePenalties {
    /// Each bead on exactly one site.
    pub one_site: f64,
    /// No two beads on one site.
    pub overlap: f64,
    /// Consecutive beads adjacent.
    pub chain: f64,
}

impl Default for CoordinatePenalties {
    fn default() -> Self {
        CoordinatePenalties { one_site: 18.6, overlap: 14.4, chain: 18.6 }
    }
}

pub fn encode_coord_cartesian(
    seq: &PeptideSequence,
    side: usize,
    interaction: &InteractionModel,
    penalties: &CoordinatePenalties,
    efficient_h3: bool,
) -> Result<EncodedModel> {
    encode(ModelKind::CoordCartesian, seq, side, interaction, penalties, efficient_h3)
}

pub fn encode_coord_tetrahedral(
    seq: &PeptideSequence,
    side: usize,
    interaction: &InteractionModel,
    penalties: &CoordinatePenalties,
    efficient_h3: bool,
) -> Result<EncodedModel> {
    encode(ModelKind::CoordTetrahedral, seq, side, interaction, penalties, efficient_h3)
}

fn encode(
    kind: ModelKind,
    seq: &PeptideSequence,
    side: usize,
    interaction: &InteractionModel,
    penalties: &CoordinatePenalties,
    efficient_h3: bool,
) -> Result<EncodedModel> {
    interaction.check_sequence(seq)?;
    let beads = seq.len();
    let lattice_kind = kind.lattice();
    let cells = side.pow(3) * if lattice_kind == LatticeKind::Tetrahedral { 2 } else { 1 };
    if cells < beads {
        return Err(Error::input(format!("a grid of side {side} cannot hold {beads} beads")));
    }
    let lattice = LatticeSpec::new(lattice_kind, side)?;
    for (name, v) in [("one_site", penalties.one_site), ("overlap", penalties.overlap), ("chain", penalties.chain)] {
        if !(v > 0.0) {
            return Err(Error::input(format!("penalty {name} must be positive, got {v}")));
        }
    }

    let class_sites: Vec<Vec<Site>> = lattice.classes().iter().map(|&c| lattice.class_sites(c)).collect();
    let mut blocks = Vec::with_capacity(beads);
    let mut next = 0;
    for b in 0..beads {
        let sublattice = Sublattice::for_bead(lattice_kind, b);
        let len = class_sites[b % 2].len();
        blocks.push(BeadBlock { bead: b, sublattice, first_var: next, len });
        next += len;
    }
    let n = next;
    let var = |b: usize, s: usize| blocks[b].first_var + s;
    // adjacency between the two classes as index pairs (even-class site, odd-class site)
    let mut adjacent = Vec::new();
    for (s0, a) in class_sites[0].iter().enumerate() {
        for (s1, b) in class_sites[1].iter().enumerate() {
            if a.is_adjacent(b) {
                adjacent.push((s0, s1));
            }
        }
    }
    let is_adjacent = {
        let mut m = vec![vec![false; class_sites[1].len()]; class_sites[0].len()];
        for &(s0, s1) in &adjacent {
            m[s0][s1] = true;
        }
        m
    };
    // site indices of beads (b, b') oriented so the first lives on class 0
    let oriented = |b: usize, s: usize, s2: usize| if b % 2 == 0 { (s, s2) } else { (s2, s) };

    let mut components = Vec::new();
    let pen = |poly: PolynomialObjective| Component {
        role: ComponentRole::Penalty,
        poly,
        lower_bound: Some(0.0),
        eliminable: None,
    };
    for b in 0..beads {
        let mut s = PolynomialObjective::constant(n, -1.0);
        for site in 0..blocks[b].len {
            s.add_term(&[var(b, site)], 1.0);
        }
        components.push(pen(s.square().scaled(penalties.one_site)));
    }
    for b in 0..beads {
        for b2 in (b + 2..beads).step_by(2) {
            let mut p = PolynomialObjective::new(n);
            for site in 0..blocks[b].len {
                p.add_term(&[var(b, site), var(b2, site)], penalties.overlap);
            }
            components.push(pen(p));
        }
    }
    for b in 0..beads.saturating_sub(1) {
        let mut p = PolynomialObjective::new(n);
        if efficient_h3 {
            p.add_offset(penalties.chain);
            for &(s0, s1) in &adjacent {
                let (s, s2) = if b % 2 == 0 { (s0, s1) } else { (s1, s0) };
                p.add_term(&[var(b, s), var(b + 1, s2)], -penalties.chain);
            }
            components.push(Component {
                role: ComponentRole::Penalty,
                poly: p,
                lower_bound: None,
                eliminable: None,
            });
        } else {
            for s in 0..blocks[b].len {
                for s2 in 0..blocks[b + 1].len {
                    let (x, y) = oriented(b, s, s2);
                    if !is_adjacent[x][y] {
                        p.add_term(&[var(b, s), var(b + 1, s2)], penalties.chain);
                    }
                }
            }
            components.push(pen(p));
        }
    }
    for b in 0..beads {
        for b2 in (b + 3..beads).step_by(2) {
            let eps = interaction.pair(seq, b, b2);
            if eps == 0.0 {
                continue;
            }
            let mut p = PolynomialObjective::new(n);
            for &(s0, s1) in &adjacent {
                let (s, s2) = if b % 2 == 0 { (s0, s1) } else { (s1, s0) };
                p.add_term(&[var(b, s), var(b2, s2)], eps);
            }
            components.push(Component { role: ComponentRole::Interaction, poly: p, lower_bound: None, eliminable: None });
        }
    }

    Ok(EncodedModel::assemble(
        kind,
        seq.clone(),
        interaction.clone(),
        PenaltySet::Coordinate { penalties: *penalties, efficient_h3 },
        n,
        Layout::Coordinate(CoordLayout { lattice, blocks }),
        components,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_counts() {
        let hp = InteractionModel::hp(-1.0).unwrap();
        let seq = PeptideSequence::new("HPPPPHPPPH").unwrap();
        let m = encode_coord_cartesian(&seq, 4, &hp, &Default::default(), false).unwrap();
        assert_eq!(m.num_vars(), 320);
        let m = encode_coord_tetrahedral(&seq, 3, &hp, &Default::default(), false).unwrap();
        assert_eq!(m.num_vars(), 270);
        let seq = PeptideSequence::new("HPPPPHPPPPH").unwrap();
        let m = encode_coord_tetrahedral(&seq, 3, &hp, &Default::default(), false).unwrap();
        assert_eq!(m.num_vars(), 297);
        assert!(m.objective.is_quadratic());
    }

    #[test]
    fn grid_too_small() {
        let hp = InteractionModel::hp(-1.0).unwrap();
        let seq = PeptideSequence::new("HHHHHHHHH").unwrap();
        assert!(encode_coord_cartesian(&seq, 2, &hp, &Default::default(), false).is_err());
        assert!(encode_coord_cartesian(&seq, 1, &hp, &Default::default(), false).is_err());
    }
}
