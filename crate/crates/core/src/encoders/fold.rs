use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::turn_cartesian::direction_of;
use super::{CoordLayout, EncodedModel, InteractionModel, Layout, ModelKind, PeptideSequence, TurnLayout};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, Site};
use crate::objective::Assignment;

/// Bead positions with validity flags. Positions are `None` only for beads a
/// coordinate encoding placed nowhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub lattice: LatticeKind,
    pub positions: Vec<Option<Site>>,
    pub self_avoiding: bool,
    pub connected: bool,
    /// All encoding constraints hold.
    pub decode_feasible: bool,
    /// Human-readable constraint violations, 1-based bead and turn numbers.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldReport {
    pub self_avoiding: bool,
    pub connected: bool,
    pub physical: bool,
}

impl Fold {
    /// A fold given directly by its sites, with no encoding behind it.
    pub fn from_sites(lattice: LatticeKind, sites: Vec<Site>) -> Fold {
        let mut f = Fold {
            lattice,
            positions: sites.into_iter().map(Some).collect(),
            self_avoiding: false,
            connected: false,
            decode_feasible: true,
            violations: Vec::new(),
        };
        f.refresh_flags();
        f
    }

    fn refresh_flags(&mut self) {
        let r = validate_fold(self);
        self.self_avoiding = r.self_avoiding;
        self.connected = r.connected;
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn sites(&self) -> Option<Vec<Site>> {
        self.positions.iter().copied().collect()
    }

    pub fn is_physical(&self) -> bool {
        self.self_avoiding && self.connected
    }
}

pub fn validate_fold(f: &Fold) -> FoldReport {
    let Some(sites) = f.sites() else {
        return FoldReport { self_avoiding: false, connected: false, physical: false };
    };
    let mut seen = std::collections::HashSet::new();
    let self_avoiding = sites.iter().all(|s| seen.insert(*s));
    let connected = sites.windows(2).all(|w| w[0].is_adjacent(&w[1]));
    FoldReport { self_avoiding, connected, physical: self_avoiding && connected }
}

/// Σ ε_ij over lattice-adjacent bead pairs with |i − j| > 1.
pub fn geometric_energy(f: &Fold, seq: &PeptideSequence, interaction: &InteractionModel) -> Result<f64> {
    if f.len() != seq.len() {
        return Err(Error::input("fold and sequence lengths differ"));
    }
    if !validate_fold(f).physical {
        return Err(Error::Domain("geometric energy needs a physical fold".into()));
    }
    let sites = f.sites().unwrap();
    Ok(contact_energy(&sites, seq, interaction))
}

pub(crate) fn contact_energy(sites: &[Site], seq: &PeptideSequence, interaction: &InteractionModel) -> f64 {
    let mut e = 0.0;
    for i in 0..sites.len() {
        for j in i + 2..sites.len() {
            if sites[i].is_adjacent(&sites[j]) {
                e += interaction.pair(seq, i, j);
            }
        }
    }
    e
}

/// Reads a Boolean assignment of the model's variables as a fold.
pub fn decode(model: &EncodedModel, a: &Assignment) -> Result<Fold> {
    decode_layout(model.kind, &model.layout, model.num_vars(), a)
}

/// Decoding from a layout record alone.
pub fn decode_layout(kind: ModelKind, layout: &Layout, num_vars: usize, a: &Assignment) -> Result<Fold> {
    if a.len() != num_vars {
        return Err(Error::input(format!("assignment has {} values, model has {num_vars} variables", a.len())));
    }
    let bits = a.to_bits();
    match (kind, layout) {
        (ModelKind::TurnCartesian, Layout::Turn(t)) => Ok(decode_turn_cartesian(t, &bits)),
        (ModelKind::TurnTetrahedral, Layout::Turn(t)) => Ok(decode_turn_tetrahedral(t, &bits)),
        (ModelKind::CoordCartesian | ModelKind::CoordTetrahedral, Layout::Coordinate(c)) => Ok(decode_coordinate(c, &bits)),
        _ => Err(Error::input(format!("layout does not match model {kind}"))),
    }
}

fn finish(lattice: LatticeKind, positions: Vec<Option<Site>>, violations: Vec<String>) -> Fold {
    let mut f = Fold {
        lattice,
        positions,
        self_avoiding: false,
        connected: false,
        decode_feasible: violations.is_empty(),
        violations,
    };
    f.refresh_flags();
    f
}

fn check_qubits(t: &TurnLayout, bits: &[u8], contact: impl Fn(usize, usize) -> bool, violations: &mut Vec<String>) {
    for q in &t.interaction {
        let (i, j) = q.beads;
        match (bits[q.var] == 1, contact(i, j)) {
            (true, false) => violations.push(format!("interaction qubit of beads {} and {} set without contact", i + 1, j + 1)),
            (false, true) => violations.push(format!("contact of beads {} and {} without interaction qubit", i + 1, j + 1)),
            _ => {}
        }
    }
}

fn decode_turn_cartesian(t: &TurnLayout, bits: &[u8]) -> Fold {
    let mut violations = Vec::new();
    let mut dirs = Vec::with_capacity(t.turns.len());
    for (k, turn) in t.turns.iter().enumerate() {
        let code = [turn[0].value(bits), turn[1].value(bits), turn[2].value(bits)];
        let d = direction_of(code);
        if d.is_none() {
            violations.push(format!("turn {} encodes no direction", k + 1));
        }
        dirs.push(d);
    }
    for k in 1..dirs.len() {
        if let (Some(a), Some(b)) = (dirs[k - 1], dirs[k]) {
            if (0..3).all(|x| a[x] == -b[x]) {
                violations.push(format!("turns {} and {} fold back", k, k + 1));
            }
        }
    }
    let mut coords = vec![[0i32; 3]];
    for d in &dirs {
        let mut c = *coords.last().unwrap();
        if let Some(d) = d {
            for x in 0..3 {
                c[x] += d[x];
            }
        }
        coords.push(c);
    }
    let dist2 = |i: usize, j: usize| -> i64 { (0..3).map(|x| ((coords[j][x] - coords[i][x]) as i64).pow(2)).sum() };
    for s in &t.slack {
        let (i, j) = s.beads;
        let alpha: i64 = s.vars.iter().enumerate().map(|(l, &v)| (bits[v] as i64) << l).sum();
        let d = dist2(i, j);
        if d == 0 {
            violations.push(format!("beads {} and {} overlap", i + 1, j + 1));
        } else if (1i64 << s.vars.len()) - d - alpha != 0 {
            violations.push(format!("slack of beads {} and {} does not match their distance", i + 1, j + 1));
        }
    }
    check_qubits(t, bits, |i, j| dist2(i, j) == 1, &mut violations);
    let positions = coords.into_iter().map(|c| Some(Site::cartesian(c))).collect();
    finish(LatticeKind::Cartesian3D, positions, violations)
}

fn decode_turn_tetrahedral(t: &TurnLayout, bits: &[u8]) -> Fold {
    let mut violations = Vec::new();
    let mut axes = Vec::with_capacity(t.turns.len());
    for (k, turn) in t.turns.iter().enumerate() {
        let set: Vec<usize> = (0..4).filter(|&a| turn[a].value(bits) == 1).collect();
        if set.len() != 1 {
            violations.push(format!("turn {} has {} active directions", k + 1, set.len()));
        }
        axes.push(set.first().copied().unwrap_or(0));
    }
    for k in 1..axes.len() {
        if axes[k] == axes[k - 1] {
            violations.push(format!("turns {} and {} fold back", k, k + 1));
        }
    }
    // Z⁴ step counts per bead
    let mut counts = vec![[0i64; 4]];
    for (k, &a) in axes.iter().enumerate() {
        let mut c = *counts.last().unwrap();
        c[a] += if k % 2 == 0 { 1 } else { -1 };
        counts.push(c);
    }
    let dist2 = |i: usize, j: usize| -> i64 { (0..4).map(|a| (counts[j][a] - counts[i][a]).pow(2)).sum() };
    let beads = counts.len();
    // a contact only counts when no chain neighbour sits on either bead
    let crowded = |i: usize, j: usize| {
        [j.checked_sub(1), Some(j + 1)].into_iter().flatten().filter(|&r| r < beads).any(|r| dist2(i, r) == 0)
            || [i.checked_sub(1), Some(i + 1)].into_iter().flatten().any(|m| dist2(m, j) == 0)
    };
    for q in &t.interaction {
        let (i, j) = q.beads;
        if bits[q.var] == 1 && crowded(i, j) {
            violations.push(format!("contact of beads {} and {} overlaps a chain neighbour", i + 1, j + 1));
        }
    }
    check_qubits(t, bits, |i, j| dist2(i, j) == 1 && !crowded(i, j), &mut violations);
    let mut site = Site::a([0, 0, 0]);
    let mut positions = vec![Some(site)];
    for &a in &axes {
        site = site.tetrahedral_step(a);
        positions.push(Some(site));
    }
    finish(LatticeKind::Tetrahedral, positions, violations)
}

fn decode_coordinate(c: &CoordLayout, bits: &[u8]) -> Fold {
    let mut violations = Vec::new();
    let mut positions = Vec::with_capacity(c.blocks.len());
    let mut class_cache: HashMap<_, Vec<Site>> = HashMap::new();
    for b in &c.blocks {
        let sites = class_cache.entry(b.sublattice).or_insert_with(|| c.lattice.class_sites(b.sublattice));
        let on: Vec<usize> = (0..b.len).filter(|&s| bits[b.first_var + s] == 1).collect();
        if on.len() != 1 {
            violations.push(format!("bead {} placed on {} sites", b.bead + 1, on.len()));
        }
        positions.push(on.first().map(|&s| sites[s]));
    }
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i].is_some() && positions[i] == positions[j] {
                violations.push(format!("beads {} and {} share a site", i + 1, j + 1));
            }
        }
    }
    for i in 1..positions.len() {
        if let (Some(a), Some(b)) = (positions[i - 1], positions[i]) {
            if !a.is_adjacent(&b) {
                violations.push(format!("beads {} and {} are not adjacent", i, i + 1));
            }
        }
    }
    finish(c.lattice.kind, positions, violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(n: i32) -> Fold {
        Fold::from_sites(LatticeKind::Cartesian3D, (0..n).map(|i| Site::cartesian([i, 0, 0])).collect())
    }

    #[test]
    fn straight_chain_is_physical_with_zero_energy() {
        let f = straight(4);
        assert!(validate_fold(&f).physical);
        let seq = PeptideSequence::new("HHHH").unwrap();
        let hp = InteractionModel::hp(-1.0).unwrap();
        assert_eq!(geometric_energy(&f, &seq, &hp).unwrap(), 0.0);
    }

    #[test]
    fn u_shape_has_one_contact() {
        let sites = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]].map(Site::cartesian).to_vec();
        let f = Fold::from_sites(LatticeKind::Cartesian3D, sites);
        let seq = PeptideSequence::new("HHHH").unwrap();
        let hp = InteractionModel::hp(-1.0).unwrap();
        assert_eq!(geometric_energy(&f, &seq, &hp).unwrap(), -1.0);
    }

    #[test]
    fn broken_chain_and_overlap() {
        let sites = [[0, 0, 0], [2, 0, 0]].map(Site::cartesian).to_vec();
        assert!(!validate_fold(&Fold::from_sites(LatticeKind::Cartesian3D, sites)).connected);
        let sites = [[0, 0, 0], [1, 0, 0], [0, 0, 0]].map(Site::cartesian).to_vec();
        let f = Fold::from_sites(LatticeKind::Cartesian3D, sites);
        assert!(!f.self_avoiding);
        let seq = PeptideSequence::new("HHH").unwrap();
        assert!(geometric_energy(&f, &seq, &InteractionModel::hp(-1.0).unwrap()).is_err());
    }
}
