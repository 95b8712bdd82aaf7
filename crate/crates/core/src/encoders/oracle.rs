//! Exhaustive self-avoiding-walk enumeration: exact contact-energy minima
//! that never touch an encoding.

use std::collections::HashSet;

use super::fold::contact_energy;
use super::{InteractionModel, PeptideSequence};
use crate::lattice::{LatticeKind, LatticeSpec, Site};

/// Calls `visit` for every self-avoiding walk of `n` beads inside `spec`,
/// with bead 0 on the even/A class.
pub fn for_each_walk_in_grid(spec: &LatticeSpec, n: usize, mut visit: impl FnMut(&[Site])) {
    let start_class = spec.classes()[0];
    for start in spec.class_sites(start_class) {
        let mut path = vec![start];
        let mut used: HashSet<Site> = [start].into_iter().collect();
        extend(n, &mut path, &mut used, &|s: &Site| spec.contains(s), &mut visit);
    }
}

/// Calls `visit` for every self-avoiding walk of `n` beads from the origin on
/// the unbounded lattice whose first step is fixed (+x, or tetrahedral axis 3).
pub fn for_each_walk_unbounded(kind: LatticeKind, n: usize, mut visit: impl FnMut(&[Site])) {
    let origin = match kind {
        LatticeKind::Cartesian3D => Site::cartesian([0, 0, 0]),
        LatticeKind::Tetrahedral => Site::a([0, 0, 0]),
    };
    if n == 1 {
        visit(&[origin]);
        return;
    }
    let first = match kind {
        LatticeKind::Cartesian3D => Site::cartesian([1, 0, 0]),
        LatticeKind::Tetrahedral => origin.tetrahedral_step(3),
    };
    let mut path = vec![origin, first];
    let mut used: HashSet<Site> = path.iter().copied().collect();
    extend(n, &mut path, &mut used, &|_: &Site| true, &mut visit);
}

fn extend(
    n: usize,
    path: &mut Vec<Site>,
    used: &mut HashSet<Site>,
    inside: &dyn Fn(&Site) -> bool,
    visit: &mut dyn FnMut(&[Site]),
) {
    if path.len() == n {
        visit(path);
        return;
    }
    let last = *path.last().unwrap();
    for next in last.lattice_neighbors() {
        if inside(&next) && !used.contains(&next) {
            used.insert(next);
            path.push(next);
            extend(n, path, used, inside, visit);
            path.pop();
            used.remove(&next);
        }
    }
}

/// Minimum contact energy and one fold attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub energy: f64,
    pub fold: Vec<Site>,
    pub walks: usize,
}

fn best_of(walker: impl FnOnce(&mut dyn FnMut(&[Site])), seq: &PeptideSequence, inter: &InteractionModel) -> Option<GroundTruth> {
    let mut best: Option<GroundTruth> = None;
    let mut walks = 0;
    walker(&mut |w: &[Site]| {
        walks += 1;
        let e = contact_energy(w, seq, inter);
        if best.as_ref().is_none_or(|b| e < b.energy - 1e-12) {
            best = Some(GroundTruth { energy: e, fold: w.to_vec(), walks: 0 });
        }
    });
    best.map(|mut b| {
        b.walks = walks;
        b
    })
}

/// Exact ground state over all folds that fit the grid; `None` if none fits.
pub fn ground_state_in_grid(spec: &LatticeSpec, seq: &PeptideSequence, inter: &InteractionModel) -> Option<GroundTruth> {
    best_of(|f| for_each_walk_in_grid(spec, seq.len(), f), seq, inter)
}

/// Exact ground state on the unbounded lattice.
pub fn ground_state_unbounded(kind: LatticeKind, seq: &PeptideSequence, inter: &InteractionModel) -> GroundTruth {
    best_of(|f| for_each_walk_unbounded(kind, seq.len(), f), seq, inter).expect("at least one walk exists")
}
