//! Cubic and diamond (two interleaved FCC) lattices on symmetric open grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Cartesian3D,
    Tetrahedral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    #[serde(rename = "even")]
    Even,
    #[serde(rename = "odd")]
    Odd,
    A,
    B,
}

impl Sublattice {
    /// Class that hosts bead `index` (0-based): even beads go to the even/A class.
    pub fn for_bead(kind: LatticeKind, index: usize) -> Sublattice {
        match (kind, index % 2) {
            (LatticeKind::Cartesian3D, 0) => Sublattice::Even,
            (LatticeKind::Cartesian3D, _) => Sublattice::Odd,
            (LatticeKind::Tetrahedral, 0) => Sublattice::A,
            (LatticeKind::Tetrahedral, _) => Sublattice::B,
        }
    }

    pub fn kind(self) -> LatticeKind {
        match self {
            Sublattice::Even | Sublattice::Odd => LatticeKind::Cartesian3D,
            Sublattice::A | Sublattice::B => LatticeKind::Tetrahedral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub sublattice: Sublattice,
    pub coords: [i32; 3],
}

const A1: [f64; 3] = [0.0, 0.5, 0.5];
const A2: [f64; 3] = [0.5, 0.0, 0.5];
const A3: [f64; 3] = [0.5, 0.5, 0.0];
const B_SHIFT: [f64; 3] = [0.25, 0.25, 0.25];

impl Site {
    pub fn cartesian(coords: [i32; 3]) -> Site {
        let sublattice = if coords.iter().sum::<i32>().rem_euclid(2) == 0 {
            Sublattice::Even
        } else {
            Sublattice::Odd
        };
        Site { sublattice, coords }
    }

    pub fn a(coords: [i32; 3]) -> Site {
        Site { sublattice: Sublattice::A, coords }
    }

    pub fn b(coords: [i32; 3]) -> Site {
        Site { sublattice: Sublattice::B, coords }
    }

    pub fn kind(&self) -> LatticeKind {
        self.sublattice.kind()
    }

    /// Cartesian position in basis units.
    pub fn position(&self) -> [f64; 3] {
        let [i, j, k] = self.coords.map(f64::from);
        match self.sublattice {
            Sublattice::Even | Sublattice::Odd => [i, j, k],
            Sublattice::A | Sublattice::B => {
                let mut p = [0.0; 3];
                for d in 0..3 {
                    p[d] = i * A1[d] + j * A2[d] + k * A3[d];
                    if self.sublattice == Sublattice::B {
                        p[d] += B_SHIFT[d];
                    }
                }
                p
            }
        }
    }

    /// Nearest neighbours on the unbounded lattice.
    pub fn lattice_neighbors(&self) -> Vec<Site> {
        let [i, j, k] = self.coords;
        match self.sublattice {
            Sublattice::Even | Sublattice::Odd => {
                let mut out = Vec::with_capacity(6);
                for d in 0..3 {
                    for s in [-1, 1] {
                        let mut c = self.coords;
                        c[d] += s;
                        out.push(Site::cartesian(c));
                    }
                }
                out
            }
            Sublattice::A => (0..4).map(|axis| self.tetrahedral_step(axis)).collect(),
            Sublattice::B => vec![
                Site::a([i, j, k]),
                Site::a([i + 1, j, k]),
                Site::a([i, j + 1, k]),
                Site::a([i, j, k + 1]),
            ],
        }
    }

    /// Bond along tetrahedral axis `axis` (0..4). A sites step to
    /// B(i,j,k), B(i−1,j,k), B(i,j−1,k), B(i,j,k−1); B sites step back.
    pub fn tetrahedral_step(&self, axis: usize) -> Site {
        assert!(axis < 4, "tetrahedral axis out of range");
        let mut c = self.coords;
        match self.sublattice {
            Sublattice::A => {
                if axis > 0 {
                    c[axis - 1] -= 1;
                }
                Site::b(c)
            }
            Sublattice::B => {
                if axis > 0 {
                    c[axis - 1] += 1;
                }
                Site::a(c)
            }
            _ => panic!("tetrahedral step from a cubic site"),
        }
    }

    pub fn is_adjacent(&self, other: &Site) -> bool {
        if self.kind() != other.kind() || self.sublattice == other.sublattice {
            return false;
        }
        match self.kind() {
            LatticeKind::Cartesian3D => {
                let d: i32 = (0..3).map(|x| (self.coords[x] - other.coords[x]).abs()).sum();
                d == 1
            }
            LatticeKind::Tetrahedral => {
                let (a, b) = if self.sublattice == Sublattice::A { (self, other) } else { (other, self) };
                let diff: Vec<i32> = (0..3).map(|x| a.coords[x] - b.coords[x]).collect();
                let ones = diff.iter().filter(|&&d| d == 1).count();
                let zeros = diff.iter().filter(|&&d| d == 0).count();
                zeros == 3 || (zeros == 2 && ones == 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub side: usize,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::input(format!("grid side must be at least 2, got {side}")));
        }
        Ok(LatticeSpec { kind, side })
    }

    pub fn num_sites(&self) -> usize {
        let cube = self.side.pow(3);
        match self.kind {
            LatticeKind::Cartesian3D => cube,
            LatticeKind::Tetrahedral => 2 * cube,
        }
    }

    pub fn contains(&self, s: &Site) -> bool {
        s.kind() == self.kind && s.coords.iter().all(|&c| c >= 0 && (c as usize) < self.side)
    }

    /// Sites of one parity class or sublattice, lexicographic in (i, j, k).
    pub fn class_sites(&self, class: Sublattice) -> Vec<Site> {
        assert_eq!(class.kind(), self.kind, "sublattice does not belong to this lattice");
        let l = self.side as i32;
        let mut out = Vec::new();
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    let s = match class {
                        Sublattice::Even | Sublattice::Odd => Site::cartesian([i, j, k]),
                        Sublattice::A => Site::a([i, j, k]),
                        Sublattice::B => Site::b([i, j, k]),
                    };
                    if s.sublattice == class {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    pub fn classes(&self) -> [Sublattice; 2] {
        match self.kind {
            LatticeKind::Cartesian3D => [Sublattice::Even, Sublattice::Odd],
            LatticeKind::Tetrahedral => [Sublattice::A, Sublattice::B],
        }
    }
}

/// All sites, first class then second, each lexicographic.
pub fn sites(spec: &LatticeSpec) -> Result<Vec<Site>> {
    if spec.side < 2 {
        return Err(Error::input(format!("grid side must be at least 2, got {}", spec.side)));
    }
    let [c0, c1] = spec.classes();
    let mut out = spec.class_sites(c0);
    out.extend(spec.class_sites(c1));
    Ok(out)
}

/// In-grid nearest neighbours of `s`.
pub fn neighbors(spec: &LatticeSpec, s: &Site) -> Result<Vec<Site>> {
    if !spec.contains(s) {
        return Err(Error::input(format!("site {:?} lies outside the grid", s)));
    }
    Ok(s.lattice_neighbors().into_iter().filter(|n| spec.contains(n)).collect())
}

/// Recommended grid side for a chain of `n` beads.
pub fn min_grid(kind: LatticeKind, n: usize) -> usize {
    let per_class = |c: usize| match kind {
        LatticeKind::Cartesian3D => c * c * c,
        LatticeKind::Tetrahedral => 2 * c * c * c,
    };
    let mut c = 1;
    while per_class(c) < n {
        c += 1;
    }
    c + 1
}
