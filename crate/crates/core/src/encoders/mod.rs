//! The four lattice-protein encodings, decoding of bitstrings into folds,
//! and a geometric energy oracle independent of any encoding.

mod coordinate;
mod fold;
mod interaction;
pub mod oracle;
mod sequence;
mod turn_cartesian;
mod turn_tetrahedral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use coordinate::{encode_coord_cartesian, encode_coord_tetrahedral, CoordinatePenalties};
pub use fold::{decode, decode_layout, geometric_energy, validate_fold, Fold, FoldReport};
pub use interaction::{InteractionKind, InteractionModel, MJ_SCALE};
pub use sequence::{PeptideSequence, AMINO_ACIDS};
pub use turn_cartesian::{encode_turn_cartesian, slack_bits, TurnCartesianPenalties, CART_DIRECTIONS};
pub use turn_tetrahedral::{encode_turn_tetrahedral, GlobalScaling, TurnTetrahedralPenalties};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec, Sublattice};
use crate::objective::PolynomialObjective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "turn-cart")]
    TurnCartesian,
    #[serde(rename = "turn-tet")]
    TurnTetrahedral,
    #[serde(rename = "coord-cart")]
    CoordCartesian,
    #[serde(rename = "coord-tet")]
    CoordTetrahedral,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::TurnCartesian,
        ModelKind::TurnTetrahedral,
        ModelKind::CoordCartesian,
        ModelKind::CoordTetrahedral,
    ];

    pub fn lattice(self) -> LatticeKind {
        match self {
            ModelKind::TurnCartesian | ModelKind::CoordCartesian => LatticeKind::Cartesian3D,
            ModelKind::TurnTetrahedral | ModelKind::CoordTetrahedral => LatticeKind::Tetrahedral,
        }
    }

    pub fn is_turn_based(self) -> bool {
        matches!(self, ModelKind::TurnCartesian | ModelKind::TurnTetrahedral)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TurnCartesian => "turn-cart",
            ModelKind::TurnTetrahedral => "turn-tet",
            ModelKind::CoordCartesian => "coord-cart",
            ModelKind::CoordTetrahedral => "coord-tet",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::input(format!("unknown model {s:?}; expected turn-cart, turn-tet, coord-cart or coord-tet")))
    }
}

/// A layout bit: either a free variable or a value fixed by symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bit {
    Fixed(u8),
    Var(usize),
}

impl Bit {
    pub fn value(self, bits: &[u8]) -> u8 {
        match self {
            Bit::Fixed(v) => v,
            Bit::Var(i) => bits[i],
        }
    }

    pub fn poly(self, num_vars: usize) -> PolynomialObjective {
        match self {
            Bit::Fixed(v) => PolynomialObjective::constant(num_vars, v as f64),
            Bit::Var(i) => PolynomialObjective::variable(num_vars, i),
        }
    }

    pub fn var(self) -> Option<usize> {
        match self {
            Bit::Var(i) => Some(i),
            Bit::Fixed(_) => None,
        }
    }
}

/// Slack bits of the overlap constraint between two beads (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackBlock {
    pub beads: (usize, usize),
    pub vars: Vec<usize>,
}

/// Interaction qubit gating the contact energy of two beads (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairQubit {
    pub beads: (usize, usize),
    pub var: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnLayout {
    /// One entry per turn; turn `t` joins beads `t` and `t + 1`.
    pub turns: Vec<Vec<Bit>>,
    pub slack: Vec<SlackBlock>,
    pub interaction: Vec<PairQubit>,
}

/// Block of one-hot site indicators for a bead; site order follows
/// [`LatticeSpec::class_sites`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeadBlock {
    pub bead: usize,
    pub sublattice: Sublattice,
    pub first_var: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordLayout {
    pub lattice: LatticeSpec,
    pub blocks: Vec<BeadBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "snake_case")]
pub enum Layout {
    Turn(TurnLayout),
    Coordinate(CoordLayout),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PenaltySet {
    TurnCartesian(TurnCartesianPenalties),
    TurnTetrahedral(TurnTetrahedralPenalties),
    Coordinate { penalties: CoordinatePenalties, efficient_h3: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentRole {
    /// Vanishes on feasible assignments and is never negative.
    Penalty,
    /// Carries contact energy, possibly mixed with constraint terms.
    Interaction,
}

/// One additive piece of the objective, kept for exact search bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub role: ComponentRole,
    pub poly: PolynomialObjective,
    /// A proven lower bound over all assignments, when known.
    pub lower_bound: Option<f64>,
    /// A variable that only appears linearly in this component and nowhere else.
    pub eliminable: Option<usize>,
}

/// Branching structure handed to the exact solver.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchHint {
    /// Variable blocks in branching order.
    pub blocks: Vec<Vec<usize>>,
    /// Variables minimized analytically instead of enumerated.
    pub eliminate: Vec<usize>,
}

/// An objective plus everything needed to read its bitstrings as folds.
#[derive(Debug, Clone)]
pub struct EncodedModel {
    pub kind: ModelKind,
    pub sequence: PeptideSequence,
    pub interaction: InteractionModel,
    pub penalties: PenaltySet,
    pub objective: PolynomialObjective,
    pub layout: Layout,
    pub components: Vec<Component>,
}

impl EncodedModel {
    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    pub fn lattice(&self) -> Option<LatticeSpec> {
        match &self.layout {
            Layout::Coordinate(c) => Some(c.lattice),
            Layout::Turn(_) => None,
        }
    }

    /// Constant separating objective energy from contact energy on feasible
    /// assignments. Every encoding here is built so that it is zero.
    pub fn energy_shift(&self) -> f64 {
        0.0
    }

    pub fn interaction_qubits(&self) -> &[PairQubit] {
        match &self.layout {
            Layout::Turn(t) => &t.interaction,
            Layout::Coordinate(_) => &[],
        }
    }

    pub fn search_hint(&self) -> SearchHint {
        let eliminate: Vec<usize> = self.components.iter().filter_map(|c| c.eliminable).collect();
        let blocks = match &self.layout {
            Layout::Turn(t) => {
                let mut blocks = Vec::new();
                for (turn, bits) in t.turns.iter().enumerate() {
                    let vars: Vec<usize> = bits.iter().filter_map(|b| b.var()).collect();
                    if !vars.is_empty() {
                        blocks.push(vars);
                    }
                    // slack bits right after the last turn they depend on
                    for s in t.slack.iter().filter(|s| s.beads.1 == turn + 1) {
                        blocks.push(s.vars.clone());
                    }
                }
                let claimed: std::collections::BTreeSet<usize> =
                    blocks.iter().flatten().chain(eliminate.iter()).copied().collect();
                let rest: Vec<usize> = (0..self.num_vars()).filter(|v| !claimed.contains(v)).collect();
                if !rest.is_empty() {
                    blocks.push(rest);
                }
                blocks
            }
            Layout::Coordinate(c) => c.blocks.iter().map(|b| (b.first_var..b.first_var + b.len).collect()).collect(),
        };
        SearchHint { blocks, eliminate }
    }

    /// Sum of penalty components, zero exactly on feasible assignments of coordinate models.
    pub fn penalty_energy(&self, bits: &[u8]) -> f64 {
        self.components
            .iter()
            .filter(|c| c.role == ComponentRole::Penalty)
            .map(|c| c.poly.evaluate_bits(bits))
            .sum()
    }

    fn assemble(
        kind: ModelKind,
        sequence: PeptideSequence,
        interaction: InteractionModel,
        penalties: PenaltySet,
        num_vars: usize,
        layout: Layout,
        mut components: Vec<Component>,
    ) -> EncodedModel {
        let mut objective = PolynomialObjective::new(num_vars);
        for c in &mut components {
            c.poly.set_num_vars(num_vars).expect("component fits the layout");
            objective.add_scaled(&c.poly, 1.0);
        }
        EncodedModel { kind, sequence, interaction, penalties, objective, layout, components }
    }
}

/// Encodes with the default penalties of `kind`; `side` is only used by coordinate models
/// and defaults to the minimal grid.
pub fn encode_default(
    kind: ModelKind,
    seq: &PeptideSequence,
    interaction: &InteractionModel,
    side: Option<usize>,
) -> Result<EncodedModel> {
    let side = side.unwrap_or_else(|| crate::lattice::min_grid(kind.lattice(), seq.len()));
    match kind {
        ModelKind::TurnCartesian => encode_turn_cartesian(seq, interaction, &TurnCartesianPenalties::default()),
        ModelKind::TurnTetrahedral => encode_turn_tetrahedral(seq, interaction, &TurnTetrahedralPenalties::default()),
        ModelKind::CoordCartesian => {
            encode_coord_cartesian(seq, side, interaction, &CoordinatePenalties::default(), false)
        }
        ModelKind::CoordTetrahedral => {
            encode_coord_tetrahedral(seq, side, interaction, &CoordinatePenalties::default(), false)
        }
    }
}
