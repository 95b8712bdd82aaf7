//! Stage functions over problem files: what the command-line tool runs.

use serde::{Deserialize, Serialize};

use crate::embedding::{apply_embedding, unembed, ChainStrength, CouplerPlacement, EmbeddingMap, HardwareGraph};
use crate::encoders::{
    decode_layout, encode_coord_cartesian, encode_coord_tetrahedral, encode_turn_cartesian, encode_turn_tetrahedral,
    geometric_energy, EncodedModel, Fold, Layout, ModelKind, PenaltySet,
};
use crate::error::{Error, Result};
use crate::io::{EmbeddingInfo, ModelInfo, ProblemFile, ProblemSpace};
use crate::objective::{ising_to_qubo, qubo_to_ising, Assignment, PolynomialObjective, QuadraticObjective};
use crate::reduction::{quadratize, verify_quadratization, AlphaPolicy, VerificationReport};
use crate::solvers::rng::{self, Rng};
use crate::solvers::exact::{brute_force_with, solve_exact, ExactConfig, ExactResult};
use crate::solvers::{Sample, SampleSet};

/// Default variable budget for exhaustive quadratization checks.
pub const VERIFY_BUDGET: usize = 20;

/// Quadratizes and verifies; verification failure is an error.
pub fn reduce_problem(pf: &ProblemFile, policy: AlphaPolicy, budget: usize) -> Result<(ProblemFile, VerificationReport)> {
    let hubo = pf.objective()?;
    let r = quadratize(&hubo, policy)?;
    let report = verify_quadratization(&hubo, &r, budget)?;
    if !report.passed {
        return Err(Error::Verification(format!(
            "quadratization with alpha {} breaks the energy landscape (max discrepancy {:e}, min gap {:e})",
            r.alpha, report.max_discrepancy, report.min_inconsistency_gap
        )));
    }
    let mut out = ProblemFile::from_objective(r.qubo.as_polynomial());
    out.model = pf.model.clone();
    out.aux_map = pf.aux_map.iter().copied().chain(r.aux_map.iter().copied()).collect();
    out.alpha = if r.aux_map.is_empty() { pf.alpha } else { Some(r.alpha) };
    Ok((out, report))
}

/// Rebuilds the encoded model a problem file was written from.
pub fn reencode(info: &ModelInfo) -> Result<EncodedModel> {
    let (seq, inter) = (&info.sequence, &info.interaction);
    match (info.kind, &info.penalties, &info.layout) {
        (ModelKind::TurnCartesian, PenaltySet::TurnCartesian(p), _) => encode_turn_cartesian(seq, inter, p),
        (ModelKind::TurnTetrahedral, PenaltySet::TurnTetrahedral(p), _) => encode_turn_tetrahedral(seq, inter, p),
        (ModelKind::CoordCartesian, PenaltySet::Coordinate { penalties, efficient_h3 }, Layout::Coordinate(c)) => {
            encode_coord_cartesian(seq, c.lattice.side, inter, penalties, *efficient_h3)
        }
        (ModelKind::CoordTetrahedral, PenaltySet::Coordinate { penalties, efficient_h3 }, Layout::Coordinate(c)) => {
            encode_coord_tetrahedral(seq, c.lattice.side, inter, penalties, *efficient_h3)
        }
        _ => Err(Error::input("model record in the problem file is inconsistent")),
    }
}

/// Exact minimizers of a problem file. Unreduced model files get the
/// structured search; anything else is enumerated.
pub fn exact_problem(pf: &ProblemFile, cfg: &ExactConfig) -> Result<ExactResult> {
    let obj = sampling_objective(pf)?;
    if let (Some(info), true, None) = (&pf.model, pf.aux_map.is_empty(), &pf.embedding) {
        let m = reencode(info)?;
        if m.objective == obj {
            return solve_exact(&m, cfg);
        }
    }
    brute_force_with(&obj, cfg)
}

/// The objective a sampler works on: Boolean problems as they are, spin
/// problems through `s = 2b − 1`.
pub fn sampling_objective(pf: &ProblemFile) -> Result<PolynomialObjective> {
    match pf.space {
        ProblemSpace::Boolean => pf.objective(),
        ProblemSpace::Ising => Ok(ising_to_qubo(&pf.ising()?).into_polynomial()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedSample {
    pub replica: usize,
    pub sweep: usize,
    pub energy: f64,
    pub bitstring: String,
    pub fold: Fold,
    pub physical: bool,
    /// Contact energy of the fold; absent for unphysical folds.
    pub geometric_energy: Option<f64>,
}

pub fn decode_samples(pf: &ProblemFile, samples: &SampleSet) -> Result<Vec<DecodedSample>> {
    if pf.embedding.is_some() {
        return Err(Error::input("samples of an embedded problem must be unembedded before decoding"));
    }
    let info = pf.model.as_ref().ok_or_else(|| Error::input("problem file carries no model layout"))?;
    let mut out = Vec::with_capacity(samples.len());
    for s in &samples.samples {
        if s.bits.len() != pf.num_vars {
            return Err(Error::input(format!("sample has {} bits, problem has {} variables", s.bits.len(), pf.num_vars)));
        }
        let a = Assignment::boolean(s.bits[..info.model_vars].iter().copied());
        let fold = decode_layout(info.kind, &info.layout, info.model_vars, &a)?;
        let physical = fold.is_physical();
        let geometric_energy = if physical { Some(geometric_energy(&fold, &info.sequence, &info.interaction)?) } else { None };
        out.push(DecodedSample {
            replica: s.replica,
            sweep: s.sweep,
            energy: s.energy,
            bitstring: s.bitstring(),
            fold,
            physical,
            geometric_energy,
        });
    }
    Ok(out)
}

pub fn embed_problem(
    pf: &ProblemFile,
    emb: &EmbeddingMap,
    hw: &HardwareGraph,
    strength: ChainStrength,
    placement: CouplerPlacement,
) -> Result<ProblemFile> {
    let ising = match pf.space {
        ProblemSpace::Boolean => qubo_to_ising(&QuadraticObjective::try_from(pf.objective()?)?),
        ProblemSpace::Ising => pf.ising()?,
    };
    let e = apply_embedding(&ising, emb, hw, strength, placement)?;
    let mut out = ProblemFile::from_ising(&e.ising);
    out.embedding =
        Some(EmbeddingInfo { nodes: e.nodes, chain_strength: e.chain_strength, chain_edges: e.chain_edges, logical_vars: ising.num_vars() });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnembeddedSample {
    pub sample: Sample,
    pub chain_break_fraction: f64,
}

/// Majority-vote unembedding; energies are re-evaluated on `logical`.
pub fn unembed_samples(
    samples: &SampleSet,
    embedded: &ProblemFile,
    emb: &EmbeddingMap,
    logical: &ProblemFile,
    seed: u64,
) -> Result<Vec<UnembeddedSample>> {
    let info = embedded.embedding.as_ref().ok_or_else(|| Error::input("problem file is not an embedded problem"))?;
    let obj = sampling_objective(logical)?;
    if obj.num_vars() != info.logical_vars {
        return Err(Error::input("logical problem does not match the embedding"));
    }
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.samples.iter().enumerate() {
        let spins: Vec<i8> = s.bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect();
        let u = unembed(&spins, &info.nodes, emb, seed, k as u64)?;
        let mut bits: Vec<u8> = u.spins.iter().map(|&x| (x > 0) as u8).collect();
        bits.resize(info.logical_vars, 0);
        let energy = obj.evaluate_bits(&bits);
        out.push(UnembeddedSample {
            sample: Sample { bits, energy, replica: s.replica, sweep: s.sweep },
            chain_break_fraction: u.chain_break_fraction,
        });
    }
    Ok(out)
}

pub fn unembedded_csv(rows: &[UnembeddedSample]) -> String {
    let mut out = String::from("replica,sweep,energy,bitstring,chain_break_fraction\n");
    for r in rows {
        let s = &r.sample;
        out.push_str(&format!("{},{},{},{},{}\n", s.replica, s.sweep, s.energy, s.bitstring(), r.chain_break_fraction));
    }
    out
}

/// Uniform random sequences over the 20 residues, plus their prefixes of
/// length 4..=len. Rows: (instance, N, sequence).
pub fn gen_dataset(count: usize, len: usize, seed: u64) -> Result<Vec<(usize, usize, String)>> {
    if len < 4 {
        return Err(Error::input("dataset sequences need at least 4 residues"));
    }
    let letters: Vec<char> = crate::encoders::AMINO_ACIDS.chars().collect();
    let mut rows = Vec::new();
    for id in 0..count {
        let mut r = rng::stream(seed, "dataset", id as u64);
        let full: String = (0..len).map(|_| letters[r.gen_range(0..letters.len())]).collect();
        for n in 4..=len {
            rows.push((id, n, full[..n].to_string()));
        }
    }
    Ok(rows)
}

pub fn dataset_csv(rows: &[(usize, usize, String)]) -> String {
    let mut out = String::from("instance,N,sequence\n");
    for (id, n, s) in rows {
        out.push_str(&format!("{id},{n},{s}\n"));
    }
    out
}
