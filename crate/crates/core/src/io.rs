//! File formats shared by every pipeline stage.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoders::{EncodedModel, InteractionModel, Layout, ModelKind, PenaltySet, PeptideSequence};
use crate::error::{Error, Result};
use crate::objective::{IsingProblem, PolynomialObjective};
use crate::reduction::AuxVar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemSpace {
    Boolean,
    Ising,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub vars: Vec<usize>,
    pub coeff: f64,
}

/// What an encoded problem needs to be decoded again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub kind: ModelKind,
    pub sequence: PeptideSequence,
    pub interaction: InteractionModel,
    pub penalties: PenaltySet,
    pub layout: Layout,
    /// Variables of the encoding itself, before any aux variables.
    pub model_vars: usize,
}

impl ModelInfo {
    pub fn of(m: &EncodedModel) -> Self {
        ModelInfo {
            kind: m.kind,
            sequence: m.sequence.clone(),
            interaction: m.interaction.clone(),
            penalties: m.penalties,
            layout: m.layout.clone(),
            model_vars: m.num_vars(),
        }
    }
}

/// Physical-node bookkeeping of an embedded problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingInfo {
    pub nodes: Vec<usize>,
    pub chain_strength: f64,
    pub chain_edges: usize,
    pub logical_vars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub num_vars: usize,
    pub offset: f64,
    pub terms: Vec<TermEntry>,
    pub space: ProblemSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelInfo>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux_map: Vec<AuxVar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingInfo>,
}

impl ProblemFile {
    pub fn from_objective(obj: &PolynomialObjective) -> Self {
        ProblemFile {
            num_vars: obj.num_vars(),
            offset: obj.offset(),
            terms: obj.terms().map(|(k, c)| TermEntry { vars: k.to_vec(), coeff: c }).collect(),
            space: ProblemSpace::Boolean,
            model: None,
            aux_map: Vec::new(),
            alpha: None,
            embedding: None,
        }
    }

    pub fn from_model(m: &EncodedModel) -> Self {
        ProblemFile { model: Some(ModelInfo::of(m)), ..ProblemFile::from_objective(&m.objective) }
    }

    pub fn from_ising(p: &IsingProblem) -> Self {
        let mut terms: Vec<TermEntry> =
            p.fields.iter().enumerate().filter(|(_, &h)| h != 0.0).map(|(i, &h)| TermEntry { vars: vec![i], coeff: h }).collect();
        terms.extend(p.couplings.iter().map(|(&(i, j), &c)| TermEntry { vars: vec![i, j], coeff: c }));
        ProblemFile {
            num_vars: p.num_vars(),
            offset: p.offset,
            terms,
            space: ProblemSpace::Ising,
            model: None,
            aux_map: Vec::new(),
            alpha: None,
            embedding: None,
        }
    }

    /// The Boolean objective; an error for spin problems.
    pub fn objective(&self) -> Result<PolynomialObjective> {
        if self.space != ProblemSpace::Boolean {
            return Err(Error::input("problem is in spin space; expected a Boolean objective"));
        }
        let mut p = PolynomialObjective::constant(self.num_vars, self.offset);
        for t in &self.terms {
            p.try_add_term(&t.vars, t.coeff)?;
        }
        Ok(p)
    }

    pub fn ising(&self) -> Result<IsingProblem> {
        if self.space != ProblemSpace::Ising {
            return Err(Error::input("problem is Boolean; expected a spin problem"));
        }
        let mut p = IsingProblem::new(self.num_vars);
        p.offset = self.offset;
        for t in &self.terms {
            if let Some(&bad) = t.vars.iter().find(|&&v| v >= self.num_vars) {
                return Err(Error::input(format!("term refers to variable {bad} of {}", self.num_vars)));
            }
            match t.vars.as_slice() {
                [] => p.offset += t.coeff,
                [i] => p.fields[*i] += t.coeff,
                [i, j] if i != j => p.add_coupling(*i, *j, t.coeff),
                _ => return Err(Error::input("spin problems hold only fields and pair couplings")),
            }
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.vars.len()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar record of how an output file came to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    /// Input path → SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            config: BTreeMap::new(),
            seed: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timings: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.to_string(), serde_json::to_value(value).expect("config value serializes"));
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn path_for(output: &Path) -> std::path::PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        s.into()
    }

    pub fn write_for(&mut self, output: &Path) -> Result<()> {
        self.outputs.push(output.display().to_string());
        write_text(&Self::path_for(output), &(serde_json::to_string_pretty(self)? + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{encode_default, InteractionModel};

    #[test]
    fn problem_round_trip() {
        let seq = PeptideSequence::new("HPPHH").unwrap();
        let m = encode_default(ModelKind::TurnCartesian, &seq, &InteractionModel::hp(-1.0).unwrap(), None).unwrap();
        let pf = ProblemFile::from_model(&m);
        let back = ProblemFile::parse(&pf.to_json()).unwrap();
        assert_eq!(back, pf);
        assert_eq!(back.objective().unwrap(), m.objective);
    }

    #[test]
    fn ising_round_trip() {
        let mut p = IsingProblem::new(3);
        p.fields = vec![0.5, 0.0, -1.0];
        p.add_coupling(0, 2, 0.25);
        p.offset = 1.5;
        let pf = ProblemFile::from_ising(&p);
        assert_eq!(pf.ising().unwrap(), p);
        assert!(pf.objective().is_err());
    }
}
