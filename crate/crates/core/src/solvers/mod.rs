//! Samplers and exact search over pseudo-Boolean objectives.

pub mod coloring;
pub mod compiled;
pub mod exact;
pub mod pt;
pub mod rng;
pub mod sa;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Assignment;

pub use coloring::{color_graph, ColorClasses};
pub use exact::{brute_force, brute_force_with, solve_exact, ExactConfig, ExactMethod, ExactResult};
pub use pt::{parallel_tempering, PtConfig, PtResult};
pub use sa::{simulated_annealing, SaConfig, T0Policy};

/// One returned assignment. For SA `replica` is the restart index; `sweep` is
/// the sweep at which the state was first reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub bits: Vec<u8>,
    pub energy: f64,
    pub replica: usize,
    pub sweep: usize,
}

impl Sample {
    pub fn assignment(&self) -> Assignment {
        Assignment::boolean(self.bits.iter().copied())
    }

    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    /// Wall time of the whole batch.
    pub wall_seconds: f64,
    /// Wall time per run with the batch parallelism folded in.
    pub tau_seconds: f64,
}

pub const CSV_HEADER: &str = "replica,sweep,energy,bitstring";

impl SampleSet {
    pub fn new(samples: Vec<Sample>) -> Self {
        SampleSet { samples, wall_seconds: 0.0, tau_seconds: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Lowest energy; the first sample wins ties.
    pub fn best(&self) -> Option<&Sample> {
        self.samples.iter().fold(None, |acc: Option<&Sample>, s| match acc {
            Some(b) if b.energy <= s.energy => Some(b),
            _ => Some(s),
        })
    }

    pub fn best_energy(&self) -> f64 {
        self.best().map_or(f64::INFINITY, |s| s.energy)
    }

    /// Runs whose energy is within `tol` of `reference`.
    pub fn hits(&self, reference: f64, tol: f64) -> usize {
        self.samples.iter().filter(|s| s.energy <= reference + tol).count()
    }

    /// Deterministic CSV: no timings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", s.replica, s.sweep, s.energy, s.bitstring()));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::input(format!("sample file must start with '{CSV_HEADER}'"))),
        }
        let mut samples = Vec::new();
        for (no, line) in lines.enumerate() {
            let f: Vec<&str> = line.trim().split(',').collect();
            let bad = || Error::input(format!("sample row {}: malformed '{line}'", no + 1));
            if f.len() != 4 {
                return Err(bad());
            }
            let bits = Assignment::from_bitstring(f[3])?.to_bits();
            samples.push(Sample {
                replica: f[0].parse().map_err(|_| bad())?,
                sweep: f[1].parse().map_err(|_| bad())?,
                energy: f[2].parse().map_err(|_| bad())?,
                bits,
            });
        }
        Ok(SampleSet::new(samples))
    }
}
