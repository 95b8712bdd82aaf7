//! Spin overlaps, barrier classification, time-to-solution and resource scaling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use crate::error::{Error, Result};
use crate::reduction::{quadratize, AlphaPolicy};
use crate::solvers::SampleSet;

pub const DEFAULT_BINS: usize = 101;
pub const DEFAULT_HIT_TOLERANCE: f64 = 1e-6;
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// `q = (1/n) Σ s_i s'_i` over `vars` (all variables if `None`), spins from bits.
pub fn overlap(a: &[u8], b: &[u8], vars: Option<&[usize]>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::input(format!("states have {} and {} variables", a.len(), b.len())));
    }
    let agree = |i: usize| if a[i] == b[i] { 1.0 } else { -1.0 };
    let (sum, n) = match vars {
        Some(v) => {
            if let Some(&bad) = v.iter().find(|&&i| i >= a.len()) {
                return Err(Error::input(format!("variable {bad} out of range")));
            }
            (v.iter().map(|&i| agree(i)).sum::<f64>(), v.len())
        }
        None => ((0..a.len()).map(agree).sum::<f64>(), a.len()),
    };
    if n == 0 {
        return Err(Error::input("overlap over zero variables"));
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SodHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: u64,
    /// Free-form origin notes (model, N, run settings).
    pub provenance: BTreeMap<String, String>,
}

impl SodHistogram {
    pub fn new(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::input("histogram needs at least one bin"));
        }
        let edges = (0..=bins).map(|k| -1.0 + 2.0 * k as f64 / bins as f64).collect();
        Ok(SodHistogram { edges, counts: vec![0; bins], samples: 0, provenance: BTreeMap::new() })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, q: f64) -> usize {
        let k = ((q + 1.0) / 2.0 * self.bins() as f64).floor();
        (k.max(0.0) as usize).min(self.bins() - 1)
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.edges[k] + self.edges[k + 1])
    }

    pub fn add(&mut self, q: f64) {
        let k = self.bin_of(q);
        self.counts[k] += 1;
        self.samples += 1;
    }

    pub fn occupied(&self) -> Vec<usize> {
        (0..self.bins()).filter(|&k| self.counts[k] > 0).collect()
    }

    /// Fraction of samples in bins whose center has |q| < `threshold`.
    pub fn mass_below(&self, threshold: f64) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        let m: u64 = (0..self.bins()).filter(|&k| self.center(k).abs() < threshold).map(|k| self.counts[k]).sum();
        m as f64 / self.samples as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q_bin_center,count\n");
        for k in 0..self.bins() {
            let _ = writeln!(out, "{},{}", self.center(k), self.counts[k]);
        }
        out
    }
}

/// Overlaps of paired states (one per measurement sweep) and their histogram.
pub fn spin_overlap(run1: &[Vec<u8>], run2: &[Vec<u8>], vars: Option<&[usize]>, bins: usize) -> Result<(Vec<f64>, SodHistogram)> {
    if run1.len() != run2.len() {
        return Err(Error::input(format!("measurement windows differ: {} vs {} sweeps", run1.len(), run2.len())));
    }
    let mut h = SodHistogram::new(bins)?;
    let mut qs = Vec::with_capacity(run1.len());
    for (a, b) in run1.iter().zip(run2) {
        let q = overlap(a, b, vars)?;
        h.add(q);
        qs.push(q);
    }
    Ok((qs, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Barriers {
    Thin,
    Thick,
}

/// 3-bin moving average; edge bins average over the neighbours they have.
pub fn smooth(counts: &[u64]) -> Vec<f64> {
    let n = counts.len();
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n - 1);
            (lo..=hi).map(|i| counts[i] as f64).sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Local maxima of the smoothed density. A flat run strictly above the bins on
/// both sides counts once, at its middle bin (smoothing turns an isolated
/// spike into three equal bins). Falls back to the global maximum.
pub fn peaks(h: &SodHistogram) -> Vec<usize> {
    let s = smooth(&h.counts);
    let n = s.len();
    let mut p = Vec::new();
    let mut a = 0;
    while a < n {
        let mut b = a;
        while b + 1 < n && s[b + 1] == s[a] {
            b += 1;
        }
        if s[a] > 0.0 && (a == 0 || s[a - 1] < s[a]) && (b + 1 == n || s[b + 1] < s[a]) {
            p.push((a + b) / 2);
        }
        a = b + 1;
    }
    if p.is_empty() {
        let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        p.extend(s.iter().position(|&v| v == m));
    }
    p
}

/// Thin iff every peak lies at |q| > `threshold`.
pub fn classify_barriers(h: &SodHistogram, threshold: f64) -> Result<Barriers> {
    if h.samples == 0 {
        return Err(Error::input("empty overlap histogram"));
    }
    Ok(if peaks(h).iter().all(|&k| h.center(k).abs() > threshold) { Barriers::Thin } else { Barriers::Thick })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtsResult {
    pub tau: f64,
    pub p_ground: f64,
    /// Seconds; infinite when the ground state was never found.
    pub tts: f64,
    pub interval: Option<(f64, f64)>,
}

/// `τ·ln(0.01)/ln(1−p)`, with one run sufficing once p ≥ 0.99.
pub fn tts(tau: f64, p_ground: f64) -> TtsResult {
    let tts = if p_ground <= 0.0 {
        f64::INFINITY
    } else if p_ground >= 0.99 {
        tau
    } else {
        tau * (0.01f64).ln() / (1.0 - p_ground).ln()
    };
    TtsResult { tau, p_ground, tts, interval: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundEstimate {
    pub hits: usize,
    pub runs: usize,
    pub p: f64,
    pub wilson: (f64, f64),
}

pub fn wilson_interval(hits: usize, runs: usize) -> (f64, f64) {
    let n = runs as f64;
    let p = hits as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn estimate_p_ground(samples: &SampleSet, reference: f64, tol: f64) -> Result<GroundEstimate> {
    if samples.is_empty() {
        return Err(Error::input("empty sample set"));
    }
    let hits = samples.hits(reference, tol);
    let runs = samples.len();
    Ok(GroundEstimate { hits, runs, p: hits as f64 / runs as f64, wilson: wilson_interval(hits, runs) })
}

/// TTS from a sample set: τ from its timing, p from the hit rate.
pub fn tts_from_samples(samples: &SampleSet, reference: f64, tol: f64) -> Result<TtsResult> {
    let est = estimate_p_ground(samples, reference, tol)?;
    let mut r = tts(samples.tau_seconds, est.p);
    r.interval = Some(est.wilson);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub model: ModelKind,
    pub n: usize,
    /// Grid side for coordinate models.
    pub side: Option<usize>,
    pub qubits: usize,
    pub density: f64,
    pub couplers_per_qubit: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,N,L,qubits,density,couplers_per_qubit,resolution\n");
        for r in &self.rows {
            let side = r.side.map_or(String::new(), |s| s.to_string());
            let _ = writeln!(out, "{},{},{},{},{},{},{}", r.model, r.n, side, r.qubits, r.density, r.couplers_per_qubit, r.resolution);
        }
        out
    }

    pub fn series(&self, model: ModelKind) -> Vec<&ScalingRow> {
        self.rows.iter().filter(|r| r.model == model).collect()
    }
}

/// The scaling instances: all-H chains under the HP model, so every
/// admissible pair carries an interaction.
pub fn scaling_sequence(n: usize) -> Result<PeptideSequence> {
    PeptideSequence::new(&"H".repeat(n))
}

/// Metrics of one instance: turn models are quadratized with the worst-case
/// α, coordinate models use the minimal grid.
pub fn scaling_row(model: ModelKind, n: usize) -> Result<ScalingRow> {
    let seq = scaling_sequence(n)?;
    let hp = InteractionModel::hp(-1.0)?;
    let m = encode_default(model, &seq, &hp, None)?;
    let side = m.lattice().map(|l| l.side);
    let q = quadratize(&m.objective, AlphaPolicy::WorstCase)?.qubo;
    let stats = q.coefficient_stats()?;
    Ok(ScalingRow {
        model,
        n,
        side,
        qubits: q.num_vars(),
        density: q.density(),
        couplers_per_qubit: q.couplers_per_qubit(),
        resolution: stats.resolution,
    })
}

pub fn scaling_report(models: &[ModelKind], lengths: impl IntoIterator<Item = usize> + Clone) -> Result<ScalingReport> {
    let mut rows = Vec::new();
    for &model in models {
        for n in lengths.clone() {
            rows.push(scaling_row(model, n)?);
        }
    }
    Ok(ScalingReport { rows })
}
