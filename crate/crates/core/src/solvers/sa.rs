//! Simulated annealing with color-class multi-flip sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coloring::{color_graph, ColorClasses};
use super::compiled::{CompiledQubo, FlipState};
use super::rng::{self, Rng};
use super::{Sample, SampleSet};
use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T0Policy {
    /// Probe flips on a random state; T0 = (mean ΔE⁺ + 3 sd ΔE⁺) / ln(1/χ).
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    /// Temperature factor per variable proposal.
    pub cooling_rate: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
    pub t0: T0Policy,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig { cooling_rate: 0.999, sweeps: 100, restarts: 432, seed: 0, t0: T0Policy::Auto }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::input(format!("cooling rate must lie in (0,1), got {}", self.cooling_rate)));
        }
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::input("sweeps and restarts must be positive"));
        }
        if let T0Policy::Fixed(t) = self.t0 {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::input(format!("start temperature must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

/// ζ that takes T0 to `t_final` over `proposals` variable proposals.
pub fn cooling_rate_for(t0: f64, t_final: f64, proposals: usize) -> f64 {
    (t_final / t0).powf(1.0 / proposals.max(1) as f64)
}

/// Outcome of the start-temperature probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T0Probe {
    pub t0: f64,
    pub acceptance: f64,
    pub probes: usize,
}

/// Greedy probe: `max(100, n)` random single-flip proposals, downhill ones
/// accepted. χ = accepted fraction; statistics over the uphill ΔE.
pub fn atiqullah_t0(q: &CompiledQubo, seed: u64) -> T0Probe {
    let n = q.num_vars();
    let probes = n.max(100);
    if n == 0 {
        return T0Probe { t0: 1.0, acceptance: 0.0, probes: 0 };
    }
    let mut rng = rng::stream(seed, "t0-probe", 0);
    let bits = rng::random_bits(&mut rng, n);
    let mut st = q.state(bits);
    let mut all = Vec::with_capacity(probes);
    let mut uphill = Vec::new();
    let mut accepted = 0usize;
    for _ in 0..probes {
        let v = rng.gen_range(0..n);
        let d = st.delta(v);
        all.push(d);
        if d <= 0.0 {
            st.flip(q, v);
            accepted += 1;
        } else {
            uphill.push(d);
        }
    }
    let chi = accepted as f64 / probes as f64;
    let t0 = if accepted == 0 {
        1.0
    } else if uphill.is_empty() {
        let sd = std_dev(&all);
        if sd > 0.0 {
            1e3 * sd
        } else {
            1.0
        }
    } else {
        let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
        (mean + 3.0 * std_dev(&uphill)) / (1.0 / chi).ln()
    };
    T0Probe { t0, acceptance: chi, probes }
}

fn std_dev(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub(crate) const RESYNC_FLIPS: usize = 10_000;

/// Metropolis proposals for every variable of one class at temperature `t`.
/// Variables of a class share no term, so the order inside is irrelevant.
#[inline]
pub(crate) fn class_step(q: &CompiledQubo, st: &mut FlipState, class: &[usize], t: f64, rng: &mut impl Rng) -> usize {
    let mut flips = 0;
    for &v in class {
        let d = st.delta(v);
        if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
            st.flip(q, v);
            flips += 1;
        }
    }
    flips
}

pub(crate) fn random_state(q: &CompiledQubo, rng: &mut impl Rng) -> FlipState {
    let bits = rng::random_bits(rng, q.num_vars());
    q.state(bits)
}

pub(crate) fn checked_resync(q: &CompiledQubo, st: &mut FlipState) {
    let drift = st.resync(q);
    debug_assert!(drift < 1e-6 * (1.0 + st.energy.abs()), "energy drift {drift}");
}

/// Anneals `cfg.restarts` independent runs and returns each run's best state.
pub fn simulated_annealing(obj: &PolynomialObjective, cfg: &SaConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let q = CompiledQubo::new(obj)?;
    let classes = color_graph(obj);
    let t0 = match cfg.t0 {
        T0Policy::Fixed(t) => t,
        T0Policy::Auto => atiqullah_t0(&q, cfg.seed).t0,
    };
    let start = Instant::now();
    let samples: Vec<Sample> = (0..cfg.restarts).into_par_iter().map(|r| anneal(&q, &classes, cfg, t0, r)).collect();
    let wall = start.elapsed().as_secs_f64();
    let mut set = SampleSet::new(samples);
    set.wall_seconds = wall;
    set.tau_seconds = wall / cfg.restarts as f64;
    Ok(set)
}

fn anneal(q: &CompiledQubo, classes: &ColorClasses, cfg: &SaConfig, t0: f64, restart: usize) -> Sample {
    let mut rng = rng::stream(cfg.seed, "sa", restart as u64);
    let mut st = random_state(q, &mut rng);
    let factors: Vec<f64> = classes.classes.iter().map(|c| cfg.cooling_rate.powi(c.len() as i32)).collect();
    let mut best = Sample { bits: st.bits.clone(), energy: st.energy, replica: restart, sweep: 0 };
    let mut t = t0;
    let mut since_resync = 0usize;
    for sweep in 0..cfg.sweeps {
        for (class, f) in classes.classes.iter().zip(&factors) {
            class_step(q, &mut st, class, t, &mut rng);
            t *= f;
            if st.energy < best.energy {
                best.bits.clone_from(&st.bits);
                best.energy = st.energy;
                best.sweep = sweep + 1;
            }
        }
        since_resync += q.num_vars();
        if since_resync >= RESYNC_FLIPS {
            checked_resync(q, &mut st);
            since_resync = 0;
        }
    }
    // report the exact energy of the kept state
    best.energy = q.energy(&best.bits);
    best
}

/// Picks the candidate ζ with the most restarts at `reference` (ties: the
/// smaller ζ, i.e. the faster schedule).
pub fn tune_cooling_rate(obj: &PolynomialObjective, base: &SaConfig, candidates: &[f64], reference: f64) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    for z in sorted {
        let cfg = SaConfig { cooling_rate: z, ..*base };
        let hits = simulated_annealing(obj, &cfg)?.hits(reference, 1e-6);
        if best.is_none_or(|(_, h)| hits > h) {
            best = Some((z, hits));
        }
    }
    best.ok_or_else(|| Error::input("no cooling-rate candidates"))
}
