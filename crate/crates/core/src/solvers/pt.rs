//! Parallel tempering on a geometric temperature ladder.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coloring::color_graph;
use super::compiled::{CompiledQubo, FlipState};
use super::sa::{checked_resync, class_step, random_state, RESYNC_FLIPS};
use super::rng::{self, Rng};
use super::{Sample, SampleSet};
use rand_chacha::ChaCha8Rng;
use crate::encoders::ModelKind;
use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtConfig {
    pub num_temps: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub sweeps: usize,
    /// Final sweeps whose lowest-temperature states are kept.
    pub measure_sweeps: usize,
    pub seed: u64,
}

impl PtConfig {
    /// Ladder bounds used per model: coordinate (1, 1e4), turn-cart (1, 1e8), turn-tet (1, 1e6).
    pub fn for_model(kind: ModelKind) -> Self {
        let t_max = match kind {
            ModelKind::CoordCartesian | ModelKind::CoordTetrahedral => 1e4,
            ModelKind::TurnCartesian => 1e8,
            ModelKind::TurnTetrahedral => 1e6,
        };
        PtConfig { t_max, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_temps < 2 {
            return Err(Error::input("parallel tempering needs at least 2 temperatures"));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(Error::input(format!("need 0 < t_min < t_max, got {} and {}", self.t_min, self.t_max)));
        }
        if self.sweeps == 0 {
            return Err(Error::input("sweeps must be positive"));
        }
        if self.measure_sweeps > self.sweeps {
            return Err(Error::input("measurement window longer than the run"));
        }
        Ok(())
    }

    /// T_i = T_min·r^i with r = (T_max/T_min)^{1/(n−1)}.
    pub fn ladder(&self) -> Vec<f64> {
        let r = self.ratio();
        (0..self.num_temps).map(|i| self.t_min * r.powi(i as i32)).collect()
    }

    pub fn ratio(&self) -> f64 {
        (self.t_max / self.t_min).powf(1.0 / (self.num_temps - 1) as f64)
    }
}

impl Default for PtConfig {
    fn default() -> Self {
        PtConfig { num_temps: 400, t_min: 1.0, t_max: 1e4, sweeps: 1000, measure_sweeps: 0, seed: 0 }
    }
}

/// Metropolis acceptance of exchanging configurations at temperatures `t`, `t2`.
pub fn swap_probability(e: f64, e2: f64, t: f64, t2: f64) -> f64 {
    ((e - e2) * (1.0 / t - 1.0 / t2)).exp().min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtResult {
    /// Best state seen by each replica (`replica` = replica id).
    pub samples: SampleSet,
    pub temperatures: Vec<f64>,
    /// Energy at the lowest temperature after every sweep.
    pub trajectory: Vec<f64>,
    /// Lowest-temperature states over the last `measure_sweeps` sweeps.
    pub window: Vec<Vec<u8>>,
    /// Accepted fraction per adjacent ladder pair.
    pub swap_acceptance: Vec<f64>,
}

impl PtResult {
    pub fn best(&self) -> &Sample {
        self.samples.best().expect("at least two replicas")
    }
}

struct Replica {
    id: usize,
    rng: ChaCha8Rng,
    state: FlipState,
    best: Sample,
    since_resync: usize,
}

pub fn parallel_tempering(obj: &PolynomialObjective, cfg: &PtConfig) -> Result<PtResult> {
    cfg.validate()?;
    let q = CompiledQubo::new(obj)?;
    let classes = color_graph(obj);
    let temps = cfg.ladder();
    let mut swap_rng = rng::stream(cfg.seed, "pt-swap", 0);
    let start = Instant::now();

    // slot k holds the replica currently at temps[k]
    let mut slots: Vec<Replica> = (0..cfg.num_temps)
        .map(|id| {
            let mut rng = rng::stream(cfg.seed, "pt", id as u64);
            let state = random_state(&q, &mut rng);
            let best = Sample { bits: state.bits.clone(), energy: state.energy, replica: id, sweep: 0 };
            Replica { id, rng, state, best, since_resync: 0 }
        })
        .collect();
    let mut trajectory = Vec::with_capacity(cfg.sweeps);
    let mut window = Vec::with_capacity(cfg.measure_sweeps);
    let mut accepted = vec![0usize; cfg.num_temps - 1];
    let mut attempted = vec![0usize; cfg.num_temps - 1];

    for sweep in 0..cfg.sweeps {
        slots.par_iter_mut().zip(temps.par_iter()).for_each(|(r, &t)| {
            for class in &classes.classes {
                class_step(&q, &mut r.state, class, t, &mut r.rng);
            }
            if r.state.energy < r.best.energy {
                r.best.bits.clone_from(&r.state.bits);
                r.best.energy = r.state.energy;
                r.best.sweep = sweep + 1;
            }
            r.since_resync += q.num_vars();
            if r.since_resync >= RESYNC_FLIPS {
                checked_resync(&q, &mut r.state);
                r.since_resync = 0;
            }
        });
        for k in (sweep % 2..cfg.num_temps - 1).step_by(2) {
            attempted[k] += 1;
            let p = swap_probability(slots[k].state.energy, slots[k + 1].state.energy, temps[k], temps[k + 1]);
            if p >= 1.0 || swap_rng.gen::<f64>() < p {
                slots.swap(k, k + 1);
                accepted[k] += 1;
            }
        }
        trajectory.push(slots[0].state.energy);
        if sweep + cfg.measure_sweeps >= cfg.sweeps {
            window.push(slots[0].state.bits.clone());
        }
    }
    let wall = start.elapsed().as_secs_f64();
    slots.sort_by_key(|r| r.id);
    let samples = slots
        .into_iter()
        .map(|r| {
            let mut b = r.best;
            b.energy = q.energy(&b.bits);
            b
        })
        .collect();
    let mut samples = SampleSet::new(samples);
    samples.wall_seconds = wall;
    samples.tau_seconds = wall;
    let swap_acceptance = accepted.iter().zip(&attempted).map(|(&a, &n)| if n == 0 { 0.0 } else { a as f64 / n as f64 }).collect();
    Ok(PtResult { samples, temperatures: temps, trajectory, window, swap_acceptance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_ratio() {
        let cfg = PtConfig { num_temps: 400, t_min: 1.0, t_max: 1e4, ..Default::default() };
        let r = cfg.ratio();
        assert!((r - 10f64.powf(4.0 / 399.0)).abs() < 1e-15);
        let l = cfg.ladder();
        assert_eq!(l[0], 1.0);
        assert!((l[399] - 1e4).abs() < 1e-8);
    }

    #[test]
    fn equal_energies_always_swap() {
        assert_eq!(swap_probability(-3.0, -3.0, 1.0, 2.0), 1.0);
        assert!(swap_probability(-3.0, -1.0, 1.0, 2.0) < 1.0);
        assert_eq!(swap_probability(-1.0, -3.0, 1.0, 2.0), 1.0);
    }

    #[test]
    fn finds_ground_of_small_qubo() {
        let mut p = PolynomialObjective::new(4);
        p.add_term(&[0], -1.0);
        p.add_term(&[1], -1.0);
        p.add_term(&[0, 1], 3.0);
        p.add_term(&[2, 3], -2.0);
        let cfg = PtConfig { num_temps: 8, t_min: 0.1, t_max: 10.0, sweeps: 200, measure_sweeps: 10, seed: 1 };
        let r = parallel_tempering(&p, &cfg).unwrap();
        assert_eq!(r.best().energy, -3.0);
        assert_eq!(r.trajectory.len(), 200);
        assert_eq!(r.window.len(), 10);
    }
}
