//! Degree reduction of HUBOs by Rosenberg substitution.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{PolynomialObjective, QuadraticObjective};
use crate::solvers::compiled::CompiledQubo;
use crate::solvers::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaPolicy {
    /// 1 + Σ|c| over all HUBO coefficients.
    WorstCase,
    Fixed(f64),
    /// 1.1·λ_global.
    Scaled { lambda_global: f64 },
}

impl AlphaPolicy {
    pub fn alpha(&self, hubo: &PolynomialObjective) -> Result<f64> {
        let a = match *self {
            AlphaPolicy::WorstCase => 1.0 + hubo.terms().map(|(_, c)| c.abs()).sum::<f64>(),
            AlphaPolicy::Fixed(v) => v,
            AlphaPolicy::Scaled { lambda_global } => 1.1 * lambda_global,
        };
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::input(format!("penalty strength must be positive, got {a}")));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxVar {
    pub aux: usize,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratizationResult {
    pub qubo: QuadraticObjective,
    /// In creation order; a pair may name an earlier aux variable.
    pub aux_map: Vec<AuxVar>,
    pub alpha: f64,
    pub original_vars: usize,
}

impl QuadratizationResult {
    /// Extends an original assignment with the aux values it implies.
    pub fn extend(&self, original: &[u8]) -> Vec<u8> {
        let mut bits = original.to_vec();
        bits.resize(self.qubo.num_vars(), 0);
        for a in &self.aux_map {
            bits[a.aux] = bits[a.pair.0] & bits[a.pair.1];
        }
        bits
    }
}

struct Work {
    terms: Vec<Option<(Vec<usize>, f64)>>,
    index: HashMap<Vec<usize>, usize>,
    by_pair: HashMap<(usize, usize), Vec<usize>>,
    counts: HashMap<(usize, usize), usize>,
    queue: BTreeSet<(Reverse<usize>, Reverse<(usize, usize)>)>,
}

impl Work {
    fn bump(&mut self, pair: (usize, usize), up: bool) {
        let c = self.counts.entry(pair).or_insert(0);
        if *c > 0 {
            self.queue.remove(&(Reverse(*c), Reverse(pair)));
        }
        if up {
            *c += 1;
        } else {
            *c -= 1;
        }
        if *c > 0 {
            self.queue.insert((Reverse(*c), Reverse(pair)));
        }
    }

    fn pairs(key: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..key.len()).flat_map(move |a| (a + 1..key.len()).map(move |b| (key[a], key[b])))
    }

    fn add(&mut self, key: Vec<usize>, c: f64) {
        if let Some(&id) = self.index.get(&key) {
            let slot = self.terms[id].as_mut().unwrap();
            slot.1 += c;
            if slot.1 == 0.0 {
                self.remove(id);
            }
            return;
        }
        let id = self.terms.len();
        for p in Self::pairs(&key).collect::<Vec<_>>() {
            self.bump(p, true);
            self.by_pair.entry(p).or_default().push(id);
        }
        self.index.insert(key.clone(), id);
        self.terms.push(Some((key, c)));
    }

    fn remove(&mut self, id: usize) -> (Vec<usize>, f64) {
        let (key, c) = self.terms[id].take().unwrap();
        self.index.remove(&key);
        for p in Self::pairs(&key).collect::<Vec<_>>() {
            self.bump(p, false);
        }
        (key, c)
    }
}

/// Rosenberg reduction: repeatedly replaces the pair shared by the most
/// high-order terms (ties: lexicographically largest pair) with an aux
/// variable `a`, adding `α(b_i b_j − 2a(b_i + b_j) + 3a)`.
pub fn quadratize(hubo: &PolynomialObjective, policy: AlphaPolicy) -> Result<QuadratizationResult> {
    let alpha = policy.alpha(hubo)?;
    let original_vars = hubo.num_vars();
    let mut low = PolynomialObjective::constant(original_vars, hubo.offset());
    let mut work = Work {
        terms: Vec::new(),
        index: HashMap::new(),
        by_pair: HashMap::new(),
        counts: HashMap::new(),
        queue: BTreeSet::new(),
    };
    for (k, c) in hubo.terms() {
        if k.len() <= 2 {
            low.add_term(k, c);
        } else {
            work.add(k.to_vec(), c);
        }
    }
    let mut aux_map: Vec<AuxVar> = Vec::new();
    let mut aux_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut num_vars = original_vars;
    while let Some(&(_, Reverse(pair))) = work.queue.first() {
        let aux = *aux_of.entry(pair).or_insert_with(|| {
            let a = num_vars;
            num_vars += 1;
            low.set_num_vars(num_vars).unwrap();
            let (i, j) = pair;
            low.add_term(&[i, j], alpha);
            low.add_term(&[a, i], -2.0 * alpha);
            low.add_term(&[a, j], -2.0 * alpha);
            low.add_term(&[a], 3.0 * alpha);
            aux_map.push(AuxVar { aux: a, pair });
            a
        });
        let ids = work.by_pair.remove(&pair).unwrap_or_default();
        for id in ids {
            let alive = work.terms[id].as_ref().is_some_and(|(k, _)| k.contains(&pair.0) && k.contains(&pair.1));
            if !alive {
                continue;
            }
            let (key, c) = work.remove(id);
            let mut next: Vec<usize> = key.into_iter().filter(|&v| v != pair.0 && v != pair.1).collect();
            next.push(aux);
            next.sort_unstable();
            if next.len() <= 2 {
                low.add_term(&next, c);
            } else {
                work.add(next, c);
            }
        }
    }
    let qubo = QuadraticObjective::try_from(low)?;
    Ok(QuadratizationResult { qubo, aux_map, alpha, original_vars })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMethod {
    /// Every original assignment and every aux assignment.
    Exhaustive,
    /// Every original assignment; single aux flips for the gap.
    ExhaustiveOriginal,
    /// Random original assignments; single aux flips for the gap.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub method: VerifyMethod,
    pub checked: u64,
    /// max |QUBO(x, aux(x)) − HUBO(x)|
    pub max_discrepancy: f64,
    /// min of QUBO(x, a) − QUBO(x, aux(x)) over checked inconsistent `a`; +∞ without aux.
    pub min_inconsistency_gap: f64,
    pub passed: bool,
}

pub const VERIFY_SAMPLES: u64 = 100_000;

/// Checks energy equality on consistent extensions and that breaking an aux
/// constraint never lowers the energy. `budget` bounds the exhaustively
/// enumerated variable count.
pub fn verify_quadratization(hubo: &PolynomialObjective, result: &QuadratizationResult, budget: usize) -> Result<VerificationReport> {
    let n = result.original_vars;
    if hubo.num_vars() != n {
        return Err(Error::input("result does not belong to this objective"));
    }
    let q = CompiledQubo::new(result.qubo.as_polynomial())?;
    let k = result.aux_map.len();
    let total = n + k;
    let scale = 1.0 + hubo.terms().map(|(_, c)| c.abs()).sum::<f64>() + result.alpha * k as f64;
    let tol = 1e-9 * scale;
    let mut max_discrepancy: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut checked = 0u64;

    let mut check = |x: &[u8], full_aux: bool| {
        let bits = result.extend(x);
        let e_h = hubo.evaluate_bits(x);
        let mut state = q.state(bits);
        max_discrepancy = max_discrepancy.max((state.energy - e_h).abs());
        let base = state.energy;
        if full_aux && k > 0 {
            // Gray code over all aux assignments
            for step in 1u64..(1u64 << k) {
                let a = n + step.trailing_zeros() as usize;
                state.flip(&q, a);
                min_gap = min_gap.min(state.energy - base);
            }
        } else {
            for a in n..total {
                min_gap = min_gap.min(state.delta(a));
            }
        }
        checked += 1;
    };

    let method = if total <= budget {
        for x in 0..(1u64 << n) {
            let bits: Vec<u8> = (0..n).map(|i| (x >> i & 1) as u8).collect();
            check(&bits, true);
        }
        VerifyMethod::Exhaustive
    } else if n <= budget {
        for x in 0..(1u64 << n) {
            let bits: Vec<u8> = (0..n).map(|i| (x >> i & 1) as u8).collect();
            check(&bits, false);
        }
        VerifyMethod::ExhaustiveOriginal
    } else {
        let mut r = rng::stream(0, "verify", 0);
        for _ in 0..VERIFY_SAMPLES {
            let bits = rng::random_bits(&mut r, n);
            check(&bits, false);
        }
        VerifyMethod::Sampled
    };
    let passed = max_discrepancy <= tol && min_gap >= -tol;
    Ok(VerificationReport { method, checked, max_discrepancy, min_inconsistency_gap: min_gap, passed })
}
