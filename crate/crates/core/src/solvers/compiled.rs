//! Adjacency form of a QUBO for fast single-flip energy differences.

use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

#[derive(Debug, Clone)]
pub struct CompiledQubo {
    pub offset: f64,
    pub linear: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl CompiledQubo {
    pub fn new(obj: &PolynomialObjective) -> Result<Self> {
        let d = obj.degree();
        if d > 2 {
            return Err(Error::UnsupportedDegree { found: d, max: 2 });
        }
        let n = obj.num_vars();
        let mut linear = vec![0.0; n];
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (k, c) in obj.terms() {
            match k.len() {
                1 => linear[k[0]] += c,
                2 => {
                    adj[k[0]].push((k[1], c));
                    adj[k[1]].push((k[0], c));
                }
                _ => unreachable!(),
            }
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        row_start.push(0);
        for row in adj {
            for (j, w) in row {
                cols.push(j);
                weights.push(w);
            }
            row_start.push(cols.len());
        }
        Ok(CompiledQubo { offset: obj.offset(), linear, row_start, cols, weights })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_start[i + 1] - self.row_start[i]
    }

    pub fn energy(&self, bits: &[u8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.num_vars() {
            if bits[i] == 1 {
                e += self.linear[i];
                for (j, w) in self.neighbors(i) {
                    if j > i && bits[j] == 1 {
                        e += w;
                    }
                }
            }
        }
        e
    }

    /// `h_i + Σ_j Q_ij b_j`
    pub fn field(&self, bits: &[u8], i: usize) -> f64 {
        let mut f = self.linear[i];
        for (j, w) in self.neighbors(i) {
            if bits[j] == 1 {
                f += w;
            }
        }
        f
    }

    pub fn state(&self, bits: Vec<u8>) -> FlipState {
        let fields = (0..self.num_vars()).map(|i| self.field(&bits, i)).collect();
        let energy = self.energy(&bits);
        FlipState { bits, fields, energy }
    }
}

/// Assignment with cached local fields and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipState {
    pub bits: Vec<u8>,
    pub fields: Vec<f64>,
    pub energy: f64,
}

impl FlipState {
    /// Energy change if `i` were flipped.
    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        if self.bits[i] == 1 {
            -self.fields[i]
        } else {
            self.fields[i]
        }
    }

    pub fn flip(&mut self, q: &CompiledQubo, i: usize) {
        let d = self.delta(i);
        let s = if self.bits[i] == 1 { -1.0 } else { 1.0 };
        self.bits[i] ^= 1;
        self.energy += d;
        for (j, w) in q.neighbors(i) {
            self.fields[j] += s * w;
        }
    }

    /// Recomputes fields and energy from scratch; returns the energy drift removed.
    pub fn resync(&mut self, q: &CompiledQubo) -> f64 {
        let fresh = q.state(std::mem::take(&mut self.bits));
        let drift = (fresh.energy - self.energy).abs();
        *self = fresh;
        drift
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_track_energy() {
        let mut p = PolynomialObjective::new(4);
        p.add_term(&[0], 1.0);
        p.add_term(&[0, 1], -2.0);
        p.add_term(&[1, 3], 0.5);
        p.add_term(&[2], -1.5);
        p.add_offset(0.25);
        let q = CompiledQubo::new(&p).unwrap();
        let mut s = q.state(vec![0, 0, 0, 0]);
        for &i in &[0, 1, 3, 2, 0, 3] {
            s.flip(&q, i);
            assert!((s.energy - p.evaluate_bits(&s.bits)).abs() < 1e-12);
        }
    }
}
