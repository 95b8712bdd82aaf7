//! Pseudo-Boolean objectives of arbitrary degree, their quadratic restriction,
//! and the spin-space twin of a QUBO.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Boolean,
    Spin,
}

/// A bit vector or spin vector tagged with its space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    space: Space,
    values: Vec<i8>,
}

impl Assignment {
    pub fn boolean(bits: impl IntoIterator<Item = u8>) -> Self {
        let values = bits.into_iter().map(|b| (b != 0) as i8).collect();
        Assignment { space: Space::Boolean, values }
    }

    pub fn spins(spins: impl IntoIterator<Item = i8>) -> Self {
        let values = spins.into_iter().map(|s| if s > 0 { 1 } else { -1 }).collect();
        Assignment { space: Space::Spin, values }
    }

    /// Parses a string of '0'/'1' characters.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.trim().chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(Error::input(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(Assignment::boolean(bits))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn to_bits(&self) -> Vec<u8> {
        match self.space {
            Space::Boolean => self.values.iter().map(|&v| v as u8).collect(),
            Space::Spin => self.values.iter().map(|&s| (s > 0) as u8).collect(),
        }
    }

    pub fn to_spins(&self) -> Vec<i8> {
        match self.space {
            Space::Boolean => self.values.iter().map(|&b| 2 * b - 1).collect(),
            Space::Spin => self.values.clone(),
        }
    }

    pub fn to_bitstring(&self) -> String {
        self.to_bits().iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

/// Sparse pseudo-Boolean polynomial `offset + Σ c_S ∏_{i∈S} b_i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialObjective {
    num_vars: usize,
    offset: f64,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl PolynomialObjective {
    pub fn new(num_vars: usize) -> Self {
        PolynomialObjective { num_vars, offset: 0.0, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, value: f64) -> Self {
        let mut p = Self::new(num_vars);
        p.offset = value;
        p
    }

    /// The single-variable polynomial `b_i`.
    pub fn variable(num_vars: usize, i: usize) -> Self {
        let mut p = Self::new(num_vars);
        p.add_term(&[i], 1.0);
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Grows the variable count; shrinking below a used index is an error.
    pub fn set_num_vars(&mut self, n: usize) -> Result<()> {
        if let Some(max) = self.terms.keys().filter_map(|k| k.last()).max() {
            if *max >= n {
                return Err(Error::input(format!("variable {max} does not fit in {n} variables")));
            }
        }
        self.num_vars = n;
        Ok(())
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    /// Adds `coeff·∏ b_i`. Repeated indices collapse (b² = b); the empty set adds to the offset.
    ///
    /// Panics if an index is out of range; use [`try_add_term`](Self::try_add_term) for untrusted input.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) {
        self.try_add_term(vars, coeff).expect("variable index out of range")
    }

    pub fn try_add_term(&mut self, vars: &[usize], coeff: f64) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::input(format!("non-finite coefficient {coeff}")));
        }
        if let Some(&bad) = vars.iter().find(|&&v| v >= self.num_vars) {
            return Err(Error::input(format!(
                "variable {bad} out of range for {} variables",
                self.num_vars
            )));
        }
        if coeff == 0.0 {
            return Ok(());
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.accumulate(key, coeff);
        Ok(())
    }

    fn accumulate(&mut self, key: Vec<usize>, coeff: f64) {
        if key.is_empty() {
            self.offset += coeff;
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + coeff;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Terms in sorted index-set order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return self.offset;
        }
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Indices that appear in at least one term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        if a.space() != Space::Boolean {
            return Err(Error::input("objective evaluation needs a Boolean assignment"));
        }
        if a.len() != self.num_vars {
            return Err(Error::input(format!(
                "assignment has {} values, objective has {} variables",
                a.len(),
                self.num_vars
            )));
        }
        Ok(self.evaluate_bits(&a.to_bits()))
    }

    /// Evaluates on a 0/1 slice without length checks beyond indexing.
    pub fn evaluate_bits(&self, bits: &[u8]) -> f64 {
        let mut e = self.offset;
        for (vars, &c) in &self.terms {
            if vars.iter().all(|&v| bits[v] != 0) {
                e += c;
            }
        }
        e
    }

    pub fn scale(&mut self, s: f64) {
        if s == 0.0 {
            self.terms.clear();
            self.offset = 0.0;
            return;
        }
        self.offset *= s;
        for c in self.terms.values_mut() {
            *c *= s;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.scale(s);
        p
    }

    /// `self += s·other`; the variable count grows to cover both.
    pub fn add_scaled(&mut self, other: &PolynomialObjective, s: f64) {
        self.num_vars = self.num_vars.max(other.num_vars);
        self.offset += s * other.offset;
        for (k, &c) in &other.terms {
            self.accumulate(k.clone(), s * c);
        }
    }

    /// Multilinear product (b² = b).
    pub fn product(&self, other: &PolynomialObjective) -> Self {
        let mut acc: HashMap<Vec<usize>, f64> = HashMap::new();
        let lhs: Vec<(&[usize], f64)> = std::iter::once((&[][..], self.offset))
            .filter(|(_, c)| *c != 0.0)
            .chain(self.terms())
            .collect();
        let rhs: Vec<(&[usize], f64)> = std::iter::once((&[][..], other.offset))
            .filter(|(_, c)| *c != 0.0)
            .chain(other.terms())
            .collect();
        for &(a, ca) in &lhs {
            for &(b, cb) in &rhs {
                *acc.entry(merge_sorted(a, b)).or_insert(0.0) += ca * cb;
            }
        }
        let mut out = PolynomialObjective::new(self.num_vars.max(other.num_vars));
        let mut entries: Vec<_> = acc.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, c) in entries {
            if c != 0.0 {
                out.accumulate(k, c);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.product(self)
    }

    /// Substitutes fixed values for some variables; the result keeps the same variable count.
    pub fn restrict(&self, fixed: &[(usize, u8)]) -> Self {
        let values: HashMap<usize, u8> = fixed.iter().copied().collect();
        let mut out = PolynomialObjective::constant(self.num_vars, self.offset);
        'terms: for (k, &c) in &self.terms {
            let mut rest = Vec::with_capacity(k.len());
            for &v in k {
                match values.get(&v) {
                    Some(0) => continue 'terms,
                    Some(_) => {}
                    None => rest.push(v),
                }
            }
            out.accumulate(rest, c);
        }
        out
    }

    /// Renumbers variables through `map` into a space of `num_vars` variables.
    pub fn relabel(&self, map: &[usize], num_vars: usize) -> Self {
        let mut out = PolynomialObjective::constant(num_vars, self.offset);
        for (k, &c) in &self.terms {
            let vars: Vec<usize> = k.iter().map(|&v| map[v]).collect();
            out.add_term(&vars, c);
        }
        out
    }

    pub fn is_quadratic(&self) -> bool {
        self.degree() <= 2
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Degree ≤ 2 objective (QUBO).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuadraticObjective(PolynomialObjective);

impl TryFrom<PolynomialObjective> for QuadraticObjective {
    type Error = Error;

    fn try_from(p: PolynomialObjective) -> Result<Self> {
        let d = p.degree();
        if d > 2 {
            return Err(Error::UnsupportedDegree { found: d, max: 2 });
        }
        Ok(QuadraticObjective(p))
    }
}

impl QuadraticObjective {
    pub fn new(num_vars: usize) -> Self {
        QuadraticObjective(PolynomialObjective::new(num_vars))
    }

    pub fn as_polynomial(&self) -> &PolynomialObjective {
        &self.0
    }

    pub fn into_polynomial(self) -> PolynomialObjective {
        self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.num_vars()
    }

    pub fn offset(&self) -> f64 {
        self.0.offset()
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.0.add_term(&[i], c);
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        self.0.add_term(&[i, j], c);
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.0.coefficient(&[i])
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.linear(i);
        }
        self.0.coefficient(&[i, j])
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.terms().filter(|(k, _)| k.len() == 1).map(|(k, c)| (k[0], c))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.0.terms().filter(|(k, _)| k.len() == 2).map(|(k, c)| (k[0], k[1], c))
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        self.0.evaluate(a)
    }

    pub fn num_couplers(&self) -> usize {
        self.quadratic_terms().count()
    }

    /// Fraction of nonzero off-diagonal entries.
    pub fn density(&self) -> f64 {
        let n = self.num_vars();
        if n < 2 {
            return 0.0;
        }
        self.num_couplers() as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
    }

    /// Mean number of couplers attached to a variable.
    pub fn couplers_per_qubit(&self) -> f64 {
        let n = self.num_vars();
        if n == 0 {
            return 0.0;
        }
        2.0 * self.num_couplers() as f64 / n as f64
    }

    /// `(j_max, j_min, j_max / j_min)` over all nonzero linear and quadratic coefficients.
    pub fn coefficient_stats(&self) -> Result<CoefficientStats> {
        let mut j_max: f64 = 0.0;
        let mut j_min = f64::INFINITY;
        for (_, c) in self.0.terms() {
            j_max = j_max.max(c.abs());
            j_min = j_min.min(c.abs());
        }
        if !j_min.is_finite() {
            return Err(Error::Domain("objective has no nonzero coefficient".into()));
        }
        Ok(CoefficientStats { j_max, j_min, resolution: j_max / j_min })
    }

    /// Largest absolute coefficient, 0 for an empty objective.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.0.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientStats {
    pub j_max: f64,
    pub j_min: f64,
    pub resolution: f64,
}

/// `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over spins in {−1, +1}.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingProblem {
    pub fields: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn new(num_vars: usize) -> Self {
        IsingProblem { fields: vec![0.0; num_vars], couplings: BTreeMap::new(), offset: 0.0 }
    }

    pub fn num_vars(&self) -> usize {
        self.fields.len()
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, c: f64) {
        assert!(i != j, "self-coupling");
        let key = (i.min(j), i.max(j));
        let v = self.couplings.get(&key).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.couplings.remove(&key);
        } else {
            self.couplings.insert(key, v);
        }
    }

    pub fn evaluate_spins(&self, s: &[i8]) -> f64 {
        let mut e = self.offset;
        for (i, &h) in self.fields.iter().enumerate() {
            e += h * s[i] as f64;
        }
        for (&(i, j), &c) in &self.couplings {
            e += c * (s[i] * s[j]) as f64;
        }
        e
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<f64> {
        if a.len() != self.num_vars() {
            return Err(Error::input(format!(
                "assignment has {} values, problem has {} spins",
                a.len(),
                self.num_vars()
            )));
        }
        Ok(self.evaluate_spins(&a.to_spins()))
    }
}

/// Substitutes `b = (1 + s) / 2`.
pub fn qubo_to_ising(q: &QuadraticObjective) -> IsingProblem {
    let mut p = IsingProblem::new(q.num_vars());
    p.offset = q.offset();
    for (k, c) in q.as_polynomial().terms() {
        match *k {
            [i] => {
                p.fields[i] += c / 2.0;
                p.offset += c / 2.0;
            }
            [i, j] => {
                let c4 = c / 4.0;
                p.add_coupling(i, j, c4);
                p.fields[i] += c4;
                p.fields[j] += c4;
                p.offset += c4;
            }
            _ => unreachable!("quadratic objective invariant"),
        }
    }
    p
}

/// Substitutes `s = 2b − 1`; inverse of [`qubo_to_ising`].
pub fn ising_to_qubo(p: &IsingProblem) -> QuadraticObjective {
    let n = p.num_vars();
    let mut linear = vec![0.0; n];
    let mut poly = PolynomialObjective::constant(n, p.offset);
    for (i, &h) in p.fields.iter().enumerate() {
        linear[i] += 2.0 * h;
        poly.add_offset(-h);
    }
    for (&(i, j), &c) in &p.couplings {
        poly.add_term(&[i, j], 4.0 * c);
        linear[i] -= 2.0 * c;
        linear[j] -= 2.0 * c;
        poly.add_offset(c);
    }
    for (i, c) in linear.into_iter().enumerate() {
        poly.add_term(&[i], c);
    }
    QuadraticObjective(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insertion_accumulates_and_drops_zero() {
        let mut p = PolynomialObjective::new(3);
        p.add_term(&[1, 0], 2.0);
        p.add_term(&[0, 1], -2.0);
        assert_eq!(p.num_terms(), 0);
        p.add_term(&[2, 2], 1.5);
        assert_eq!(p.coefficient(&[2]), 1.5);
    }

    #[test]
    fn evaluate_single_product() {
        let mut p = PolynomialObjective::new(2);
        p.add_term(&[0, 1], 1.0);
        assert_eq!(p.evaluate(&Assignment::boolean([1, 1])).unwrap(), 1.0);
        assert_eq!(p.evaluate(&Assignment::boolean([0, 1])).unwrap(), 0.0);
        assert!(p.evaluate(&Assignment::boolean([0])).is_err());
    }

    #[test]
    fn ising_conversion_examples() {
        let mut q = QuadraticObjective::new(1);
        q.add_linear(0, 1.0);
        let p = qubo_to_ising(&q);
        assert_eq!(p.fields[0], 0.5);
        assert_eq!(p.offset, 0.5);

        let mut q = QuadraticObjective::new(2);
        q.add_quadratic(0, 1, 4.0);
        let p = qubo_to_ising(&q);
        assert_eq!(p.couplings[&(0, 1)], 1.0);
        assert_eq!(p.fields, vec![1.0, 1.0]);
        assert_eq!(p.offset, 1.0);
    }

    #[test]
    fn round_trip_small() {
        let zero = QuadraticObjective::new(3);
        assert_eq!(ising_to_qubo(&qubo_to_ising(&zero)), zero);
        let mut q = QuadraticObjective::new(2);
        q.add_linear(0, 1.0);
        q.add_quadratic(0, 1, -2.0);
        assert_eq!(ising_to_qubo(&qubo_to_ising(&q)), q);
    }

    #[test]
    fn stats() {
        let mut q = QuadraticObjective::new(3);
        q.add_linear(0, 1.0);
        q.add_linear(1, -2.0);
        q.add_quadratic(0, 2, 0.5);
        let s = q.coefficient_stats().unwrap();
        assert_eq!(s.resolution, 4.0);
        assert!(QuadraticObjective::new(2).coefficient_stats().is_err());
    }

    #[test]
    fn product_is_multilinear() {
        let x = PolynomialObjective::variable(2, 0);
        let mut y = PolynomialObjective::constant(2, 1.0);
        y.add_term(&[1], -1.0);
        let sq = x.square();
        assert_eq!(sq, x);
        let xy = x.product(&y);
        assert_eq!(xy.coefficient(&[0]), 1.0);
        assert_eq!(xy.coefficient(&[0, 1]), -1.0);
    }
}
