//! Applying a given minor-embedding to an Ising problem, and reading
//! physical samples back as logical ones.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{ising_to_qubo, IsingProblem};
use crate::solvers::rng::{self, Rng};

/// Simple undirected graph on arbitrary node ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HardwareGraph {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphFile {
    #[serde(default)]
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl HardwareGraph {
    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = HardwareGraph::default();
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::input(format!("self-loop on node {u}")));
        }
        self.nodes.insert(u);
        self.nodes.insert(v);
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// `rows × cols` grid, node `r·cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = HardwareGraph::default();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                g.nodes.insert(v);
                if c + 1 < cols {
                    g.edges.insert((v, v + 1));
                }
                if r + 1 < rows {
                    g.edges.insert((v, v + cols));
                }
            }
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = HardwareGraph { nodes: (0..n).collect(), edges: BTreeSet::new() };
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v));
            }
        }
        g
    }

    /// Edge list ("u v" per line, `#` comments) or JSON `{nodes, edges}`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim_start();
        if t.starts_with('{') {
            let f: GraphFile = serde_json::from_str(t)?;
            let mut g = HardwareGraph::from_edges(f.edges)?;
            g.nodes.extend(f.nodes);
            return Ok(g);
        }
        let mut g = HardwareGraph::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::input(format!("hardware graph line {}: bad node '{s}'", no + 1)));
            match f.as_slice() {
                [u] => {
                    g.nodes.insert(parse(u)?);
                }
                [u, v] => g.add_edge(parse(u)?, parse(v)?)?,
                _ => return Err(Error::input(format!("hardware graph line {}: expected 'u v'", no + 1))),
            }
        }
        Ok(g)
    }

    fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        adj
    }
}

/// Logical variable → chain of physical nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingMap {
    pub chains: BTreeMap<usize, Vec<usize>>,
}

impl EmbeddingMap {
    pub fn identity(n: usize) -> Self {
        EmbeddingMap { chains: (0..n).map(|i| (i, vec![i])).collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<usize>> = serde_json::from_str(text)?;
        let mut chains = BTreeMap::new();
        for (k, mut v) in raw {
            let i = k.trim().parse::<usize>().map_err(|_| Error::input(format!("embedding key '{k}' is not a variable index")))?;
            v.sort_unstable();
            v.dedup();
            chains.insert(i, v);
        }
        Ok(EmbeddingMap { chains })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain map")
    }

    /// Physical nodes in ascending order: the column order of embedded problems.
    pub fn physical_nodes(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.chains.values().flatten().copied().collect();
        s.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub physical_qubits: usize,
    pub max_chain: usize,
}

fn chain_connected(chain: &[usize], adj: &BTreeMap<usize, Vec<usize>>) -> bool {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    while let Some(u) = queue.pop_front() {
        for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if members.contains(&v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen.len() == members.len()
}

pub fn validate_embedding(emb: &EmbeddingMap, ising: &IsingProblem, hw: &HardwareGraph) -> EmbeddingReport {
    let mut violations = Vec::new();
    let adj = hw.adjacency();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..ising.num_vars() {
        match emb.chains.get(&i) {
            None => violations.push(format!("variable {i} has no chain")),
            Some(c) if c.is_empty() => violations.push(format!("variable {i} has an empty chain")),
            Some(_) => {}
        }
    }
    for (&i, chain) in &emb.chains {
        if i >= ising.num_vars() {
            violations.push(format!("chain for unknown variable {i}"));
        }
        for &p in chain {
            if !hw.nodes.contains(&p) {
                violations.push(format!("variable {i}: node {p} not in the hardware graph"));
            }
            if let Some(prev) = owner.insert(p, i) {
                violations.push(format!("node {p} shared by variables {prev} and {i}"));
            }
        }
        if !chain.is_empty() && !chain_connected(chain, &adj) {
            violations.push(format!("chain of variable {i} is disconnected"));
        }
    }
    for &(i, j) in ising.couplings.keys() {
        if let (Some(a), Some(b)) = (emb.chains.get(&i), emb.chains.get(&j)) {
            if !a.iter().any(|&u| b.iter().any(|&v| hw.has_edge(u, v))) {
                violations.push(format!("no hardware edge between chains of {i} and {j}"));
            }
        }
    }
    EmbeddingReport {
        valid: violations.is_empty(),
        violations,
        physical_qubits: emb.chains.values().map(Vec::len).sum(),
        max_chain: emb.chains.values().map(Vec::len).max().unwrap_or(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStrength {
    /// Half the largest absolute QUBO coefficient of the logical problem.
    HalfMaxQubo,
    Fixed(f64),
}

impl ChainStrength {
    pub fn value(&self, ising: &IsingProblem) -> f64 {
        match *self {
            ChainStrength::HalfMaxQubo => ising_to_qubo(ising).max_abs_coefficient() / 2.0,
            ChainStrength::Fixed(v) => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplerPlacement {
    /// Whole coupling on the lowest connecting edge.
    #[default]
    Lowest,
    /// Spread evenly over every connecting edge.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedProblem {
    /// Spin `k` is physical node `nodes[k]`.
    pub ising: IsingProblem,
    pub nodes: Vec<usize>,
    pub chain_strength: f64,
    pub chain_edges: usize,
}

impl EmbeddedProblem {
    /// Constant added so unbroken chains cost nothing.
    pub fn chain_offset(&self) -> f64 {
        self.chain_strength * self.chain_edges as f64
    }

    /// Copies each logical spin onto its chain.
    pub fn lift(&self, emb: &EmbeddingMap, logical: &[i8]) -> Vec<i8> {
        let index: BTreeMap<usize, usize> = self.nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
        let mut s = vec![1i8; self.nodes.len()];
        for (&i, chain) in &emb.chains {
            for p in chain {
                s[index[p]] = logical[i];
            }
        }
        s
    }
}

pub fn apply_embedding(
    ising: &IsingProblem,
    emb: &EmbeddingMap,
    hw: &HardwareGraph,
    strength: ChainStrength,
    placement: CouplerPlacement,
) -> Result<EmbeddedProblem> {
    let report = validate_embedding(emb, ising, hw);
    if !report.valid {
        return Err(Error::input(format!("invalid embedding: {}", report.violations.join("; "))));
    }
    let cs = strength.value(ising);
    let nodes = emb.physical_nodes();
    let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let mut out = IsingProblem::new(nodes.len());
    out.offset = ising.offset;
    for (i, &h) in ising.fields.iter().enumerate() {
        let chain = &emb.chains[&i];
        for p in chain {
            out.fields[index[p]] += h / chain.len() as f64;
        }
    }
    for (&(i, j), &c) in &ising.couplings {
        let (a, b) = (&emb.chains[&i], &emb.chains[&j]);
        let mut links: Vec<(usize, usize)> =
            a.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).filter(|&(u, v)| hw.has_edge(u, v)).map(|(u, v)| (u.min(v), u.max(v))).collect();
        links.sort_unstable();
        match placement {
            CouplerPlacement::Lowest => out.add_coupling(index[&links[0].0], index[&links[0].1], c),
            CouplerPlacement::Split => {
                for &(u, v) in &links {
                    out.add_coupling(index[&u], index[&v], c / links.len() as f64);
                }
            }
        }
    }
    let mut chain_edges = 0;
    for chain in emb.chains.values() {
        for (x, &u) in chain.iter().enumerate() {
            for &v in &chain[x + 1..] {
                if hw.has_edge(u, v) {
                    out.add_coupling(index[&u], index[&v], -cs);
                    chain_edges += 1;
                }
            }
        }
    }
    out.offset += cs * chain_edges as f64;
    Ok(EmbeddedProblem { ising: out, nodes, chain_strength: cs, chain_edges })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unembedded {
    pub spins: Vec<i8>,
    pub chain_break_fraction: f64,
}

/// Majority vote per chain; ties fall to a coin keyed by (seed, sample, variable).
/// `physical` is ordered like `nodes`.
pub fn unembed(physical: &[i8], nodes: &[usize], emb: &EmbeddingMap, seed: u64, sample: u64) -> Result<Unembedded> {
    if physical.len() != nodes.len() {
        return Err(Error::input(format!("sample has {} spins, expected {}", physical.len(), nodes.len())));
    }
    let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let n = emb.chains.keys().next_back().map_or(0, |&k| k + 1);
    let mut spins = vec![1i8; n];
    let mut broken = 0;
    for (&i, chain) in &emb.chains {
        let mut sum = 0i64;
        for p in chain {
            let k = *index.get(p).ok_or_else(|| Error::input(format!("sample lacks physical node {p}")))?;
            sum += physical[k] as i64;
        }
        if sum.unsigned_abs() as usize != chain.len() {
            broken += 1;
        }
        spins[i] = match sum.signum() {
            1 => 1,
            -1 => -1,
            _ => {
                if rng::stream(seed, "unembed", sample << 24 | i as u64).gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
    }
    let chain_break_fraction = if emb.chains.is_empty() { 0.0 } else { broken as f64 / emb.chains.len() as f64 };
    Ok(Unembedded { spins, chain_break_fraction })
}
