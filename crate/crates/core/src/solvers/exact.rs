//! Exact minimization: plain Gray-code enumeration, and a branch-and-bound
//! over an encoder's component structure for turn models too large to enumerate.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng;
use crate::encoders::{Component, EncodedModel, Layout, SearchHint};
use crate::error::{Error, Result};
use crate::objective::PolynomialObjective;

pub const DEFAULT_FREE_VAR_LIMIT: usize = 30;
pub const DEFAULT_STRUCTURED_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConfig {
    /// Largest variable count enumerated exhaustively.
    pub free_var_limit: usize,
    /// Largest branching-variable count for the structured search.
    pub structured_limit: usize,
    /// Refuse instead of returning more minimizers than this.
    pub max_minimizers: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            free_var_limit: DEFAULT_FREE_VAR_LIMIT,
            structured_limit: DEFAULT_STRUCTURED_LIMIT,
            max_minimizers: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    Enumeration,
    BranchAndBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub ground_energy: f64,
    /// Every minimizer, sorted by bitstring.
    pub minimizers: Vec<Vec<u8>>,
    pub method: ExactMethod,
    /// Variables actually branched on.
    pub free_vars: usize,
    pub nodes: u64,
}

/// Degeneracy tolerance: relative to the coefficient mass, never below 1e-9.
pub fn energy_tolerance(obj: &PolynomialObjective) -> f64 {
    1e-9 + 1e-12 * obj.terms().map(|(_, c)| c.abs()).sum::<f64>()
}

struct VarTerms {
    /// For each variable: (coefficient, other variables of the term).
    by_var: Vec<Vec<(f64, Vec<usize>)>>,
}

impl VarTerms {
    fn new(obj: &PolynomialObjective) -> Self {
        let mut by_var = vec![Vec::new(); obj.num_vars()];
        for (k, c) in obj.terms() {
            for &v in k {
                by_var[v].push((c, k.iter().copied().filter(|&u| u != v).collect()));
            }
        }
        VarTerms { by_var }
    }

    #[inline]
    fn delta(&self, bits: &[u8], v: usize) -> f64 {
        let mut f = 0.0;
        for (c, others) in &self.by_var[v] {
            if others.iter().all(|&u| bits[u] == 1) {
                f += c;
            }
        }
        if bits[v] == 1 {
            -f
        } else {
            f
        }
    }
}

/// Exhaustive enumeration of all `2^n` assignments.
pub fn brute_force(obj: &PolynomialObjective, free_var_limit: usize) -> Result<ExactResult> {
    brute_force_with(obj, &ExactConfig { free_var_limit, ..Default::default() })
}

pub fn brute_force_with(obj: &PolynomialObjective, cfg: &ExactConfig) -> Result<ExactResult> {
    let n = obj.num_vars();
    if n > cfg.free_var_limit || n >= 63 {
        return Err(Error::Refused { what: "free variables".into(), count: n, limit: cfg.free_var_limit });
    }
    let tol = energy_tolerance(obj);
    let vt = VarTerms::new(obj);
    let top = n.min(6);
    let low = n - top;
    let chunks: Vec<(f64, Vec<Vec<u8>>, bool)> = (0..1u64 << top)
        .into_par_iter()
        .map(|c| {
            let mut bits = vec![0u8; n];
            for t in 0..top {
                bits[low + t] = (c >> t & 1) as u8;
            }
            let mut e = obj.evaluate_bits(&bits);
            let mut best = f64::INFINITY;
            let mut found: Vec<Vec<u8>> = Vec::new();
            let mut overflow = false;
            let mut consider = |bits: &[u8], e: f64| {
                if e > best + 1e3 * tol {
                    return;
                }
                let exact = obj.evaluate_bits(bits);
                if exact < best - tol {
                    best = exact;
                    found.clear();
                }
                if exact <= best + tol {
                    if found.len() < cfg.max_minimizers {
                        found.push(bits.to_vec());
                    } else {
                        overflow = true;
                    }
                }
            };
            consider(&bits, e);
            for s in 1u64..(1u64 << low) {
                let v = s.trailing_zeros() as usize;
                e += vt.delta(&bits, v);
                bits[v] ^= 1;
                if s & 0xffff == 0 {
                    e = obj.evaluate_bits(&bits);
                }
                consider(&bits, e);
            }
            // drop entries superseded by a later, lower best
            found.retain(|b| obj.evaluate_bits(b) <= best + tol);
            (best, found, overflow)
        })
        .collect();
    let ground = chunks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut minimizers = Vec::new();
    for (b, found, overflow) in chunks {
        if b <= ground + tol {
            if overflow {
                return Err(Error::Refused { what: "degenerate minimizers".into(), count: cfg.max_minimizers + 1, limit: cfg.max_minimizers });
            }
            minimizers.extend(found.into_iter().filter(|x| obj.evaluate_bits(x) <= ground + tol));
        }
    }
    if minimizers.len() > cfg.max_minimizers {
        return Err(Error::Refused { what: "degenerate minimizers".into(), count: minimizers.len(), limit: cfg.max_minimizers });
    }
    finish(obj, minimizers, ExactMethod::Enumeration, n, 1u64 << n)
}

fn finish(obj: &PolynomialObjective, mut minimizers: Vec<Vec<u8>>, method: ExactMethod, free_vars: usize, nodes: u64) -> Result<ExactResult> {
    minimizers.sort();
    minimizers.dedup();
    let ground_energy = minimizers.iter().map(|b| obj.evaluate_bits(b)).fold(f64::INFINITY, f64::min);
    Ok(ExactResult { ground_energy, minimizers, method, free_vars, nodes })
}

/// Exact ground states of an encoded model: plain enumeration when small
/// enough, otherwise the structured search for turn encodings.
pub fn solve_exact(model: &EncodedModel, cfg: &ExactConfig) -> Result<ExactResult> {
    if model.num_vars() <= cfg.free_var_limit {
        return brute_force_with(&model.objective, cfg);
    }
    match model.layout {
        Layout::Turn(_) => structured_search(&model.objective, &model.components, &model.search_hint(), cfg),
        Layout::Coordinate(_) => {
            Err(Error::Refused { what: "free variables".into(), count: model.num_vars(), limit: cfg.free_var_limit })
        }
    }
}

type Terms = Vec<(f64, Vec<usize>)>;

fn eval_terms(t: &Terms, bits: &[u8]) -> f64 {
    t.iter().filter(|(_, k)| k.iter().all(|&v| bits[v] == 1)).map(|(c, _)| c).sum()
}

struct Group {
    rest: Terms,
    /// (variable, terms it multiplies with the variable removed)
    elim: Option<(usize, Terms)>,
    lb: f64,
}

impl Group {
    fn value(&self, bits: &[u8]) -> f64 {
        let mut v = eval_terms(&self.rest, bits);
        if let Some((_, t)) = &self.elim {
            v += eval_terms(t, bits).min(0.0);
        }
        v
    }
}

fn split(poly: &PolynomialObjective) -> Terms {
    let mut t: Terms = poly.terms().map(|(k, c)| (c, k.to_vec())).collect();
    if poly.offset() != 0.0 {
        t.push((poly.offset(), Vec::new()));
    }
    t
}

/// Minimum of `terms` over all assignments, exhaustive per connected block of
/// at most 20 variables, termwise otherwise.
fn lower_bound(terms: &Terms) -> f64 {
    let vars: BTreeSet<usize> = terms.iter().flat_map(|(_, k)| k.iter().copied()).collect();
    let vars: Vec<usize> = vars.into_iter().collect();
    let pos = |v: usize| vars.binary_search(&v).unwrap();
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (_, k) in terms {
        for w in k.windows(2) {
            let (a, b) = (find(&mut parent, pos(w[0])), find(&mut parent, pos(w[1])));
            parent[a] = b;
        }
    }
    let mut total = 0.0;
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..vars.len() {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    for (c, _) in terms.iter().filter(|(_, k)| k.is_empty()) {
        total += c;
    }
    for members in blocks.values() {
        let local: Terms = terms
            .iter()
            .filter(|(_, k)| !k.is_empty() && members.contains(&pos(k[0])))
            .map(|(c, k)| (*c, k.iter().map(|&v| members.iter().position(|&m| m == pos(v)).unwrap()).collect()))
            .collect();
        if members.len() <= 20 {
            let mut bits = vec![0u8; members.len()];
            let mut best = f64::INFINITY;
            for x in 0..1u64 << members.len() {
                for (i, b) in bits.iter_mut().enumerate() {
                    *b = (x >> i & 1) as u8;
                }
                best = best.min(eval_terms(&local, &bits));
            }
            total += best;
        } else {
            total += local.iter().map(|(c, _)| c.min(0.0)).sum::<f64>();
        }
    }
    total
}

/// Branch-and-bound over the variables of `hint.blocks`, in order. Each
/// component is evaluated once all its variables are fixed; unfixed ones
/// contribute their lower bound. Eliminated variables are set to their
/// optimal value analytically.
pub fn structured_search(obj: &PolynomialObjective, components: &[Component], hint: &SearchHint, cfg: &ExactConfig) -> Result<ExactResult> {
    let n = obj.num_vars();
    let eliminated: BTreeSet<usize> = hint.eliminate.iter().copied().collect();
    let mut order = Vec::new();
    let mut placed = vec![false; n];
    for &v in hint.blocks.iter().flatten() {
        if v >= n || placed[v] || eliminated.contains(&v) {
            return Err(Error::input(format!("search hint repeats or misplaces variable {v}")));
        }
        placed[v] = true;
        order.push(v);
    }
    order.extend((0..n).filter(|&v| !placed[v] && !eliminated.contains(&v)));
    if order.len() > cfg.structured_limit {
        return Err(Error::Refused { what: "branching variables".into(), count: order.len(), limit: cfg.structured_limit });
    }
    let mut position = vec![usize::MAX; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }

    // every eliminated variable must sit in exactly one component, with no other eliminated variable
    let mut owner = vec![None; n];
    for (ci, c) in components.iter().enumerate() {
        for v in c.poly.support() {
            if eliminated.contains(&v) {
                if owner[v].is_some() || c.eliminable != Some(v) {
                    return Err(Error::input(format!("variable {v} cannot be eliminated")));
                }
                owner[v] = Some(ci);
            }
        }
    }

    let mut base = 0.0;
    let mut by_depth: Vec<Vec<Group>> = (0..order.len()).map(|_| Vec::new()).collect();
    for c in components {
        let all = split(&c.poly);
        let (rest, elim) = match c.eliminable {
            Some(e) if eliminated.contains(&e) => {
                let (with, without): (Terms, Terms) = all.into_iter().partition(|(_, k)| k.contains(&e));
                let with: Terms = with.into_iter().map(|(c, k)| (c, k.into_iter().filter(|&v| v != e).collect())).collect();
                (without, Some((e, with)))
            }
            _ => (all, None),
        };
        let depth = rest
            .iter()
            .chain(elim.iter().flat_map(|(_, t)| t.iter()))
            .flat_map(|(_, k)| k.iter().map(|&v| position[v]))
            .max();
        let lb = match (c.lower_bound, &elim) {
            (Some(lb), _) => lb,
            (None, None) => lower_bound(&rest),
            (None, Some((_, t))) => lower_bound(&rest) + lower_bound(t).min(0.0),
        };
        let g = Group { rest, elim, lb };
        match depth {
            Some(d) => by_depth[d].push(g),
            None => base += g.value(&[]),
        }
    }
    let mut suffix = vec![0.0; order.len() + 1];
    for d in (0..order.len()).rev() {
        suffix[d] = suffix[d + 1] + by_depth[d].iter().map(|g| g.lb).sum::<f64>();
    }

    let tol = energy_tolerance(obj);
    let incumbent = local_search_incumbent(obj, 8);
    let mut s = Search {
        order: &order,
        by_depth: &by_depth,
        suffix: &suffix,
        bits: vec![0u8; n],
        best: incumbent,
        tol,
        leaves: Vec::new(),
        nodes: 0,
        cap: cfg.max_minimizers,
        overflow: false,
    };
    s.dfs(0, base);
    if s.overflow {
        return Err(Error::Refused { what: "degenerate minimizers".into(), count: cfg.max_minimizers + 1, limit: cfg.max_minimizers });
    }
    let nodes = s.nodes;
    let best = s.best;
    let leaves: Vec<Vec<u8>> = s.leaves.into_iter().filter(|(e, _)| *e <= best + tol).map(|(_, b)| b).collect();

    // expand eliminated variables over their optimal values
    let elim_groups: Vec<&Group> = by_depth.iter().flatten().filter(|g| g.elim.is_some()).collect();
    let mut minimizers = Vec::new();
    for leaf in leaves {
        let mut partial = vec![leaf];
        for g in &elim_groups {
            let (e, t) = g.elim.as_ref().unwrap();
            let c = eval_terms(t, &partial[0]);
            let choices: &[u8] = if c < -tol {
                &[1]
            } else if c > tol {
                &[0]
            } else {
                &[0, 1]
            };
            partial = partial
                .into_iter()
                .flat_map(|b| {
                    choices.iter().map(move |&x| {
                        let mut b = b.clone();
                        b[*e] = x;
                        b
                    })
                })
                .collect();
        }
        minimizers.extend(partial);
        if minimizers.len() > cfg.max_minimizers {
            return Err(Error::Refused { what: "degenerate minimizers".into(), count: minimizers.len(), limit: cfg.max_minimizers });
        }
    }
    let ground = minimizers.iter().map(|b| obj.evaluate_bits(b)).fold(f64::INFINITY, f64::min);
    minimizers.retain(|b| obj.evaluate_bits(b) <= ground + tol);
    finish(obj, minimizers, ExactMethod::BranchAndBound, order.len(), nodes)
}

struct Search<'a> {
    order: &'a [usize],
    by_depth: &'a [Vec<Group>],
    suffix: &'a [f64],
    bits: Vec<u8>,
    best: f64,
    tol: f64,
    leaves: Vec<(f64, Vec<u8>)>,
    nodes: u64,
    cap: usize,
    overflow: bool,
}

impl Search<'_> {
    fn dfs(&mut self, p: usize, current: f64) {
        self.nodes += 1;
        if p == self.order.len() {
            if current < self.best - self.tol {
                self.best = current;
                let (best, tol) = (self.best, self.tol);
                self.leaves.retain(|(e, _)| *e <= best + tol);
            }
            if current <= self.best + self.tol {
                if self.leaves.len() >= self.cap {
                    self.overflow = true;
                    return;
                }
                self.leaves.push((current, self.bits.clone()));
            }
            return;
        }
        let v = self.order[p];
        for val in [0u8, 1] {
            self.bits[v] = val;
            let e = current + self.by_depth[p].iter().map(|g| g.value(&self.bits)).sum::<f64>();
            if e + self.suffix[p + 1] <= self.best + self.tol {
                self.dfs(p + 1, e);
                if self.overflow {
                    return;
                }
            }
        }
        self.bits[v] = 0;
    }
}

/// Upper bound from a few single-flip descents.
fn local_search_incumbent(obj: &PolynomialObjective, starts: usize) -> f64 {
    let n = obj.num_vars();
    let vt = VarTerms::new(obj);
    let mut best = f64::INFINITY;
    for s in 0..starts {
        let mut bits = rng::random_bits(&mut rng::stream(0, "exact-incumbent", s as u64), n);
        if s == 0 {
            bits.iter_mut().for_each(|b| *b = 0);
        }
        loop {
            let mut improved = false;
            for v in 0..n {
                if vt.delta(&bits, v) < -1e-12 {
                    bits[v] ^= 1;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        best = best.min(obj.evaluate_bits(&bits));
    }
    // keep ties with the incumbent inside the search window
    best + 1e-6 * (1.0 + best.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_variable_example() {
        let mut p = PolynomialObjective::new(2);
        p.add_term(&[0], 1.0);
        p.add_term(&[1], -1.0);
        let r = brute_force(&p, 30).unwrap();
        assert_eq!(r.ground_energy, -1.0);
        assert_eq!(r.minimizers, vec![vec![0, 1]]);
    }

    #[test]
    fn degenerate_minima_all_returned() {
        let mut p = PolynomialObjective::new(9);
        p.add_term(&[0, 1, 2], -1.0);
        let r = brute_force(&p, 30).unwrap();
        assert_eq!(r.ground_energy, -1.0);
        assert_eq!(r.minimizers.len(), 64);
    }

    #[test]
    fn refuses_over_limit() {
        let p = PolynomialObjective::new(12);
        assert!(matches!(brute_force(&p, 10), Err(Error::Refused { count: 12, .. })));
    }
}
