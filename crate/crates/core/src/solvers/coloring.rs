//! Speculative parallel greedy coloring of the variable-interaction graph.
//!
//! Each round, every uncolored vertex picks the smallest color unused by its
//! already-colored neighbours (reading only the previous round's state); then
//! same-round neighbours that collided give up their color, the lower index
//! keeping it. Rounds repeat until all vertices are colored, so the result does
//! not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::objective::PolynomialObjective;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorClasses {
    pub classes: Vec<Vec<usize>>,
}

impl ColorClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// True if no term of `obj` holds two variables of one class.
    pub fn is_valid_for(&self, obj: &PolynomialObjective) -> bool {
        let mut color = vec![usize::MAX; obj.num_vars()];
        for (c, class) in self.classes.iter().enumerate() {
            for &v in class {
                color[v] = c;
            }
        }
        if color.contains(&usize::MAX) {
            return false;
        }
        obj.terms().all(|(k, _)| {
            let mut seen: Vec<usize> = k.iter().map(|&v| color[v]).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }
}

pub fn conflict_graph(obj: &PolynomialObjective) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); obj.num_vars()];
    for (k, _) in obj.terms() {
        for a in 0..k.len() {
            for b in a + 1..k.len() {
                adj[k[a]].push(k[b]);
                adj[k[b]].push(k[a]);
            }
        }
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }
    adj
}

pub fn color_graph(obj: &PolynomialObjective) -> ColorClasses {
    let adj = conflict_graph(obj);
    let n = adj.len();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut pending: Vec<usize> = (0..n).collect();
    while !pending.is_empty() {
        let snapshot = &color;
        let picks: Vec<usize> = pending
            .par_iter()
            .map(|&v| {
                let mut used: Vec<usize> = adj[v].iter().filter_map(|&u| snapshot[u]).collect();
                used.sort_unstable();
                used.dedup();
                used.iter().enumerate().find(|(i, &c)| *i != c).map_or(used.len(), |(i, _)| i)
            })
            .collect();
        let mut tentative = color.clone();
        for (&v, &c) in pending.iter().zip(&picks) {
            tentative[v] = Some(c);
        }
        let in_round: Vec<bool> = {
            let mut m = vec![false; n];
            for &v in &pending {
                m[v] = true;
            }
            m
        };
        let losers: Vec<usize> = pending
            .par_iter()
            .copied()
            .filter(|&v| adj[v].iter().any(|&u| u < v && in_round[u] && tentative[u] == tentative[v]))
            .collect();
        for &v in &losers {
            tentative[v] = None;
        }
        color = tentative;
        pending = losers;
    }
    let k = color.iter().map(|c| c.unwrap() + 1).max().unwrap_or(0);
    let mut classes = vec![Vec::new(); k];
    for (v, c) in color.into_iter().enumerate() {
        classes[c.unwrap()].push(v);
    }
    classes.retain(|c| !c.is_empty());
    ColorClasses { classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_couplings_one_class() {
        let mut p = PolynomialObjective::new(4);
        p.add_term(&[0], 1.0);
        p.add_term(&[3], -1.0);
        assert_eq!(color_graph(&p).classes, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn path_two_classes() {
        let mut p = PolynomialObjective::new(3);
        p.add_term(&[0, 1], 1.0);
        p.add_term(&[1, 2], 1.0);
        assert_eq!(color_graph(&p).classes, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn triangle_three_classes() {
        let mut p = PolynomialObjective::new(3);
        p.add_term(&[0, 1, 2], 1.0);
        let c = color_graph(&p);
        assert_eq!(c.len(), 3);
        assert!(c.is_valid_for(&p));
    }
}
