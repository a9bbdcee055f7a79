//! Maximum bipartite matching between equations and variables (Hopcroft-Karp).
//!
//! Equations form the left side, variables the right side, and each allowed
//! pattern entry is an edge. Free equations are processed in ascending index
//! order and adjacency lists are sorted, so the returned matching is a
//! deterministic function of the pattern.

use std::collections::VecDeque;

use crate::structure::StructurePattern;

const UNMATCHED: usize = usize::MAX;
const INF: usize = usize::MAX;

/// A maximum matching over the allowed entries of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Variable matched to each equation.
    pub equation_to_variable: Vec<Option<usize>>,
    /// Equation matched to each variable.
    pub variable_to_equation: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    /// Matched `(equation, variable)` pairs in equation order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.equation_to_variable
            .iter()
            .enumerate()
            .filter_map(|(e, v)| v.map(|v| (e, v)))
            .collect()
    }
}

/// Checks that `pairs` is a matching inside `pattern`: every pair allowed and
/// no equation or variable used twice.
pub fn is_valid_matching(pattern: &StructurePattern, pairs: &[(usize, usize)]) -> bool {
    let mut eq_used = vec![false; pattern.num_equations()];
    let mut var_used = vec![false; pattern.num_variables()];
    for &(e, v) in pairs {
        if !pattern.contains(e, v) || eq_used[e] || var_used[v] {
            return false;
        }
        eq_used[e] = true;
        var_used[v] = true;
    }
    true
}

pub fn maximum_matching(pattern: &StructurePattern) -> Matching {
    HopcroftKarp::new(pattern).run()
}

struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    eq_match: Vec<usize>,
    var_match: Vec<usize>,
    dist: Vec<usize>,
    // next adjacency position per equation for the current phase
    cursor: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(pattern: &'a StructurePattern) -> Self {
        let m = pattern.num_equations();
        Self {
            adj: pattern.rows(),
            eq_match: vec![UNMATCHED; m],
            var_match: vec![UNMATCHED; pattern.num_variables()],
            dist: vec![INF; m],
            cursor: vec![0; m],
        }
    }

    fn run(mut self) -> Matching {
        let mut size = 0;
        while self.bfs() {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            for e in 0..self.adj.len() {
                if self.eq_match[e] == UNMATCHED && self.dfs(e) {
                    size += 1;
                }
            }
        }
        let to_opt = |x: usize| (x != UNMATCHED).then_some(x);
        Matching {
            equation_to_variable: self.eq_match.iter().copied().map(to_opt).collect(),
            variable_to_equation: self.var_match.iter().copied().map(to_opt).collect(),
            size,
        }
    }

    /// Layers equations by alternating-path distance from the free equations.
    /// Returns whether some free variable is reachable.
    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for (e, d) in self.dist.iter_mut().enumerate() {
            if self.eq_match[e] == UNMATCHED {
                *d = 0;
                queue.push_back(e);
            } else {
                *d = INF;
            }
        }
        let mut found = false;
        while let Some(e) = queue.pop_front() {
            for &v in &self.adj[e] {
                let next = self.var_match[v];
                if next == UNMATCHED {
                    found = true;
                } else if self.dist[next] == INF {
                    self.dist[next] = self.dist[e] + 1;
                    queue.push_back(next);
                }
            }
        }
        found
    }

    fn dfs(&mut self, e: usize) -> bool {
        while self.cursor[e] < self.adj[e].len() {
            let v = self.adj[e][self.cursor[e]];
            self.cursor[e] += 1;
            let next = self.var_match[v];
            let advance = if next == UNMATCHED {
                true
            } else {
                self.dist[next] == self.dist[e] + 1 && self.dfs(next)
            };
            if advance {
                self.eq_match[e] = v;
                self.var_match[v] = e;
                return true;
            }
        }
        self.dist[e] = INF;
        false
    }
}
