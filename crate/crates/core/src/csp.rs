//! Depth-first backtracking with forward checking for "adjacent cells differ"
//! constraint problems. Domains are `u64` color bitmasks.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::lattice::{Coord, Graph};

/// Variable selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Variables in index order, colors ascending. Solutions come out in
    /// lexicographic order of the color vector.
    Static,
    /// Smallest remaining domain first (ties by index).
    MinRemaining,
}

#[derive(Clone, Debug)]
pub struct Csp {
    adj: Vec<Vec<usize>>,
    domains: Vec<u64>,
}

pub fn full_mask(q: u32) -> u64 {
    if q >= 64 {
        u64::MAX
    } else {
        (1u64 << q) - 1
    }
}

pub fn mask_colors(mut mask: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let c = mask.trailing_zeros();
            mask &= mask - 1;
            Some(c)
        }
    })
}

impl Csp {
    pub fn new(graph: &Graph, domains: Vec<u64>) -> Self {
        assert_eq!(graph.vertex_count(), domains.len());
        let adj = (0..graph.vertex_count())
            .map(|v| graph.neighbors(v).to_vec())
            .collect();
        Csp { adj, domains }
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn domains(&self) -> &[u64] {
        &self.domains
    }

    /// Pin variable `v` to `color` (an empty domain if the color was not allowed).
    pub fn pin(&mut self, v: usize, color: u32) {
        self.domains[v] &= 1u64 << color;
    }

    /// Visit every solution; returns `false` if the visitor stopped early.
    pub fn for_each_solution(
        &self,
        order: Order,
        mut visit: impl FnMut(&[u32]) -> ControlFlow<()>,
    ) -> bool {
        let n = self.len();
        let mut state = SearchState {
            dom: self.domains.clone(),
            value: vec![u32::MAX; n],
            trail: Vec::new(),
        };
        if state.dom.contains(&0) {
            return true;
        }
        self.descend(&mut state, order, 0, &mut visit).is_continue()
    }

    pub fn first_solution(&self, order: Order) -> Option<Vec<u32>> {
        let mut found = None;
        self.for_each_solution(order, |s| {
            found = Some(s.to_vec());
            ControlFlow::Break(())
        });
        found
    }

    /// Number of solutions, stopping once `limit` is reached.
    pub fn count_solutions(&self, order: Order, limit: Option<u64>) -> u64 {
        let mut count = 0u64;
        self.for_each_solution(order, |_| {
            count += 1;
            if limit.is_some_and(|l| count >= l) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        count
    }

    fn pick(&self, state: &SearchState, order: Order, depth: usize) -> usize {
        match order {
            Order::Static => depth,
            Order::MinRemaining => {
                let mut best = usize::MAX;
                let mut best_size = u32::MAX;
                for v in 0..self.len() {
                    if state.value[v] == u32::MAX {
                        let s = state.dom[v].count_ones();
                        if s < best_size {
                            best = v;
                            best_size = s;
                        }
                    }
                }
                best
            }
        }
    }

    fn descend(
        &self,
        state: &mut SearchState,
        order: Order,
        depth: usize,
        visit: &mut impl FnMut(&[u32]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == self.len() {
            return visit(&state.value);
        }
        let v = self.pick(state, order, depth);
        for color in mask_colors(state.dom[v]) {
            let mark = state.trail.len();
            state.value[v] = color;
            let bit = 1u64 << color;
            let mut wiped = false;
            for &w in &self.adj[v] {
                if state.value[w] == u32::MAX && state.dom[w] & bit != 0 {
                    state.dom[w] &= !bit;
                    state.trail.push(w);
                    if state.dom[w] == 0 {
                        wiped = true;
                        break;
                    }
                }
            }
            if !wiped {
                self.descend(state, order, depth + 1, visit)?;
            }
            for w in state.trail.drain(mark..) {
                state.dom[w] |= bit;
            }
            state.value[v] = u32::MAX;
        }
        ControlFlow::Continue(())
    }
}

struct SearchState {
    dom: Vec<u64>,
    value: Vec<u32>,
    trail: Vec<usize>,
}

/// A constraint problem over lattice cells: `cells` are the variables, and
/// colors of `fixed` cells adjacent to them are removed from their domains.
/// Cells that are neither variables nor fixed impose nothing.
#[derive(Clone, Debug)]
pub struct CellProblem {
    pub cells: Vec<Coord>,
    pub index: HashMap<Coord, usize>,
    pub csp: Csp,
}

impl CellProblem {
    pub fn new(cells: Vec<Coord>, q: u32, fixed: impl Fn(&Coord) -> Option<u32>) -> Self {
        let graph = Graph::induced(&cells);
        let index: HashMap<Coord, usize> =
            cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let domains = cells
            .iter()
            .map(|v| {
                let mut m = full_mask(q);
                for w in v.lattice_neighbors() {
                    if index.contains_key(&w) {
                        continue;
                    }
                    if let Some(c) = fixed(&w) {
                        m &= !(1u64 << c);
                    }
                }
                m
            })
            .collect();
        CellProblem {
            csp: Csp::new(&graph, domains),
            cells,
            index,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    #[test]
    fn counts_match_chromatic_polynomial_of_cycles() {
        // P(C_n, q) = (q-1)^n + (-1)^n (q-1)
        for n in 3..8usize {
            for q in 2..5u32 {
                let csp = Csp::new(&cycle(n), vec![full_mask(q); n]);
                let expected =
                    (q as i64 - 1).pow(n as u32) + (-1i64).pow(n as u32) * (q as i64 - 1);
                for order in [Order::Static, Order::MinRemaining] {
                    assert_eq!(csp.count_solutions(order, None) as i64, expected);
                }
            }
        }
    }

    #[test]
    fn static_order_is_lexicographic() {
        let csp = Csp::new(&cycle(4), vec![full_mask(3); 4]);
        let mut seen = Vec::new();
        csp.for_each_solution(Order::Static, |s| {
            seen.push(s.to_vec());
            ControlFlow::Continue(())
        });
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn empty_domain_means_no_solution() {
        let csp = Csp::new(&cycle(3), vec![0b1, 0b11, 0b111]);
        assert_eq!(csp.count_solutions(Order::MinRemaining, None), 1);
        let csp = Csp::new(&cycle(3), vec![0, 0b11, 0b11]);
        assert_eq!(csp.first_solution(Order::Static), None);
    }

    #[test]
    fn limit_stops_early() {
        let csp = Csp::new(&cycle(6), vec![full_mask(4); 6]);
        assert_eq!(csp.count_solutions(Order::Static, Some(5)), 5);
    }
}
