//! Orientations with bounded out-degree, found by bipartite matching between
//! edges and vertex copies.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::{BoxRegion, Coord, Graph};

/// A digraph on `0..n`; when built from a graph, each edge is oriented once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    n: usize,
    arcs: Vec<(usize, usize)>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
}

impl Orientation {
    pub fn from_arcs(n: usize, arcs: Vec<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for &(a, b) in &arcs {
            assert!(a < n && b < n, "arc ({a},{b}) out of range");
            out[a].push(b);
        }
        Orientation { n, arcs, out }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out.iter().map(Vec::len).collect()
    }

    /// True iff the arcs are exactly the edges of `g`, each taken once.
    pub fn orients(&self, g: &Graph) -> bool {
        if self.n != g.vertex_count() || self.arcs.len() != g.edge_count() {
            return false;
        }
        let mut undirected: Vec<(usize, usize)> =
            self.arcs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        undirected.sort_unstable();
        let before = undirected.len();
        undirected.dedup();
        if undirected.len() != before {
            return false;
        }
        let mut edges = g.edges().to_vec();
        edges.sort_unstable();
        undirected == edges
    }
}

/// A set of vertices `H` with `sum_{v in H} (L(v) - 1) < |E_H|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolation {
    pub vertices: Vec<usize>,
    pub capacity: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallOutcome {
    Oriented(Orientation),
    Infeasible(HallViolation),
}

impl HallOutcome {
    pub fn orientation(self) -> Option<Orientation> {
        match self {
            HallOutcome::Oriented(o) => Some(o),
            HallOutcome::Infeasible(_) => None,
        }
    }
}

/// `sum_{v in H} (L(v) - 1) >= |E_H|` for the induced subgraph on `vertices`.
pub fn check_subgraph_inequality(g: &Graph, vertices: &[usize], bound: &[u32]) -> bool {
    let capacity: i64 = vertices.iter().map(|&v| bound[v] as i64 - 1).sum();
    capacity >= g.induced_edge_count(vertices) as i64
}

struct Matcher<'a> {
    g: &'a Graph,
    copies: Vec<std::ops::Range<usize>>,
    owner: Vec<usize>,
    matched_edge: Vec<Option<usize>>,
    visited: Vec<bool>,
    touched_edges: Vec<usize>,
}

impl Matcher<'_> {
    fn augment(&mut self, e: usize) -> bool {
        self.touched_edges.push(e);
        let (a, b) = self.g.edges()[e];
        for v in [a, b] {
            for copy in self.copies[v].clone() {
                if self.visited[copy] {
                    continue;
                }
                self.visited[copy] = true;
                let free = match self.matched_edge[copy] {
                    None => true,
                    Some(other) => self.augment(other),
                };
                if free {
                    self.matched_edge[copy] = Some(e);
                    return true;
                }
            }
        }
        false
    }
}

/// Add vertices that bring at least as many edges as capacity, until none do.
fn grow_violation(g: &Graph, bound: &[u32], vertices: &mut Vec<usize>) {
    let mut inside = vec![false; g.vertex_count()];
    for &v in vertices.iter() {
        inside[v] = true;
    }
    loop {
        let mut changed = false;
        for v in 0..g.vertex_count() {
            if inside[v] {
                continue;
            }
            let gained = g.neighbors(v).iter().filter(|&&w| inside[w]).count();
            if gained >= bound[v] as usize - 1 {
                inside[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    *vertices = (0..g.vertex_count()).filter(|&v| inside[v]).collect();
}

/// Orient `g` so that `out_degree(v) <= L(v) - 1`, by matching every edge to
/// one of the `L(v) - 1` copies of an endpoint (augmenting paths). When no
/// perfect matching of the edges exists, the edges reached by the failed
/// search span a violating vertex set, which is then enlarged while the
/// violation does not shrink.
pub fn hall_orientation(g: &Graph, bound: &[u32]) -> Result<HallOutcome> {
    let n = g.vertex_count();
    if bound.len() != n {
        return domain(format!("bound has {} entries for {n} vertices", bound.len()));
    }
    if let Some(v) = bound.iter().position(|&l| l < 1) {
        return domain(format!("bound at vertex {v} is below 1"));
    }
    let mut copies = Vec::with_capacity(n);
    let mut owner = Vec::new();
    for (v, &l) in bound.iter().enumerate() {
        let start = owner.len();
        owner.extend(std::iter::repeat_n(v, l as usize - 1));
        copies.push(start..owner.len());
    }
    let total = owner.len();
    let mut m = Matcher {
        g,
        copies,
        owner,
        matched_edge: vec![None; total],
        visited: vec![false; total],
        touched_edges: Vec::new(),
    };
    for e in 0..g.edge_count() {
        m.visited.iter_mut().for_each(|x| *x = false);
        m.touched_edges.clear();
        if !m.augment(e) {
            let mut vertices: Vec<usize> = m
                .touched_edges
                .iter()
                .flat_map(|&f| {
                    let (a, b) = g.edges()[f];
                    [a, b]
                })
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            grow_violation(g, bound, &mut vertices);
            let capacity = vertices.iter().map(|&v| bound[v] as usize - 1).sum();
            let edges = g.induced_edge_count(&vertices);
            debug_assert!(capacity < edges);
            return Ok(HallOutcome::Infeasible(HallViolation {
                vertices,
                capacity,
                edges,
            }));
        }
    }
    let mut arcs = vec![(usize::MAX, usize::MAX); g.edge_count()];
    for (copy, e) in m.matched_edge.iter().enumerate() {
        if let Some(e) = *e {
            let tail = m.owner[copy];
            let (a, b) = g.edges()[e];
            arcs[e] = (tail, if tail == a { b } else { a });
        }
    }
    debug_assert!(arcs.iter().all(|a| a.0 != usize::MAX));
    Ok(HallOutcome::Oriented(Orientation::from_arcs(n, arcs)))
}

/// For `[n]^2`: the outer face oriented as a cycle, every other edge in the
/// positive coordinate direction. Out-degrees are at most `min(L_n^2, 3) - 1`.
pub fn outer_cycle_orientation(n: i64) -> Result<(BoxRegion, Orientation)> {
    let region = BoxRegion::cube(n, 2)?;
    let g = region.graph();
    let idx = |i: i64, j: i64| region.index_of(&Coord::new(vec![i, j])).unwrap();
    let mut cycle = Vec::new();
    if n >= 2 {
        for j in 1..n {
            cycle.push(idx(1, j));
        }
        for i in 1..n {
            cycle.push(idx(i, n));
        }
        for j in (2..=n).rev() {
            cycle.push(idx(n, j));
        }
        for i in (2..=n).rev() {
            cycle.push(idx(i, 1));
        }
    }
    let mut cycle_arcs = std::collections::HashMap::new();
    for k in 0..cycle.len() {
        let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        cycle_arcs.insert((a.min(b), a.max(b)), (a, b));
    }
    let arcs = g
        .edges()
        .iter()
        .map(|&(a, b)| cycle_arcs.get(&(a, b)).copied().unwrap_or((a, b)))
        .collect();
    Ok((region.clone(), Orientation::from_arcs(region.len(), arcs)))
}
