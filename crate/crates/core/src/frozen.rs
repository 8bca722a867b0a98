//! Frozen and single-site-frozen colorings, the finite frozenness oracle,
//! the edge-counting obstruction, and Kempe (bi-color) components.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::csp::{CellProblem, Order};
use crate::error::{domain, precondition, Result};
use crate::lattice::{edge_counts, external_boundary, BoxRegion, Coord, PartialColoring, ProperColoring};
use crate::rule::{ColoringRule, LiftedColoringRule, LinearColoringRule};

/// `x_i = sum_k k * i_k mod (d+1)`: frozen, with `q = d + 1`.
pub fn canonical_frozen(d: usize) -> Result<LinearColoringRule> {
    if d < 1 {
        return domain("dimension must be at least 1");
    }
    LinearColoringRule::new(d as u32 + 1, (1..=d as i64).collect(), 0)
}

/// `x_i = sum_k k * i_k mod (2d+1)`: every vertex sees all other `2d` colors.
pub fn single_site_frozen(d: usize) -> Result<LinearColoringRule> {
    if d < 1 {
        return domain("dimension must be at least 1");
    }
    LinearColoringRule::new(2 * d as u32 + 1, (1..=d as i64).collect(), 0)
}

/// Pull a rule on `Z^r` back to `Z^target_d`; every slice with fixed trailing
/// coordinates is a translate of the base pattern.
pub fn lift_frozen(base: &LinearColoringRule, target_d: usize) -> Result<LiftedColoringRule> {
    if target_d < base.dim() {
        return domain(format!(
            "cannot lift a rule on Z^{} down to Z^{target_d}",
            base.dim()
        ));
    }
    Ok(LiftedColoringRule {
        base: base.clone(),
        target_dim: target_d,
    })
}

/// A frozen `q`-coloring of `Z^d` for `2 <= q <= d+1`: the canonical rule on
/// `Z^(q-1)` lifted to `Z^d`.
pub fn frozen_rule(d: usize, q: u32) -> Result<LiftedColoringRule> {
    if q < 2 || q as usize > d + 1 {
        return domain(format!("frozen colorings need 2 <= q <= d+1, got q={q}, d={d}"));
    }
    lift_frozen(&canonical_frozen(q as usize - 1)?, d)
}

fn check_frozen_window(c: &ProperColoring, cells: &[Coord]) -> Result<()> {
    for v in cells.iter().chain(external_boundary(cells).iter()) {
        if v.dim() != c.dim() {
            return domain(format!("{v} has the wrong dimension"));
        }
        if !c.region().contains(v) {
            return precondition(format!(
                "{v} (in F or its boundary) lies outside the window {}",
                c.region()
            ));
        }
    }
    Ok(())
}

/// Some proper recoloring of `F` that agrees with `c` off `F` and differs from
/// `c` on `F`, found by exhaustive backtracking in lexicographic order.
pub fn find_alternative(c: &ProperColoring, cells: &[Coord]) -> Result<Option<PartialColoring>> {
    let mut cells: Vec<Coord> = cells.to_vec();
    cells.sort();
    cells.dedup();
    check_frozen_window(c, &cells)?;
    let problem = CellProblem::new(cells.clone(), c.q(), |w| c.get(w));
    let current: Vec<u32> = cells.iter().map(|v| c.get(v).unwrap()).collect();
    let mut found = None;
    problem.csp.for_each_solution(Order::Static, |sol| {
        if sol != current.as_slice() {
            found = Some(sol.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
        .map(|sol| {
            PartialColoring::from_pairs(c.region().clone(), c.q(), cells.into_iter().zip(sol))
        })
        .transpose()
}

/// True iff the only proper assignment to `F` consistent with `c` off `F` is `c|_F`.
pub fn is_frozen_on(c: &ProperColoring, cells: &[Coord]) -> Result<bool> {
    Ok(find_alternative(c, cells)?.is_none())
}

/// `(q-1)|F| > |E_F| + |E(F, Z^d \ F)|`. When true no coloring is frozen on `F`;
/// false is inconclusive.
pub fn frozen_obstruction(cells: &[Coord], q: u32) -> Result<bool> {
    if cells.is_empty() {
        return domain("F must be non-empty");
    }
    let set: BTreeSet<&Coord> = cells.iter().collect();
    let unique: Vec<Coord> = set.into_iter().cloned().collect();
    let e = edge_counts(&unique, None);
    Ok((q as usize - 1) * unique.len() > e.internal + e.crossing)
}

/// Single-site frozen linear rules `sum_k w_k i_k mod q` with weights in `1..q`
/// (non-decreasing), confirmed with the singleton frozenness oracle.
pub fn single_site_frozen_rules(d: usize, q: u32) -> Result<Vec<LinearColoringRule>> {
    if d < 1 || q < 2 {
        return domain("need d >= 1 and q >= 2");
    }
    let window = BoxRegion::ball(1, d)?;
    let centre = [Coord::origin(d)];
    let mut found = Vec::new();
    let mut weights = vec![1i64; d];
    loop {
        let rule = LinearColoringRule::new(q, weights.clone(), 0)?;
        if rule.is_proper_rule() {
            let c = rule.evaluate(&window)?;
            if is_frozen_on(&c, &centre)? {
                found.push(rule);
            }
        }
        // next non-decreasing weight vector
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(found);
            }
            k -= 1;
            if weights[k] < q as i64 - 1 {
                weights[k] += 1;
                let w = weights[k];
                for x in weights.iter_mut().skip(k + 1) {
                    *x = w;
                }
                break;
            }
        }
    }
}

/// A connected component of the subgraph induced by two colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KempeComponent {
    pub color_pair: (u32, u32),
    pub vertices: BTreeSet<Coord>,
    pub edges: BTreeSet<(Coord, Coord)>,
}

impl KempeComponent {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn check_pair(q: u32, pair: (u32, u32)) -> Result<()> {
    if pair.0 == pair.1 || pair.0 >= q || pair.1 >= q {
        return domain(format!("invalid color pair {pair:?} for q={q}"));
    }
    Ok(())
}

/// Components of the `{i, j}`-colored subgraph over `vertices`, using only the
/// edges accepted by `keep_edge`. Vertices are included only if colored `i` or `j`.
fn bicolor_components(
    color_of: impl Fn(&Coord) -> Option<u32>,
    vertices: &BTreeSet<Coord>,
    pair: (u32, u32),
    keep_edge: impl Fn(&Coord, &Coord) -> bool,
) -> Vec<KempeComponent> {
    let in_pair = |v: &Coord| matches!(color_of(v), Some(x) if x == pair.0 || x == pair.1);
    let mut seen: BTreeSet<Coord> = BTreeSet::new();
    let mut out = Vec::new();
    for start in vertices {
        if seen.contains(start) || !in_pair(start) {
            continue;
        }
        let mut comp = KempeComponent {
            color_pair: pair,
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        };
        seen.insert(start.clone());
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(v) = queue.pop_front() {
            for w in v.lattice_neighbors() {
                if !vertices.contains(&w) || !in_pair(&w) || !keep_edge(&v, &w) {
                    continue;
                }
                let e = if v < w { (v.clone(), w.clone()) } else { (w.clone(), v.clone()) };
                comp.edges.insert(e);
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
            comp.vertices.insert(v);
        }
        out.push(comp);
    }
    out
}

/// All `{i, j}` components of `c` over its whole window. Isolated vertices of
/// either color form singleton components.
pub fn kempe_components(c: &ProperColoring, pair: (u32, u32)) -> Result<Vec<KempeComponent>> {
    check_pair(c.q(), pair)?;
    let vertices: BTreeSet<Coord> = c.region().cells().collect();
    Ok(bicolor_components(|v| c.get(v), &vertices, pair, |_, _| true))
}

/// Exchange the two colors on a component of `c`.
pub fn kempe_swap(c: &ProperColoring, comp: &KempeComponent) -> Result<ProperColoring> {
    let (a, b) = comp.color_pair;
    check_pair(c.q(), comp.color_pair)?;
    let mut colors = c.colors().to_vec();
    for v in &comp.vertices {
        let Some(idx) = c.region().index_of(v) else {
            return domain(format!("component vertex {v} lies outside the window"));
        };
        let x = colors[idx];
        if x != a && x != b {
            return domain(format!("{v} has color {x}, not in pair {:?}", comp.color_pair));
        }
        for w in v.lattice_neighbors() {
            if let Some(y) = c.get(&w) {
                if (y == a || y == b) && !comp.vertices.contains(&w) {
                    return domain(format!(
                        "component is not maximal: {w} is {a}/{b}-colored and adjacent to {v}"
                    ));
                }
            }
        }
        colors[idx] = if x == a { b } else { a };
    }
    ProperColoring::new(c.region().clone(), c.q(), colors)
}

/// The bi-color components of the finite graph `G' = (F ∪ ∂F, E_F ∪ E(F, ∂F))`
/// over every color pair; only components with at least one edge are listed.
pub fn local_bicolor_components(c: &ProperColoring, cells: &[Coord]) -> Result<Vec<KempeComponent>> {
    let f: BTreeSet<Coord> = cells.iter().cloned().collect();
    let f_vec: Vec<Coord> = f.iter().cloned().collect();
    check_frozen_window(c, &f_vec)?;
    let mut vertices = f.clone();
    vertices.extend(external_boundary(&f_vec));
    let mut out = Vec::new();
    for i in 0..c.q() {
        for j in i + 1..c.q() {
            let comps = bicolor_components(
                |v| c.get(v),
                &vertices,
                (i, j),
                |v, w| f.contains(v) || f.contains(w),
            );
            out.extend(comps.into_iter().filter(|k| !k.edges.is_empty()));
        }
    }
    Ok(out)
}

/// A Kempe chain of `c` lying entirely inside `F`, if one exists. Swapping it
/// changes `c` only on `F`, so its existence refutes frozenness on `F`.
pub fn free_kempe_move(c: &ProperColoring, cells: &[Coord]) -> Result<Option<KempeComponent>> {
    let f: BTreeSet<Coord> = cells.iter().cloned().collect();
    for comp in local_bicolor_components(c, cells)? {
        if comp.vertices.iter().all(|v| f.contains(v)) {
            return Ok(Some(comp));
        }
    }
    // a vertex missing color j among its neighbours is a singleton chain
    for v in &f {
        let x = c.get(v).unwrap();
        let around: BTreeSet<u32> = v.lattice_neighbors().iter().filter_map(|w| c.get(w)).collect();
        if let Some(j) = (0..c.q()).find(|&j| j != x && !around.contains(&j)) {
            return Ok(Some(KempeComponent {
                color_pair: (x.min(j), x.max(j)),
                vertices: BTreeSet::from([v.clone()]),
                edges: BTreeSet::new(),
            }));
        }
    }
    Ok(None)
}

/// Per-color-pair totals, handy for checking that components partition edges.
pub fn component_edge_totals(comps: &[KempeComponent]) -> BTreeMap<(u32, u32), usize> {
    let mut m = BTreeMap::new();
    for k in comps {
        *m.entry(k.color_pair).or_default() += k.edge_count();
    }
    m
}
