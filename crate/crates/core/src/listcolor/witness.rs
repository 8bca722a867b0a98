//! Exhaustive search for 2-list assignments on small cubes that admit no
//! proper list coloring.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::{BoxRegion, Coord, Graph};

use super::ListAssignment;

/// All list colorings, by enumerating the product of the lists.
pub fn list_colorings_brute(g: &Graph, lists: &ListAssignment) -> Vec<Vec<u32>> {
    let n = lists.len();
    let mut out = Vec::new();
    let mut pos = vec![0usize; n];
    loop {
        let colors: Vec<u32> = (0..n).map(|v| lists.list(v)[pos[v]]).collect();
        if g.edges().iter().all(|&(a, b)| colors[a] != colors[b]) {
            out.push(colors);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < lists.list(k).len() {
                break;
            }
            pos[k] = 0;
        }
    }
}

pub fn is_list_colorable_brute(g: &Graph, lists: &ListAssignment) -> bool {
    !list_colorings_brute(g, lists).is_empty()
}

/// Lists on `[2]^3` read off from the two colorings of each layer
/// `[2]^2 × {t}` quoted for the classical counterexample: the list at a cell
/// is the pair of colors it takes in those colorings.
pub fn reconstructed_cube_lists() -> ListAssignment {
    let region = BoxRegion::cube(2, 3).unwrap();
    let lists = region
        .cells()
        .map(|v| {
            let (r, c) = ((v[0] - 1) as usize, (v[1] - 1) as usize);
            let (a, b) = if v[2] == 1 { (LOWER[0], LOWER[1]) } else { (UPPER[0], UPPER[1]) };
            vec![a[r][c], b[r][c]]
        })
        .collect();
    ListAssignment::new(lists).unwrap()
}

/// Layer colorings quoted for `[2]^2 × {1}` and `[2]^2 × {2}`; row index is
/// the first coordinate, column index the second.
const LOWER: [[[u32; 2]; 2]; 2] = [[[1, 0], [0, 2]], [[0, 2], [1, 0]]];
const UPPER: [[[u32; 2]; 2]; 2] = [[[1, 2], [2, 3]], [[2, 3], [1, 2]]];

/// Outcome of [`search_unlistable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnlistableReport {
    pub n: i64,
    pub d: usize,
    pub q_universe: u32,
    /// Assignments examined (first list fixed to `{0,1}`).
    pub assignments: u64,
    pub witness_count: u64,
    /// Lexicographically first witness in row-major cell order.
    pub witness: Option<ListAssignment>,
    /// `true` when the search found no witness at all.
    pub contradiction: bool,
    /// For `[2]^3`: whether the first witness has exactly the quoted layer colorings.
    pub witness_matches_layers: Option<bool>,
    /// For `[2]^3`: witnesses whose layer colorings are exactly the quoted ones.
    pub witnesses_with_quoted_layers: Option<u64>,
    /// For `[2]^3`: the lists rebuilt from the quoted layer colorings are unsatisfiable.
    pub reconstructed_unsat: Option<bool>,
    /// Enlarging one list of the first witness by one color: (satisfiable, still unsatisfiable).
    pub enlargement: Option<(u32, u32)>,
}

fn pairs(q: u32) -> Vec<u64> {
    let mut out = Vec::new();
    for a in 0..q {
        for b in a + 1..q {
            out.push((1u64 << a) | (1u64 << b));
        }
    }
    out
}

/// DFS over vertices in index order with bitmask domains.
fn colorable(adj: &[Vec<usize>], masks: &[u64]) -> bool {
    fn go(adj: &[Vec<usize>], masks: &[u64], v: usize, color: &mut [u32]) -> bool {
        if v == masks.len() {
            return true;
        }
        let mut m = masks[v];
        for &w in &adj[v] {
            if w < v {
                m &= !(1u64 << color[w]);
            }
        }
        while m != 0 {
            let c = m.trailing_zeros();
            m &= m - 1;
            color[v] = c;
            if go(adj, masks, v + 1, color) {
                return true;
            }
        }
        false
    }
    let mut color = vec![0u32; masks.len()];
    go(adj, masks, 0, &mut color)
}

fn layer_colorings(g: &Graph, lists: &ListAssignment, region: &BoxRegion, t: i64) -> Vec<Vec<u32>> {
    let cells: Vec<Coord> = region.cells().filter(|v| v[2] == t).collect();
    let sub = Graph::induced(&cells);
    let sub_lists = ListAssignment::new(
        cells
            .iter()
            .map(|v| lists.list(region.index_of(v).unwrap()).to_vec())
            .collect(),
    )
    .unwrap();
    let _ = g;
    let mut out = list_colorings_brute(&sub, &sub_lists);
    out.sort();
    out
}

fn quoted_layers(t: i64) -> Vec<Vec<u32>> {
    let src = if t == 1 { LOWER } else { UPPER };
    let mut out: Vec<Vec<u32>> = src
        .iter()
        .map(|m| vec![m[0][0], m[0][1], m[1][0], m[1][1]])
        .collect();
    out.sort();
    out
}

fn has_quoted_layers(g: &Graph, lists: &ListAssignment, region: &BoxRegion) -> bool {
    (1..=2).all(|t| layer_colorings(g, lists, region, t) == quoted_layers(t))
}

/// Enumerate every assignment of 2-subsets of `0..q_universe` to the cells of
/// `[n]^d` with the first cell's list fixed to `{0,1}` (colors can be renamed
/// to reach this), and test each one exhaustively. Work is split across the
/// rayon pool by the lists of the first free cells.
pub fn search_unlistable(n: i64, d: usize, q_universe: u32) -> Result<UnlistableReport> {
    if !(2..=16).contains(&q_universe) {
        return domain(format!("color universe must be between 2 and 16, got {q_universe}"));
    }
    let region = BoxRegion::cube(n, d)?;
    let cells = region.len();
    if cells > 12 {
        return domain(format!("[{n}]^{d} has {cells} cells; at most 12 are supported"));
    }
    let g = region.graph();
    let adj: Vec<Vec<usize>> = (0..cells).map(|v| g.neighbors(v).to_vec()).collect();
    let choices = pairs(q_universe);
    let k = choices.len() as u64;
    let free = cells - 1;
    let total = k.checked_pow(free as u32).filter(|&t| t <= 1 << 40);
    let Some(total) = total else {
        return domain("search space too large");
    };
    let split = free.min(2);
    let prefixes = k.pow(split as u32);
    let inner = total / prefixes;

    let decode = |mut idx: u64, masks: &mut [u64]| {
        masks[0] = 0b11;
        for v in (1..cells).rev() {
            masks[v] = choices[(idx % k) as usize];
            idx /= k;
        }
    };

    let (witness_count, first, quoted) = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut masks = vec![0u64; cells];
            let mut count = 0u64;
            let mut first: Option<u64> = None;
            let mut quoted = 0u64;
            for i in 0..inner {
                let idx = p * inner + i;
                decode(idx, &mut masks);
                if !colorable(&adj, &masks) {
                    count += 1;
                    first.get_or_insert(idx);
                    if n == 2 && d == 3 {
                        let lists = masks_to_lists(&masks);
                        if has_quoted_layers(&g, &lists, &region) {
                            quoted += 1;
                        }
                    }
                }
            }
            (count, first, quoted)
        })
        .reduce(
            || (0, None, 0),
            |a, b| {
                let first = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                (a.0 + b.0, first, a.2 + b.2)
            },
        );

    let witness = first.map(|idx| {
        let mut masks = vec![0u64; cells];
        decode(idx, &mut masks);
        masks_to_lists(&masks)
    });
    let cube = n == 2 && d == 3;
    let enlargement = witness.as_ref().map(|w| {
        let (mut sat, mut unsat) = (0, 0);
        for v in 0..cells {
            for c in 0..q_universe {
                if w.list(v).contains(&c) {
                    continue;
                }
                let mut lists = w.lists().to_vec();
                lists[v].push(c);
                let bigger = ListAssignment::new(lists).unwrap();
                if is_list_colorable_brute(&g, &bigger) {
                    sat += 1;
                } else {
                    unsat += 1;
                }
            }
        }
        (sat, unsat)
    });
    Ok(UnlistableReport {
        n,
        d,
        q_universe,
        assignments: total,
        witness_count,
        witness_matches_layers: if cube {
            witness.as_ref().map(|w| has_quoted_layers(&g, w, &region))
        } else {
            None
        },
        witness,
        contradiction: witness_count == 0,
        witnesses_with_quoted_layers: cube.then_some(quoted),
        reconstructed_unsat: cube.then(|| !is_list_colorable_brute(&g, &reconstructed_cube_lists())),
        enlargement,
    })
}

fn masks_to_lists(masks: &[u64]) -> ListAssignment {
    ListAssignment::new(
        masks
            .iter()
            .map(|&m| crate::csp::mask_colors(m).collect())
            .collect(),
    )
    .unwrap()
}
