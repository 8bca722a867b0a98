//! List coloring of boxes: the bound `L_n^d`, orientations with bounded
//! out-degree, kernels, the kernel-driven list-coloring procedure, shell
//! decompositions and the small-cube witness search.

mod kernel;
mod orientation;
mod shell;
mod witness;

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{Csp, Order};
use crate::error::{domain, precondition, Error, Result};
use crate::lattice::{BoxRegion, Coord, Graph, MAX_COLORS};

pub use kernel::{find_kernel, has_odd_directed_cycle, is_kernel, kernel_within, strongly_connected_components};
pub use orientation::{
    check_subgraph_inequality, hall_orientation, outer_cycle_orientation, HallOutcome, HallViolation,
    Orientation,
};
pub use shell::{color_box_via_shell, shell_color, shell_pieces, ShellOutcome};
pub use witness::{
    is_list_colorable_brute, list_colorings_brute, reconstructed_cube_lists, search_unlistable,
    UnlistableReport,
};

/// `L_n^d(i) = 2 + #{k : 1 < i_k < n}` on `[n]^d`.
pub fn list_bound(n: i64, d: usize, i: &Coord) -> Result<u32> {
    if i.dim() != d || !BoxRegion::cube(n, d)?.contains(i) {
        return domain(format!("{i} is not in [{n}]^{d}"));
    }
    Ok(2 + i.as_slice().iter().filter(|&&x| 1 < x && x < n).count() as u32)
}

/// `L_n^d` over `[n]^d` in row-major order.
pub fn list_bound_vector(n: i64, d: usize) -> Result<Vec<u32>> {
    let region = BoxRegion::cube(n, d)?;
    region.cells().map(|v| list_bound(n, d, &v)).collect()
}

/// Level of each vertex: `L_n^d(i) - 2`, the number of strictly interior coordinates.
pub fn level_sets(n: i64, d: usize) -> Result<Vec<Vec<Coord>>> {
    let region = BoxRegion::cube(n, d)?;
    let mut levels = vec![Vec::new(); d + 1];
    for v in region.cells() {
        let t = list_bound(n, d, &v)? as usize - 2;
        levels[t].push(v);
    }
    Ok(levels)
}

/// Per-vertex color lists, indexed like the vertices of the graph they go with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ListAssignment {
    lists: Vec<Vec<u32>>,
}

impl ListAssignment {
    /// Lists are sorted and deduplicated; every list must be non-empty.
    pub fn new(lists: Vec<Vec<u32>>) -> Result<Self> {
        let mut out = Vec::with_capacity(lists.len());
        for (v, mut l) in lists.into_iter().enumerate() {
            l.sort_unstable();
            l.dedup();
            if l.is_empty() {
                return domain(format!("list of vertex {v} is empty"));
            }
            if l.iter().any(|&c| c >= MAX_COLORS) {
                return domain(format!("colors must be below {MAX_COLORS}"));
            }
            out.push(l);
        }
        Ok(ListAssignment { lists: out })
    }

    /// Same list everywhere.
    pub fn uniform(vertices: usize, palette: u32) -> Result<Self> {
        ListAssignment::new(vec![(0..palette).collect(); vertices])
    }

    /// Uniformly random lists of the given sizes drawn from `0..palette`.
    pub fn random<R: Rng + ?Sized>(sizes: &[u32], palette: u32, rng: &mut R) -> Result<Self> {
        if let Some(&s) = sizes.iter().find(|&&s| s > palette || s == 0) {
            return domain(format!("cannot draw a list of size {s} from {palette} colors"));
        }
        let lists = sizes
            .iter()
            .map(|&s| {
                sample(rng, palette as usize, s as usize)
                    .into_iter()
                    .map(|c| c as u32)
                    .collect()
            })
            .collect();
        ListAssignment::new(lists)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: usize) -> &[u32] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    pub fn sizes(&self) -> Vec<u32> {
        self.lists.iter().map(|l| l.len() as u32).collect()
    }

    pub fn mask(&self, v: usize) -> u64 {
        self.lists[v].iter().fold(0u64, |m, &c| m | (1 << c))
    }

    /// `true` iff `colors` is proper on `g` and every color comes from its list.
    pub fn accepts(&self, g: &Graph, colors: &[u32]) -> bool {
        colors.len() == self.len()
            && colors
                .iter()
                .enumerate()
                .all(|(v, c)| self.lists[v].binary_search(c).is_ok())
            && g.edges().iter().all(|&(a, b)| colors[a] != colors[b])
    }

    /// JSON object keyed by `"i1,i2,..."` with color arrays as values.
    pub fn to_json(&self, region: &BoxRegion) -> Result<String> {
        if region.len() != self.len() {
            return domain("list assignment does not match the window");
        }
        let map: BTreeMap<String, &Vec<u32>> = region
            .cells()
            .zip(&self.lists)
            .map(|(v, l)| (coord_key(&v), l))
            .collect();
        Ok(serde_json::to_string(&map)?)
    }

    pub fn from_json(region: &BoxRegion, text: &str) -> Result<Self> {
        let map: BTreeMap<String, Vec<u32>> = serde_json::from_str(text)?;
        let mut lists = vec![None; region.len()];
        for (key, l) in map {
            let coords = crate::lattice::parse_coords(&key)?;
            let [v] = coords.as_slice() else {
                return Err(Error::Format(format!("bad coordinate key {key:?}")));
            };
            let idx = region
                .index_of(v)
                .ok_or_else(|| Error::Format(format!("{v} is outside {region}")))?;
            lists[idx] = Some(l);
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Format(format!("no list for {}", region.coord_at(i)))))
            .collect::<Result<Vec<_>>>()?;
        ListAssignment::new(lists)
    }
}

fn coord_key(v: &Coord) -> String {
    v.as_slice()
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// How a list coloring was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Kernel,
    Backtracking,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ListColorOutcome {
    Colored { colors: Vec<u32>, mode: SolveMode },
    Unsat,
}

impl ListColorOutcome {
    pub fn colors(&self) -> Option<&[u32]> {
        match self {
            ListColorOutcome::Colored { colors, .. } => Some(colors),
            ListColorOutcome::Unsat => None,
        }
    }
}

/// Kernel-driven list coloring along an orientation with `|S_v| >= d^+(v) + 1`
/// and no odd directed cycles: repeatedly take the color contained in the
/// fewest remaining lists, color a kernel of the vertices that can use it,
/// and strike it from the lists of the others.
pub fn kernel_list_color(
    g: &Graph,
    lists: &ListAssignment,
    orientation: &Orientation,
) -> Result<Vec<u32>> {
    let n = g.vertex_count();
    if lists.len() != n {
        return domain(format!("{} lists for {n} vertices", lists.len()));
    }
    if !orientation.orients(g) {
        return domain("orientation does not orient the graph's edges exactly once");
    }
    for v in 0..n {
        if lists.list(v).len() < orientation.out_degree(v) + 1 {
            return precondition(format!(
                "vertex {v}: list size {} but out-degree {}",
                lists.list(v).len(),
                orientation.out_degree(v)
            ));
        }
    }
    if has_odd_directed_cycle(orientation) {
        return precondition("orientation has an odd directed cycle");
    }
    let mut remaining = vec![true; n];
    let mut masks: Vec<u64> = (0..n).map(|v| lists.mask(v)).collect();
    let mut colors = vec![u32::MAX; n];
    let mut left = n;
    while left > 0 {
        let mut freq = [0usize; MAX_COLORS as usize];
        for v in (0..n).filter(|&v| remaining[v]) {
            for c in crate::csp::mask_colors(masks[v]) {
                freq[c as usize] += 1;
            }
        }
        let color = (0..MAX_COLORS)
            .filter(|&c| freq[c as usize] > 0)
            .min_by_key(|&c| freq[c as usize])
            .expect("remaining vertices always have non-empty lists");
        let bit = 1u64 << color;
        let active: Vec<bool> = (0..n).map(|v| remaining[v] && masks[v] & bit != 0).collect();
        let kernel = kernel_within(orientation, &active)?;
        for &v in &kernel {
            colors[v] = color;
            remaining[v] = false;
            left -= 1;
        }
        for v in 0..n {
            if active[v] && remaining[v] {
                masks[v] &= !bit;
                debug_assert!(masks[v] != 0);
            }
        }
    }
    debug_assert!(lists.accepts(g, &colors));
    Ok(colors)
}

/// Exhaustive list coloring (forward checking, smallest domain first).
pub fn backtrack_list_color(g: &Graph, lists: &ListAssignment) -> Result<Option<Vec<u32>>> {
    if lists.len() != g.vertex_count() {
        return domain(format!("{} lists for {} vertices", lists.len(), g.vertex_count()));
    }
    let csp = Csp::new(g, (0..g.vertex_count()).map(|v| lists.mask(v)).collect());
    Ok(csp.first_solution(Order::MinRemaining))
}

/// List-color `g`. With an orientation the kernel procedure is used. Without
/// one, an orientation is sought by matching with `L(v) = |S_v|`; if none
/// exists the search falls back to backtracking, which may report UNSAT.
pub fn list_color(
    g: &Graph,
    lists: &ListAssignment,
    orientation: Option<&Orientation>,
) -> Result<ListColorOutcome> {
    if let Some(o) = orientation {
        let colors = kernel_list_color(g, lists, o)?;
        return Ok(ListColorOutcome::Colored {
            colors,
            mode: SolveMode::Kernel,
        });
    }
    let sizes = lists.sizes();
    match hall_orientation(g, &sizes)? {
        HallOutcome::Oriented(o) if !has_odd_directed_cycle(&o) => {
            let colors = kernel_list_color(g, lists, &o)?;
            Ok(ListColorOutcome::Colored {
                colors,
                mode: SolveMode::Kernel,
            })
        }
        _ => Ok(match backtrack_list_color(g, lists)? {
            Some(colors) => ListColorOutcome::Colored {
                colors,
                mode: SolveMode::Backtracking,
            },
            None => ListColorOutcome::Unsat,
        }),
    }
}
