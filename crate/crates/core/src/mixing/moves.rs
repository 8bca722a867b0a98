//! The graph on all proper colorings of a box (with a fixed boundary) whose
//! edges are pivot, N-pivot or Kempe moves, explored breadth first.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csp::{CellProblem, Order};
use crate::error::{domain, Error, Result};
use crate::lattice::{BoxRegion, Coord, Graph, PartialColoring};

pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Recolor a single site.
    Pivot,
    /// Recolor inside one translate of `[N]^d`.
    NPivot(usize),
    /// Swap the two colors on one bicolor component.
    Kempe,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::Pivot => write!(f, "pivot"),
            MoveKind::NPivot(n) => write!(f, "npivot:{n}"),
            MoveKind::Kempe => write!(f, "kempe"),
        }
    }
}

impl FromStr for MoveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pivot" => Ok(MoveKind::Pivot),
            "kempe" => Ok(MoveKind::Kempe),
            _ => {
                let n = s
                    .strip_prefix("npivot:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Format(format!("unknown move kind {s:?}")))?;
                Ok(MoveKind::NPivot(n))
            }
        }
    }
}

impl Serialize for MoveKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MoveKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveGraphReport {
    pub move_kind: MoveKind,
    pub state_count: u64,
    pub component_count: u64,
    pub largest_component: u64,
    /// Component sizes, largest first.
    pub component_sizes: Vec<u64>,
    /// Largest BFS depth reached from the first state of each component.
    pub root_eccentricity: u64,
    /// Twice the root eccentricity: an upper bound on every component's diameter.
    pub diameter_bound: u64,
    pub connected: bool,
}

/// All proper colorings of `region` consistent with the fixed colors, packed
/// `ceil(log2 q)` bits per cell with the first cell most significant, so the
/// sorted state vector is in lexicographic order.
#[derive(Clone, Debug)]
pub struct MoveGraph {
    region: BoxRegion,
    q: u32,
    kind: MoveKind,
    bits: u32,
    graph: Graph,
    fixed_colors: Vec<u64>,
    states: Vec<u64>,
    /// Per window: cell mask, group id of each state, and group members.
    windows: Vec<WindowGroups>,
}

#[derive(Clone, Debug)]
struct WindowGroups {
    group_of: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl MoveGraph {
    pub fn build(
        region: &BoxRegion,
        boundary: Option<&PartialColoring>,
        q: u32,
        kind: MoveKind,
        cap: u64,
    ) -> Result<Self> {
        if !(1..=64).contains(&q) {
            return domain(format!("q must lie in 1..=64, got {q}"));
        }
        if let Some(b) = boundary {
            if b.dim() != region.dim() {
                return domain("boundary dimension differs from the box");
            }
            if let Some(v) = b.support().find(|v| region.contains(v)) {
                return domain(format!("boundary cell {v} lies inside the box"));
            }
            if b.q() > q {
                return domain("boundary uses more colors than q");
            }
        }
        let bits = (32 - (q - 1).leading_zeros()).max(1);
        let n = region.len();
        if n as u64 * bits as u64 > 64 {
            return Err(Error::SizeCap {
                what: format!("{n} cells at {bits} bits each do not fit a 64-bit state"),
                cap: 64,
            });
        }
        let cells: Vec<Coord> = region.cells().collect();
        let get = |v: &Coord| boundary.and_then(|b| b.get(v));
        let fixed_colors = cells
            .iter()
            .map(|v| {
                v.lattice_neighbors()
                    .iter()
                    .filter(|w| !region.contains(w))
                    .filter_map(get)
                    .fold(0u64, |m, c| m | (1 << c))
            })
            .collect();
        let cp = CellProblem::new(cells, q, get);
        let mut states = Vec::new();
        let mut over = false;
        cp.csp.for_each_solution(Order::Static, |s| {
            if states.len() as u64 >= cap {
                over = true;
                return ControlFlow::Break(());
            }
            states.push(s.iter().fold(0u64, |acc, &c| (acc << bits) | c as u64));
            ControlFlow::Continue(())
        });
        if over {
            return Err(Error::SizeCap {
                what: "proper colorings of the box".into(),
                cap,
            });
        }
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        let mut g = MoveGraph {
            region: region.clone(),
            q,
            kind,
            bits,
            graph: region.graph(),
            fixed_colors,
            states,
            windows: Vec::new(),
        };
        match kind {
            MoveKind::Pivot => g.build_windows(1),
            MoveKind::NPivot(size) => g.build_windows(size),
            MoveKind::Kempe => {}
        }
        Ok(g)
    }

    fn build_windows(&mut self, size: usize) {
        let d = self.region.dim();
        let size = size as i64;
        let starts = BoxRegion::new(
            self.region.low().clone(),
            Coord::new(
                (0..d)
                    .map(|k| self.region.low()[k].max(self.region.high()[k] - size + 1))
                    .collect(),
            ),
        )
        .expect("non-empty start range");
        for s in starts.cells() {
            let hi = Coord::new((0..d).map(|k| (s[k] + size - 1).min(self.region.high()[k])).collect());
            let window = BoxRegion::new(s, hi).expect("valid window");
            let mask = window.cells().fold(0u64, |m, v| {
                m | self.cell_mask(self.region.index_of(&v).unwrap())
            });
            let mut ids: HashMap<u64, u32> = HashMap::new();
            let mut members: Vec<Vec<u32>> = Vec::new();
            let group_of = self
                .states
                .iter()
                .enumerate()
                .map(|(i, &st)| {
                    let key = st & !mask;
                    let id = *ids.entry(key).or_insert_with(|| {
                        members.push(Vec::new());
                        members.len() as u32 - 1
                    });
                    members[id as usize].push(i as u32);
                    id
                })
                .collect();
            self.windows.push(WindowGroups { group_of, members });
        }
    }

    fn cell_mask(&self, cell: usize) -> u64 {
        let shift = self.bits as usize * (self.region.len() - 1 - cell);
        ((1u64 << self.bits) - 1) << shift
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn decode(&self, idx: usize) -> Vec<u32> {
        let n = self.region.len();
        let st = self.states[idx];
        (0..n)
            .map(|i| ((st >> (self.bits as usize * (n - 1 - i))) & ((1 << self.bits) - 1)) as u32)
            .collect()
    }

    pub fn index_of(&self, colors: &[u32]) -> Option<usize> {
        let code = colors.iter().fold(0u64, |acc, &c| (acc << self.bits) | c as u64);
        self.states.binary_search(&code).ok()
    }

    /// States one move away from `idx`.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        match self.kind {
            MoveKind::Kempe => self.kempe_neighbors(idx, &mut out),
            _ => {
                for w in &self.windows {
                    out.extend(
                        w.members[w.group_of[idx] as usize]
                            .iter()
                            .map(|&j| j as usize)
                            .filter(|&j| j != idx),
                    );
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn kempe_neighbors(&self, idx: usize, out: &mut Vec<usize>) {
        let colors = self.decode(idx);
        let n = colors.len();
        let mut seen = vec![usize::MAX; n];
        let mut stack = Vec::new();
        for a in 0..self.q {
            for b in a + 1..self.q {
                let tag = (a * self.q + b) as usize;
                for start in 0..n {
                    if (colors[start] != a && colors[start] != b) || seen[start] == tag {
                        continue;
                    }
                    let mut comp = Vec::new();
                    seen[start] = tag;
                    stack.push(start);
                    while let Some(v) = stack.pop() {
                        comp.push(v);
                        for &w in self.graph.neighbors(v) {
                            if seen[w] != tag && (colors[w] == a || colors[w] == b) {
                                seen[w] = tag;
                                stack.push(w);
                            }
                        }
                    }
                    // swapping is blocked by a fixed neighbor of the incoming color
                    let blocked = comp.iter().any(|&v| {
                        let incoming = if colors[v] == a { b } else { a };
                        self.fixed_colors[v] & (1 << incoming) != 0
                    });
                    if blocked {
                        continue;
                    }
                    let mut next = colors.clone();
                    for &v in &comp {
                        next[v] = if colors[v] == a { b } else { a };
                    }
                    if let Some(j) = self.index_of(&next) {
                        out.push(j);
                    }
                }
            }
        }
    }

    /// Breadth-first search over every component.
    pub fn report(&self) -> MoveGraphReport {
        let n = self.states.len();
        let mut dist = vec![u32::MAX; n];
        let mut expanded: Vec<Vec<bool>> = self
            .windows
            .iter()
            .map(|w| vec![false; w.members.len()])
            .collect();
        let mut sizes = Vec::new();
        let mut ecc = 0u64;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if dist[root] != u32::MAX {
                continue;
            }
            dist[root] = 0;
            queue.push_back(root);
            let mut size = 0u64;
            while let Some(s) = queue.pop_front() {
                size += 1;
                ecc = ecc.max(dist[s] as u64);
                let next = dist[s] + 1;
                if self.kind == MoveKind::Kempe {
                    for j in self.neighbors(s) {
                        if dist[j] == u32::MAX {
                            dist[j] = next;
                            queue.push_back(j);
                        }
                    }
                } else {
                    for (w, flags) in self.windows.iter().zip(expanded.iter_mut()) {
                        let g = w.group_of[s] as usize;
                        if flags[g] {
                            continue;
                        }
                        flags[g] = true;
                        for &j in &w.members[g] {
                            let j = j as usize;
                            if dist[j] == u32::MAX {
                                dist[j] = next;
                                queue.push_back(j);
                            }
                        }
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        MoveGraphReport {
            move_kind: self.kind,
            state_count: n as u64,
            component_count: sizes.len() as u64,
            largest_component: sizes.first().copied().unwrap_or(0),
            connected: sizes.len() <= 1,
            component_sizes: sizes,
            root_eccentricity: ecc,
            diameter_bound: 2 * ecc,
        }
    }

    /// Size of the component containing `idx`, by BFS from `idx`.
    pub fn component_size(&self, idx: usize) -> usize {
        let mut seen = vec![false; self.states.len()];
        seen[idx] = true;
        let mut queue = VecDeque::from([idx]);
        let mut size = 0;
        while let Some(s) = queue.pop_front() {
            size += 1;
            for j in self.neighbors(s) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        size
    }
}

/// Enumerate the states of `region` (with optional fixed boundary) and report
/// the connectivity of the chosen move graph.
pub fn move_graph(
    region: &BoxRegion,
    boundary: Option<&PartialColoring>,
    q: u32,
    kind: MoveKind,
) -> Result<MoveGraphReport> {
    Ok(MoveGraph::build(region, boundary, q, kind, DEFAULT_STATE_CAP)?.report())
}
