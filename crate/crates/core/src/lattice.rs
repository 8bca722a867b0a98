//! Geometry of finite windows of `Z^d` and colorings on them.
//!
//! Colors are always `0..q`. Boxes are stored with inclusive corners and
//! linearised in row-major order: the first axis varies slowest.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest palette supported; colors are stored in `u64` bitmasks by the solvers.
pub const MAX_COLORS: u32 = 64;

/// A point of `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coord(Vec<i64>);

impl Coord {
    pub fn new(entries: Vec<i64>) -> Self {
        assert!(!entries.is_empty(), "coordinates need dimension >= 1");
        Coord(entries)
    }

    pub fn origin(d: usize) -> Self {
        Coord::new(vec![0; d])
    }

    pub fn splat(d: usize, value: i64) -> Self {
        Coord::new(vec![value; d])
    }

    /// `m * e_axis`.
    pub fn axis_point(d: usize, axis: usize, m: i64) -> Self {
        let mut v = vec![0; d];
        v[axis] = m;
        Coord(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn shifted(&self, axis: usize, delta: i64) -> Coord {
        let mut v = self.0.clone();
        v[axis] += delta;
        Coord(v)
    }

    pub fn add(&self, other: &Coord) -> Coord {
        debug_assert_eq!(self.dim(), other.dim());
        Coord(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Coord) -> Coord {
        debug_assert_eq!(self.dim(), other.dim());
        Coord(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn coordinate_sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_even(&self) -> bool {
        self.coordinate_sum().rem_euclid(2) == 0
    }

    pub fn l1_distance(&self, other: &Coord) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn linf_distance(&self, other: &Coord) -> i64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    }

    pub fn is_adjacent(&self, other: &Coord) -> bool {
        self.dim() == other.dim() && self.l1_distance(other) == 1
    }

    /// Neighbours in the full lattice, ordered `+e_1..+e_d, -e_1..-e_d`.
    pub fn lattice_neighbors(&self) -> Vec<Coord> {
        let d = self.dim();
        let mut out = Vec::with_capacity(2 * d);
        for axis in 0..d {
            out.push(self.shifted(axis, 1));
        }
        for axis in 0..d {
            out.push(self.shifted(axis, -1));
        }
        out
    }
}

impl std::ops::Index<usize> for Coord {
    type Output = i64;
    fn index(&self, axis: usize) -> &i64 {
        &self.0[axis]
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Vec<i64>> for Coord {
    fn from(v: Vec<i64>) -> Self {
        Coord::new(v)
    }
}

impl<const N: usize> From<[i64; N]> for Coord {
    fn from(v: [i64; N]) -> Self {
        Coord::new(v.to_vec())
    }
}

/// Parse `"1,2;3,4"` into a list of coordinates.
pub fn parse_coords(text: &str) -> Result<Vec<Coord>> {
    let mut out = Vec::new();
    for chunk in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let entries = chunk
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Format(format!("bad coordinate {chunk:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.is_empty() {
            return Err(Error::Format(format!("empty coordinate in {text:?}")));
        }
        out.push(Coord::new(entries));
    }
    if let Some(first) = out.first() {
        if out.iter().any(|c| c.dim() != first.dim()) {
            return Err(Error::Format("coordinates of mixed dimension".into()));
        }
    }
    Ok(out)
}

/// An axis-aligned window `[low, high]` (inclusive corners).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxRegion {
    low: Coord,
    high: Coord,
}

impl BoxRegion {
    pub fn new(low: Coord, high: Coord) -> Result<Self> {
        if low.dim() != high.dim() {
            return domain("box corners have different dimensions");
        }
        if low.as_slice().iter().zip(high.as_slice()).any(|(a, b)| a > b) {
            return domain(format!("box corners out of order: {low} > {high}"));
        }
        Ok(BoxRegion { low, high })
    }

    /// `[n]^d = {1..n}^d`.
    pub fn cube(n: i64, d: usize) -> Result<Self> {
        if n < 1 || d < 1 {
            return domain(format!("[n]^d needs n >= 1 and d >= 1, got n={n}, d={d}"));
        }
        BoxRegion::new(Coord::splat(d, 1), Coord::splat(d, n))
    }

    /// `B_n^d = {-n..n}^d`.
    pub fn ball(n: i64, d: usize) -> Result<Self> {
        if n < 0 || d < 1 {
            return domain(format!("B_n^d needs n >= 0 and d >= 1, got n={n}, d={d}"));
        }
        BoxRegion::new(Coord::splat(d, -n), Coord::splat(d, n))
    }

    pub fn low(&self) -> &Coord {
        &self.low
    }

    pub fn high(&self) -> &Coord {
        &self.high
    }

    pub fn dim(&self) -> usize {
        self.low.dim()
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.high[axis] - self.low[axis] + 1) as usize
    }

    pub fn extents(&self) -> Vec<usize> {
        (0..self.dim()).map(|k| self.extent(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.extents().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Coord) -> bool {
        v.dim() == self.dim()
            && (0..self.dim()).all(|k| self.low[k] <= v[k] && v[k] <= self.high[k])
    }

    /// Row-major index of `v`, if inside.
    pub fn index_of(&self, v: &Coord) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        let mut idx = 0usize;
        for k in 0..self.dim() {
            idx = idx * self.extent(k) + (v[k] - self.low[k]) as usize;
        }
        Some(idx)
    }

    pub fn coord_at(&self, mut idx: usize) -> Coord {
        let d = self.dim();
        let mut v = vec![0i64; d];
        for k in (0..d).rev() {
            let e = self.extent(k);
            v[k] = self.low[k] + (idx % e) as i64;
            idx /= e;
        }
        Coord(v)
    }

    /// Cells in row-major (lexicographic) order.
    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.len()).map(move |i| self.coord_at(i))
    }

    pub fn translate(&self, by: &Coord) -> BoxRegion {
        BoxRegion {
            low: self.low.add(by),
            high: self.high.add(by),
        }
    }

    /// The box grown by `margin` cells on every side.
    pub fn expand(&self, margin: i64) -> BoxRegion {
        let d = self.dim();
        BoxRegion {
            low: self.low.sub(&Coord::splat(d, margin)),
            high: self.high.add(&Coord::splat(d, margin)),
        }
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let d = self.dim();
        let low: Vec<i64> = (0..d).map(|k| self.low[k].max(other.low[k])).collect();
        let high: Vec<i64> = (0..d).map(|k| self.high[k].min(other.high[k])).collect();
        BoxRegion::new(Coord(low), Coord(high)).ok()
    }

    /// Smallest box containing every cell of `cells` (none if empty).
    pub fn bounding(cells: &[Coord]) -> Option<BoxRegion> {
        let first = cells.first()?;
        let d = first.dim();
        let mut low = first.as_slice().to_vec();
        let mut high = low.clone();
        for c in cells {
            for k in 0..d {
                low[k] = low[k].min(c[k]);
                high[k] = high[k].max(c[k]);
            }
        }
        Some(BoxRegion {
            low: Coord(low),
            high: Coord(high),
        })
    }

    /// Neighbours of `v` inside the box, ordered `+e_1..+e_d, -e_1..-e_d`.
    pub fn neighbors(&self, v: &Coord) -> Result<Vec<Coord>> {
        if !self.contains(v) {
            return domain(format!("{v} lies outside the window"));
        }
        Ok(v
            .lattice_neighbors()
            .into_iter()
            .filter(|w| self.contains(w))
            .collect())
    }

    /// The induced subgraph of `Z^d` on this box; vertex `i` is `coord_at(i)`.
    pub fn graph(&self) -> Graph {
        let n = self.len();
        let d = self.dim();
        let ext = self.extents();
        let mut stride = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            stride[k] = stride[k + 1] * ext[k + 1];
        }
        let mut edges = Vec::new();
        for i in 0..n {
            let c = self.coord_at(i);
            for k in 0..d {
                if c[k] < self.high[k] {
                    edges.push((i, i + stride[k]));
                }
            }
        }
        Graph::from_edges(n, &edges)
    }
}

impl fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} .. {}]", self.low, self.high)
    }
}

/// `∂U`: lattice points outside `U` adjacent to some point of `U`.
pub fn external_boundary<'a>(cells: impl IntoIterator<Item = &'a Coord>) -> BTreeSet<Coord> {
    let set: BTreeSet<&Coord> = cells.into_iter().collect();
    let mut out = BTreeSet::new();
    for v in &set {
        for w in v.lattice_neighbors() {
            if !set.contains(&w) {
                out.insert(w);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    /// Edges with both endpoints in `F`.
    pub internal: usize,
    /// Edges with exactly one endpoint in `F`.
    pub crossing: usize,
}

/// Edge counts of `F` in `Z^d`, or in the induced box graph when `within` is given.
pub fn edge_counts(cells: &[Coord], within: Option<&BoxRegion>) -> EdgeCounts {
    let set: BTreeSet<&Coord> = cells.iter().collect();
    let mut internal_twice = 0;
    let mut crossing = 0;
    for v in &set {
        for w in v.lattice_neighbors() {
            if within.is_some_and(|b| !b.contains(&w)) {
                continue;
            }
            if set.contains(&w) {
                internal_twice += 1;
            } else {
                crossing += 1;
            }
        }
    }
    EdgeCounts {
        internal: internal_twice / 2,
        crossing,
    }
}

/// A simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Duplicate edges and self loops are dropped; edges are stored as `(min, max)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a},{b}) out of range for {n} vertices");
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if seen.insert(e) {
                list.push(e);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Graph { adj, edges: list }
    }

    /// Induced subgraph of `Z^d` on `cells`; vertex `i` is `cells[i]`.
    pub fn induced(cells: &[Coord]) -> Graph {
        let index: HashMap<&Coord, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut edges = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            for w in c.lattice_neighbors() {
                if let Some(&j) = index.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Graph::from_edges(cells.len(), &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Number of edges with both endpoints in `vertices`.
    pub fn induced_edge_count(&self, vertices: &[usize]) -> usize {
        let mut inside = vec![false; self.vertex_count()];
        for &v in vertices {
            inside[v] = true;
        }
        self.edges
            .iter()
            .filter(|&&(a, b)| inside[a] && inside[b])
            .count()
    }

    /// Two-colouring by BFS, or `None` when an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let mut side: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                let sv = side[v].unwrap();
                for &w in &self.adj[v] {
                    match side[w] {
                        None => {
                            side[w] = Some(!sv);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == sv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }
}

fn check_q(q: u32) -> Result<()> {
    if !(1..=MAX_COLORS).contains(&q) {
        return domain(format!("q must lie in 1..={MAX_COLORS}, got {q}"));
    }
    Ok(())
}

/// Colors on a subset (the support) of a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialColoring {
    region: BoxRegion,
    q: u32,
    assignment: BTreeMap<Coord, u32>,
}

impl PartialColoring {
    pub fn empty(region: BoxRegion, q: u32) -> Result<Self> {
        check_q(q)?;
        Ok(PartialColoring {
            region,
            q,
            assignment: BTreeMap::new(),
        })
    }

    pub fn from_pairs(
        region: BoxRegion,
        q: u32,
        pairs: impl IntoIterator<Item = (Coord, u32)>,
    ) -> Result<Self> {
        let mut c = PartialColoring::empty(region, q)?;
        for (v, color) in pairs {
            c.assign(v, color)?;
        }
        Ok(c)
    }

    pub fn assign(&mut self, v: Coord, color: u32) -> Result<()> {
        if !self.region.contains(&v) {
            return domain(format!("{v} lies outside the ambient window {}", self.region));
        }
        if color >= self.q {
            return domain(format!("color {color} at {v} is not below q={}", self.q));
        }
        self.assignment.insert(v, color);
        Ok(())
    }

    pub fn unassign(&mut self, v: &Coord) -> Option<u32> {
        self.assignment.remove(v)
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn get(&self, v: &Coord) -> Option<u32> {
        self.assignment.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Coord> {
        self.assignment.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Coord, u32)> {
        self.assignment.iter().map(|(k, &v)| (k, v))
    }

    pub fn assignment(&self) -> &BTreeMap<Coord, u32> {
        &self.assignment
    }

    /// No two assigned adjacent cells share a color.
    pub fn is_proper(&self) -> bool {
        self.first_conflict().is_none()
    }

    pub fn first_conflict(&self) -> Option<(Coord, Coord)> {
        for (v, &c) in &self.assignment {
            for axis in 0..v.dim() {
                let w = v.shifted(axis, 1);
                if self.assignment.get(&w) == Some(&c) {
                    return Some((v.clone(), w));
                }
            }
        }
        None
    }

    /// Restriction to the cells of `keep` (cells without a color are skipped).
    pub fn restrict<'a>(&self, keep: impl IntoIterator<Item = &'a Coord>) -> PartialColoring {
        let assignment = keep
            .into_iter()
            .filter_map(|v| self.get(v).map(|c| (v.clone(), c)))
            .collect();
        PartialColoring {
            region: self.region.clone(),
            q: self.q,
            assignment,
        }
    }

    /// Same assignment over a different ambient window.
    pub fn with_region(&self, region: BoxRegion) -> Result<PartialColoring> {
        PartialColoring::from_pairs(region, self.q, self.iter().map(|(v, c)| (v.clone(), c)))
    }

    /// Dense form; every cell of the window must be assigned and the result proper.
    pub fn to_proper(&self) -> Result<ProperColoring> {
        let mut colors = Vec::with_capacity(self.region.len());
        for v in self.region.cells() {
            match self.get(&v) {
                Some(c) => colors.push(c),
                None => return domain(format!("cell {v} is unassigned")),
            }
        }
        ProperColoring::new(self.region.clone(), self.q, colors)
    }
}

/// Free-function form of [`PartialColoring::is_proper`].
pub fn is_proper(c: &PartialColoring) -> bool {
    c.is_proper()
}

/// A proper coloring of every cell of a window, stored densely in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProperColoring {
    region: BoxRegion,
    q: u32,
    colors: Vec<u32>,
}

impl ProperColoring {
    pub fn new(region: BoxRegion, q: u32, colors: Vec<u32>) -> Result<Self> {
        check_q(q)?;
        if colors.len() != region.len() {
            return domain(format!(
                "expected {} colors for {region}, got {}",
                region.len(),
                colors.len()
            ));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= q) {
            return domain(format!("color {c} is not below q={q}"));
        }
        let out = ProperColoring { region, q, colors };
        if let Some((a, b)) = out.first_conflict() {
            return domain(format!("adjacent cells {a} and {b} share a color"));
        }
        Ok(out)
    }

    pub(crate) fn new_unchecked(region: BoxRegion, q: u32, colors: Vec<u32>) -> Self {
        debug_assert_eq!(colors.len(), region.len());
        ProperColoring { region, q, colors }
    }

    /// Evaluate `f` on every cell.
    pub fn from_fn(region: BoxRegion, q: u32, f: impl Fn(&Coord) -> u32) -> Result<Self> {
        let colors = region.cells().map(|v| f(&v)).collect();
        ProperColoring::new(region, q, colors)
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn get(&self, v: &Coord) -> Option<u32> {
        self.region.index_of(v).map(|i| self.colors[i])
    }

    fn first_conflict(&self) -> Option<(Coord, Coord)> {
        let g = self.region.graph();
        g.edges()
            .iter()
            .find(|&&(a, b)| self.colors[a] == self.colors[b])
            .map(|&(a, b)| (self.region.coord_at(a), self.region.coord_at(b)))
    }

    pub fn is_proper(&self) -> bool {
        self.first_conflict().is_none()
    }

    pub fn to_partial(&self) -> PartialColoring {
        PartialColoring {
            region: self.region.clone(),
            q: self.q,
            assignment: self
                .region
                .cells()
                .zip(self.colors.iter().copied())
                .collect(),
        }
    }

    /// Restriction to a sub-box, which must lie inside this window.
    pub fn crop(&self, sub: &BoxRegion) -> Result<ProperColoring> {
        if !self.region.contains(sub.low()) || !self.region.contains(sub.high()) {
            return domain(format!("{sub} is not inside {}", self.region));
        }
        let colors = sub
            .cells()
            .map(|v| self.colors[self.region.index_of(&v).unwrap()])
            .collect();
        Ok(ProperColoring::new_unchecked(sub.clone(), self.q, colors))
    }
}

/// On-disk coloring document.
///
/// `colors` is a row-major array over `[low, high]` (`null` marks an unassigned
/// cell) and may be empty; `partial` lists additional `[coord, color]` pairs,
/// which may lie anywhere inside the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringDoc {
    pub d: usize,
    pub q: u32,
    pub low: Vec<i64>,
    pub high: Vec<i64>,
    #[serde(default)]
    pub colors: Vec<Option<u32>>,
    #[serde(default)]
    pub partial: Vec<(Vec<i64>, u32)>,
}

impl ColoringDoc {
    pub fn from_proper(c: &ProperColoring) -> Self {
        ColoringDoc {
            d: c.dim(),
            q: c.q(),
            low: c.region().low().as_slice().to_vec(),
            high: c.region().high().as_slice().to_vec(),
            colors: c.colors().iter().map(|&x| Some(x)).collect(),
            partial: Vec::new(),
        }
    }

    pub fn from_partial(c: &PartialColoring) -> Self {
        ColoringDoc {
            d: c.dim(),
            q: c.q(),
            low: c.region().low().as_slice().to_vec(),
            high: c.region().high().as_slice().to_vec(),
            colors: Vec::new(),
            partial: c
                .iter()
                .map(|(v, color)| (v.as_slice().to_vec(), color))
                .collect(),
        }
    }

    fn region(&self) -> Result<BoxRegion> {
        if self.d == 0 || self.low.len() != self.d || self.high.len() != self.d {
            return Err(Error::Format(format!(
                "corner lengths do not match d={}",
                self.d
            )));
        }
        BoxRegion::new(Coord::new(self.low.clone()), Coord::new(self.high.clone()))
    }

    pub fn to_partial(&self) -> Result<PartialColoring> {
        let region = self.region()?;
        let mut c = PartialColoring::empty(region.clone(), self.q)?;
        if !self.colors.is_empty() {
            if self.colors.len() != region.len() {
                return Err(Error::Format(format!(
                    "colors has {} entries, window has {} cells",
                    self.colors.len(),
                    region.len()
                )));
            }
            for (i, color) in self.colors.iter().enumerate() {
                if let Some(color) = color {
                    c.assign(region.coord_at(i), *color)?;
                }
            }
        }
        for (v, color) in &self.partial {
            if v.len() != self.d {
                return Err(Error::Format(format!("coordinate {v:?} has wrong dimension")));
            }
            c.assign(Coord::new(v.clone()), *color)?;
        }
        Ok(c)
    }

    pub fn to_proper(&self) -> Result<ProperColoring> {
        self.to_partial()?.to_proper()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring documents always serialize")
    }
}

fn color_char(c: u32) -> char {
    char::from_digit(c, 36).unwrap_or('?')
}

/// One character per cell; rows follow the first axis, columns the second.
pub fn render_ascii(c: &PartialColoring) -> Result<String> {
    if c.dim() != 2 {
        return domain("ASCII rendering needs d = 2");
    }
    let r = c.region();
    let mut out = String::new();
    for i in r.low()[0]..=r.high()[0] {
        for j in r.low()[1]..=r.high()[1] {
            out.push(match c.get(&Coord::new(vec![i, j])) {
                Some(x) => color_char(x),
                None => '.',
            });
        }
        out.push('\n');
    }
    Ok(out)
}

/// Plain-text PGM (P2); gray level `floor(255 c / (q-1))`, unassigned cells are 0.
pub fn render_pgm(c: &PartialColoring) -> Result<String> {
    if c.dim() != 2 {
        return domain("PGM rendering needs d = 2");
    }
    let r = c.region();
    let (rows, cols) = (r.extent(0), r.extent(1));
    let denom = c.q().saturating_sub(1).max(1);
    let mut out = format!("P2\n{cols} {rows}\n255\n");
    for i in r.low()[0]..=r.high()[0] {
        let line: Vec<String> = (r.low()[1]..=r.high()[1])
            .map(|j| {
                let g = c
                    .get(&Coord::new(vec![i, j]))
                    .map_or(0, |x| 255 * x / denom);
                g.to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> Coord {
        Coord::new(v.to_vec())
    }

    #[test]
    fn neighbors_interior_and_corner() {
        let b = BoxRegion::cube(3, 2).unwrap();
        assert_eq!(
            b.neighbors(&c(&[2, 2])).unwrap(),
            vec![c(&[3, 2]), c(&[2, 3]), c(&[1, 2]), c(&[2, 1])]
        );
        assert_eq!(
            b.neighbors(&c(&[1, 1])).unwrap(),
            vec![c(&[2, 1]), c(&[1, 2])]
        );
        let b3 = BoxRegion::cube(5, 3).unwrap();
        assert_eq!(b3.neighbors(&c(&[3, 3, 3])).unwrap().len(), 6);
    }

    #[test]
    fn neighbors_outside_is_error() {
        let b = BoxRegion::cube(3, 2).unwrap();
        assert!(matches!(b.neighbors(&c(&[0, 1])), Err(Error::Domain(_))));
    }

    #[test]
    fn external_boundary_examples() {
        let u = [c(&[0])];
        let got: Vec<_> = external_boundary(&u).into_iter().collect();
        assert_eq!(got, vec![c(&[-1]), c(&[1])]);

        let sq: Vec<_> = BoxRegion::cube(2, 2).unwrap().cells().collect();
        assert_eq!(external_boundary(&sq).len(), 8);
        for n in 1..7 {
            let cells: Vec<_> = BoxRegion::cube(n, 2).unwrap().cells().collect();
            let brute = external_boundary(&cells);
            assert_eq!(brute.len() as i64, 4 * n);
            assert!(brute.iter().all(|v| !cells.contains(v)));
        }
        assert!(external_boundary(std::iter::empty()).is_empty());
    }

    #[test]
    fn edge_count_examples() {
        let sq: Vec<_> = BoxRegion::cube(2, 2).unwrap().cells().collect();
        assert_eq!(
            edge_counts(&sq, None),
            EdgeCounts {
                internal: 4,
                crossing: 8
            }
        );
        for n in 1..8i64 {
            let cells: Vec<_> = BoxRegion::cube(n, 2).unwrap().cells().collect();
            let e = edge_counts(&cells, None);
            assert_eq!(e.internal as i64, 2 * n * (n - 1));
            assert_eq!(e.crossing as i64, 4 * n);
            assert_eq!(e.internal, BoxRegion::cube(n, 2).unwrap().graph().edge_count());
        }
        assert_eq!(
            edge_counts(&[c(&[0])], None),
            EdgeCounts {
                internal: 0,
                crossing: 2
            }
        );
        let window = BoxRegion::cube(2, 2).unwrap();
        assert_eq!(edge_counts(&sq, Some(&window)).crossing, 0);
    }

    #[test]
    fn is_proper_examples() {
        let line = BoxRegion::cube(3, 1).unwrap();
        let ok = PartialColoring::from_pairs(
            line,
            2,
            [(c(&[1]), 0), (c(&[2]), 1), (c(&[3]), 0)],
        )
        .unwrap();
        assert!(is_proper(&ok));
        let bad =
            PartialColoring::from_pairs(BoxRegion::cube(2, 1).unwrap(), 2, [(c(&[1]), 0), (c(&[2]), 0)])
                .unwrap();
        assert!(!is_proper(&bad));
        assert!(bad.to_proper().is_err());
    }

    #[test]
    fn row_major_indexing_roundtrip() {
        let b = BoxRegion::new(c(&[-1, 2, 0]), c(&[1, 4, 3])).unwrap();
        for (i, v) in b.cells().enumerate() {
            assert_eq!(b.index_of(&v), Some(i));
        }
        assert_eq!(b.coord_at(1), c(&[-1, 2, 1]));
    }

    #[test]
    fn graph_of_box_matches_induced() {
        let b = BoxRegion::cube(3, 3).unwrap();
        let cells: Vec<_> = b.cells().collect();
        let g1 = b.graph();
        let g2 = Graph::induced(&cells);
        let mut e1 = g1.edges().to_vec();
        let mut e2 = g2.edges().to_vec();
        e1.sort();
        e2.sort();
        assert_eq!(e1, e2);
        assert!(g1.bipartition().is_some());
    }

    #[test]
    fn doc_roundtrip_and_render() {
        let b = BoxRegion::cube(2, 2).unwrap();
        let pc = ProperColoring::new(b, 3, vec![0, 1, 1, 2]).unwrap();
        let doc = ColoringDoc::from_proper(&pc);
        let back = ColoringDoc::from_json(&doc.to_json()).unwrap().to_proper().unwrap();
        assert_eq!(back, pc);
        assert_eq!(render_ascii(&pc.to_partial()).unwrap(), "01\n12\n");
        let pgm = render_pgm(&pc.to_partial()).unwrap();
        assert!(pgm.ends_with("0 127\n127 255\n"));
    }

    #[test]
    fn parse_coords_accepts_semicolon_lists() {
        let got = parse_coords("1,2; (3,4)").unwrap();
        assert_eq!(got, vec![c(&[1, 2]), c(&[3, 4])]);
        assert!(parse_coords("1,2;3").is_err());
    }

    #[test]
    fn partial_rejects_out_of_window_and_large_color() {
        let b = BoxRegion::cube(2, 2).unwrap();
        let mut p = PartialColoring::empty(b, 3).unwrap();
        assert!(p.assign(c(&[3, 1]), 0).is_err());
        assert!(p.assign(c(&[1, 1]), 3).is_err());
    }
}
