//! Extending partial colorings of a boundary into boxes, unions of boxes and
//! whole windows, plus boundary colorings that admit no extension.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{CellProblem, Order};
use crate::error::{domain, Result};
use crate::frozen::frozen_rule;
use crate::lattice::{external_boundary, BoxRegion, Coord, PartialColoring, ProperColoring};
use crate::listcolor::{list_color, ListAssignment, ListColorOutcome, SolveMode};
use crate::rule::ColoringRule;

/// A boundary coloring of `∂[n]^d` to be extended into `[n]^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillProblem {
    n: i64,
    d: usize,
    boundary: PartialColoring,
}

impl FillProblem {
    /// The boundary must be proper with support inside `∂[n]^d`; it is
    /// re-hosted on the window `[0..n+1]^d`.
    pub fn new(n: i64, d: usize, boundary: &PartialColoring) -> Result<Self> {
        let target = BoxRegion::cube(n, d)?;
        if boundary.dim() != d {
            return domain(format!("boundary has dimension {}, expected {d}", boundary.dim()));
        }
        let shell = external_boundary(target.cells().collect::<Vec<_>>().iter());
        if let Some(v) = boundary.support().find(|v| !shell.contains(*v)) {
            return domain(format!("{v} is not on the boundary of [{n}]^{d}"));
        }
        if let Some((a, b)) = boundary.first_conflict() {
            return domain(format!("boundary coloring is improper at {a} ~ {b}"));
        }
        Ok(FillProblem {
            n,
            d,
            boundary: boundary.with_region(target.expand(1))?,
        })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.boundary.q()
    }

    pub fn boundary(&self) -> &PartialColoring {
        &self.boundary
    }

    pub fn target(&self) -> BoxRegion {
        BoxRegion::cube(self.n, self.d).expect("validated on construction")
    }
}

/// Result of a fill: the extension (boundary included) or a negative verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillOutcome {
    Filled { coloring: PartialColoring, mode: SolveMode },
    Unsat,
}

impl FillOutcome {
    pub fn coloring(&self) -> Option<&PartialColoring> {
        match self {
            FillOutcome::Filled { coloring, .. } => Some(coloring),
            FillOutcome::Unsat => None,
        }
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, FillOutcome::Unsat)
    }
}

fn palette_minus_neighbors(
    v: &Coord,
    q: u32,
    inside: &BoxRegion,
    fixed: &impl Fn(&Coord) -> Option<u32>,
) -> Vec<u32> {
    let taken: Vec<u32> = v
        .lattice_neighbors()
        .iter()
        .filter(|w| !inside.contains(w))
        .filter_map(fixed)
        .collect();
    (0..q).filter(|c| !taken.contains(c)).collect()
}

/// `S(i)`: the palette minus the colors of `i`'s colored boundary neighbors,
/// for every cell of `[n]^d` in row-major order. Lists may be empty.
pub fn boundary_lists(problem: &FillProblem) -> Vec<Vec<u32>> {
    let target = problem.target();
    let fixed = |w: &Coord| problem.boundary.get(w);
    target
        .cells()
        .map(|v| palette_minus_neighbors(&v, problem.q(), &target, &fixed))
        .collect()
}

/// Color every cell of `region` given fixed colors around it.
fn fill_cells(
    region: &BoxRegion,
    q: u32,
    fixed: impl Fn(&Coord) -> Option<u32>,
) -> Result<Option<(Vec<u32>, SolveMode)>> {
    let lists: Vec<Vec<u32>> = region
        .cells()
        .map(|v| palette_minus_neighbors(&v, q, region, &fixed))
        .collect();
    if lists.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    match list_color(&region.graph(), &ListAssignment::new(lists)?, None)? {
        ListColorOutcome::Colored { colors, mode } => Ok(Some((colors, mode))),
        ListColorOutcome::Unsat => Ok(None),
    }
}

/// Extend the boundary coloring into `[n]^d`. Orientation and kernels when the
/// boundary lists admit a suitable orientation, exhaustive search otherwise.
pub fn fill_box(problem: &FillProblem) -> Result<FillOutcome> {
    let target = problem.target();
    let Some((colors, mode)) = fill_cells(&target, problem.q(), |w| problem.boundary.get(w))? else {
        return Ok(FillOutcome::Unsat);
    };
    let mut coloring = problem.boundary.clone();
    for (v, c) in target.cells().zip(colors) {
        coloring.assign(v, c)?;
    }
    debug_assert!(coloring.is_proper());
    Ok(FillOutcome::Filled { coloring, mode })
}

/// All extensions into `[n]^d` (up to `limit`), in lexicographic order.
pub fn enumerate_extensions(problem: &FillProblem, limit: Option<usize>) -> Result<Vec<ProperColoring>> {
    let target = problem.target();
    let cp = CellProblem::new(target.cells().collect(), problem.q(), |w| problem.boundary.get(w));
    let mut out = Vec::new();
    cp.csp.for_each_solution(Order::Static, |s| {
        out.push(ProperColoring::new_unchecked(target.clone(), problem.q(), s.to_vec()));
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(out)
}

/// Boundary cells of `[n]^d` having some coordinate equal to 0.
fn zero_faces(n: i64, d: usize) -> Result<Vec<Coord>> {
    let target = BoxRegion::cube(n, d)?;
    Ok(external_boundary(target.cells().collect::<Vec<_>>().iter())
        .into_iter()
        .filter(|v| v.as_slice().contains(&0))
        .collect())
}

/// The frozen pattern restricted to the boundary cells with a zero coordinate.
pub fn frozen_face_boundary(d: usize, q: u32, n: i64) -> Result<FillProblem> {
    let x = frozen_rule(d, q)?;
    let region = BoxRegion::cube(n, d)?.expand(1);
    let faces = zero_faces(n, d)?;
    FillProblem::new(n, d, &x.restrict_to(&region, faces.iter())?)
}

/// The frozen pattern on the zero faces plus the cell `(n+1, 1, .., 1)`,
/// which receives the color the pattern forces at `(n, 1, .., 1)`.
pub fn non_extendable_boundary(d: usize, q: u32, n: i64) -> Result<FillProblem> {
    if q < 3 || q as usize > d + 1 {
        return domain(format!("need 3 <= q <= d+1, got q={q}, d={d}"));
    }
    let x = frozen_rule(d, q)?;
    let region = BoxRegion::cube(n, d)?.expand(1);
    let mut c = x.restrict_to(&region, zero_faces(n, d)?.iter())?;
    let mut inner = vec![1; d];
    inner[0] = n;
    let inner = Coord::new(inner);
    c.assign(inner.shifted(0, 1), x.color_at(&inner))?;
    FillProblem::new(n, d, &c)
}

/// A random proper partial coloring of `∂[n]^d`: each boundary cell, in
/// order, is colored with probability `density` by a color unused by its
/// already colored neighbors.
pub fn random_boundary<R: Rng + ?Sized>(
    n: i64,
    d: usize,
    q: u32,
    density: f64,
    rng: &mut R,
) -> Result<PartialColoring> {
    let target = BoxRegion::cube(n, d)?;
    let mut c = PartialColoring::empty(target.expand(1), q)?;
    for v in external_boundary(target.cells().collect::<Vec<_>>().iter()) {
        if !rng.random_bool(density) {
            continue;
        }
        let taken: Vec<u32> = v.lattice_neighbors().iter().filter_map(|w| c.get(w)).collect();
        let free: Vec<u32> = (0..q).filter(|x| !taken.contains(x)).collect();
        if !free.is_empty() {
            let pick = free[rng.random_range(0..free.len())];
            c.assign(v, pick)?;
        }
    }
    Ok(c)
}

/// Anchors sorted and deduplicated, dropping any whose box is covered by the
/// boxes of the remaining anchors.
pub fn minimal_anchors(n: i64, anchors: &[Coord]) -> Result<Vec<Coord>> {
    let mut list: Vec<Coord> = anchors.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let Some(d) = list.first().map(Coord::dim) else {
        return Ok(list);
    };
    if list.iter().any(|a| a.dim() != d) {
        return domain("anchors have mixed dimensions");
    }
    let cube = BoxRegion::cube(n, d)?;
    let mut i = 0;
    while i < list.len() {
        let own = cube.translate(&list[i]);
        let covered = own.cells().all(|v| {
            list.iter()
                .enumerate()
                .any(|(j, a)| j != i && cube.translate(a).contains(&v))
        });
        if covered {
            list.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(list)
}

/// Extend `boundary` (supported on `∂U`) into `U = ∪_a (a + [n]^d)`. Boxes are
/// filled one at a time in lexicographic anchor order; after each, the cells
/// not covered by a later box are kept and act as boundary for the rest.
pub fn fill_union(n: i64, anchors: &[Coord], boundary: &PartialColoring) -> Result<FillOutcome> {
    let anchors = minimal_anchors(n, anchors)?;
    let Some(d) = anchors.first().map(Coord::dim) else {
        return domain("at least one anchor is required");
    };
    if boundary.dim() != d {
        return domain("boundary and anchors differ in dimension");
    }
    let cube = BoxRegion::cube(n, d)?;
    let boxes: Vec<BoxRegion> = anchors.iter().map(|a| cube.translate(a)).collect();
    let union: BTreeSet<Coord> = boxes.iter().flat_map(|b| b.cells()).collect();
    let shell = external_boundary(union.iter());
    if let Some(v) = boundary.support().find(|v| !shell.contains(*v)) {
        return domain(format!("{v} is not on the boundary of the union"));
    }
    if let Some((a, b)) = boundary.first_conflict() {
        return domain(format!("boundary coloring is improper at {a} ~ {b}"));
    }
    let q = boundary.q();
    let mut colored: BTreeMap<Coord, u32> = boundary.assignment().clone();
    let mut mode = SolveMode::Kernel;
    for (i, b) in boxes.iter().enumerate() {
        let Some((colors, m)) = fill_cells(b, q, |w| colored.get(w).copied())? else {
            return Ok(FillOutcome::Unsat);
        };
        if m == SolveMode::Backtracking {
            mode = m;
        }
        for (v, c) in b.cells().zip(colors) {
            if !boxes[i + 1..].iter().any(|later| later.contains(&v)) {
                colored.insert(v, c);
            }
        }
    }
    let bounds: Vec<Coord> = union.iter().cloned().collect();
    let region = BoxRegion::bounding(&bounds).expect("non-empty union").expand(1);
    let coloring = PartialColoring::from_pairs(region, q, colored)?;
    debug_assert!(coloring.is_proper());
    Ok(FillOutcome::Filled { coloring, mode })
}

/// Index `k` of the translate `(2n+1)k + B_n` containing `v`.
pub fn tile_index(v: &Coord, n: i64) -> Coord {
    let side = 2 * n + 1;
    Coord::new(v.as_slice().iter().map(|&x| (x + n).div_euclid(side)).collect())
}

/// The translate `(2n+1)k + B_n`.
pub fn tile_box(k: &Coord, n: i64) -> BoxRegion {
    let side = 2 * n + 1;
    let center = Coord::new(k.as_slice().iter().map(|&x| x * side).collect());
    BoxRegion::ball(n, k.dim()).expect("n >= 0").translate(&center)
}

/// Tiles meeting `U` and the other tiles meeting the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FepPartition {
    pub n: i64,
    pub selected: Vec<Coord>,
    pub remaining: Vec<Coord>,
}

pub fn fep_partition<'a>(
    u_cells: impl IntoIterator<Item = &'a Coord>,
    n: i64,
    window: &BoxRegion,
) -> FepPartition {
    let selected: BTreeSet<Coord> = u_cells.into_iter().map(|v| tile_index(v, n)).collect();
    let remaining: BTreeSet<Coord> = window
        .cells()
        .map(|v| tile_index(&v, n))
        .filter(|k| !selected.contains(k))
        .collect();
    FepPartition {
        n,
        selected: selected.into_iter().collect(),
        remaining: remaining.into_iter().collect(),
    }
}

/// Extend `u` to all of `window`: keep the given extension `ubar` of `u` on
/// the tiles `(2n+1)k + B_n` that meet `U`, then fill every other tile meeting
/// the window in lexicographic order of `k`, and crop.
pub fn fep_extend(
    u: &PartialColoring,
    ubar: &PartialColoring,
    n: i64,
    window: &BoxRegion,
) -> Result<FillOutcome> {
    if n < 0 {
        return domain("n must be non-negative");
    }
    let q = u.q();
    if ubar.q() != q || window.dim() != u.dim() || ubar.dim() != u.dim() {
        return domain("u, its extension and the window must share q and dimension");
    }
    if let Some((v, _)) = u.iter().find(|&(v, c)| ubar.get(v) != Some(c)) {
        return domain(format!("the extension disagrees with u at {v}"));
    }
    let part = fep_partition(u.support(), n, window);
    let mut colored: BTreeMap<Coord, u32> = BTreeMap::new();
    for k in &part.selected {
        for v in tile_box(k, n).cells() {
            match ubar.get(&v) {
                Some(c) => {
                    colored.insert(v, c);
                }
                None => return domain(format!("the extension does not cover {v}")),
            }
        }
    }
    let kept = PartialColoring::from_pairs(
        BoxRegion::bounding(&colored.keys().cloned().collect::<Vec<_>>()).unwrap_or_else(|| window.clone()),
        q,
        colored.iter().map(|(v, &c)| (v.clone(), c)),
    )?;
    if let Some((a, b)) = kept.first_conflict() {
        return domain(format!("the extension is improper at {a} ~ {b}"));
    }
    let mut mode = SolveMode::Kernel;
    for k in &part.remaining {
        let tile = tile_box(k, n);
        let Some((colors, m)) = fill_cells(&tile, q, |w| colored.get(w).copied())? else {
            return Ok(FillOutcome::Unsat);
        };
        if m == SolveMode::Backtracking {
            mode = m;
        }
        colored.extend(tile.cells().zip(colors));
    }
    let coloring = PartialColoring::from_pairs(
        window.clone(),
        q,
        window.cells().map(|v| {
            let c = colored[&v];
            (v, c)
        }),
    )?;
    debug_assert!(coloring.is_proper());
    Ok(FillOutcome::Filled { coloring, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(v: &[i64]) -> Coord {
        Coord::new(v.to_vec())
    }

    #[test]
    fn corner_lists() {
        let window = BoxRegion::cube(4, 2).unwrap().expand(1);
        let b = PartialColoring::from_pairs(window.clone(), 4, [(c(&[0, 1]), 0), (c(&[1, 0]), 1)]).unwrap();
        let p = FillProblem::new(4, 2, &b).unwrap();
        let lists = boundary_lists(&p);
        assert_eq!(lists[0], vec![2, 3]);
        assert_eq!(lists[5], vec![0, 1, 2, 3]);
        let b3 = PartialColoring::from_pairs(window, 3, [(c(&[0, 1]), 0), (c(&[1, 0]), 1)]).unwrap();
        assert_eq!(boundary_lists(&FillProblem::new(4, 2, &b3).unwrap())[0], vec![2]);
    }

    #[test]
    fn rejects_support_off_the_boundary() {
        let window = BoxRegion::cube(4, 2).unwrap().expand(1);
        let b = PartialColoring::from_pairs(window.clone(), 4, [(c(&[0, 0]), 0)]).unwrap();
        assert!(FillProblem::new(4, 2, &b).is_err());
        let b = PartialColoring::from_pairs(window, 4, [(c(&[2, 2]), 0)]).unwrap();
        assert!(FillProblem::new(4, 2, &b).is_err());
    }

    #[test]
    fn random_boundaries_extend_for_q4() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let b = random_boundary(6, 2, 4, 0.8, &mut rng).unwrap();
            let p = FillProblem::new(6, 2, &b).unwrap();
            let out = fill_box(&p).unwrap();
            let col = out.coloring().expect("q >= d+2 always extends");
            assert!(col.is_proper());
            for (v, x) in b.iter() {
                assert_eq!(col.get(v), Some(x));
            }
        }
    }

    #[test]
    fn non_extendable_witness_is_unsat() {
        let p = non_extendable_boundary(2, 3, 3).unwrap();
        assert!(fill_box(&p).unwrap().is_unsat());
        assert!(enumerate_extensions(&p, None).unwrap().is_empty());
        assert!(non_extendable_boundary(2, 4, 3).is_err());
        assert!(non_extendable_boundary(2, 2, 3).is_err());
    }

    #[test]
    fn frozen_faces_extend_uniquely() {
        let p = frozen_face_boundary(2, 3, 3).unwrap();
        let ext = enumerate_extensions(&p, None).unwrap();
        assert_eq!(ext.len(), 1);
        let x = frozen_rule(2, 3).unwrap();
        assert_eq!(ext[0], x.evaluate(&p.target()).unwrap());
    }

    #[test]
    fn union_of_one_box_matches_fill_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_boundary(6, 2, 4, 0.7, &mut rng).unwrap();
        let single = fill_box(&FillProblem::new(6, 2, &b).unwrap()).unwrap();
        let union = fill_union(6, &[c(&[0, 0])], &b).unwrap();
        assert_eq!(
            single.coloring().unwrap().assignment(),
            union.coloring().unwrap().assignment()
        );
    }

    #[test]
    fn l_shaped_union_fills() {
        let anchors = [c(&[0, 0]), c(&[3, 4]), c(&[1, 1])];
        let kept = minimal_anchors(6, &anchors).unwrap();
        assert_eq!(kept.len(), 3);
        let cube = BoxRegion::cube(6, 2).unwrap();
        let cells: Vec<Coord> = kept.iter().flat_map(|a| cube.translate(a).cells().collect::<Vec<_>>()).collect();
        let shell = external_boundary(cells.iter());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let region = BoxRegion::bounding(&cells).unwrap().expand(1);
        let mut b = PartialColoring::empty(region, 4).unwrap();
        for v in shell {
            let taken: Vec<u32> = v.lattice_neighbors().iter().filter_map(|w| b.get(w)).collect();
            let free: Vec<u32> = (0..4).filter(|x| !taken.contains(x)).collect();
            b.assign(v, free[rng.random_range(0..free.len())]).unwrap();
        }
        let out = fill_union(6, &anchors, &b).unwrap();
        let col = out.coloring().unwrap();
        assert!(col.is_proper());
        assert!(cells.iter().all(|v| col.get(v).is_some()));
    }

    #[test]
    fn covered_anchor_is_dropped() {
        let kept = minimal_anchors(2, &[c(&[0, 0]), c(&[1, 0]), c(&[2, 0])]).unwrap();
        assert_eq!(kept, vec![c(&[0, 0]), c(&[2, 0])]);
    }

    #[test]
    fn tiles_partition_the_window() {
        let window = BoxRegion::ball(9, 2).unwrap();
        for v in window.cells() {
            let k = tile_index(&v, 3);
            assert!(tile_box(&k, 3).contains(&v));
        }
        assert_eq!(tile_index(&c(&[3, -3]), 3), c(&[0, 0]));
        assert_eq!(tile_index(&c(&[4, -4]), 3), c(&[1, -1]));
    }

    #[test]
    fn fep_with_empty_u_colors_window() {
        let window = BoxRegion::ball(5, 2).unwrap();
        let u = PartialColoring::empty(window.clone(), 4).unwrap();
        let out = fep_extend(&u, &u, 1, &window).unwrap();
        assert_eq!(out.coloring().unwrap().len(), window.len());
        assert!(out.coloring().unwrap().is_proper());
    }
}
