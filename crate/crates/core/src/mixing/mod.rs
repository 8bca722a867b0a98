//! Finite-window witnesses against strong irreducibility and topological
//! strong spatial mixing, and move-graph connectivity.

mod moves;

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::csp::{full_mask, CellProblem, Order};
use crate::error::{domain, Result};
use crate::frozen::frozen_rule;
use crate::lattice::{external_boundary, BoxRegion, Coord, PartialColoring};
use crate::rule::{ColoringRule, LinearColoringRule};

pub use moves::{move_graph, MoveGraph, MoveGraphReport, MoveKind, DEFAULT_STATE_CAP};

/// `e_1..e_2d` with `e_i = -e_{2d-i+1}`; `t` is 1-based.
pub fn unit_vector(d: usize, t: usize) -> Coord {
    assert!((1..=2 * d).contains(&t));
    if t <= d {
        Coord::axis_point(d, t - 1, 1)
    } else {
        Coord::axis_point(d, 2 * d - t, -1)
    }
}

/// The pair of colorings built around the line `{m e_1}`: the tube
/// `m e_1 + e_t` (`2 <= t <= 2d-1`) carries `m + t mod (q-2)`; elsewhere `x`
/// uses `q-2` on odd and `q-1` on even sites and `y` the reverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingWitness {
    pub d: usize,
    pub q: u32,
}

/// `true` for `x`, `false` for `y`.
fn tube_color(w: &MixingWitness, v: &Coord, is_x: bool) -> u32 {
    if let Some((m, t)) = w.tube_position(v) {
        return ((m + t as i64).rem_euclid(w.q as i64 - 2)) as u32;
    }
    let odd = !v.is_even();
    if odd == is_x {
        w.q - 2
    } else {
        w.q - 1
    }
}

impl MixingWitness {
    /// `(m, t)` when `v = m e_1 + e_t` with `2 <= t <= 2d-1`.
    pub fn tube_position(&self, v: &Coord) -> Option<(i64, usize)> {
        let s = v.as_slice();
        let off: Vec<usize> = (1..self.d).filter(|&k| s[k] != 0).collect();
        if off.len() != 1 {
            return None;
        }
        let k = off[0];
        match s[k] {
            1 => Some((s[0], k + 1)),
            -1 => Some((s[0], 2 * self.d - k)),
            _ => None,
        }
    }

    pub fn in_tube(&self, v: &Coord) -> bool {
        self.tube_position(v).is_some()
    }

    pub fn x(&self) -> TubeRule {
        TubeRule { w: self.clone(), is_x: true }
    }

    pub fn y(&self) -> TubeRule {
        TubeRule { w: self.clone(), is_x: false }
    }

    /// `S ∩ B_r`: the tube cells within the window of radius `r`.
    pub fn tube_cells(&self, radius: i64) -> Vec<Coord> {
        let window = BoxRegion::ball(radius, self.d).expect("radius >= 0");
        let mut out = Vec::new();
        for m in -radius..=radius {
            for t in 2..2 * self.d {
                let v = Coord::axis_point(self.d, 0, m).add(&unit_vector(self.d, t));
                if window.contains(&v) {
                    out.push(v);
                }
            }
        }
        out.sort();
        out
    }

    pub fn u(&self) -> Coord {
        Coord::origin(self.d)
    }

    pub fn v(&self, n: i64) -> Coord {
        Coord::axis_point(self.d, 0, n)
    }
}

/// One of the two colorings of a [`MixingWitness`].
#[derive(Clone, Debug)]
pub struct TubeRule {
    w: MixingWitness,
    is_x: bool,
}

impl ColoringRule for TubeRule {
    fn dim(&self) -> usize {
        self.w.d
    }

    fn q(&self) -> u32 {
        self.w.q
    }

    fn color_at(&self, v: &Coord) -> u32 {
        tube_color(&self.w, v, self.is_x)
    }
}

/// The configuration for `d + 2 <= q <= 2d`.
pub fn tssm_witness(d: usize, q: u32) -> Result<MixingWitness> {
    if d < 2 || (q as usize) < d + 2 || q as usize > 2 * d {
        return domain(format!("need d >= 2 and d+2 <= q <= 2d, got d={d}, q={q}"));
    }
    tssm_configuration(d, q)
}

/// The same construction for any `d >= 2`, `q >= 4`, without the range check.
pub fn tssm_configuration(d: usize, q: u32) -> Result<MixingWitness> {
    if d < 2 || q < 4 {
        return domain(format!("the tube construction needs d >= 2 and q >= 4, got d={d}, q={q}"));
    }
    Ok(MixingWitness { d, q })
}

/// Outcome of unit propagation from `z = x` on `U ∪ S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub d: usize,
    pub q: u32,
    pub radius: i64,
    /// Gap `n = radius - 1`: `V = {n e_1}`.
    pub gap: i64,
    pub forced: bool,
    /// Propagated color at `m e_1` for `|m| <= radius - 1` (`None`: not forced).
    pub axis: Vec<(i64, Option<u32>)>,
    pub first_unforced: Option<Coord>,
    pub x_at_v: u32,
    pub y_at_v: u32,
}

/// Propagate single-color domains through the window `B_radius` from the
/// constraints `z|_{U ∪ S} = x|_{U ∪ S}` and check that every axis cell
/// `m e_1` with `|m| <= radius - 1` is forced to `x`, so `z_V != y_V` at gap
/// `radius - 1`.
pub fn verify_forcing(w: &MixingWitness, radius: i64) -> Result<ForcingReport> {
    if radius < 2 {
        return domain("radius must be at least 2");
    }
    let window = BoxRegion::ball(radius, w.d)?;
    let x = w.x();
    let mut dom: Vec<u64> = vec![full_mask(w.q); window.len()];
    let mut queue = Vec::new();
    for v in w.tube_cells(radius).iter().chain(std::iter::once(&w.u())) {
        let i = window.index_of(v).expect("inside the window");
        dom[i] = 1 << x.color_at(v);
        queue.push(i);
    }
    let g = window.graph();
    let mut done = vec![false; window.len()];
    while let Some(i) = queue.pop() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let bit = dom[i];
        for &j in g.neighbors(i) {
            if dom[j] & bit != 0 {
                dom[j] &= !bit;
                if dom[j] == 0 {
                    return domain(format!("constraints contradict at {}", window.coord_at(j)));
                }
                if dom[j].count_ones() == 1 {
                    queue.push(j);
                }
            }
        }
    }
    let mut axis = Vec::new();
    let mut first_unforced = None;
    let mut forced = true;
    for m in -(radius - 1)..=radius - 1 {
        let v = Coord::axis_point(w.d, 0, m);
        let mask = dom[window.index_of(&v).unwrap()];
        let value = (mask.count_ones() == 1).then(|| mask.trailing_zeros());
        if value != Some(x.color_at(&v)) {
            forced = false;
            if first_unforced.is_none() {
                first_unforced = Some(v.clone());
            }
        }
        axis.push((m, value));
    }
    let vv = w.v(radius - 1);
    let y_at_v = w.y().color_at(&vv);
    let x_at_v = x.color_at(&vv);
    Ok(ForcingReport {
        d: w.d,
        q: w.q,
        radius,
        gap: radius - 1,
        forced: forced && x_at_v != y_at_v,
        axis,
        first_unforced,
        x_at_v,
        y_at_v,
    })
}

/// Exhaustive cross-check of [`verify_forcing`]: for every axis cell
/// `m e_1` (`|m| <= radius - 1`) and every color other than `x_{m e_1}`,
/// backtracking over the whole window finds no proper coloring agreeing with
/// `x` on `U ∪ S` that takes that color there.
pub fn forcing_oracle(w: &MixingWitness, radius: i64) -> Result<bool> {
    let window = BoxRegion::ball(radius, w.d)?;
    let x = w.x();
    let mut fixed: BTreeMap<Coord, u32> = w
        .tube_cells(radius)
        .into_iter()
        .map(|v| {
            let c = x.color_at(&v);
            (v, c)
        })
        .collect();
    fixed.insert(w.u(), x.color_at(&w.u()));
    let free: Vec<Coord> = window.cells().filter(|v| !fixed.contains_key(v)).collect();
    let base = CellProblem::new(free, w.q, |v| fixed.get(v).copied());
    if base.csp.first_solution(Order::MinRemaining).is_none() {
        return Ok(false);
    }
    for m in -(radius - 1)..=radius - 1 {
        let v = Coord::axis_point(w.d, 0, m);
        let Some(&i) = base.index.get(&v) else {
            continue;
        };
        for c in (0..w.q).filter(|&c| c != x.color_at(&v)) {
            let mut csp = base.csp.clone();
            csp.pin(i, c);
            if csp.first_solution(Order::MinRemaining).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Frozen `x`, its color shift `y` (different at the origin), `U = ∂B_n`,
/// `V = {0}`, and the exhaustive count of fillings of `B_n` from `x|_U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiWitness {
    pub d: usize,
    pub q: u32,
    pub n: i64,
    pub x: LinearColoringRule,
    pub y: LinearColoringRule,
    pub boundary_cells: usize,
    /// Proper colorings of `B_n` agreeing with `x` on `∂B_n`.
    pub fillings: u64,
    /// Those that also agree with `y` at the origin.
    pub fillings_matching_y: u64,
    pub violated: bool,
}

pub fn si_violation_witness(d: usize, q: u32, n: i64) -> Result<SiWitness> {
    if q < 3 || q as usize > d + 1 {
        return domain(format!("need 3 <= q <= d+1, got q={q}, d={d}"));
    }
    if n < 1 {
        return domain("n must be at least 1");
    }
    let x = frozen_rule(d, q)?.as_linear();
    let y = x.with_offset(x.offset + 1);
    let ball = BoxRegion::ball(n, d)?;
    let cells: Vec<Coord> = ball.cells().collect();
    let boundary = external_boundary(cells.iter());
    let fixed: BTreeMap<Coord, u32> = boundary.iter().map(|v| (v.clone(), x.color_at(v))).collect();
    let cp = CellProblem::new(cells, q, |v| fixed.get(v).copied());
    let origin = cp.index[&Coord::origin(d)];
    let y0 = y.color_at(&Coord::origin(d));
    let mut fillings = 0u64;
    let mut matching = 0u64;
    cp.csp.for_each_solution(Order::MinRemaining, |s| {
        fillings += 1;
        if s[origin] == y0 {
            matching += 1;
        }
        ControlFlow::Continue(())
    });
    Ok(SiWitness {
        d,
        q,
        n,
        boundary_cells: boundary.len(),
        violated: matching == 0,
        fillings,
        fillings_matching_y: matching,
        x,
        y,
    })
}

/// The tube configuration as a partial coloring of `B_radius` (tube and origin only).
pub fn tssm_constraints(w: &MixingWitness, radius: i64) -> Result<PartialColoring> {
    let window = BoxRegion::ball(radius, w.d)?;
    let x = w.x();
    let mut cells = w.tube_cells(radius);
    cells.push(w.u());
    x.restrict_to(&window, cells.iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_pair_up() {
        assert_eq!(unit_vector(2, 2), Coord::new(vec![0, 1]));
        assert_eq!(unit_vector(2, 3), Coord::new(vec![0, -1]));
        assert_eq!(unit_vector(2, 4), Coord::new(vec![-1, 0]));
        assert_eq!(unit_vector(3, 5), Coord::new(vec![0, -1, 0]));
    }

    #[test]
    fn tube_values_for_d2_q4() {
        let w = tssm_witness(2, 4).unwrap();
        let x = w.x();
        assert_eq!(x.color_at(&Coord::new(vec![0, 1])), 0);
        assert_eq!(x.color_at(&Coord::new(vec![0, -1])), 1);
        assert_eq!(x.color_at(&Coord::new(vec![1, 0])), 2);
        assert_eq!(x.color_at(&Coord::new(vec![0, 0])), 3);
        assert_eq!(w.y().color_at(&Coord::new(vec![0, 0])), 2);
        assert!(tssm_witness(2, 5).is_err());
        assert!(tssm_witness(2, 3).is_err());
    }

    #[test]
    fn x_and_y_are_proper_and_agree_on_the_tube() {
        for (d, q) in [(2, 4), (3, 5), (3, 6)] {
            let w = tssm_witness(d, q).unwrap();
            let window = BoxRegion::ball(if d == 2 { 8 } else { 4 }, d).unwrap();
            assert!(w.x().evaluate(&window).is_ok());
            assert!(w.y().evaluate(&window).is_ok());
            for v in w.tube_cells(4) {
                assert_eq!(w.x().color_at(&v), w.y().color_at(&v));
            }
        }
    }

    #[test]
    fn forcing_holds_in_range_and_fails_above() {
        let r = verify_forcing(&tssm_witness(2, 4).unwrap(), 6).unwrap();
        assert!(r.forced);
        let values: Vec<u32> = r.axis.iter().map(|a| a.1.unwrap()).collect();
        assert_eq!(&values[5..9], &[3, 2, 3, 2]);
        assert!(verify_forcing(&tssm_witness(3, 5).unwrap(), 5).unwrap().forced);
        let r = verify_forcing(&tssm_configuration(2, 5).unwrap(), 6).unwrap();
        assert!(!r.forced);
        assert!(r.first_unforced.is_some());
    }

    #[test]
    fn oracle_agrees_with_propagation() {
        assert!(forcing_oracle(&tssm_witness(2, 4).unwrap(), 3).unwrap());
        assert!(!forcing_oracle(&tssm_configuration(2, 5).unwrap(), 3).unwrap());
    }

    #[test]
    fn frozen_boundary_fills_once() {
        for (d, q, n) in [(2, 3, 2), (2, 3, 3)] {
            let w = si_violation_witness(d, q, n).unwrap();
            assert_eq!(w.fillings, 1);
            assert_eq!(w.fillings_matching_y, 0);
            assert!(w.violated);
        }
        assert!(si_violation_witness(2, 4, 2).is_err());
    }
}
