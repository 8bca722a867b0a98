//! Coloring `[n+1]^d` piece by piece: the faces `P_J` (coordinates in `J`
//! equal to `n+1`, the rest in `[n]`) are copies of `[n]^{d-|J|}` and are
//! colored in order of increasing dimension, the inner box last.

use std::collections::BTreeMap;

use crate::error::{domain, precondition, Result};
use crate::lattice::{BoxRegion, Coord, Graph, ProperColoring};

use super::{list_bound, list_color, ListAssignment, ListColorOutcome};

/// Pieces of `[n+1]^d ∖ [n]^d` as `(J, cells)`, lowest dimension first.
pub fn shell_pieces(n: i64, d: usize) -> Result<Vec<(Vec<usize>, Vec<Coord>)>> {
    let mut pieces = all_pieces(n, d)?;
    pieces.retain(|(j, _)| !j.is_empty());
    Ok(pieces)
}

fn all_pieces(n: i64, d: usize) -> Result<Vec<(Vec<usize>, Vec<Coord>)>> {
    if n < 1 || d == 0 || d > 16 {
        return domain(format!("need n >= 1 and 1 <= d <= 16, got n={n}, d={d}"));
    }
    let outer = BoxRegion::cube(n + 1, d)?;
    let mut by_mask: BTreeMap<u32, Vec<Coord>> = BTreeMap::new();
    for v in outer.cells() {
        let mask = (0..d)
            .filter(|&k| v[k] == n + 1)
            .fold(0u32, |m, k| m | (1 << k));
        by_mask.entry(mask).or_default().push(v);
    }
    let mut pieces: Vec<(Vec<usize>, Vec<Coord>)> = by_mask
        .into_iter()
        .map(|(mask, cells)| ((0..d).filter(|&k| mask & (1 << k) != 0).collect(), cells))
        .collect();
    pieces.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(pieces)
}

/// Colors produced for the shell, or the piece that could not be colored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShellOutcome {
    Colored(BTreeMap<Coord, u32>),
    Unsat { piece: Vec<usize> },
}

fn color_pieces(
    n: i64,
    d: usize,
    lists: &ListAssignment,
    include_inner: bool,
) -> Result<ShellOutcome> {
    let outer = BoxRegion::cube(n + 1, d)?;
    if lists.len() != outer.len() {
        return domain(format!("expected {} lists on [{}]^{d}, got {}", outer.len(), n + 1, lists.len()));
    }
    let mut pieces = all_pieces(n, d)?;
    if !include_inner {
        pieces.retain(|(j, _)| !j.is_empty());
    }
    for (_, cells) in &pieces {
        for v in cells {
            let need = list_bound(n + 1, d, v)? as usize;
            let have = lists.list(outer.index_of(v).unwrap()).len();
            if have < need {
                return precondition(format!("list at {v} has {have} colors, need {need}"));
            }
        }
    }
    let mut colored: BTreeMap<Coord, u32> = BTreeMap::new();
    for (j, cells) in pieces {
        let mut residual = Vec::with_capacity(cells.len());
        for v in &cells {
            let taken: Vec<u32> = v
                .lattice_neighbors()
                .iter()
                .filter_map(|w| colored.get(w).copied())
                .collect();
            let l: Vec<u32> = lists
                .list(outer.index_of(v).unwrap())
                .iter()
                .copied()
                .filter(|c| !taken.contains(c))
                .collect();
            if l.is_empty() {
                return Ok(ShellOutcome::Unsat { piece: j });
            }
            residual.push(l);
        }
        let g = Graph::induced(&cells);
        match list_color(&g, &ListAssignment::new(residual)?, None)? {
            ListColorOutcome::Colored { colors, .. } => {
                colored.extend(cells.into_iter().zip(colors));
            }
            ListColorOutcome::Unsat => return Ok(ShellOutcome::Unsat { piece: j }),
        }
    }
    Ok(ShellOutcome::Colored(colored))
}

/// Color `[n+1]^d ∖ [n]^d` from `lists` (given on all of `[n+1]^d`, row-major),
/// whose sizes must be at least `L_{n+1}^d` on the shell.
pub fn shell_color(n: i64, d: usize, lists: &ListAssignment) -> Result<ShellOutcome> {
    color_pieces(n, d, lists, false)
}

/// Color all of `[n+1]^d`: the shell first, then the inner `[n]^d`, whose
/// residual lists still have at least `L_n^d` colors.
pub fn color_box_via_shell(n: i64, d: usize, lists: &ListAssignment) -> Result<Option<ProperColoring>> {
    match color_pieces(n, d, lists, true)? {
        ShellOutcome::Colored(map) => {
            let region = BoxRegion::cube(n + 1, d)?;
            let q = lists.lists().iter().flatten().max().map_or(1, |&c| c + 1);
            let colors = region.cells().map(|v| map[&v]).collect();
            Ok(Some(ProperColoring::new(region, q, colors)?))
        }
        ShellOutcome::Unsat { .. } => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::listcolor::list_bound_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pieces_of_the_square_shell() {
        let pieces = shell_pieces(4, 2).unwrap();
        let shapes: Vec<(Vec<usize>, usize)> = pieces.iter().map(|(j, c)| (j.clone(), c.len())).collect();
        assert_eq!(shapes, vec![(vec![0, 1], 1), (vec![0], 4), (vec![1], 4)]);
        let total: usize = pieces.iter().map(|p| p.1.len()).sum();
        assert_eq!(total, 25 - 16);
    }

    #[test]
    fn one_dimensional_shell_is_one_vertex() {
        let pieces = shell_pieces(3, 1).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].1, vec![Coord::new(vec![4])]);
        let lists = ListAssignment::new(vec![vec![0, 1]; 4]).unwrap();
        match shell_color(3, 1, &lists).unwrap() {
            ShellOutcome::Colored(m) => assert_eq!(m.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_lists_color_the_five_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sizes = list_bound_vector(5, 2).unwrap();
        for _ in 0..30 {
            let lists = ListAssignment::random(&sizes, 6, &mut rng).unwrap();
            let c = color_box_via_shell(4, 2, &lists).unwrap().expect("colorable");
            let g = c.region().graph();
            assert!(lists.accepts(&g, c.colors()));
        }
    }

    #[test]
    fn short_shell_lists_are_rejected() {
        let lists = ListAssignment::new(vec![vec![0, 1]; 25]).unwrap();
        assert!(shell_color(4, 2, &lists).is_err());
    }
}
