use std::collections::BTreeSet;

use lattice_coloring::fill::{
    boundary_lists, enumerate_extensions, fep_extend, fep_partition, fill_box, fill_union,
    minimal_anchors, random_boundary, tile_box, tile_index, FillProblem,
};
use lattice_coloring::lattice::external_boundary;
use lattice_coloring::{BoxRegion, Coord, PartialColoring};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn agrees(c: &PartialColoring, with: &PartialColoring) -> bool {
    with.iter().all(|(v, x)| c.get(v) == Some(x))
}

/// A random proper partial coloring of the cells in `shell`, hosted on `host`.
fn random_partial(rng: &mut ChaCha8Rng, host: &BoxRegion, shell: &BTreeSet<Coord>, q: u32) -> PartialColoring {
    let mut c = PartialColoring::empty(host.clone(), q).unwrap();
    for v in shell {
        if rng.random_bool(0.7) {
            let taken: Vec<u32> = v.lattice_neighbors().iter().filter_map(|w| c.get(w)).collect();
            let free: Vec<u32> = (0..q).filter(|x| !taken.contains(x)).collect();
            if !free.is_empty() {
                c.assign(v.clone(), free[rng.random_range(0..free.len())]).unwrap();
            }
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With q >= d+2 and n >= d+2 every proper boundary coloring extends, and
    /// the extension keeps the boundary and is proper.
    #[test]
    fn boundaries_extend_when_q_is_large(seed in any::<u64>(), d in 1usize..=3, grow in 0i64..=1, extra in 0u32..=2, density in 0.3f64..=1.0) {
        let q = d as u32 + 2 + extra;
        let n = d as i64 + 2 + grow;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_boundary(n, d, q, density, &mut rng).unwrap();
        let problem = FillProblem::new(n, d, &b).unwrap();
        let out = fill_box(&problem).unwrap();
        let c = out.coloring().expect("extends");
        prop_assert!(c.is_proper());
        prop_assert!(agrees(c, &b));
        prop_assert!(problem.target().cells().all(|v| c.get(&v).is_some()));
    }

    /// Boundary lists never exceed the palette and shrink by at most the
    /// number of fixed outside neighbors.
    #[test]
    fn boundary_lists_respect_neighbors(seed in any::<u64>(), n in 1i64..=4, q in 3u32..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_boundary(n, 2, q, 0.8, &mut rng).unwrap();
        let problem = FillProblem::new(n, 2, &b).unwrap();
        let target = problem.target();
        let lists = boundary_lists(&problem);
        prop_assert_eq!(lists.len(), target.len());
        for (v, list) in target.cells().zip(&lists) {
            let fixed: Vec<u32> = v.lattice_neighbors().iter()
                .filter(|w| !target.contains(w))
                .filter_map(|w| b.get(w))
                .collect();
            prop_assert!(list.iter().all(|c| *c < q && !fixed.contains(c)));
            prop_assert!(list.len() + fixed.len() >= q as usize);
        }
    }

    /// fill_box and exhaustive enumeration agree on small q <= d+1 instances.
    #[test]
    fn fill_agrees_with_enumeration(seed in any::<u64>(), n in 1i64..=3, q in 2u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_boundary(n, 2, q, 0.9, &mut rng).unwrap();
        let problem = FillProblem::new(n, 2, &b).unwrap();
        let some = !enumerate_extensions(&problem, Some(1)).unwrap().is_empty();
        prop_assert_eq!(fill_box(&problem).unwrap().is_unsat(), !some);
    }

    /// Unions of boxes fill from any proper boundary when q >= d+2.
    #[test]
    fn unions_of_boxes_fill(seed in any::<u64>(), n in 2i64..=4, count in 1usize..=4) {
        let d = 2;
        let q = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let anchors: Vec<Coord> = (0..count)
            .map(|_| Coord::new(vec![rng.random_range(0..=n), rng.random_range(0..=n)]))
            .collect();
        let minimal = minimal_anchors(n, &anchors).unwrap();
        let cube = BoxRegion::cube(n, d).unwrap();
        let union: BTreeSet<Coord> = minimal.iter().flat_map(|a| cube.translate(a).cells().collect::<Vec<_>>()).collect();
        let all: BTreeSet<Coord> = anchors.iter().flat_map(|a| cube.translate(a).cells().collect::<Vec<_>>()).collect();
        prop_assert_eq!(&union, &all);
        let cells: Vec<Coord> = union.iter().cloned().collect();
        let host = BoxRegion::bounding(&cells).unwrap().expand(1);
        let shell = external_boundary(cells.iter());
        let b = random_partial(&mut rng, &host, &shell, q);
        let out = fill_union(n, &anchors, &b).unwrap();
        let c = out.coloring().expect("extends");
        prop_assert!(c.is_proper());
        prop_assert!(agrees(c, &b));
        prop_assert!(union.iter().all(|v| c.get(v).is_some()));
    }

    /// The tiles (2n+1)k + B_n partition Z^d, and the FEP partition splits the
    /// window's tiles into those meeting U and the rest.
    #[test]
    fn tiles_partition_the_window(seed in any::<u64>(), n in 0i64..=3, w in 1i64..=6, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = BoxRegion::ball(w, d).unwrap();
        for v in window.cells() {
            let k = tile_index(&v, n);
            prop_assert!(tile_box(&k, n).contains(&v));
        }
        let u: Vec<Coord> = window.cells().filter(|_| rng.random_bool(0.1)).collect();
        let part = fep_partition(u.iter(), n, &window);
        let selected: BTreeSet<Coord> = part.selected.iter().cloned().collect();
        let remaining: BTreeSet<Coord> = part.remaining.iter().cloned().collect();
        prop_assert!(selected.is_disjoint(&remaining));
        let hit: BTreeSet<Coord> = window.cells().map(|v| tile_index(&v, n)).collect();
        let covered: BTreeSet<Coord> = selected.union(&remaining).cloned().collect();
        prop_assert_eq!(covered, hit);
        for v in &u {
            prop_assert!(selected.contains(&tile_index(v, n)));
        }
    }

    /// fep_extend keeps u, is proper and covers the window.
    #[test]
    fn fep_extension_is_proper(seed in any::<u64>(), n in 1i64..=2, w in 2i64..=5) {
        let (d, q) = (2usize, 4u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = Coord::new(vec![rng.random_range(-w..=w), rng.random_range(-w..=w)]);
        // ubar on U + B_{2n}, from a proper linear pattern.
        let host = BoxRegion::ball(2 * n, d).unwrap().translate(&center);
        let ubar = PartialColoring::from_pairs(
            host.clone(),
            q,
            host.cells().map(|v| {
                let c = (v[0] + 2 * v[1]).rem_euclid(q as i64) as u32;
                (v, c)
            }),
        )
        .unwrap();
        let u = ubar.restrict([center.clone()].iter());
        let window = BoxRegion::ball(w, d).unwrap();
        let out = fep_extend(&u, &ubar, n, &window).unwrap();
        let c = out.coloring().expect("extends");
        prop_assert!(c.is_proper());
        prop_assert!(window.cells().all(|v| c.get(&v).is_some()));
        if window.contains(&center) {
            prop_assert_eq!(c.get(&center), u.get(&center));
        }
    }
}
