use lattice_coloring::fill::random_boundary;
use lattice_coloring::mixing::{
    forcing_oracle, move_graph, si_violation_witness, tssm_witness, verify_forcing, MoveGraph,
    MoveKind, DEFAULT_STATE_CAP,
};
use lattice_coloring::{BoxRegion, Coord, PartialColoring};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The boundary of `[n]^d` from `random_boundary`, without any cell inside.
fn outside(b: &PartialColoring, region: &BoxRegion) -> PartialColoring {
    let keep: Vec<Coord> = b.support().filter(|v| !region.contains(v)).cloned().collect();
    b.restrict(keep.iter())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Larger moves only merge components: N-pivot and Kempe move graphs
    /// have at most as many components as the pivot graph.
    #[test]
    fn bigger_moves_merge_components(seed in any::<u64>(), n in 2i64..=3, q in 3u32..=5, density in 0.0f64..=0.6) {
        prop_assume!(n == 2 || q <= 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = BoxRegion::cube(n, 2).unwrap();
        let b = outside(&random_boundary(n, 2, q, density, &mut rng).unwrap(), &region);
        let pivot = move_graph(&region, Some(&b), q, MoveKind::Pivot).unwrap();
        let npivot = move_graph(&region, Some(&b), q, MoveKind::NPivot(2)).unwrap();
        let kempe = move_graph(&region, Some(&b), q, MoveKind::Kempe).unwrap();
        prop_assert_eq!(pivot.state_count, npivot.state_count);
        prop_assert_eq!(pivot.state_count, kempe.state_count);
        prop_assert!(npivot.component_count <= pivot.component_count);
        prop_assert!(kempe.component_count <= pivot.component_count);
        prop_assert_eq!(pivot.component_sizes.iter().sum::<u64>(), pivot.state_count);
    }

    /// Move graphs are symmetric: every move can be undone.
    #[test]
    fn moves_are_reversible(seed in any::<u64>(), q in 3u32..=4, kind in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = BoxRegion::cube(2, 2).unwrap();
        let b = outside(&random_boundary(2, 2, q, 0.5, &mut rng).unwrap(), &region);
        let kind = [MoveKind::Pivot, MoveKind::NPivot(2), MoveKind::Kempe][kind];
        let g = MoveGraph::build(&region, Some(&b), q, kind, DEFAULT_STATE_CAP).unwrap();
        for a in 0..g.state_count() {
            for c in g.neighbors(a) {
                prop_assert!(g.neighbors(c).contains(&a));
            }
        }
    }
}

/// A box whose whole side fits in one window makes every state adjacent.
#[test]
fn window_covering_the_box_is_complete() {
    let region = BoxRegion::cube(2, 2).unwrap();
    let r = move_graph(&region, None, 3, MoveKind::NPivot(2)).unwrap();
    assert_eq!(r.state_count, 18);
    assert!(r.connected);
    assert_eq!(r.root_eccentricity, 1);
}

#[test]
fn forcing_holds_across_the_range() {
    for (d, q) in [(2, 4), (3, 5), (3, 6)] {
        let w = tssm_witness(d, q).unwrap();
        let r = verify_forcing(&w, 3).unwrap();
        assert!(r.forced, "d={d} q={q}");
        assert_ne!(r.x_at_v, r.y_at_v);
    }
    let w = tssm_witness(2, 4).unwrap();
    assert!(forcing_oracle(&w, 3).unwrap());
}

#[test]
fn frozen_boundaries_violate_si() {
    for (d, q, n) in [(2, 3, 1), (2, 3, 2), (3, 3, 1), (3, 4, 1)] {
        let w = si_violation_witness(d, q, n).unwrap();
        assert_eq!(w.fillings, 1, "d={d} q={q} n={n}");
        assert!(w.violated);
    }
}
