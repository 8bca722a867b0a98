//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lattice_coloring::census::{count_exact, rule_boundary, tv_to_uniform, CountMethod, GlauberChain};
use lattice_coloring::csp::{full_mask, Csp, Order};
use lattice_coloring::fill::{enumerate_extensions, fill_box, non_extendable_boundary, random_boundary, FillProblem};
use lattice_coloring::frozen::{canonical_frozen, find_alternative, frozen_obstruction, is_frozen_on};
use lattice_coloring::listcolor::{
    backtrack_list_color, is_list_colorable_brute, list_bound_vector, list_color, search_unlistable,
    ListAssignment,
};
use lattice_coloring::mixing::{
    forcing_oracle, move_graph, si_violation_witness, tssm_witness, verify_forcing, MoveKind,
};
use lattice_coloring::{BoxRegion, ColoringRule, Coord, PartialColoring};

type Outcome = (bool, String);

fn connected_sets(region: &BoxRegion, max: usize) -> Vec<Vec<Coord>> {
    let mut all = Vec::new();
    let mut layer: HashSet<Vec<Coord>> = region.cells().map(|v| vec![v]).collect();
    for size in 1..=max {
        all.extend(layer.iter().cloned());
        if size == max {
            break;
        }
        let mut next = HashSet::new();
        for set in &layer {
            for v in set {
                for w in v.lattice_neighbors() {
                    if region.contains(&w) && !set.contains(&w) {
                        let mut grown = set.clone();
                        grown.push(w);
                        grown.sort();
                        next.insert(grown);
                    }
                }
            }
        }
        layer = next;
    }
    all
}

fn criterion_1() -> Outcome {
    let mut checked = 0usize;
    for d in 1..=3 {
        let x = canonical_frozen(d).unwrap();
        let window = BoxRegion::cube(9, d).unwrap();
        let c = x.evaluate(&window).unwrap();
        let center = BoxRegion::new(Coord::splat(d, 3), Coord::splat(d, 7)).unwrap();
        for f in connected_sets(&center, 4) {
            if !is_frozen_on(&c, &f).unwrap() {
                return (false, format!("d={d}: alternative exists on {f:?}"));
            }
            checked += 1;
        }
    }
    (true, format!("{checked} connected sets of size <= 4 frozen for d = 1, 2, 3"))
}

fn criterion_2() -> Outcome {
    let block: Vec<Coord> = BoxRegion::cube(3, 2).unwrap().cells().collect();
    if !frozen_obstruction(&block, 4).unwrap() {
        return (false, "obstruction fails on [3]^2 with q=4".into());
    }
    let window = BoxRegion::cube(9, 2).unwrap();
    let central: Vec<Coord> = BoxRegion::new(Coord::splat(2, 4), Coord::splat(2, 6))
        .unwrap()
        .cells()
        .collect();
    for seed in 0..100u64 {
        let mut chain = GlauberChain::new(&window, 4, None, seed).unwrap();
        for _ in 0..30 {
            chain.sweep();
        }
        let c = chain.state();
        if find_alternative(&c, &central).unwrap().is_none() {
            return (false, format!("seed {seed}: no alternative on the central block"));
        }
    }
    (true, "obstruction holds; 100/100 random colorings recolorable on the central [3]^2".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut solved = 0usize;
    let mut cross = 0usize;
    for (d, n) in [(2usize, 4i64), (2, 5), (2, 6), (2, 7), (2, 8), (3, 5)] {
        let region = BoxRegion::cube(n, d).unwrap();
        let g = region.graph();
        let sizes = list_bound_vector(n, d).unwrap();
        let palette = 2 * d as u32 + 3;
        for _ in 0..200 {
            let lists = ListAssignment::random(&sizes, palette, &mut rng).unwrap();
            let Some(colors) = list_color(&g, &lists, None).unwrap().colors().map(<[u32]>::to_vec) else {
                return (false, format!("d={d}, n={n}: list_color reported UNSAT"));
            };
            if !lists.accepts(&g, &colors) {
                return (false, format!("d={d}, n={n}: output not proper or not within lists"));
            }
            if d == 2 && n == 4 {
                if backtrack_list_color(&g, &lists).unwrap().is_none() {
                    return (false, "backtracking oracle disagrees on [4]^2".into());
                }
                cross += 1;
            }
            solved += 1;
        }
    }
    (true, format!("{solved} assignments solved, {cross} cross-checked against backtracking"))
}

fn criterion_4() -> Outcome {
    let cube = search_unlistable(2, 3, 4).unwrap();
    let Some(w) = cube.witness.as_ref() else {
        return (false, "no witness on [2]^3".into());
    };
    let g = BoxRegion::cube(2, 3).unwrap().graph();
    let verified = w.sizes().iter().all(|&s| s == 2) && !is_list_colorable_brute(&g, w);
    let square = search_unlistable(2, 2, 4).unwrap();
    (
        verified && square.witness_count == 0,
        format!(
            "[2]^3: {} witnesses among {} assignments, first verified={verified}; [2]^2: {} witnesses among {}",
            cube.witness_count, cube.assignments, square.witness_count, square.assignments
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let density = rng.random_range(0.2..=1.0);
        let b = random_boundary(6, 2, 4, density, &mut rng).unwrap();
        let p = FillProblem::new(6, 2, &b).unwrap();
        let out = fill_box(&p).unwrap();
        let Some(col) = out.coloring() else {
            return (false, format!("boundary {i} did not extend"));
        };
        if !col.is_proper() || b.iter().any(|(v, c)| col.get(v) != Some(c)) {
            return (false, format!("boundary {i}: extension invalid"));
        }
    }
    let witness = non_extendable_boundary(2, 3, 3).unwrap();
    let extensions = enumerate_extensions(&witness, None).unwrap().len();
    let unsat = fill_box(&witness).unwrap().is_unsat();
    (
        unsat && extensions == 0,
        format!("1000/1000 boundaries extend (q=4, n=6); witness extensions={extensions}"),
    )
}

fn single_site(q: u32) -> (u64, u64) {
    let window = BoxRegion::cube(1, 2).unwrap().expand(1);
    let nbrs = Coord::new(vec![1, 1]).lattice_neighbors();
    let (mut ok, mut total) = (0, 0);
    for code in 0..q.pow(4) {
        let pairs = nbrs.iter().enumerate().map(|(k, v)| (v.clone(), code / q.pow(k as u32) % q));
        let b = PartialColoring::from_pairs(window.clone(), q, pairs).unwrap();
        total += 1;
        if !fill_box(&FillProblem::new(1, 2, &b).unwrap()).unwrap().is_unsat() {
            ok += 1;
        }
    }
    (ok, total)
}

fn criterion_6() -> Outcome {
    let (ok5, total5) = single_site(5);
    let (ok4, total4) = single_site(4);
    (
        ok5 == total5 && ok4 < total4,
        format!("q=5: {ok5}/{total5} extend; q=4: {}/{total4} fail", total4 - ok4),
    )
}

fn criterion_7() -> Outcome {
    let w = tssm_witness(2, 4).unwrap();
    let r = verify_forcing(&w, 6).unwrap();
    let oracle = forcing_oracle(&w, 3).unwrap();
    (
        r.forced && oracle,
        format!("propagation forced={} at radius 6; exhaustive radius-3 check={oracle}", r.forced),
    )
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let w = si_violation_witness(2, 3, n).unwrap();
        ok &= w.fillings == 1 && w.violated;
        parts.push(format!("n={n}: {} filling(s)", w.fillings));
    }
    (ok, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let count = |n: i64, d: usize, q: u32, b: Option<&PartialColoring>, m| {
        count_exact(&BoxRegion::cube(n, d).unwrap(), q, b, m).unwrap().count
    };
    if count(2, 2, 3, None, CountMethod::Auto) != BigUint::from(18u8) {
        return (false, "[2]^2 with q=3 is not 18".into());
    }
    for d in 1..=3 {
        for q in 1..=6u32 {
            if count(1, d, q, None, CountMethod::Auto) != BigUint::from(q) {
                return (false, format!("[1]^{d} with q={q}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = 0;
    for n in 1..=4 {
        for q in 1..=5u32 {
            let mut boundaries: Vec<Option<PartialColoring>> = vec![None];
            for _ in 0..3 {
                boundaries.push(Some(random_boundary(n, 2, q, 0.6, &mut rng).unwrap()));
            }
            for b in &boundaries {
                let t = count(n, 2, q, b.as_ref(), CountMethod::Transfer);
                let e = count(n, 2, q, b.as_ref(), CountMethod::Dfs);
                if t != e {
                    return (false, format!("n={n}, q={q}: transfer {t} vs enumeration {e}"));
                }
                pairs += 1;
            }
        }
    }
    let x = canonical_frozen(2).unwrap();
    for n in 1..=4 {
        let b = rule_boundary(&x, n).unwrap();
        if count(n, 2, 3, Some(&b), CountMethod::Auto) != BigUint::from(1u8) {
            return (false, format!("frozen fiber at n={n} is not a single point"));
        }
    }
    (true, format!("closed forms hold; {pairs} transfer/enumeration pairs agree; frozen fibers = 1"))
}

fn criterion_10() -> Outcome {
    let region = BoxRegion::cube(3, 2).unwrap();
    let q = 5;
    let support = count_exact(&region, q, None, CountMethod::Auto).unwrap().count;
    let support: u64 = support.try_into().unwrap();
    let mut chain = GlauberChain::new(&region, q, None, 10).unwrap();
    for _ in 0..1_000 {
        chain.sweep();
    }
    let samples = 100_000u64;
    let mut freq: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..samples {
        chain.sweep();
        *freq.entry(chain.colors().to_vec()).or_default() += 1;
    }
    let tv = tv_to_uniform(&freq, support);

    // the same statistic for exact independent uniform draws
    let csp = Csp::new(&region.graph(), vec![full_mask(q); region.len()]);
    let mut states = Vec::new();
    csp.for_each_solution(Order::Static, |s| {
        states.push(s.to_vec());
        ControlFlow::Continue(())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ideal: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..samples {
        *ideal.entry(states[rng.random_range(0..states.len())].clone()).or_default() += 1;
    }
    let ideal_tv = tv_to_uniform(&ideal, support);
    (
        tv < 0.05,
        format!(
            "TV={tv:.4} over {support} states from {samples} samples (threshold 0.05); \
             exact uniform draws give TV={ideal_tv:.4}"
        ),
    )
}

fn criterion_11() -> Outcome {
    let region = BoxRegion::cube(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sizes = BTreeSet::new();
    for i in 0..50 {
        let b = random_boundary(3, 2, 6, 1.0, &mut rng).unwrap();
        let r = move_graph(&region, Some(&b), 6, MoveKind::Pivot).unwrap();
        if !r.connected {
            return (false, format!("boundary {i}: {} components", r.component_count));
        }
        sizes.insert(r.state_count);
    }
    (
        true,
        format!(
            "50/50 pivot graphs connected; state counts {}..{}",
            sizes.first().unwrap(),
            sizes.last().unwrap()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("frozen existence", criterion_1),
        ("frozen non-existence", criterion_2),
        ("list coloring at n >= d+2", criterion_3),
        ("2-list witness on the 3-cube", criterion_4),
        ("boundary fillability", criterion_5),
        ("single-site fillability threshold", criterion_6),
        ("spatial mixing violation", criterion_7),
        ("strong irreducibility violation", criterion_8),
        ("counting oracles", criterion_9),
        ("sampler distribution", criterion_10),
        ("move connectivity", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail} ({:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
