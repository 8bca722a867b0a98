use std::fs;
use std::path::Path;

use clap::Parser;
use lattice_coloring::census::{
    count_exact, entropy_series, glauber_sample, CountMethod, CountReport, SamplerConfig,
};
use lattice_coloring::fill::{fep_extend, fill_box, non_extendable_boundary, FillOutcome, FillProblem};
use lattice_coloring::frozen::{
    canonical_frozen, find_alternative, frozen_obstruction, frozen_rule, single_site_frozen,
};
use lattice_coloring::lattice::{edge_counts, parse_coords, render_ascii, ColoringDoc};
use lattice_coloring::listcolor::{
    has_odd_directed_cycle, hall_orientation, list_bound_vector, list_color, search_unlistable,
    HallOutcome, ListAssignment, ListColorOutcome,
};
use lattice_coloring::mixing::{
    si_violation_witness, tssm_configuration, tssm_witness, verify_forcing,
    MoveGraph, MoveKind,
};
use lattice_coloring::{
    BoxRegion, ColoringRule, Coord, Error, LinearColoringRule, PartialColoring, ProperColoring,
    Result,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{emit, envelope, Outcome};
use crate::*;

/// Largest window `frozen gen` evaluates.
const GEN_CELL_CAP: usize = 1 << 20;

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn doc(c: &PartialColoring) -> Value {
    serde_json::to_value(ColoringDoc::from_partial(c)).expect("documents serialize")
}

fn proper_doc(c: &ProperColoring) -> Value {
    serde_json::to_value(ColoringDoc::from_proper(c)).expect("documents serialize")
}

fn coord_value(v: &Coord) -> Value {
    json!(v.as_slice())
}

/// A coloring document from a file holding either the document itself or a
/// `zdcolor` envelope whose result has a `coloring` field.
pub fn load_coloring(path: &Path) -> Result<PartialColoring> {
    let text = fs::read_to_string(path)?;
    let mut value: Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("result") {
        value = inner.take();
    }
    if let Some(inner) = value.get_mut("coloring") {
        value = inner.take();
    }
    let doc: ColoringDoc = serde_json::from_value(value)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    doc.to_partial()
}

/// The coloring with palette `q` (colors must already lie below `q`).
fn with_q(c: &PartialColoring, q: u32) -> Result<PartialColoring> {
    PartialColoring::from_pairs(c.region().clone(), q, c.iter().map(|(v, x)| (v.clone(), x)))
}

fn check_dim(c: &PartialColoring, d: usize, what: &str) -> Result<()> {
    if c.dim() != d {
        return Err(Error::Domain(format!("{what} has dimension {}, expected {d}", c.dim())));
    }
    Ok(())
}

fn parse_cells(text: &str, d: usize) -> Result<Vec<Coord>> {
    let cells = parse_coords(text)?;
    if cells.is_empty() {
        return Err(Error::Domain("F must be non-empty".into()));
    }
    if cells[0].dim() != d {
        return Err(Error::Domain(format!("cells of F must have dimension {d}")));
    }
    Ok(cells)
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Frozen(FrozenCmd::Gen(a)) => frozen_gen(a),
        Command::Frozen(FrozenCmd::Check(a)) => frozen_check(a),
        Command::Frozen(FrozenCmd::Obstruct(a)) => frozen_obstruct(a),
        Command::Listcolor(ListcolorCmd::Solve(a)) => listcolor_solve(a),
        Command::Listcolor(ListcolorCmd::Orient(a)) => listcolor_orient(a),
        Command::Listcolor(ListcolorCmd::WitnessCube(a)) => listcolor_witness(a),
        Command::Fill(FillCmd::Box(a)) => fill_box_cmd(a),
        Command::Fill(FillCmd::Witness(a)) => fill_witness(a),
        Command::Fill(FillCmd::Fep(a)) => fill_fep(a),
        Command::Mixing(MixingCmd::Tssm(a)) => mixing_tssm(a),
        Command::Mixing(MixingCmd::Si(a)) => mixing_si(a),
        Command::Mixing(MixingCmd::Moves(a)) => mixing_moves(a),
        Command::Census(CensusCmd::Count(a)) => census_count(a),
        Command::Census(CensusCmd::Entropy(a)) => census_entropy(a),
        Command::Census(CensusCmd::Sample(a)) => census_sample(a),
        Command::Run(a) => run_batch(a),
    }
}

fn frozen_gen(a: &FrozenGen) -> Result<Outcome> {
    let rule: LinearColoringRule = match (a.single_site, a.q) {
        (true, Some(q)) if q as usize != 2 * a.d + 1 => {
            return Err(Error::Domain(format!(
                "the single-site rule uses q = 2d+1 = {}",
                2 * a.d + 1
            )))
        }
        (true, _) => single_site_frozen(a.d)?,
        (false, None) => canonical_frozen(a.d)?,
        (false, Some(q)) => frozen_rule(a.d, q)?.as_linear(),
    };
    let window = BoxRegion::cube(a.n, a.d)?;
    if window.len() > GEN_CELL_CAP {
        return Err(Error::SizeCap {
            what: format!("[{}]^{} window", a.n, a.d),
            cap: GEN_CELL_CAP as u64,
        });
    }
    let c = rule.evaluate(&window)?;
    let mut result = json!({
        "rule": rule,
        "d": a.d,
        "q": rule.q,
        "single_site": a.single_site,
        "coloring": proper_doc(&c),
    });
    let partial = c.to_partial();
    if a.d == 2 {
        result["ascii"] = json!(render_ascii(&partial)?);
    }
    Ok(Outcome::new("frozen gen", params(a), "ok", false, result).with_picture(partial))
}

fn frozen_check(a: &FrozenCheck) -> Result<Outcome> {
    let mut c = load_coloring(&a.coloring)?;
    if let Some(q) = a.q {
        c = with_q(&c, q)?;
    }
    let c = c.to_proper()?;
    let cells = parse_cells(&a.cells, c.dim())?;
    let alternative = find_alternative(&c, &cells)?;
    let frozen = alternative.is_none();
    let result = json!({
        "frozen": frozen,
        "q": c.q(),
        "cells": cells.iter().map(coord_value).collect::<Vec<_>>(),
        "alternative": alternative.as_ref().map(doc),
    });
    let verdict = if frozen { "frozen" } else { "not_frozen" };
    Ok(Outcome::new("frozen check", params(a), verdict, !frozen, result))
}

fn frozen_obstruct(a: &FrozenObstruct) -> Result<Outcome> {
    let cells = parse_cells(&a.cells, a.d)?;
    if a.q < 1 {
        return Err(Error::Domain("q must be at least 1".into()));
    }
    let holds = frozen_obstruction(&cells, a.q)?;
    let mut unique = cells.clone();
    unique.sort();
    unique.dedup();
    let e = edge_counts(&unique, None);
    let result = json!({
        "obstruction": holds,
        "q": a.q,
        "cells": unique.len(),
        "capacity": (a.q as usize - 1) * unique.len(),
        "internal_edges": e.internal,
        "crossing_edges": e.crossing,
    });
    let verdict = if holds { "obstructed" } else { "inconclusive" };
    Ok(Outcome::new("frozen obstruct", params(a), verdict, !holds, result))
}

fn lists_value(lists: &ListAssignment, region: &BoxRegion) -> Result<Value> {
    Ok(serde_json::from_str(&lists.to_json(region)?)?)
}

fn listcolor_solve(a: &ListSolve) -> Result<Outcome> {
    let region = BoxRegion::cube(a.n, a.d)?;
    let lists = match (&a.lists, a.random) {
        (Some(path), _) => ListAssignment::from_json(&region, &fs::read_to_string(path)?)?,
        (None, Some(seed)) => {
            let palette = a.palette.unwrap_or(a.d as u32 + 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ListAssignment::random(&list_bound_vector(a.n, a.d)?, palette, &mut rng)?
        }
        (None, None) => return Err(Error::Domain("give --lists FILE or --random SEED".into())),
    };
    let g = region.graph();
    let outcome = list_color(&g, &lists, None)?;
    let mut result = json!({ "lists": lists_value(&lists, &region)? });
    let (verdict, negative, picture) = match &outcome {
        ListColorOutcome::Colored { colors, mode } => {
            let q = colors.iter().max().map_or(1, |&m| m + 1);
            let c = ProperColoring::new(region.clone(), q, colors.clone())?;
            result["mode"] = json!(mode);
            result["coloring"] = proper_doc(&c);
            ("ok", false, Some(c.to_partial()))
        }
        ListColorOutcome::Unsat => ("unsat", true, None),
    };
    result["colorable"] = json!(!negative);
    let mut o = Outcome::new("listcolor solve", params(a), verdict, negative, result);
    o.picture = picture;
    Ok(o)
}

fn listcolor_orient(a: &ListOrient) -> Result<Outcome> {
    let region = BoxRegion::cube(a.n, a.d)?;
    let bound = match a.uniform {
        Some(k) => vec![k; region.len()],
        None => list_bound_vector(a.n, a.d)?,
    };
    let g = region.graph();
    let cell = |i: usize| coord_value(&region.coord_at(i));
    let o = match hall_orientation(&g, &bound)? {
        HallOutcome::Oriented(o) => {
            let degrees = o.out_degrees();
            let result = json!({
                "feasible": true,
                "arcs": o.arcs().iter().map(|&(u, v)| json!([cell(u), cell(v)])).collect::<Vec<_>>(),
                "max_out_degree": degrees.iter().max().copied().unwrap_or(0),
                "below_bound": degrees.iter().zip(&bound).all(|(&k, &l)| (k as u32) < l),
                "odd_directed_cycle": has_odd_directed_cycle(&o),
            });
            Outcome::new("listcolor orient", params(a), "ok", false, result)
        }
        HallOutcome::Infeasible(v) => {
            let result = json!({
                "feasible": false,
                "violation": {
                    "vertices": v.vertices.iter().map(|&i| cell(i)).collect::<Vec<_>>(),
                    "capacity": v.capacity,
                    "edges": v.edges,
                },
            });
            Outcome::new("listcolor orient", params(a), "infeasible", true, result)
        }
    };
    Ok(o)
}

fn listcolor_witness(a: &ListWitness) -> Result<Outcome> {
    let report = search_unlistable(a.n, a.d, a.universe)?;
    let region = BoxRegion::cube(a.n, a.d)?;
    let lists = report
        .witness
        .as_ref()
        .map(|w| lists_value(w, &region))
        .transpose()?;
    let found = report.witness.is_some();
    let mut result = serde_json::to_value(&report)?;
    result["lists"] = json!(lists);
    let verdict = if found { "witness" } else { "no_witness" };
    Ok(Outcome::new("listcolor witness-cube", params(a), verdict, !found, result))
}

fn fill_result(outcome: &FillOutcome, problem: &FillProblem) -> (Value, &'static str, bool, Option<PartialColoring>) {
    match outcome {
        FillOutcome::Filled { coloring, mode } => {
            let inner: Vec<Coord> = problem.target().cells().collect();
            let picture = coloring.restrict(inner.iter());
            let result = json!({
                "extends": true,
                "mode": mode,
                "coloring": doc(coloring),
            });
            (result, "ok", false, Some(picture))
        }
        FillOutcome::Unsat => (json!({ "extends": false }), "unsat", true, None),
    }
}

fn fill_box_cmd(a: &FillBox) -> Result<Outcome> {
    let boundary = load_coloring(&a.boundary)?;
    check_dim(&boundary, a.d, "the boundary")?;
    let boundary = with_q(&boundary, a.q)?;
    let problem = FillProblem::new(a.n, a.d, &boundary)?;
    let outcome = fill_box(&problem)?;
    let (result, verdict, negative, picture) = fill_result(&outcome, &problem);
    let mut o = Outcome::new("fill box", params(a), verdict, negative, result);
    o.picture = picture;
    Ok(o)
}

fn fill_witness(a: &FillWitness) -> Result<Outcome> {
    let problem = non_extendable_boundary(a.d, a.q, a.n)?;
    let extends = !fill_box(&problem)?.is_unsat();
    let result = json!({
        "n": a.n,
        "extends": extends,
        "coloring": doc(problem.boundary()),
    });
    Ok(Outcome::new("fill witness", params(a), "ok", false, result)
        .with_picture(problem.boundary().clone()))
}

fn fill_fep(a: &FillFep) -> Result<Outcome> {
    let u = with_q(&load_coloring(&a.u)?, a.q)?;
    let ubar = with_q(&load_coloring(&a.ubar)?, a.q)?;
    check_dim(&ubar, u.dim(), "ubar")?;
    let window = BoxRegion::ball(a.window, u.dim())?;
    let outcome = fep_extend(&u, &ubar, a.n, &window)?;
    let (result, verdict, negative, picture) = match &outcome {
        FillOutcome::Filled { coloring, mode } => (
            json!({ "extends": true, "mode": mode, "coloring": doc(coloring) }),
            "ok",
            false,
            Some(coloring.clone()),
        ),
        FillOutcome::Unsat => (json!({ "extends": false }), "unsat", true, None),
    };
    let mut o = Outcome::new("fill fep", params(a), verdict, negative, result);
    o.picture = picture;
    Ok(o)
}

fn mixing_tssm(a: &MixingTssm) -> Result<Outcome> {
    let w = if a.unchecked {
        tssm_configuration(a.d, a.q)?
    } else {
        tssm_witness(a.d, a.q)?
    };
    let report = verify_forcing(&w, a.radius)?;
    let forced = report.forced;
    let mut result = serde_json::to_value(&report)?;
    result["u"] = coord_value(&w.u());
    result["v"] = coord_value(&w.v(report.gap));
    let verdict = if forced { "forced" } else { "not_forced" };
    Ok(Outcome::new("mixing tssm", params(a), verdict, !forced, result))
}

fn mixing_si(a: &MixingSi) -> Result<Outcome> {
    let w = si_violation_witness(a.d, a.q, a.n)?;
    let violated = w.violated;
    let result = serde_json::to_value(&w)?;
    let verdict = if violated { "violated" } else { "not_violated" };
    Ok(Outcome::new("mixing si", params(a), verdict, !violated, result))
}

fn mixing_moves(a: &MixingMoves) -> Result<Outcome> {
    let kind: MoveKind = a.kind.parse()?;
    let region = BoxRegion::cube(a.side, a.d)?;
    let boundary = a.boundary.as_deref().map(load_coloring).transpose()?;
    if let Some(b) = &boundary {
        check_dim(b, a.d, "the boundary")?;
    }
    let report = MoveGraph::build(&region, boundary.as_ref(), a.q, kind, a.cap)?.report();
    let connected = report.connected;
    let csv = format!(
        "kind,states,components,largest_component,diameter_bound,connected\n{},{},{},{},{},{}\n",
        report.move_kind,
        report.state_count,
        report.component_count,
        report.largest_component,
        report.diameter_bound,
        report.connected
    );
    let result = serde_json::to_value(&report)?;
    let verdict = if connected { "connected" } else { "disconnected" };
    Ok(Outcome::new("mixing moves", params(a), verdict, !connected, result).with_csv(csv))
}

fn count_csv_row(r: &CountReport) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        r.cells,
        r.q,
        r.boundary,
        serde_json::to_value(r.method).expect("methods serialize").as_str().unwrap_or(""),
        r.count,
        r.log_count_per_site.map_or(String::new(), |x| x.to_string())
    )
}

fn census_count(a: &CensusCount) -> Result<Outcome> {
    let region = BoxRegion::cube(a.n, a.d)?;
    let boundary = a.boundary.as_deref().map(load_coloring).transpose()?;
    if let Some(b) = &boundary {
        check_dim(b, a.d, "the boundary")?;
    }
    let method = match a.method {
        MethodArg::Auto => CountMethod::Auto,
        MethodArg::Transfer => CountMethod::Transfer,
        MethodArg::Dfs => CountMethod::Dfs,
    };
    let report = count_exact(&region, a.q, boundary.as_ref(), method)?;
    let csv = format!(
        "cells,q,boundary,method,count,log_count_per_site\n{}",
        count_csv_row(&report)
    );
    let result = serde_json::to_value(&report)?;
    Ok(Outcome::new("census count", params(a), "ok", false, result).with_csv(csv))
}

fn census_entropy(a: &CensusEntropy) -> Result<Outcome> {
    if a.n_max < 1 {
        return Err(Error::Domain("n-max must be at least 1".into()));
    }
    let ns: Vec<i64> = (1..=a.n_max).collect();
    let series = if a.frozen {
        let rule = frozen_rule(a.d, a.q)?;
        entropy_series(a.d, a.q, &ns, Some(&rule))?
    } else {
        entropy_series::<LinearColoringRule>(a.d, a.q, &ns, None)?
    };
    let mut csv = String::from("n,count,log_count_per_site\n");
    for p in &series {
        csv.push_str(&format!(
            "{},{},{}\n",
            p.n,
            p.count,
            p.log_count_per_site.map_or(String::new(), |x| x.to_string())
        ));
    }
    let result = json!({
        "d": a.d,
        "q": a.q,
        "boundary": if a.frozen { "frozen" } else { "free" },
        "series": series,
    });
    Ok(Outcome::new("census entropy", params(a), "ok", false, result).with_csv(csv))
}

fn census_sample(a: &CensusSample) -> Result<Outcome> {
    let region = BoxRegion::cube(a.n, a.d)?;
    let boundary = a.boundary.as_deref().map(load_coloring).transpose()?;
    if let Some(b) = &boundary {
        check_dim(b, a.d, "the boundary")?;
    }
    let cfg = SamplerConfig {
        region,
        q: a.q,
        boundary,
        steps: a.steps,
        seed: a.seed,
    };
    let c = glauber_sample(&cfg)?;
    let cells: Vec<String> = c.colors().iter().map(u32::to_string).collect();
    let csv = format!("{}\n", cells.join(","));
    let result = json!({
        "sampler": "heat_bath_systematic_scan",
        "rng": "chacha8",
        "coloring": proper_doc(&c),
    });
    Ok(Outcome::new("census sample", params(a), "ok", false, result)
        .with_csv(csv)
        .with_picture(c.to_partial()))
}

#[derive(serde::Deserialize)]
struct RunConfig {
    runs: Vec<RunEntry>,
}

#[derive(serde::Deserialize)]
struct RunEntry {
    /// Arguments after the program name, e.g. `["census", "count", "--n", "3", ...]`.
    args: Vec<String>,
}

/// Each run is parsed as a full command line; runs with their own `--out`
/// also write there. The batch exits with the largest run exit code.
fn run_batch(a: &RunArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&a.config)?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", a.config.display())))?;
    let mut runs = Vec::new();
    let mut worst = 0u8;
    for entry in &config.runs {
        let argv = std::iter::once("zdcolor".to_string()).chain(entry.args.iter().cloned());
        let sub = Cli::try_parse_from(argv).map_err(|e| Error::Format(e.to_string()))?;
        if matches!(sub.command, Command::Run(_)) {
            return Err(Error::Domain("run configs cannot nest".into()));
        }
        let (code, value) = match dispatch(&sub) {
            Ok(o) => {
                if sub.out.is_some() {
                    emit(&sub, &o)?;
                }
                (o.code, envelope(&sub, &o))
            }
            Err(e) => (2, json!({ "error": e.to_string() })),
        };
        worst = worst.max(code);
        runs.push(json!({ "args": entry.args, "exit_code": code, "output": value }));
    }
    let verdict = match worst {
        0 => "ok",
        1 => "negative",
        _ => "error",
    };
    let result = json!({ "runs": runs, "exit_code": worst });
    let mut o = Outcome::new("run", params(a), verdict, worst >= 1, result);
    o.code = worst;
    Ok(o)
}
