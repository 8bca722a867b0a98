//! `zdcolor`: construct, check, extend, count and sample proper colorings of
//! boxes in `Z^d`.
//!
//! Exit codes: 0 on success, 1 when the answer is a negative verdict
//! (UNSAT, infeasible, not frozen, not connected, ...), 2 on usage or domain
//! errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "zdcolor", version, about = "Proper q-colorings of Z^d windows")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "ZDCOLOR_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Ascii,
    Pgm,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frozen colorings.
    #[command(subcommand)]
    Frozen(FrozenCmd),
    /// List coloring of boxes.
    #[command(subcommand)]
    Listcolor(ListcolorCmd),
    /// Extending boundary colorings.
    #[command(subcommand)]
    Fill(FillCmd),
    /// Mixing properties and move graphs.
    #[command(subcommand)]
    Mixing(MixingCmd),
    /// Exact counts, entropy series and sampling.
    #[command(subcommand)]
    Census(CensusCmd),
    /// Run a batch of commands from a JSON config file.
    Run(RunArgs),
}

#[derive(Subcommand, Debug)]
pub enum FrozenCmd {
    /// Print a frozen rule and its evaluation on [n]^d.
    Gen(FrozenGen),
    /// Decide whether a coloring is frozen on a set of cells.
    Check(FrozenCheck),
    /// Test the edge-count obstruction to frozenness on a set of cells.
    Obstruct(FrozenObstruct),
}

#[derive(Args, Debug, Serialize)]
pub struct FrozenGen {
    #[arg(long)]
    pub d: usize,
    /// Number of colors; defaults to d+1 (2d+1 with --single-site).
    #[arg(long)]
    pub q: Option<u32>,
    /// Use the single-site frozen rule with 2d+1 colors.
    #[arg(long)]
    pub single_site: bool,
    /// Side of the evaluation window [n]^d.
    #[arg(long, default_value_t = 8)]
    pub n: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct FrozenCheck {
    /// Coloring file (JSON coloring document).
    #[arg(long)]
    pub coloring: PathBuf,
    /// Cells of F, e.g. "2,2;2,3".
    #[arg(long = "F", visible_alias = "cells")]
    pub cells: String,
    #[arg(long)]
    pub q: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct FrozenObstruct {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "F", visible_alias = "cells")]
    pub cells: String,
    #[arg(long)]
    pub q: u32,
}

#[derive(Subcommand, Debug)]
pub enum ListcolorCmd {
    /// List-color [n]^d from given or random lists.
    Solve(ListSolve),
    /// Orient [n]^d with out-degrees below the list bound.
    Orient(ListOrient),
    /// Search for unsatisfiable 2-list assignments on a small box.
    WitnessCube(ListWitness),
}

#[derive(Args, Debug, Serialize)]
pub struct ListSolve {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: usize,
    /// Lists file: JSON object mapping "i1,i2,..." to a color array.
    #[arg(long, conflicts_with = "random")]
    pub lists: Option<PathBuf>,
    /// Draw random lists of the bound's sizes with this seed.
    #[arg(long)]
    pub random: Option<u64>,
    /// Palette for random lists; defaults to d+4.
    #[arg(long)]
    pub palette: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct ListOrient {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: usize,
    /// Use this list size everywhere instead of the box bound.
    #[arg(long)]
    pub uniform: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct ListWitness {
    #[arg(long, default_value_t = 2)]
    pub n: i64,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Colors available to the 2-lists.
    #[arg(long, default_value_t = 4)]
    pub universe: u32,
}

#[derive(Subcommand, Debug)]
pub enum FillCmd {
    /// Extend a boundary coloring of ∂[n]^d into [n]^d.
    Box(FillBox),
    /// A boundary coloring of ∂[n]^d that does not extend (3 <= q <= d+1).
    Witness(FillWitness),
    /// Extend u to the window B_W through the tiles (2n+1)k + B_n.
    Fep(FillFep),
}

#[derive(Args, Debug, Serialize)]
pub struct FillBox {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    /// Boundary file: a coloring document, or the output of `fill witness`.
    #[arg(long)]
    pub boundary: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct FillWitness {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct FillFep {
    #[arg(long)]
    pub u: PathBuf,
    #[arg(long)]
    pub ubar: PathBuf,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub q: u32,
    /// Radius W of the window B_W.
    #[arg(long)]
    pub window: i64,
}

#[derive(Subcommand, Debug)]
pub enum MixingCmd {
    /// Check that the tube configuration forces the axis.
    Tssm(MixingTssm),
    /// Frozen boundary with a unique filling.
    Si(MixingSi),
    /// Connectivity of a move graph on [N]^d.
    Moves(MixingMoves),
}

#[derive(Args, Debug, Serialize)]
pub struct MixingTssm {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub radius: i64,
    /// Build the tube for any q >= 4, outside d+2 <= q <= 2d.
    #[arg(long)]
    pub unchecked: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct MixingSi {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: i64,
}

#[derive(Args, Debug, Serialize)]
pub struct MixingMoves {
    /// Side of the box [N]^d.
    #[arg(long = "box")]
    pub side: i64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    /// pivot, npivot:N or kempe.
    #[arg(long)]
    pub kind: String,
    /// Fixed colors outside the box (coloring document).
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long, default_value_t = lattice_coloring::mixing::DEFAULT_STATE_CAP)]
    pub cap: u64,
}

#[derive(Subcommand, Debug)]
pub enum CensusCmd {
    /// Exact number of proper colorings of [n]^d.
    Count(CensusCount),
    /// ln(count)/n^d for n = 1..=n_max.
    Entropy(CensusEntropy),
    /// Heat-bath Glauber sample.
    Sample(CensusSample),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Auto,
    Transfer,
    Dfs,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusCount {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    /// Fixed colors (coloring document); cells outside [n]^d constrain, inside pin.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusEntropy {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n_max: i64,
    /// Count colorings that agree with the frozen rule on ∂[n]^d.
    #[arg(long)]
    pub frozen: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusSample {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub q: u32,
    /// Full sweeps.
    #[arg(long)]
    pub steps: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub boundary: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RunArgs {
    /// JSON file `{"runs": [{"args": [...], "out": "..."}, ...]}`.
    #[arg(long)]
    pub config: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(execute(&cli))
}

/// Run a parsed command, write its output and return the exit code.
fn execute(cli: &Cli) -> u8 {
    match commands::dispatch(cli).and_then(|o| output::emit(cli, &o).map(|()| o)) {
        Ok(Outcome { code, .. }) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
