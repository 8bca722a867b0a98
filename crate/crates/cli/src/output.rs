use std::fs;
use std::io::Write;

use lattice_coloring::lattice::{render_ascii, render_pgm};
use lattice_coloring::{Error, PartialColoring, Result};
use serde_json::{json, Value};

use crate::{Cli, Format};

/// The result of one command before rendering.
#[derive(Debug)]
pub struct Outcome {
    pub command: String,
    pub params: Value,
    /// Short machine-readable verdict, e.g. `"ok"`, `"unsat"`, `"frozen"`.
    pub verdict: &'static str,
    /// Process exit code: 1 for a negative verdict, otherwise 0.
    pub code: u8,
    pub result: Value,
    pub csv: Option<String>,
    pub picture: Option<PartialColoring>,
}

impl Outcome {
    pub fn new(command: &str, params: Value, verdict: &'static str, negative: bool, result: Value) -> Self {
        Outcome {
            command: command.to_string(),
            params,
            verdict,
            code: u8::from(negative),
            result,
            csv: None,
            picture: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_picture(mut self, picture: PartialColoring) -> Self {
        self.picture = Some(picture);
        self
    }
}

pub fn envelope(cli: &Cli, o: &Outcome) -> Value {
    json!({
        "manifest": {
            "tool": "zdcolor",
            "version": env!("CARGO_PKG_VERSION"),
            "command": o.command,
            "params": o.params,
            "format": cli.format,
            "threads": cli.threads,
        },
        "verdict": o.verdict,
        "result": o.result,
    })
}

pub fn render(cli: &Cli, o: &Outcome) -> Result<String> {
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope(cli, o))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => o
            .csv
            .clone()
            .ok_or_else(|| Error::Domain(format!("`{}` has no CSV output", o.command))),
        Format::Ascii => match &o.picture {
            Some(p) => render_ascii(p),
            None => Err(Error::Domain(format!("`{}` has no picture to render", o.command))),
        },
        Format::Pgm => match &o.picture {
            Some(p) => render_pgm(p),
            None => Err(Error::Domain(format!("`{}` has no picture to render", o.command))),
        },
    }
}

pub fn emit(cli: &Cli, o: &Outcome) -> Result<()> {
    let text = render(cli, o)?;
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
