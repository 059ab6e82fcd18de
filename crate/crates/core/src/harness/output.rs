//! CSV and manifest output.
//!
//! `<name>.csv` has header `n,<alg>_mse,<alg>_cumloss,...` in the configured
//! algorithm order and one row per step. Values use 17 significant digits
//! (`{:.16e}`). A trace cut short by divergence leaves its cells empty.
//!
//! `<name>.manifest.toml` is the fully resolved config; feeding it back as a
//! config reproduces the run. `<name>.regret.csv` (`n,<alg>_regret,...`) is
//! written only when regret was computed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::run::{ExperimentOutcome, MetricTrace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedFiles {
    pub metrics: PathBuf,
    pub manifest: PathBuf,
    pub regret: Option<PathBuf>,
}

pub fn metrics_header(traces: &[MetricTrace]) -> String {
    let mut h = String::from("n");
    for t in traces {
        h.push_str(&format!(",{0}_mse,{0}_cumloss", t.algorithm));
    }
    h
}

fn cell(values: &[f64], i: usize) -> String {
    values.get(i).map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(traces: &[MetricTrace], out: &mut W) -> io::Result<()> {
    writeln!(out, "{}", metrics_header(traces))?;
    let rows = traces.iter().map(|t| t.mse.len()).max().unwrap_or(0);
    for i in 0..rows {
        write!(out, "{}", i + 1)?;
        for t in traces {
            write!(out, ",{},{}", cell(&t.mse, i), cell(&t.cumulative_loss, i))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_regret_csv<W: Write>(traces: &[MetricTrace], out: &mut W) -> io::Result<()> {
    let curves: Vec<_> = traces
        .iter()
        .filter_map(|t| t.regret.as_ref().map(|r| (t.algorithm, &r.regret)))
        .collect();
    write!(out, "n")?;
    for (alg, _) in &curves {
        write!(out, ",{alg}_regret")?;
    }
    writeln!(out)?;
    let rows = curves.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    for i in 0..rows {
        write!(out, "{}", i + 1)?;
        for (_, r) in &curves {
            write!(out, ",{}", cell(r, i))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn manifest_text(outcome: &ExperimentOutcome) -> String {
    let mut text = format!(
        "# run manifest written by dklms {}\n# re-run with: dklms run --config <this file>\n",
        env!("CARGO_PKG_VERSION")
    );
    text.push_str(&outcome.config.to_toml_string());
    text
}

fn write_file(path: &Path, write: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    let context = || format!("writing {}", path.display());
    let file = fs::File::create(path).map_err(|e| Error::io(context(), e))?;
    let mut buf = io::BufWriter::new(file);
    write(&mut buf).and_then(|_| buf.flush()).map_err(|e| Error::io(context(), e))
}

/// Writes the metrics CSV, the manifest and, if present, the regret CSV into `dir`.
pub fn emit_results(outcome: &ExperimentOutcome, dir: &Path) -> Result<EmittedFiles> {
    if outcome.traces.is_empty() {
        return Err(Error::InvalidArgument("no traces to write".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let name = &outcome.config.name;
    let metrics = dir.join(format!("{name}.csv"));
    write_file(&metrics, |w| write_metrics_csv(&outcome.traces, w))?;
    let manifest = dir.join(format!("{name}.manifest.toml"));
    let text = manifest_text(outcome);
    write_file(&manifest, |w| w.write_all(text.as_bytes()))?;
    let regret = if outcome.traces.iter().any(|t| t.regret.is_some()) {
        let path = dir.join(format!("{name}.regret.csv"));
        write_file(&path, |w| write_regret_csv(&outcome.traces, w))?;
        Some(path)
    } else {
        None
    };
    Ok(EmittedFiles {
        metrics,
        manifest,
        regret,
    })
}
