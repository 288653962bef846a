//! Output files of a run.
//!
//! * `series.csv`: one [`DiagnosticsRow`] per sample, header
//!   `t,mass,energy,area,min_H,max_H,min_c,diss_lhs,diss_rhs,events`.
//! * `snapshots/NNNN.csv`: the mesh at every sample, columns
//!   `index,x,y,c,H,V` for curves and `index,x,w,c,H,V` for surfaces of
//!   revolution (`w` the distance to the axis).
//! * `events.json`: `[{type, t_event, payload}]`.
//! * `summary.json`: `{invariants: [{name, passed, worst}], final_state: {...}}`.
//!
//! Numbers in CSV files carry 17 significant digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use smcf_core::diagnostics::{self, DiagnosticsRow};
use smcf_core::{FlowError, FlowState, Geometry, Observer};

fn sink_err(e: std::io::Error) -> FlowError {
    FlowError::Sink(e.to_string())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Streams rows and snapshots to disk while a run is in progress.
pub struct FileSink<'h> {
    series: BufWriter<File>,
    snapshots: PathBuf,
    hook: Option<&'h mut dyn FnMut(&mut FlowState)>,
}

impl<'h> FileSink<'h> {
    pub fn create(dir: &Path, hook: Option<&'h mut dyn FnMut(&mut FlowState)>) -> Result<Self> {
        let snapshots = dir.join("snapshots");
        fs::create_dir_all(&snapshots).with_context(|| format!("cannot create {}", snapshots.display()))?;
        let path = dir.join("series.csv");
        let mut series = BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?);
        writeln!(series, "{}", DiagnosticsRow::CSV_HEADER)?;
        Ok(Self { series, snapshots, hook })
    }

    pub fn finish(mut self) -> Result<()> {
        self.series.flush()?;
        Ok(())
    }
}

impl Observer for FileSink<'_> {
    fn row(&mut self, row: &DiagnosticsRow) -> Result<(), FlowError> {
        writeln!(self.series, "{}", row.to_csv()).map_err(sink_err)
    }

    fn snapshot(&mut self, index: usize, state: &FlowState) -> Result<(), FlowError> {
        let path = self.snapshots.join(format!("{index:04}.csv"));
        let mut out = BufWriter::new(File::create(path).map_err(sink_err)?);
        write_snapshot(&mut out, state)?;
        out.flush().map_err(sink_err)
    }

    fn after_step(&mut self, state: &mut FlowState) {
        if let Some(h) = self.hook.as_mut() {
            h(state);
        }
    }
}

pub fn write_snapshot<W: Write>(out: &mut W, state: &FlowState) -> Result<(), FlowError> {
    let fields = state.geometry.fields()?;
    let v = diagnostics::normal_velocity(state)?;
    let (nodes, header) = match &state.geometry {
        Geometry::Curve(m) => (&m.nodes, "index,x,y,c,H,V"),
        Geometry::Revolution(g) => (&g.nodes, "index,x,w,c,H,V"),
    };
    writeln!(out, "{header}").map_err(sink_err)?;
    for (i, p) in nodes.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{},{}",
            num(p[0]),
            num(p[1]),
            num(state.geometry.concentration()[i]),
            num(fields.mean_curvature[i]),
            num(v[i])
        )
        .map_err(sink_err)?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
