//! Output artifacts. Every file carries the resolved configuration and the
//! tool version: JSON reports inline, SVGs in `<metadata>`, CSVs in a
//! `.meta.json` sidecar.

pub mod svg;

use serde::Serialize;
use serde_json::{json, Value};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

pub use svg::{Heatmap, LinePlot, Marker, PlotSpec, Series};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What produced an artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            tool: "eos-tomo",
            version: TOOL_VERSION,
            command: command.to_owned(),
            config,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("provenance serializes")
    }
}

/// Writes artifacts into one directory.
#[derive(Debug, Clone)]
pub struct ArtifactWriter {
    root: PathBuf,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>, provenance: Provenance) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            provenance,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Paths written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.root.join(name);
        let file = File::create(&path)?;
        self.written.push(path);
        Ok(BufWriter::new(file))
    }

    /// RFC-4180 table plus its provenance sidecar.
    pub fn csv<S: AsRef<str>>(
        &mut self,
        name: &str,
        header: &[S],
        rows: &[Vec<f64>],
    ) -> Result<()> {
        let mut out = csv::Writer::from_writer(self.create(name)?);
        out.write_record(header.iter().map(|h| h.as_ref()))?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            out.write_record(row.iter().map(|v| format_number(*v)))?;
        }
        out.flush()?;
        self.sidecar(name)
    }

    /// Serializable records as CSV, header from the field names.
    pub fn csv_records<T: Serialize>(&mut self, name: &str, records: &[T]) -> Result<()> {
        let mut out = csv::Writer::from_writer(self.create(name)?);
        for r in records {
            out.serialize(r)?;
        }
        out.flush()?;
        self.sidecar(name)
    }

    /// Writes through a closure (for formats owned by other modules), then the sidecar.
    pub fn raw<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>, &Value) -> Result<()>,
    {
        let provenance = self.provenance.to_value();
        let mut out = self.create(name)?;
        fill(&mut out, &provenance)?;
        out.flush()?;
        self.sidecar(name)
    }

    fn sidecar(&mut self, name: &str) -> Result<()> {
        let meta = json!({ "artifact": name, "provenance": self.provenance });
        self.write_json_value(&format!("{name}.meta.json"), &meta)
    }

    /// `{"provenance": …, "report": …}` with stable key order.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let value = json!({ "provenance": self.provenance, "report": report });
        self.write_json_value(name, &value)
    }

    fn write_json_value(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut out = self.create(name)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn svg(&mut self, name: &str, plot: &PlotSpec) -> Result<()> {
        let text = plot.render(&self.provenance.to_value());
        let mut out = self.create(name)?;
        out.write_all(text.as_bytes())?;
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-tripping decimal; non-finite values become empty fields.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        String::new()
    }
}
