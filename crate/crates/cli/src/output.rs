//! Per-run directories, CSV files and gnuplot scripts.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::record::RunRecord;

/// A run directory and the files written into it so far.
#[derive(Debug)]
pub struct RunDir {
    path: PathBuf,
    files: Vec<String>,
}

impl RunDir {
    /// Opens `path`, creating it if needed.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        fs::create_dir_all(&path)?;
        Ok(Self { path, files: Vec::new() })
    }

    /// A fresh directory `root/name`, or `root/name-2`, `-3`, ... when an
    /// earlier run already left a record there. Records are never overwritten.
    pub fn allocate(root: &Path, name: &str) -> Result<Self> {
        fs::create_dir_all(root)?;
        let mut k = 1;
        loop {
            let candidate = if k == 1 { root.join(name) } else { root.join(format!("{name}-{k}")) };
            if !candidate.join("record.json").exists() && !candidate.join("sweep.csv").exists() {
                return Self::open(candidate);
            }
            k += 1;
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn sub(&self, name: &str) -> Result<Self> {
        Self::open(self.path.join(name))
    }

    fn register(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    /// Writes a CSV with the given header; every row must match its width.
    pub fn write_csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_path(self.path.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.register(name);
        Ok(())
    }

    /// CSV of plain numbers.
    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        self.write_csv(name, header, rows.iter().map(|r| r.iter().map(|v| num(*v)).collect::<Vec<_>>()))
    }

    pub fn write_json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        fs::write(self.path.join(name), text + "\n")?;
        self.register(name);
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        fs::write(self.path.join(name), text)?;
        self.register(name);
        Ok(())
    }
}

/// Shortest round-trip decimal form, so equal numbers give equal bytes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Appends one line per record to `root/records.jsonl`.
pub fn append_index(root: &Path, dir: &Path, record: &RunRecord) -> Result<()> {
    fs::create_dir_all(root)?;
    let mut f = OpenOptions::new().create(true).append(true).open(root.join("records.jsonl"))?;
    let line = serde_json::json!({
        "dir": dir.display().to_string(),
        "experiment": record.experiment,
        "config_hash": record.config_hash,
        "pass": record.pass,
    });
    writeln!(f, "{line}")?;
    Ok(())
}

/// One gnuplot panel: `file` columns `x:y` for each `y`.
pub struct Panel<'a> {
    pub file: &'a str,
    pub x: usize,
    pub ys: &'a [usize],
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub logy: bool,
}

/// A gnuplot script producing `plot.png` from the run's CSVs.
pub fn gnuplot(title: &str, panels: &[Panel<'_>]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    s.push_str("set terminal pngcairo size 900,");
    s.push_str(&(420 * panels.len().max(1)).to_string());
    s.push_str("\nset output 'plot.png'\n");
    if panels.len() > 1 {
        s.push_str(&format!("set multiplot layout {},1 title '{}'\n", panels.len(), title));
    } else {
        s.push_str(&format!("set title '{title}'\n"));
    }
    for p in panels {
        s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", p.xlabel, p.ylabel));
        s.push_str(if p.logy { "set logscale y\n" } else { "unset logscale y\n" });
        let series: Vec<String> = p
            .ys
            .iter()
            .map(|y| format!("'{}' using {}:{} with linespoints", p.file, p.x, y))
            .collect();
        s.push_str(&format!("plot {}\n", series.join(", ")));
    }
    if panels.len() > 1 {
        s.push_str("unset multiplot\n");
    }
    s
}
