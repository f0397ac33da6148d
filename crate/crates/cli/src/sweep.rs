//! Parameter sweeps: one run per axis value, fanned out over a worker pool.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::experiments::run;
use crate::output::{append_index, num, RunDir};
use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Flux,
    /// Hardy radius for `hardy`, field radius otherwise.
    Radius,
    /// The main resolution knob of the experiment.
    Grid,
    Ds,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Flux => "flux",
            Self::Radius => "R",
            Self::Grid => "grid",
            Self::Ds => "ds",
        }
    }

    /// `cfg` with this axis set to `value`.
    pub fn apply(self, cfg: &ExperimentConfig, experiment: Experiment, value: f64) -> Result<ExperimentConfig> {
        let mut c = cfg.clone();
        match self {
            Self::Flux => c.flux = value,
            Self::Radius if experiment == Experiment::Hardy => c.hardy_radius = Some(value),
            Self::Radius => c.radius = value,
            Self::Grid => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(CliError::invalid("grid", format!("grid sizes are positive integers, got {value}")));
                }
                let n = value as usize;
                match experiment {
                    Experiment::GaugeCheck => c.gauge_nodes = n,
                    Experiment::NuProfile => c.n_theta = n,
                    Experiment::Hardy => c.hardy_radial = n,
                    _ => c.nodes = n,
                }
            }
            Self::Ds => c.ds = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flux" => Ok(Self::Flux),
            "R" | "radius" => Ok(Self::Radius),
            "grid" => Ok(Self::Grid),
            "ds" => Ok(Self::Ds),
            other => Err(CliError::SweepAxis(other.to_string())),
        }
    }
}

/// `key=v1,v2,...`; an empty value list is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (key, vals) = s
            .split_once('=')
            .ok_or_else(|| CliError::invalid("sweep", format!("expected `key=v1,v2,...`, got `{s}`")))?;
        let axis: Axis = key.trim().parse()?;
        let values = vals
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse::<f64>().map_err(|_| CliError::invalid("sweep", format!("`{v}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axis, values })
    }
}

/// Outcome of one sweep point; failures are kept, not propagated.
#[derive(Debug)]
pub struct SweepEntry {
    pub value: f64,
    pub dir: PathBuf,
    pub result: std::result::Result<RunRecord, String>,
}

/// Runs `experiment` once per value in parallel and writes `sweep.csv` into a
/// fresh directory under `out`. Returns the entries in input order.
pub fn sweep(cfg: &ExperimentConfig, experiment: Experiment, spec: &SweepSpec, out: &std::path::Path) -> Result<Vec<SweepEntry>> {
    if spec.values.is_empty() {
        return Ok(Vec::new());
    }
    let mut root = RunDir::allocate(out, &format!("{experiment}-sweep-{}", spec.axis))?;
    // directories are created up front so that workers never race on names
    let dirs = spec
        .values
        .iter()
        .map(|v| root.sub(&format!("{}={}", spec.axis, num(*v))))
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<SweepEntry> = spec
        .values
        .par_iter()
        .zip(dirs.into_par_iter())
        .map(|(&value, mut dir)| {
            let result = spec
                .axis
                .apply(cfg, experiment, value)
                .and_then(|c| run(&c, experiment, &mut dir))
                .map_err(|e| e.to_string());
            SweepEntry {
                value,
                dir: dir.path().to_path_buf(),
                result,
            }
        })
        .collect();

    let mut rows = Vec::new();
    for e in &entries {
        let v = num(e.value);
        match &e.result {
            Ok(rec) => {
                append_index(out, &e.dir, rec)?;
                for c in &rec.checks {
                    rows.push(vec![
                        v.clone(),
                        "ok".into(),
                        c.name.clone(),
                        num(c.measured),
                        num(c.theory),
                        num(c.tolerance),
                        c.pass.to_string(),
                        String::new(),
                    ]);
                }
            }
            Err(msg) => rows.push(vec![
                v.clone(),
                "error".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "false".into(),
                msg.clone(),
            ]),
        }
    }
    let header = [spec.axis.name(), "status", "check", "measured", "theory", "tolerance", "pass", "error"];
    root.write_csv("sweep.csv", &header, rows)?;
    Ok(entries)
}
