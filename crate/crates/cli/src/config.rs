//! TOML experiment configuration with strict key checking.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use magheat_core::field_forms::{make_field, FieldPreset, FieldSpec, MagneticField};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GaugeCheck,
    NuProfile,
    Spectrum,
    LambdaCurve,
    ResolventCheck,
    Evolve,
    Hardy,
    FullReport,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Self::GaugeCheck,
        Self::NuProfile,
        Self::Spectrum,
        Self::LambdaCurve,
        Self::ResolventCheck,
        Self::Evolve,
        Self::Hardy,
        Self::FullReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GaugeCheck => "gauge-check",
            Self::NuProfile => "nu-profile",
            Self::Spectrum => "spectrum",
            Self::LambdaCurve => "lambda-curve",
            Self::ResolventCheck => "resolvent-check",
            Self::Evolve => "evolve",
            Self::Hardy => "hardy",
            Self::FullReport => "full-report",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::invalid("experiment", format!("unknown experiment `{s}`")))
    }
}

/// `lo:hi:n`, `n` equispaced values including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Span {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64)
            .collect()
    }
}

impl FromStr for Span {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::invalid("span", format!("expected `lo:hi:n`, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Self { lo, hi, n })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

/// `a:b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub a: f64,
    pub b: f64,
}

impl FromStr for Window {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::invalid("fit_window", format!("expected `a:b`, got `{s}`"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(a < b) {
            return Err(bad());
        }
        Ok(Self { a, b })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.a, self.b)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Span);
string_serde!(Window);

/// Everything a run needs. Every key is optional in the file; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub seed: u64,
    pub out: Option<PathBuf>,

    // field
    pub dimension: usize,
    pub preset: String,
    pub flux: f64,
    pub radius: f64,
    pub amplitude: f64,
    pub centers: Option<Vec<[f64; 3]>>,

    // gauge-check
    pub gauge_nodes: usize,
    pub gauge_points: usize,

    // nu-profile
    pub radii: Option<Span>,
    pub n_theta: usize,
    pub sphere_grid: [usize; 2],

    // radial spectra
    pub nodes: usize,
    pub modes: Option<i64>,
    pub spectrum_count: usize,
    pub spectrum_nu: Option<Vec<f64>>,
    pub s: Option<Span>,
    pub resolvent_s: Vec<f64>,

    // evolve
    pub datum: String,
    pub s_max: f64,
    pub ds: f64,
    pub fit_window: Option<Window>,
    pub record_every: f64,

    // hardy
    pub weight: String,
    pub hardy_radius: Option<f64>,
    pub hardy_radii: Option<Vec<f64>>,
    pub r_out: Option<f64>,
    pub hardy_radial: usize,
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            out: None,
            dimension: 2,
            preset: "radial-bump".into(),
            flux: 0.5,
            radius: 1.0,
            amplitude: 1.0,
            centers: None,
            gauge_nodes: 64,
            gauge_points: 10_000,
            radii: None,
            n_theta: 512,
            sphere_grid: [24, 48],
            nodes: 4000,
            modes: None,
            spectrum_count: 6,
            spectrum_nu: None,
            s: None,
            resolvent_s: vec![4.0, 8.0, 12.0, 16.0],
            datum: "gaussian".into(),
            s_max: 16.0,
            ds: 1e-3,
            fit_window: None,
            record_every: 0.05,
            weight: "none".into(),
            hardy_radius: None,
            hardy_radii: None,
            r_out: None,
            hardy_radial: 64,
            trials: 1000,
        }
    }
}

fn check(ok: bool, key: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(key, reason.to_string()))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Admissible ranges for every numeric key.
    pub fn validate(&self) -> Result<()> {
        check(matches!(self.dimension, 2 | 3), "dimension", "must be 2 or 3")?;
        let preset: FieldPreset = self
            .preset
            .parse()
            .map_err(|_| CliError::invalid("preset", format!("unknown preset `{}` (zero, radial-bump, two-bump, exact-3d)", self.preset)))?;
        match (preset, self.dimension) {
            (FieldPreset::RadialBump | FieldPreset::TwoBump, 3) => {
                return Err(CliError::invalid("preset", format!("`{}` needs dimension = 2", self.preset)))
            }
            (FieldPreset::Exact3d, 2) => return Err(CliError::invalid("preset", "`exact-3d` needs dimension = 3".into())),
            _ => {}
        }
        check(self.flux.is_finite(), "flux", "must be finite")?;
        check(self.radius > 0.0 && self.radius.is_finite(), "radius", "must be positive")?;
        check(self.amplitude.is_finite(), "amplitude", "must be finite")?;
        if let Some(c) = &self.centers {
            check(!c.is_empty() && c.iter().flatten().all(|v| v.is_finite()), "centers", "need at least one finite center")?;
        }
        check((8..=4096).contains(&self.gauge_nodes), "gauge_nodes", "must lie in [8, 4096]")?;
        check(self.gauge_points >= 1, "gauge_points", "must be at least 1")?;
        if let Some(r) = &self.radii {
            check(r.lo > 0.0, "radii", "radii must be positive")?;
        }
        check(self.n_theta >= 8, "n_theta", "must be at least 8")?;
        check(self.sphere_grid[0] >= 4 && self.sphere_grid[1] >= 8, "sphere_grid", "need at least [4, 8]")?;
        check((16..=200_000).contains(&self.nodes), "nodes", "must lie in [16, 200000]")?;
        if let Some(m) = self.modes {
            check(m >= 1, "modes", "must be at least 1")?;
        }
        check(self.spectrum_count >= 1, "spectrum_count", "must be at least 1")?;
        if let Some(nu) = &self.spectrum_nu {
            check(!nu.is_empty() && nu.iter().all(|v| *v >= 0.0), "spectrum_nu", "need nonnegative values")?;
        }
        if let Some(s) = &self.s {
            check(s.lo >= 0.0, "s", "times must be nonnegative")?;
        }
        check(
            !self.resolvent_s.is_empty() && self.resolvent_s.iter().all(|v| *v >= 0.0),
            "resolvent_s",
            "need nonnegative times",
        )?;
        check(matches!(self.datum.as_str(), "gaussian" | "eigenmode"), "datum", "must be `gaussian` or `eigenmode`")?;
        check(self.s_max >= 8.0 && self.s_max.is_finite(), "s_max", "must be at least 8")?;
        check(self.ds > 0.0 && self.ds <= 0.1, "ds", "must lie in (0, 0.1]")?;
        if let Some(w) = self.fit_window {
            check(w.a >= 0.5 * self.s_max && w.b <= self.s_max, "fit_window", "must lie in [s_max/2, s_max]")?;
        }
        check(self.record_every > 0.0, "record_every", "must be positive")?;
        check(matches!(self.weight.as_str(), "none" | "log" | "lw"), "weight", "must be none, log or lw")?;
        if let Some(r) = self.hardy_radius {
            check(r > 0.0, "hardy_radius", "must be positive")?;
        }
        if let Some(r) = &self.hardy_radii {
            check(r.iter().all(|v| *v > 0.0), "hardy_radii", "must be positive")?;
        }
        if let Some(r) = self.r_out {
            check(r > 0.0, "r_out", "must be positive")?;
        }
        check(self.hardy_radial >= 8, "hardy_radial", "must be at least 8")?;
        check(self.trials >= 1, "trials", "must be at least 1")?;
        Ok(())
    }

    pub fn field_spec(&self) -> Result<FieldSpec<f64>> {
        let preset: FieldPreset = self.preset.parse().map_err(|_| CliError::invalid("preset", self.preset.clone()))?;
        let mut spec = match preset {
            FieldPreset::Zero => FieldSpec::zero(),
            FieldPreset::RadialBump => FieldSpec::radial_bump(self.flux, self.radius),
            FieldPreset::TwoBump => FieldSpec::two_bump(self.flux, self.radius),
            FieldPreset::Exact3d => FieldSpec::exact_3d(self.amplitude, self.radius),
        };
        if preset != FieldPreset::Exact3d {
            spec.amplitude = self.amplitude;
        }
        if let Some(c) = &self.centers {
            spec.centers = c.clone();
        }
        Ok(spec)
    }

    pub fn field(&self) -> Result<MagneticField<f64>> {
        Ok(make_field(self.dimension, &self.field_spec()?)?)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
