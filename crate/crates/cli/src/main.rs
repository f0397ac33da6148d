use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;

use magheat_cli::config::{Span, Window};
use magheat_cli::{run_in, sweep, thread_cap, Experiment, ExperimentConfig, SweepSpec};

/// Numerical experiments on the large-time decay of magnetic heat flows.
#[derive(Debug, Parser)]
#[command(name = "magheat", version)]
struct Args {
    /// gauge-check, nu-profile, spectrum, lambda-curve, resolvent-check, evolve, hardy or full-report.
    experiment: Option<String>,

    /// TOML configuration; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; each run gets its own directory below it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key=v1,v2,...` with key one of flux, R, grid, ds.
    #[arg(long)]
    sweep: Option<String>,

    #[arg(long)]
    gauge_check: bool,
    #[arg(long)]
    nu_profile: bool,
    #[arg(long)]
    spectrum: bool,
    #[arg(long)]
    lambda_curve: bool,
    #[arg(long)]
    resolvent_check: bool,
    #[arg(long)]
    evolve: bool,
    #[arg(long)]
    hardy: bool,
    #[arg(long)]
    full_report: bool,

    /// Radii `lo:hi:n` for nu-profile.
    #[arg(long)]
    radii: Option<Span>,
    /// Times `lo:hi:n` for lambda-curve.
    #[arg(long)]
    s: Option<Span>,
    #[arg(long)]
    flux: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    ds: Option<f64>,
    /// Fit window `a:b` in s.
    #[arg(long)]
    fit_window: Option<Window>,
    /// none, log or lw.
    #[arg(long)]
    weight: Option<String>,
    /// Radius for the local Hardy constant.
    #[arg(long = "R")]
    hardy_radius: Option<f64>,
}

impl Args {
    fn experiment(&self, cfg: &ExperimentConfig) -> anyhow::Result<Experiment> {
        let flags = [
            (self.gauge_check, Experiment::GaugeCheck),
            (self.nu_profile, Experiment::NuProfile),
            (self.spectrum, Experiment::Spectrum),
            (self.lambda_curve, Experiment::LambdaCurve),
            (self.resolvent_check, Experiment::ResolventCheck),
            (self.evolve, Experiment::Evolve),
            (self.hardy, Experiment::Hardy),
            (self.full_report, Experiment::FullReport),
        ];
        let mut chosen: Vec<Experiment> = flags.iter().filter(|f| f.0).map(|f| f.1).collect();
        if let Some(name) = &self.experiment {
            chosen.push(name.parse()?);
        }
        chosen.dedup();
        match chosen.as_slice() {
            [] => cfg.experiment.context("no experiment given on the command line or in the config"),
            [e] => Ok(*e),
            _ => bail!("more than one experiment requested: {chosen:?}"),
        }
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.radii {
            cfg.radii = Some(v);
        }
        if let Some(v) = self.s {
            cfg.s = Some(v);
        }
        if let Some(v) = self.flux {
            cfg.flux = v;
        }
        if let Some(v) = self.s_max {
            cfg.s_max = v;
        }
        if let Some(v) = self.ds {
            cfg.ds = v;
        }
        if let Some(v) = self.fit_window {
            cfg.fit_window = Some(v);
        }
        if let Some(v) = &self.weight {
            cfg.weight = v.clone();
        }
        if let Some(v) = self.hardy_radius {
            cfg.hardy_radius = Some(v);
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<bool> {
    let args = Args::parse();
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    args.apply(&mut cfg);
    cfg.validate()?;
    let experiment = args.experiment(&cfg)?;
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("runs"));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;

    pool.install(|| {
        if let Some(spec) = &args.sweep {
            let spec: SweepSpec = spec.parse()?;
            let entries = sweep(&cfg, experiment, &spec, &out)?;
            let mut all = true;
            for e in &entries {
                match &e.result {
                    Ok(rec) => {
                        all &= rec.pass;
                        println!("{}={} {} {}", spec.axis, e.value, if rec.pass { "PASS" } else { "FAIL" }, e.dir.display());
                    }
                    Err(msg) => {
                        all = false;
                        println!("{}={} ERROR {msg}", spec.axis, e.value);
                    }
                }
            }
            Ok(all)
        } else {
            let (dir, rec) = run_in(&cfg, experiment, &out)?;
            for c in &rec.checks {
                println!(
                    "{} {}: measured {:.6e}, theory {:.6e}, tolerance {:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.theory,
                    c.tolerance
                );
            }
            println!("{} {} -> {}", experiment, if rec.pass { "PASS" } else { "FAIL" }, dir.display());
            Ok(rec.pass)
        }
    })
}
