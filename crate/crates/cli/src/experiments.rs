//! The eight experiments. Each writes its CSVs into a run directory and
//! returns a payload plus the checks that decide pass/fail.

use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use magheat_core::field_forms::{
    closedness_residual, dist_to_integers, gauge_report, poincare_gauge, spherical_pullback, total_flux, MagneticField,
};
use magheat_core::hardy_verifier::{
    aux_inequality_check, diamagnetic_check, free_hardy_trials, hardy_constant, hardy_minimizing_quotient, lw_averaged_bound,
    lw_lower_bound, mu_b, nu_infinity, HardyMesh, HardyWeight,
};
use magheat_core::heat_evolution::{evolve_and_fit, Datum, Evolver};
use magheat_core::oscillator_spectrum::{
    default_mode_range, lambda_b_curve, oscillator_level, planar_angular_eigenvalues, resolvent_convergence, spectrum_numeric,
    RadialGrid,
};
use magheat_core::sphere_spectrum::{exactness_check, nu_circle_exact, nu_circle_numeric, nu_sphere_numeric};
use magheat_core::{EvolveSettings, MagheatError};

use crate::config::{Experiment, ExperimentConfig, Span};
use crate::error::{CliError, Result};
use crate::output::{gnuplot, num, Panel, RunDir};
use crate::record::{Check, Relation, RunRecord};

/// Measurements of one experiment before they are wrapped in a record.
pub struct Outcome {
    pub payload: Value,
    pub checks: Vec<Check>,
    pub plot: String,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Runs `experiment` into `dir` and writes `record.json` and `plot.gp` next to its CSVs.
pub fn run(cfg: &ExperimentConfig, experiment: Experiment, dir: &mut RunDir) -> Result<RunRecord> {
    cfg.validate()?;
    let started_unix = now();
    let ctx = |e: MagheatError| CliError::Experiment {
        experiment: experiment.name(),
        source: e,
    };
    let outcome = match experiment {
        Experiment::GaugeCheck => gauge_check(cfg, dir),
        Experiment::NuProfile => nu_profile(cfg, dir),
        Experiment::Spectrum => spectrum(cfg, dir),
        Experiment::LambdaCurve => lambda_curve(cfg, dir),
        Experiment::ResolventCheck => resolvent_check(cfg, dir),
        Experiment::Evolve => evolve(cfg, dir),
        Experiment::Hardy => hardy(cfg, dir),
        Experiment::FullReport => full_report(cfg, dir),
    }
    .map_err(|e| match e {
        CliError::Core(e) => ctx(e),
        other => other,
    })?;
    dir.write_text("plot.gp", &outcome.plot)?;
    let pass = outcome.checks.iter().all(|c| c.pass);
    let mut record = RunRecord {
        experiment: experiment.name().to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        started_unix,
        finished_unix: now(),
        payload: outcome.payload,
        checks: outcome.checks,
        files: Vec::new(),
        pass,
    };
    dir.write_json("config.json", cfg)?;
    record.files = dir.files().to_vec();
    record.files.push("record.json".into());
    dir.write_json("record.json", &record)?;
    Ok(record)
}

fn support_or(field: &MagneticField<f64>, fallback: f64) -> f64 {
    if field.is_zero() {
        fallback
    } else {
        field.support_radius()
    }
}

/// Uniform point in the ball of radius `r`.
fn ball_point(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x.into_iter().map(|v| v * r).collect();
        }
    }
}

fn gauge_check(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let d = field.dimension();
    let radius = support_or(&field, cfg.radius);
    let gauge = poincare_gauge(&field, cfg.gauge_nodes)?;

    // half the points inside the support, half in the exterior shell up to 4R
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_in = cfg.gauge_points.div_ceil(2);
    let mut points: Vec<Vec<f64>> = (0..n_in).map(|_| ball_point(&mut rng, d, radius)).collect();
    while points.len() < cfg.gauge_points {
        let x = ball_point(&mut rng, d, 4.0 * radius);
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() > radius {
            points.push(x);
        }
    }
    let chunks: Vec<&[Vec<f64>]> = points.chunks(256).collect();
    let reports = chunks
        .par_iter()
        .map(|c| gauge_report(&gauge, c, 1e-4))
        .collect::<magheat_core::Result<Vec<_>>>()?;
    let transversality = reports.iter().map(|r| r.transversality).fold(0.0, f64::max);
    let curl = reports.iter().map(|r| r.curl_error).fold(0.0, f64::max);
    let decay = reports.iter().map(|r| r.decay_excess).fold(f64::NEG_INFINITY, f64::max);
    let closed = closedness_residual(&field, &points[..n_in.min(1000)], 1e-3)?;

    // components and gauge on a regular grid over [-2R, 2R]^d
    let side: usize = if d == 2 { 41 } else { 17 };
    let coord = |k: usize| -2.0 * radius + 4.0 * radius * k as f64 / (side - 1) as f64;
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let pairs: &[(usize, usize)] = if d == 2 { &[(0, 1)] } else { &[(0, 1), (0, 2), (1, 2)] };
    header.extend(pairs.iter().map(|(j, k)| format!("B{}{}", j + 1, k + 1)));
    header.extend((1..=d).map(|i| format!("A{i}")));
    let rows: Vec<Vec<f64>> = (0..side.pow(d as u32))
        .map(|idx| {
            let x: Vec<f64> = (0..d).map(|j| coord(idx / side.pow(j as u32) % side)).collect();
            let b = field.components(&x);
            let a = gauge.eval(&x);
            let mut row = x.clone();
            row.extend(pairs.iter().map(|&(j, k)| b[j][k]));
            row.extend(&a[..d]);
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    dir.write_table("field.csv", &header, &rows)?;

    let checks = vec![
        Check::at_most("transversality |x·A|", transversality, 0.0, 1e-10),
        Check::at_most("curl error |dA - B|", curl, 0.0, 1e-6),
        Check::at_most("exterior decay excess", decay, 0.0, 0.0),
        Check::at_most("closedness residual |dB|", closed, 0.0, 1e-8),
    ];
    let payload = json!({
        "dimension": d,
        "preset": cfg.preset,
        "support_radius": radius,
        "points": points.len(),
        "transversality": transversality,
        "curl_error": curl,
        "decay_excess": decay,
        "closedness_residual": closed,
    });
    let ycol = d + 1;
    let plot = gnuplot(
        "field component along the grid",
        &[Panel {
            file: "field.csv",
            x: 1,
            ys: &[ycol],
            xlabel: "x1",
            ylabel: "B12",
            logy: false,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn nu_profile(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let d = field.dimension();
    let radius = support_or(&field, cfg.radius);
    let span = cfg.radii.unwrap_or(Span {
        lo: radius / 20.0,
        hi: 3.0 * radius,
        n: if d == 2 { 60 } else { 24 },
    });
    let radii = span.values();
    let potential = spherical_pullback(&poincare_gauge(&field, cfg.gauge_nodes)?);
    let mut checks = Vec::new();
    let payload;
    let values: Vec<f64>;
    if d == 2 {
        let flux = total_flux(&field, 16)?;
        values = radii
            .par_iter()
            .map(|&r| nu_circle_numeric(&potential, r, cfg.n_theta))
            .collect::<magheat_core::Result<_>>()?;
        let exact: Vec<f64> = radii.iter().map(|&r| nu_circle_exact(flux.flux_at(r))).collect();
        let err = values.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("max |nu_numeric - dist(flux(r), Z)^2|", err, 0.0, 1e-4));

        // observed order at r = 3R from n_theta/4, n_theta/2, n_theta
        let r_far = 3.0 * radius;
        let nu_far = nu_circle_exact(flux.flux_at(r_far));
        let errs = [4, 2, 1]
            .iter()
            .map(|k| nu_circle_numeric(&potential, r_far, cfg.n_theta / k).map(|v| (v - nu_far).abs()))
            .collect::<magheat_core::Result<Vec<f64>>>()?;
        let order = if errs.iter().all(|&e| e > 1e-13) {
            Some(((errs[0] / errs[1]).log2() + (errs[1] / errs[2]).log2()) / 2.0)
        } else {
            None
        };
        if let Some(p) = order {
            checks.push(Check::at_least("convergence order in n_theta", p, 1.8, 0.0));
        }
        let beta = flux.beta();
        let nu_inf_num = nu_circle_numeric(&potential, r_far, cfg.n_theta)?;
        checks.push(Check::near("nu(infinity) = dist(flux, Z)^2", nu_inf_num, beta * beta, 1e-4));
        payload = json!({
            "dimension": 2,
            "n_theta": cfg.n_theta,
            "radii": radii,
            "nu_numeric": values,
            "nu_theory": exact,
            "max_error": err,
            "order_errors": errs,
            "order": order,
            "total_flux": flux.total_flux(),
            "nu_infinity": nu_inf_num,
            "nu_infinity_theory": beta * beta,
        });
    } else {
        let grid = (cfg.sphere_grid[0], cfg.sphere_grid[1]);
        values = radii
            .par_iter()
            .map(|&r| nu_sphere_numeric(&potential, r, grid))
            .collect::<magheat_core::Result<_>>()?;
        let r2 = 2.0 * radius;
        let nu2 = nu_sphere_numeric(&potential, r2, grid)?;
        let exact = exactness_check(&potential, r2, 1e-3)?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::at_most("nu(2R) on the sphere", nu2, 0.0, 1e-3));
        checks.push(Check::at_most("exactness residual at 2R", exact.residual, 0.0, 1e-6));
        checks.push(Check::at_least("nu(r) nonnegative", min, 0.0, 1e-10));
        payload = json!({
            "dimension": 3,
            "sphere_grid": cfg.sphere_grid,
            "radii": radii,
            "nu_numeric": values,
            "nu_2r": nu2,
            "nu_infinity": nu2,
            "nu_infinity_theory": 0.0,
            "exactness_residual": exact.residual,
        });
    }
    let rows: Vec<Vec<f64>> = radii.iter().zip(&values).map(|(&r, &v)| vec![r, v]).collect();
    dir.write_table("nu_profile.csv", &["r", "nu"], &rows)?;
    let plot = gnuplot(
        "angular ground state energy",
        &[Panel {
            file: "nu_profile.csv",
            x: 1,
            ys: &[2],
            xlabel: "r",
            ylabel: "nu_B(r)",
            logy: false,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn spectrum(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let d = cfg.dimension;
    let modes: Vec<(i64, f64)> = match &cfg.spectrum_nu {
        Some(nu) => nu.iter().enumerate().map(|(k, &v)| (k as i64, v)).collect(),
        None if d == 2 => {
            let flux = cfg.field().and_then(|f| Ok(total_flux(&f, 16)?.total_flux()))?;
            let range = cfg.modes.unwrap_or_else(|| default_mode_range(flux));
            planar_angular_eigenvalues(flux, range)
        }
        None => (0..4).map(|l| (l, (l * (l + 1)) as f64)).collect(),
    };
    let grid = RadialGrid::with_nodes(cfg.nodes);
    let count = cfg.spectrum_count;
    let numeric = spectrum_numeric(d, &modes, count, &grid)?;
    let mut exact: Vec<(f64, usize, i64)> = modes
        .iter()
        .flat_map(|&(l, nu)| (0..count).map(move |n| (oscillator_level(n, nu), n, l)))
        .collect();
    exact.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let mut checks = Vec::new();
    for k in 0..count {
        let (level, n, l) = exact[k];
        checks.push(Check::near(format!("eigenvalue {k} (n={n}, l={l})"), numeric.eigenvalues[k], level, 1e-3));
    }
    let rows: Vec<Vec<String>> = numeric
        .eigenvalues
        .iter()
        .zip(&numeric.labels)
        .map(|(&v, &(n, l))| vec![n.to_string(), l.to_string(), num(v)])
        .collect();
    dir.write_csv("spectrum.csv", &["n", "l", "lambda"], rows)?;
    let payload = json!({
        "dimension": d,
        "nodes": cfg.nodes,
        "modes": modes,
        "eigenvalues": numeric.eigenvalues,
        "labels": numeric.labels,
        "theory": exact.iter().map(|e| e.0).collect::<Vec<_>>(),
    });
    let plot = gnuplot(
        "spectrum of the oscillator",
        &[Panel {
            file: "spectrum.csv",
            x: 2,
            ys: &[3],
            xlabel: "angular label",
            ylabel: "eigenvalue",
            logy: false,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn lambda_curve(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let flux = total_flux(&field, 16)?;
    let s = cfg.s.unwrap_or(Span { lo: 0.0, hi: 16.0, n: 17 }).values();
    let grid = RadialGrid::with_nodes(cfg.nodes);
    let curve = lambda_b_curve(&field, &s, &grid)?;
    let values: Vec<f64> = curve.iter().map(|l| l.value).collect();
    let beta = flux.beta();
    let limit = (1.0 + beta) / 2.0;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let s_last = *s.last().expect("span is nonempty");
    let last = *values.last().expect("span is nonempty");
    let mut checks = vec![
        Check::at_least("lambda_B(s) >= 1/2", min, 0.5, 1e-8),
        Check::near(format!("lambda_B({s_last}) -> (1 + dist(flux, Z))/2"), last, limit, 5e-3),
    ];
    if beta > 0.0 {
        checks.push(Check::at_least("lambda_B(s) >= 1/2 + 1e-4", min, 0.5 + 1e-4, 0.0));
    }
    let rows: Vec<Vec<f64>> = s.iter().zip(&values).map(|(&s, &v)| vec![s, v]).collect();
    dir.write_table("lambda_curve.csv", &["s", "lambda_B"], &rows)?;
    let payload = json!({
        "total_flux": flux.total_flux(),
        "s": s,
        "lambda_B": values,
        "modes": curve.iter().map(|l| l.mode).collect::<Vec<_>>(),
        "gamma_theory": limit,
        "nu_theory": beta * beta,
    });
    let plot = gnuplot(
        "lowest eigenvalue of L_s",
        &[Panel {
            file: "lambda_curve.csv",
            x: 1,
            ys: &[2],
            xlabel: "s",
            ylabel: "lambda_B(s)",
            logy: false,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn resolvent_check(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let flux = total_flux(&field, 16)?;
    let range = cfg.modes.unwrap_or_else(|| default_mode_range(flux.total_flux()));
    let grid = RadialGrid::with_nodes(cfg.nodes);
    let s = cfg.resolvent_s.clone();
    let gaps = resolvent_convergence(&field, &s, &grid, range)?;
    let worst_ratio = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let mut checks = Vec::new();
    if gaps.len() > 1 {
        checks.push(Check::new("largest successive ratio (strict decrease)", worst_ratio, 1.0, 0.0, Relation::Below));
    }
    let last = *gaps.last().expect("resolvent_s is nonempty");
    let s_last = *s.last().expect("resolvent_s is nonempty");
    checks.push(Check::new(format!("resolvent gap at s = {s_last}"), last, 1e-2, 0.0, Relation::Below));
    let rows: Vec<Vec<f64>> = s.iter().zip(&gaps).map(|(&s, &g)| vec![s, g]).collect();
    dir.write_table("resolvent.csv", &["s", "resolvent_gap"], &rows)?;
    let payload = json!({
        "total_flux": flux.total_flux(),
        "mode_range": range,
        "s": s,
        "resolvent_gap": gaps,
    });
    let plot = gnuplot(
        "resolvent convergence",
        &[Panel {
            file: "resolvent.csv",
            x: 1,
            ys: &[2],
            xlabel: "s",
            ylabel: "max_m |L_s^-1 - L_inf^-1|",
            logy: true,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn evolve(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let flux = total_flux(&field, 16)?;
    let datum = match cfg.datum.as_str() {
        "eigenmode" => Datum::EigenMode,
        _ => Datum::gaussian_for_flux(flux.total_flux()),
    };
    let settings = EvolveSettings {
        s_max: cfg.s_max,
        ds: cfg.ds,
        fit_window: cfg.fit_window.map(|w| (w.a, w.b)),
        nodes: cfg.nodes,
        record_every: cfg.record_every,
        ..EvolveSettings::default()
    };
    let run = evolve_and_fit(&field, &datum, &settings)?;

    // energy defect under step halving from the initial state
    let grid = RadialGrid::with_nodes(cfg.nodes).resolving(flux.saturation_radius() * (-cfg.s_max / 2.0).exp());
    let evolver = Evolver::new(flux.clone(), grid);
    let state = evolver.project(&datum)?;
    let (d_full, d_half) = evolver.energy_halving(&state, 0.04)?;
    let halving = d_full / d_half;

    let fit = run.fit;
    let tol = if field.is_zero() { 0.02 } else { 0.05 };
    let mut checks = vec![
        Check::near("decay slope vs (1 + dist(flux, Z))/2", fit.slope, fit.gamma_theory, tol),
        Check::at_most("Gronwall bound relative excess", run.invariants.gronwall_excess, 0.0, 1e-6),
        Check::flag("weighted norm monotone", run.invariants.monotone),
        Check::near("energy defect halving ratio (second order)", halving, 4.0, 1.0),
    ];
    // B = 0 with the ground state datum: ṽ(s) = e^{-s/2} ṽ(0) exactly
    let reference_error = (field.is_zero() && datum.mode() == Some(0)).then(|| {
        run.samples
            .iter()
            .map(|p| (p.norm_v / p.gronwall_bound - 1.0).abs())
            .fold(0.0, f64::max)
    });
    if let (Some(err), Datum::EigenMode) = (reference_error, datum) {
        checks.push(Check::at_most("relative error vs exact free eigenmode", err, 0.0, 1e-3));
    }

    let rows: Vec<Vec<f64>> = run
        .samples
        .iter()
        .map(|p| vec![p.t, p.s, p.norm_u, p.norm_v, p.gronwall_bound])
        .collect();
    dir.write_table("evolution.csv", &["t", "s", "norm_u", "norm_v", "gronwall_bound"], &rows)?;
    dir.write_json(
        "fit.json",
        &json!({
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "gamma_theory": fit.gamma_theory,
        }),
    )?;
    let payload = json!({
        "total_flux": flux.total_flux(),
        "datum": cfg.datum,
        "datum_mode": datum.mode(),
        "s_max": cfg.s_max,
        "ds": cfg.ds,
        "nodes": cfg.nodes,
        "steps": run.steps,
        "fit": {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "gamma_theory": fit.gamma_theory,
            "window": [fit.window.0, fit.window.1],
            "asymptotic": fit.asymptotic,
        },
        "gamma_theory": fit.gamma_theory,
        "nu_theory": flux.beta() * flux.beta(),
        "gronwall_excess": run.invariants.gronwall_excess,
        "monotone": run.invariants.monotone,
        "energy_defect": run.invariants.energy_defect,
        "energy_halving": {"ds": 0.04, "full": d_full, "half": d_half, "ratio": halving},
        "reference_error": reference_error,
    });
    let plot = gnuplot(
        "weighted heat decay",
        &[
            Panel {
                file: "evolution.csv",
                x: 1,
                ys: &[3],
                xlabel: "t",
                ylabel: "|u(t)|",
                logy: true,
            },
            Panel {
                file: "evolution.csv",
                x: 2,
                ys: &[4, 5],
                xlabel: "s",
                ylabel: "|v(s)|",
                logy: true,
            },
        ],
    );
    // log-log axes for the first panel
    let plot = plot.replacen("set logscale y\n", "set logscale xy\n", 1);
    Ok(Outcome { payload, checks, plot })
}

fn hardy_mesh(cfg: &ExperimentConfig) -> HardyMesh {
    HardyMesh {
        radial: cfg.hardy_radial,
        ..HardyMesh::standard(cfg.dimension)
    }
}

fn hardy(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let field = cfg.field()?;
    let d = field.dimension();
    let base = support_or(&field, cfg.radius);
    let big_r = cfg.hardy_radius.unwrap_or(2.0 * base);
    let radii = cfg.hardy_radii.clone().unwrap_or_else(|| vec![big_r]);
    let mesh = hardy_mesh(cfg);
    let mut checks = Vec::new();

    let mus = radii
        .par_iter()
        .map(|&r| mu_b(&field, r, mesh).map(|m| m.constant))
        .collect::<magheat_core::Result<Vec<f64>>>()?;
    for (&r, &m) in radii.iter().zip(&mus) {
        if field.is_zero() {
            checks.push(Check::at_most(format!("mu_0({r}) vanishes"), m, 0.0, 1e-8));
        } else {
            checks.push(Check::new(format!("mu_B({r}) positive"), m, 1e-8, 0.0, Relation::Above));
        }
    }
    let rows: Vec<Vec<f64>> = radii.iter().zip(&mus).map(|(&r, &m)| vec![r, m]).collect();
    dir.write_table("hardy_mu.csv", &["R", "mu_B"], &rows)?;

    let weight: HardyWeight = cfg.weight.parse().map_err(|e: MagheatError| CliError::invalid("weight", e.to_string()))?;
    let r_out = cfg.r_out.unwrap_or(100.0 * base);
    let mut constants = vec![vec!["none".to_string(), num(mus[0]), num(radii[0]), String::new()]];
    let mut weighted = Value::Null;
    if weight != HardyWeight::None {
        let est = hardy_constant(&field, weight, r_out, mesh)?;
        let sens = est.sensitivity.unwrap_or(f64::NAN);
        constants.push(vec![weight.name().into(), num(est.constant), num(r_out), num(sens)]);
        checks.push(Check::at_least(format!("{} constant nonnegative", weight.name()), est.constant, 0.0, 1e-10));
        weighted = json!({"weight": weight.name(), "constant": est.constant, "r_out": r_out, "sensitivity": sens});
        if weight == HardyWeight::LaptevWeidl {
            let c_log = hardy_constant(&field, HardyWeight::Log, r_out, mesh)?;
            let nu_inf = nu_infinity(&field)?;
            let lower = lw_lower_bound(c_log.constant, base, nu_inf);
            constants.push(vec!["log".into(), num(c_log.constant), num(r_out), num(c_log.sensitivity.unwrap_or(f64::NAN))]);
            checks.push(Check::at_least("lw constant >= min(c a_R, nu(inf))/2", est.constant, lower, 0.0));
            weighted["log_constant"] = json!(c_log.constant);
            weighted["lower_bound"] = json!(lower);
            weighted["averaged_bound"] = json!(lw_averaged_bound(c_log.constant, base, nu_inf));
            weighted["nu_infinity"] = json!(nu_inf);
        }
    }
    dir.write_csv("hardy_constants.csv", &["weight_kind", "constant", "truncation", "sensitivity"], constants)?;

    let aux = aux_inequality_check(base, cfg.trials, cfg.seed)?;
    checks.push(Check::at_least("aux inner ratio >= (j01/r0)^2", aux.worst_inner, aux.gamma_inner, 0.0));
    checks.push(Check::at_least("aux outer ratio >= 1/4", aux.worst_outer, aux.gamma_outer, 0.0));
    let gauge = poincare_gauge(&field, cfg.gauge_nodes)?;
    let dia = diamagnetic_check(&gauge, cfg.trials, 1, cfg.seed.wrapping_add(1))?;
    checks.push(Check::at_most("diamagnetic violation", dia.max_violation, 0.0, 1e-6));
    let mut free = Value::Null;
    if d == 3 {
        let worst = free_hardy_trials::<f64>(3, cfg.trials, cfg.seed.wrapping_add(2))?;
        let minimizing = hardy_minimizing_quotient(50.0)?;
        checks.push(Check::at_least("free Hardy quotient >= 0.95/4", worst, 0.25 * 0.95, 0.0));
        checks.push(Check::near("minimizing sequence quotient -> 1/4", minimizing, 0.25, 0.05 * 0.25));
        free = json!({"worst_trial": worst, "minimizing_quotient": minimizing, "c_d": 0.25});
    }
    let payload = json!({
        "dimension": d,
        "mesh": {"radial": mesh.radial, "angular": format!("{:?}", mesh.angular)},
        "radii": radii,
        "mu_B": mus,
        "weighted": weighted,
        "aux": {
            "r0": base,
            "worst_inner": aux.worst_inner,
            "gamma_inner": aux.gamma_inner,
            "worst_outer": aux.worst_outer,
            "gamma_outer": aux.gamma_outer,
            "trials": aux.trials,
        },
        "diamagnetic": {"max_violation": dia.max_violation, "samples": dia.samples},
        "free_hardy": free,
    });
    let plot = gnuplot(
        "local Hardy constant",
        &[Panel {
            file: "hardy_mu.csv",
            x: 1,
            ys: &[2],
            xlabel: "R",
            ylabel: "mu_B(R)",
            logy: false,
        }],
    );
    Ok(Outcome { payload, checks, plot })
}

fn full_report(cfg: &ExperimentConfig, dir: &mut RunDir) -> Result<Outcome> {
    let stages = [
        Experiment::GaugeCheck,
        Experiment::NuProfile,
        Experiment::LambdaCurve,
        Experiment::Evolve,
        Experiment::Hardy,
    ];
    let mut checks = Vec::new();
    let mut summary = serde_json::Map::new();
    let mut records = std::collections::HashMap::new();
    for stage in stages {
        let mut sub = dir.sub(stage.name())?;
        match run(cfg, stage, &mut sub) {
            Ok(rec) => {
                checks.push(Check::flag(format!("{stage} checks pass"), rec.pass));
                summary.insert(
                    stage.name().into(),
                    json!({"pass": rec.pass, "failed": rec.failed_checks().map(|c| c.name.clone()).collect::<Vec<_>>()}),
                );
                records.insert(stage, rec);
            }
            Err(e) => {
                checks.push(Check::flag(format!("{stage} completed"), false));
                summary.insert(stage.name().into(), json!({"pass": false, "error": e.to_string()}));
            }
        }
    }
    let nu_inf = records.get(&Experiment::NuProfile).and_then(|r| r.payload["nu_infinity"].as_f64());
    let slope = records.get(&Experiment::Evolve).and_then(|r| r.payload["fit"]["slope"].as_f64());
    let mut cross = Value::Null;
    if let (Some(nu), Some(slope)) = (nu_inf, slope) {
        let gamma = (1.0 + nu.max(0.0).sqrt()) / 2.0;
        checks.push(Check::near("gamma_fit vs (1 + sqrt(nu(inf)))/2", slope, gamma, 0.05));
        cross = json!({"gamma_fit": slope, "nu_infinity": nu, "gamma_theory": gamma});
    }
    let flux = cfg.field().ok().and_then(|f| total_flux(&f, 16).ok());
    let payload = json!({
        "stages": summary,
        "cross_check": cross,
        "total_flux": flux.as_ref().map(|f| f.total_flux()),
        "dist_flux_z": flux.as_ref().map(|f| dist_to_integers(f.total_flux())),
    });
    let plot = gnuplot(
        "decay against the theoretical rate",
        &[Panel {
            file: "evolve/evolution.csv",
            x: 1,
            ys: &[3],
            xlabel: "t",
            ylabel: "|u(t)|",
            logy: true,
        }],
    )
    .replacen("set logscale y\n", "set logscale xy\n", 1);
    Ok(Outcome { payload, checks, plot })
}
