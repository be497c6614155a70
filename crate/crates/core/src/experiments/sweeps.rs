//! Sweep runners, one per experiment.
//!
//! All quantities are in units of `Ω` (the loop radius is fixed to 1).
//! Grid points fan out over the worker pool and are collected by index;
//! each point reuses the master seed, so neighbouring points see the same
//! random draws and a single row can be regenerated on its own.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Experiment, MonoVariant, SweepConfig};
use super::table::{Cell, Row, Table};
use crate::error::{Error, Result};
use crate::fidelity::{average_gate_fidelity_leakage_aware, gate_fidelity};
use crate::geometry::solid_angle_fluctuations;
use crate::model::holonomy_target;
use crate::noise::NoiseModel;
use crate::path::optimal_time;

/// Columns shared by every fidelity table, after the independent variables.
pub const FIDELITY_COLUMNS: [&str; 7] = [
    "f",
    "std_error",
    "f_leakage_aware",
    "retained",
    "n_realizations",
    "n_steps",
    "seed",
];

struct Point {
    vars: Vec<Cell>,
    model: NoiseModel,
    omega_tau: f64,
}

fn columns(vars: &[&'static str]) -> Vec<&'static str> {
    vars.iter()
        .chain(FIDELITY_COLUMNS.iter())
        .copied()
        .collect()
}

/// Evaluates one grid point. Noise that cannot be placed on the grid
/// (a sphere step longer than a loop segment) yields `None`.
fn fidelity_row(cfg: &SweepConfig, p: &Point) -> Result<Option<Row>> {
    let start = Instant::now();
    let spec = cfg.path_spec();
    let target = holonomy_target(cfg.phi_max);
    // A silent model gives the same propagator for every realization.
    let n = if p.model.is_silent() {
        1
    } else {
        cfg.realizations
    };
    let (res, ch) = match gate_fidelity(
        &spec,
        &p.model,
        &cfg.evolution(p.omega_tau),
        &target,
        n,
        cfg.seed,
    ) {
        Ok(v) => v,
        Err(Error::NoiseStepExceedsSegment { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let exact = average_gate_fidelity_leakage_aware(&ch, &target);
    let mut cells = p.vars.clone();
    cells.extend([
        res.f.into(),
        res.std_error.into(),
        exact.f.into(),
        ch.retained_population().into(),
        n.into(),
        ch.n_steps.into(),
        cfg.seed.into(),
    ]);
    Ok(Some(Row {
        cells,
        wall_time_s: start.elapsed().as_secs_f64(),
    }))
}

fn run_points(
    cfg: &SweepConfig,
    name: &str,
    vars: &[&'static str],
    points: Vec<Point>,
) -> Result<Table> {
    let rows: Vec<Option<Row>> = points
        .par_iter()
        .map(|p| fidelity_row(cfg, p))
        .collect::<Result<_>>()?;
    let mut table = Table::new(name, columns(vars));
    for (p, row) in points.iter().zip(rows) {
        match row {
            Some(r) => table.push(r),
            None => table.notes.push(format!(
                "skipped {}: noise step exceeds segment duration",
                describe_vars(vars, &p.vars)
            )),
        }
    }
    Ok(table)
}

fn describe_vars(names: &[&str], cells: &[Cell]) -> String {
    names
        .iter()
        .zip(cells)
        .map(|(n, c)| match c {
            Cell::Int(i) => format!("{n}={i}"),
            Cell::Real(x) => format!("{n}={x:?}"),
            Cell::Text(s) => format!("{n}={s}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn mono_model(variant: MonoVariant, eta: f64, epsilon: f64, initial_phase: f64) -> NoiseModel {
    match variant {
        MonoVariant::Monochromatic => NoiseModel::Monochromatic { eta, epsilon },
        MonoVariant::RealPart => NoiseModel::MonochromaticRealPart { eta, epsilon },
        MonoVariant::SquareWave => NoiseModel::SquareWaveProbe {
            half_period: PI / eta,
            initial_phase,
            epsilon,
        },
    }
}

fn optimal_times(cfg: &SweepConfig) -> Result<Vec<(u32, f64)>> {
    cfg.k.iter().map(|&k| Ok((k, optimal_time(k)?))).collect()
}

/// `F` against `Ωτ`: a noiseless curve plus one curve per `η` in
/// `noise.etas` at amplitude `noise.epsilon`.
pub fn run_fid_vs_time(cfg: &SweepConfig) -> Result<Table> {
    let mut curves = vec![(0.0, 0.0)];
    curves.extend(cfg.etas.iter().map(|&eta| (eta, cfg.epsilon)));
    let mut points = Vec::new();
    for &(eta, eps) in &curves {
        let model = if eps == 0.0 {
            NoiseModel::silent()
        } else {
            mono_model(cfg.variant, eta, eps, cfg.initial_phase)
        };
        for &t in cfg.time_grid.values() {
            points.push(Point {
                vars: vec![eta.into(), eps.into(), t.into()],
                model,
                omega_tau: t,
            });
        }
    }
    run_points(
        cfg,
        Experiment::FidVsTime.id(),
        &["eta", "epsilon", "omega_tau"],
        points,
    )
}

/// `F` over the `(η, ε_η)` plane at each `τ*_k`.
pub fn run_mono_surface(cfg: &SweepConfig) -> Result<Table> {
    let mut points = Vec::new();
    for (k, t) in optimal_times(cfg)? {
        for &eps in cfg.epsilon_grid.values() {
            for &eta in cfg.eta_grid.values() {
                points.push(Point {
                    vars: vec![k.into(), t.into(), eta.into(), eps.into()],
                    model: mono_model(cfg.variant, eta, eps, cfg.initial_phase),
                    omega_tau: t,
                });
            }
        }
    }
    run_points(
        cfg,
        Experiment::MonoSurface.id(),
        &["k", "omega_tau", "eta", "epsilon"],
        points,
    )
}

/// `F` over the `(γ_s, (Ωτ_step)⁻¹)` plane at `τ*_k`.
pub fn run_sphere_surface(cfg: &SweepConfig, k: u32) -> Result<Table> {
    let t = optimal_time(k)?;
    let mut points = Vec::new();
    for &gs in cfg.gamma_grid.values() {
        for &inv in cfg.inv_step_grid.values() {
            points.push(Point {
                vars: vec![k.into(), t.into(), gs.into(), inv.into()],
                model: NoiseModel::SphereAngular {
                    gamma: gs * FRAC_PI_2,
                    tau_step: 1.0 / inv,
                },
                omega_tau: t,
            });
        }
    }
    run_points(
        cfg,
        Experiment::SphereSurface.id(),
        &["k", "omega_tau", "gamma_s", "inv_step"],
        points,
    )
}

/// Sphere surfaces for every `k` in the config, stacked in one table.
pub fn run_sphere_surfaces(cfg: &SweepConfig) -> Result<Table> {
    let mut out: Option<Table> = None;
    for &k in &cfg.k {
        let t = run_sphere_surface(cfg, k)?;
        match &mut out {
            None => out = Some(t),
            Some(acc) => {
                acc.rows.extend(t.rows);
                acc.notes.extend(t.notes);
            }
        }
    }
    Ok(out.expect("non-empty k list"))
}

/// Cartesian random noise against `(Ωτ_step)⁻¹` for each `k`, and the same
/// rows keyed by the fluctuation count `N = Ωτ*_k·(Ωτ_step)⁻¹`.
pub fn run_cartesian_sweeps(cfg: &SweepConfig) -> Result<(Table, Table)> {
    let eps = cfg.epsilon;
    let mut points = Vec::new();
    for (k, t) in optimal_times(cfg)? {
        for &inv in cfg.inv_step_grid.values() {
            let tau_step = 1.0 / inv;
            let model = if cfg.complex {
                NoiseModel::CartesianRandomComplex {
                    epsilon: eps,
                    tau_step,
                }
            } else {
                NoiseModel::CartesianRandom {
                    epsilon: eps,
                    tau_step,
                }
            };
            points.push(Point {
                vars: vec![k.into(), t.into(), eps.into(), inv.into()],
                model,
                omega_tau: t,
            });
        }
    }
    let by_freq = run_points(
        cfg,
        Experiment::CartesianVsFreq.id(),
        &["k", "omega_tau", "epsilon", "inv_step"],
        points,
    )?;

    let mut by_count = Table::new(
        Experiment::CartesianVsCount.id(),
        columns(&["k", "omega_tau", "epsilon", "n_fluctuations"]),
    );
    by_count.notes = by_freq.notes.clone();
    for r in &by_freq.rows {
        let mut cells = r.cells.clone();
        let omega_tau = cells[1].as_f64().unwrap();
        let inv = cells[3].as_f64().unwrap();
        cells[3] = Cell::Real(omega_tau * inv);
        by_count.push(Row {
            cells,
            wall_time_s: r.wall_time_s,
        });
    }
    Ok((by_freq, by_count))
}

/// Solid-angle fluctuations against `N` at amplitude `noise.epsilon`,
/// preceded by a noiseless control row.
pub fn run_solid_angle(cfg: &SweepConfig) -> Result<Table> {
    let spec = cfg.path_spec();
    let t = optimal_time(cfg.k[0])?;
    let mut table = Table::new(
        Experiment::SolidAngleVsN.id(),
        vec![
            "epsilon",
            "n_fluctuations",
            "mean_omega",
            "msd_from_ideal",
            "variance",
            "std_error",
            "n_realizations",
            "seed",
        ],
    );
    let control = (0.0, vec![cfg.n_grid[0]]);
    let mut runs = vec![control];
    runs.extend(cfg.n_grid.iter().map(|&n| (cfg.epsilon, vec![n])));
    for (eps, ns) in runs {
        let start = Instant::now();
        let model = NoiseModel::CartesianRandom {
            epsilon: eps,
            tau_step: t,
        };
        let n_real = if eps == 0.0 { 1 } else { cfg.realizations };
        let stats = solid_angle_fluctuations(&spec, &model, t, &ns, n_real, cfg.seed)?;
        let s = &stats[0];
        table.push(Row {
            cells: vec![
                eps.into(),
                s.n_fluctuations.into(),
                s.mean_omega.into(),
                s.mean_square_deviation.into(),
                s.variance.into(),
                s.std_error.into(),
                s.n_realizations.into(),
                s.seed.into(),
            ],
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
    Ok(table)
}

/// Runs the configured experiment on a pool of `cfg.threads` workers.
/// The Cartesian experiments produce both the by-frequency and the
/// by-count table, in that order.
pub fn run(cfg: &SweepConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cfg.experiment {
        Experiment::FidVsTime => Ok(vec![run_fid_vs_time(cfg)?]),
        Experiment::MonoSurface => Ok(vec![run_mono_surface(cfg)?]),
        Experiment::SphereSurface => Ok(vec![run_sphere_surfaces(cfg)?]),
        Experiment::CartesianVsFreq | Experiment::CartesianVsCount => {
            let (a, b) = run_cartesian_sweeps(cfg)?;
            Ok(vec![a, b])
        }
        Experiment::SolidAngleVsN => Ok(vec![run_solid_angle(cfg)?]),
    })
}
