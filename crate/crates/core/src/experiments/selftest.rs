//! Quick oracle cross-checks, run by the `selftest` subcommand.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use super::config::{Experiment, Preset, SweepConfig};
use super::grid::Grid;
use super::sweeps::run;
use crate::error::Result;
use crate::fidelity::{
    average_gate_fidelity, average_gate_fidelity_leakage_aware, estimate_channel, state_average,
};
use crate::geometry::solid_angle;
use crate::linalg::{expm_reference, step_exp};
use crate::model::{hamiltonian, holonomy_target, ParamPoint};
use crate::noise::NoiseModel;
use crate::path::{ideal_point, ideal_solid_angle, optimal_time, PathSpec};
use crate::propagator::EvolutionConfig;
use crate::rng::{CounterRng, RealizationSeed, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Random complex point with components in `[-2, 2] + i[-2, 2]`.
pub fn random_point(rng: &CounterRng, i: u64) -> ParamPoint {
    let c = |j: u64| {
        C64::new(
            rng.symmetric(2.0, 2 * j, i),
            rng.symmetric(2.0, 2 * j + 1, i),
        )
    };
    ParamPoint::new(c(0), c(1), c(2))
}

fn step_exp_check(seed: u64) -> Result<Check> {
    let rng = CounterRng::new(RealizationSeed::new(seed, 0), Stream::Offsets);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let p = random_point(&rng, i);
        let dt = 0.05 + rng.unit(6, i);
        let d = step_exp(&p, dt).max_diff(&expm_reference(&hamiltonian(&p), dt)?);
        worst = worst.max(d);
    }
    Ok(Check::new(
        "step_exp matches reference exponential",
        worst <= 1e-10,
        format!("max deviation {worst:.2e} over 1000 points"),
    ))
}

fn revival_check() -> Result<Check> {
    let spec = PathSpec::default();
    let target = holonomy_target(spec.phi_max);
    let mut worst = 1.0f64;
    for k in 1..=4 {
        let ch = estimate_channel(
            &spec,
            &NoiseModel::silent(),
            &EvolutionConfig::new(optimal_time(k)?),
            1,
            0,
        )?;
        worst = worst.min(average_gate_fidelity(&ch, &target).f);
    }
    Ok(Check::new(
        "noiseless revivals at the optimal times",
        worst >= 0.9999,
        format!("min F = {worst:.8}"),
    ))
}

fn solid_angle_check() -> Result<Check> {
    let spec = PathSpec::default();
    let n = 3000;
    let pts: Vec<ParamPoint> = (0..n)
        .map(|i| ideal_point(&spec, i as f64 / n as f64))
        .collect::<Result<_>>()?;
    let d = (solid_angle(&pts)? - ideal_solid_angle(&spec)).abs();
    Ok(Check::new(
        "ideal loop encloses phi_max",
        d <= 1e-5,
        format!("deviation {d:.2e}"),
    ))
}

/// Channel formulas against the direct state average on fresh realizations.
fn oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let spec = PathSpec::default();
    let target = holonomy_target(spec.phi_max);
    let t1 = optimal_time(1)?;
    let configs = [
        (
            NoiseModel::Monochromatic {
                eta: 0.2,
                epsilon: 0.1,
            },
            t1,
        ),
        (
            NoiseModel::SphereAngular {
                gamma: 0.25 * FRAC_PI_2,
                tau_step: 2.0,
            },
            t1,
        ),
        (
            NoiseModel::CartesianRandom {
                epsilon: 0.1,
                tau_step: 2.0,
            },
            t1,
        ),
        (NoiseModel::silent(), 14.0),
    ];
    let mut out = Vec::new();
    for (model, tau) in configs {
        let cfg = EvolutionConfig::new(tau);
        let n = if model.is_silent() { 1 } else { 100 };
        let ch = estimate_channel(&spec, &model, &cfg, n, seed)?;
        let fresh = estimate_channel(&spec, &model, &cfg, n, seed.wrapping_add(0x9e37))?;
        let oracle = state_average(&fresh.propagators, &target, 10_000, seed);
        let exact = average_gate_fidelity_leakage_aware(&ch, &target);
        let formula = average_gate_fidelity(&ch, &target);
        let se = (exact.std_error.powi(2) + oracle.std_error.powi(2)).sqrt();
        let z = (exact.f - oracle.mean).abs() / se.max(1e-300);
        out.push(Check::new(
            format!("leakage-aware fidelity vs state average, {}, tau={tau:.4}", model.describe()),
            z <= 3.0,
            format!(
                "channel {:.5} oracle {:.5} ({:.1} se); gate-fidelity formula {:.5}, retained {:.5}",
                exact.f,
                oracle.mean,
                z,
                formula.f,
                ch.retained_population()
            ),
        ));
    }
    Ok(out)
}

fn determinism_check(seed: u64) -> Result<Check> {
    let mut cfg = SweepConfig::preset(Experiment::CartesianVsFreq, Preset::Desk);
    cfg.seed = seed;
    cfg.realizations = 8;
    cfg.k = vec![1, 2];
    cfg.inv_step_grid = Grid::new(vec![0.25, 0.5, 1.0])?;
    cfg.threads = 1;
    let a = run(&cfg)?;
    cfg.threads = 4;
    let b = run(&cfg)?;
    let same = a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.data_lines() == y.data_lines());
    Ok(Check::new(
        "rows independent of worker count",
        same,
        "1 vs 4 workers".into(),
    ))
}

pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut checks = vec![
        step_exp_check(seed)?,
        revival_check()?,
        solid_angle_check()?,
    ];
    checks.extend(oracle_checks(seed)?);
    checks.push(determinism_check(seed)?);
    Ok(checks)
}
