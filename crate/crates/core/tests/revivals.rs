//! Noiseless fidelity against operational time.

use std::f64::consts::{FRAC_PI_2, PI};

use holonoise::fidelity::{average_gate_fidelity, estimate_channel};
use holonoise::model::holonomy_target;
use holonoise::noise::NoiseModel;
use holonoise::path::PathSpec;
use holonoise::propagator::EvolutionConfig;

fn f(omega_tau: f64) -> f64 {
    let ch = estimate_channel(
        &PathSpec::default(),
        &NoiseModel::silent(),
        &EvolutionConfig::new(omega_tau),
        1,
        0,
    )
    .unwrap();
    average_gate_fidelity(&ch, &holonomy_target(FRAC_PI_2)).f
}

#[test]
fn revival_peaks_sit_at_the_closed_form_times() {
    for k in 1..=4u32 {
        let t = 1.5 * PI * (16.0 * (k * k) as f64 - 1.0).sqrt();
        let grid: Vec<f64> = (-10..=10)
            .map(|i| (t * 10.0).round() / 10.0 + 0.1 * i as f64)
            .collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        assert!(
            (best - t).abs() <= 0.1,
            "k={k}: peak at {best}, expected {t}"
        );
    }
    assert!(f(18.25) > f(14.0) + 0.1);
}

#[test]
fn adiabatic_envelope_rises_towards_one() {
    let window_min = |a: f64| {
        (0..100)
            .map(|i| f(a + 0.5 * i as f64))
            .fold(f64::INFINITY, f64::min)
    };
    let mins: Vec<f64> = [100.0, 150.0, 200.0, 250.0, 300.0, 350.0]
        .into_iter()
        .map(window_min)
        .collect();
    for w in mins.windows(2) {
        assert!(w[1] > w[0], "{mins:?}");
    }
    assert!(mins[2] > 0.997, "{mins:?}");
    assert!(mins[4] > 0.999, "{mins:?}");
}
