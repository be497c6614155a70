//! Noise-averaged channel and average gate fidelity against the target
//! holonomy.
//!
//! The channel is represented by its action on `P0` and the three Pauli
//! operators of the computational subspace, which is all the four-operator
//! fidelity formula needs. An independent Monte Carlo over Bloch-uniform
//! input states cross-checks the formula.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{computational_ops, HolonomyTarget};
use crate::noise::{sample_realization, NoiseModel};
use crate::path::PathSpec;
use crate::propagator::{evolve, EvolutionConfig};
use crate::rng::{CounterRng, RealizationSeed, Stream};

/// Default number of noise realizations per estimate.
pub const DEFAULT_REALIZATIONS: usize = 50;

/// Averaged images `E(P0), E(σ_x), E(σ_y), E(σ_z)` of the noisy channel,
/// plus the per-realization propagators they were built from.
#[derive(Clone, Debug)]
pub struct ChannelEstimate {
    pub images: [CMat; 4],
    pub propagators: Vec<CMat>,
    pub n_realizations: usize,
    pub seed: u64,
    /// Step count of the first realization's propagator.
    pub n_steps: usize,
}

impl ChannelEstimate {
    /// Build from explicit propagators (one per realization).
    pub fn from_propagators(propagators: Vec<CMat>, seed: u64, n_steps: usize) -> Result<Self> {
        if propagators.is_empty() {
            return Err(Error::InvalidArgument(
                "channel needs at least one realization".into(),
            ));
        }
        let basis = basis_operators();
        let n = propagators.len();
        let mut images = [CMat::zeros(4); 4];
        // Summed in realization order so the result does not depend on how
        // the propagators were scheduled.
        for v in &propagators {
            for (img, a) in images.iter_mut().zip(basis.iter()) {
                *img = *img + v.conjugate(a);
            }
        }
        let inv = C64::new(1.0 / n as f64, 0.0);
        for img in images.iter_mut() {
            *img = img.scale(inv);
        }
        Ok(Self {
            images,
            propagators,
            n_realizations: n,
            seed,
            n_steps,
        })
    }

    /// Fraction of the computational subspace retained, `tr[P0 E(P0)] / 2`.
    pub fn retained_population(&self) -> f64 {
        (computational_ops().p0 * self.images[0]).trace().re / 2.0
    }
}

fn basis_operators() -> [CMat; 4] {
    let ops = computational_ops();
    [ops.p0, ops.sigma[0], ops.sigma[1], ops.sigma[2]]
}

pub fn estimate_channel(
    spec: &PathSpec,
    model: &NoiseModel,
    cfg: &EvolutionConfig,
    n_realizations: usize,
    seed: u64,
) -> Result<ChannelEstimate> {
    if n_realizations == 0 {
        return Err(Error::InvalidArgument("n_realizations must be >= 1".into()));
    }
    let runs: Vec<(CMat, usize)> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            let real = sample_realization(model, cfg.tau, spec, RealizationSeed::new(seed, r))?;
            let p = evolve(spec, Some(&real), cfg)?;
            Ok((p.v, p.n_steps))
        })
        .collect::<Result<_>>()?;
    let n_steps = runs[0].1;
    ChannelEstimate::from_propagators(runs.into_iter().map(|(v, _)| v).collect(), seed, n_steps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityResult {
    pub f: f64,
    pub std_error: f64,
    pub n_realizations: usize,
    pub tau: f64,
    pub model: String,
}

/// `1/3 + tr[WW† E(P0)]/12 + Σ_j tr[Wσ_jW† E(σ_j)]/12` with `W` embedded in
/// the computational block.
pub fn fidelity_formula(images: &[CMat; 4], target: &HolonomyTarget) -> f64 {
    let w = target.embedded();
    let basis = basis_operators();
    let mut f = 1.0 / 3.0;
    for (a, img) in basis.iter().zip(images.iter()) {
        f += (w.conjugate(a) * *img).trace().re / 12.0;
    }
    f
}

/// `tr[P0 E(P0)]/4 + Σ_j tr[Wσ_jW† E(σ_j)]/12`, the exact Bloch-sphere
/// average for channels that may leak out of the computational subspace.
/// Agrees with [`fidelity_formula`] when nothing leaks.
pub fn leakage_aware_fidelity(images: &[CMat; 4], target: &HolonomyTarget) -> f64 {
    let w = target.embedded();
    let basis = basis_operators();
    let mut f = (w.conjugate(&basis[0]) * images[0]).trace().re / 4.0;
    for (a, img) in basis.iter().zip(images.iter()).skip(1) {
        f += (w.conjugate(a) * *img).trace().re / 12.0;
    }
    f
}

fn single_images(v: &CMat) -> [CMat; 4] {
    basis_operators().map(|a| v.conjugate(&a))
}

/// Jackknife standard error of the mean of `xs`.
pub fn jackknife_std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let total: f64 = xs.iter().sum();
    let loo: Vec<f64> = xs.iter().map(|x| (total - x) / (n - 1) as f64).collect();
    let mean = loo.iter().sum::<f64>() / n as f64;
    let ss: f64 = loo.iter().map(|x| (x - mean).powi(2)).sum();
    ((n - 1) as f64 / n as f64 * ss).sqrt()
}

fn evaluate_with(
    ch: &ChannelEstimate,
    target: &HolonomyTarget,
    tau: f64,
    model: &str,
    formula: fn(&[CMat; 4], &HolonomyTarget) -> f64,
) -> FidelityResult {
    let per_realization: Vec<f64> = ch
        .propagators
        .iter()
        .map(|v| formula(&single_images(v), target))
        .collect();
    FidelityResult {
        f: formula(&ch.images, target),
        std_error: jackknife_std_error(&per_realization),
        n_realizations: ch.n_realizations,
        tau,
        model: model.to_string(),
    }
}

/// Average gate fidelity of the estimated channel, with a jackknife error
/// over realizations.
pub fn average_gate_fidelity(ch: &ChannelEstimate, target: &HolonomyTarget) -> FidelityResult {
    evaluate_with(ch, target, f64::NAN, "", fidelity_formula)
}

/// As [`average_gate_fidelity`] with the leakage-aware formula.
pub fn average_gate_fidelity_leakage_aware(
    ch: &ChannelEstimate,
    target: &HolonomyTarget,
) -> FidelityResult {
    evaluate_with(ch, target, f64::NAN, "", leakage_aware_fidelity)
}

/// Convenience: estimate the channel and evaluate the fidelity.
pub fn gate_fidelity(
    spec: &PathSpec,
    model: &NoiseModel,
    cfg: &EvolutionConfig,
    target: &HolonomyTarget,
    n_realizations: usize,
    seed: u64,
) -> Result<(FidelityResult, ChannelEstimate)> {
    let ch = estimate_channel(spec, model, cfg, n_realizations, seed)?;
    let res = evaluate_with(&ch, target, cfg.tau, &model.describe(), fidelity_formula);
    Ok((res, ch))
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Bloch-uniform pure state on the computational subspace.
fn bloch_state(rng: &CounterRng, index: u64) -> [C64; 4] {
    let z = rng.uniform(-1.0, 1.0, 0, index);
    let phi = rng.uniform(0.0, std::f64::consts::TAU, 1, index);
    let c = ((1.0 + z) / 2.0).sqrt();
    let s = ((1.0 - z) / 2.0).max(0.0).sqrt();
    [
        C64::new(c, 0.0),
        C64::from_polar(s, phi),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ]
}

/// `|⟨ψ|W†V|ψ⟩|²`
fn state_fidelity(v: &CMat, w: &CMat, psi: &[C64; 4]) -> f64 {
    let vpsi = v.apply(psi);
    let wpsi = w.apply(psi);
    wpsi.iter()
        .zip(&vpsi)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .norm_sqr()
}

/// State-averaged fidelity of propagators against `target`, each propagator
/// paired with its own `n_states` random input states.
pub fn state_average(
    propagators: &[CMat],
    target: &HolonomyTarget,
    n_states: usize,
    seed: u64,
) -> OracleEstimate {
    let w = target.embedded();
    let means: Vec<(f64, f64)> = propagators
        .par_iter()
        .enumerate()
        .map(|(r, v)| {
            let rng = CounterRng::new(RealizationSeed::new(seed, r as u64), Stream::States);
            let (mut sum, mut sq) = (0.0, 0.0);
            for i in 0..n_states as u64 {
                let f = state_fidelity(v, &w, &bloch_state(&rng, i));
                sum += f;
                sq += f * f;
            }
            (sum / n_states as f64, sq / n_states as f64)
        })
        .collect();
    let n_r = means.len();
    let mean = means.iter().map(|m| m.0).sum::<f64>() / n_r as f64;
    let std_error = if n_r > 1 {
        // Realizations are the independent units; states within one are not
        // independent of it.
        let var = means.iter().map(|m| (m.0 - mean).powi(2)).sum::<f64>() / (n_r - 1) as f64;
        (var / n_r as f64).sqrt()
    } else {
        let var = (means[0].1 - mean * mean).max(0.0) * n_states as f64
            / (n_states as f64 - 1.0).max(1.0);
        (var / n_states as f64).sqrt()
    };
    OracleEstimate {
        mean,
        std_error,
        n_samples: n_r * n_states,
    }
}

/// Direct estimate of `∫dψ ⟨ψ|W† E(|ψ⟩⟨ψ|) W|ψ⟩` from fresh realizations.
pub fn fidelity_state_average_oracle(
    spec: &PathSpec,
    model: &NoiseModel,
    cfg: &EvolutionConfig,
    target: &HolonomyTarget,
    n_realizations: usize,
    n_states: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    if n_states < 1000 {
        return Err(Error::InvalidArgument(format!(
            "n_states must be >= 1000, got {n_states}"
        )));
    }
    let ch = estimate_channel(spec, model, cfg, n_realizations, seed)?;
    Ok(state_average(&ch.propagators, target, n_states, seed))
}
