//! Solid angle enclosed by (noisy) loops on the parameter sphere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ParamPoint;
use crate::noise::{sample_realization, NoiseModel, NoiseRealization};
use crate::path::{PathSpec, SEGMENT_BREAKS};
use crate::rng::RealizationSeed;
use crate::tolerance::TOL;

/// Minimum polygon vertices per constant noise piece.
pub const POINTS_PER_PIECE: usize = 20;
/// Minimum polygon vertices over the whole loop.
pub const MIN_LOOP_POINTS: usize = 3000;

fn unit(p: &ParamPoint, index: usize) -> Result<[f64; 3]> {
    // Only the real parts span the parameter sphere.
    let v = [p.x.re, p.y.re, p.z.re];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n < TOL.origin {
        return Err(Error::LoopThroughOrigin { index });
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// Signed spherical area enclosed by the closed polygon through `points`
/// (joined by great-circle arcs, last point back to the first).
///
/// Each edge contributes the signed area of the triangle it forms with the
/// north pole; the ideal loop comes out positive.
pub fn solid_angle(points: &[ParamPoint]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "loop needs >= 3 points, got {}",
            points.len()
        )));
    }
    let units: Vec<[f64; 3]> = points
        .iter()
        .enumerate()
        .map(|(i, p)| unit(p, i))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..units.len() {
        let a = units[i];
        let b = units[(i + 1) % units.len()];
        // tan(E/2) = N·(a×b) / (1 + N·a + N·b + a·b), N = (0, 0, 1)
        let triple = a[0] * b[1] - a[1] * b[0];
        let denom = 1.0 + a[2] + b[2] + a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        total += 2.0 * triple.atan2(denom);
    }
    Ok(total)
}

/// Loop parameters `s` of the polygon vertices, with the noise piece each
/// vertex belongs to. At least [`POINTS_PER_PIECE`] vertices per constant
/// piece; both sides of every discontinuity are included.
fn loop_samples(real: &NoiseRealization) -> Vec<(f64, usize)> {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend_from_slice(&SEGMENT_BREAKS);
    cuts.extend_from_slice(real.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut samples = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let piece = real.piece_index(0.5 * (lo + hi));
        let m = POINTS_PER_PIECE.max(((hi - lo) * MIN_LOOP_POINTS as f64).ceil() as usize);
        for k in 0..=m {
            samples.push((lo + (hi - lo) * k as f64 / m as f64, piece));
        }
    }
    // The polygon closes itself; drop the duplicated start.
    samples.pop();
    samples
}

/// Polygon approximation of a noisy loop.
pub fn noisy_loop_points(spec: &PathSpec, real: &NoiseRealization) -> Vec<ParamPoint> {
    loop_samples(real)
        .into_iter()
        .map(|(s, piece)| real.noisy_point_on(spec, s, piece))
        .collect()
}

/// The ideal loop sampled at the same parameters as
/// [`noisy_loop_points`], so that both polygons share their discretization.
pub fn matched_ideal_points(spec: &PathSpec, real: &NoiseRealization) -> Vec<ParamPoint> {
    loop_samples(real)
        .into_iter()
        .map(|(s, _)| spec.point_unchecked(s))
        .collect()
}

/// Mean-square solid-angle deviation over noise realizations at one
/// fluctuation count.
#[derive(Clone, Debug, PartialEq)]
pub struct SolidAngleStats {
    pub n_fluctuations: u32,
    pub mean_omega: f64,
    /// `⟨(ω − ω_ideal)²⟩`
    pub mean_square_deviation: f64,
    /// `⟨(ω − ⟨ω⟩)²⟩`
    pub variance: f64,
    /// Standard error of `mean_square_deviation`.
    pub std_error: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Solid-angle statistics for Cartesian noise with `N` constant pieces
/// per gate (`τ_step = τ/N`) for each `N` in `n_values`.
pub fn solid_angle_fluctuations(
    spec: &PathSpec,
    model: &NoiseModel,
    tau: f64,
    n_values: &[u32],
    n_realizations: usize,
    seed: u64,
) -> Result<Vec<SolidAngleStats>> {
    let NoiseModel::CartesianRandom { epsilon, .. } = *model else {
        return Err(Error::InvalidArgument(format!(
            "solid-angle fluctuations need a cartesian_random model, got {}",
            model.name()
        )));
    };
    if n_realizations == 0 {
        return Err(Error::InvalidArgument("n_realizations must be >= 1".into()));
    }
    n_values
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument(
                    "fluctuation count must be >= 1".into(),
                ));
            }
            let m = NoiseModel::CartesianRandom {
                epsilon,
                tau_step: tau / n as f64,
            };
            let pairs: Vec<(f64, f64)> = (0..n_realizations as u64)
                .into_par_iter()
                .map(|r| {
                    let real = sample_realization(&m, tau, spec, RealizationSeed::new(seed, r))?;
                    Ok((
                        solid_angle(&noisy_loop_points(spec, &real))?,
                        solid_angle(&matched_ideal_points(spec, &real))?,
                    ))
                })
                .collect::<Result<_>>()?;
            Ok(summarize(n, &pairs, seed))
        })
        .collect()
}

/// `pairs` holds `(ω_noisy, ω_ideal)` per realization, the ideal loop
/// sampled like the noisy one.
fn summarize(n: u32, pairs: &[(f64, f64)], seed: u64) -> SolidAngleStats {
    let omegas: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let k = omegas.len() as f64;
    let mean_omega = omegas.iter().sum::<f64>() / k;
    let dev2: Vec<f64> = pairs.iter().map(|(w, ideal)| (w - ideal).powi(2)).collect();
    let msd = dev2.iter().sum::<f64>() / k;
    let variance = omegas.iter().map(|w| (w - mean_omega).powi(2)).sum::<f64>() / k;
    let std_error = if omegas.len() > 1 {
        (dev2.iter().map(|d| (d - msd).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        0.0
    };
    SolidAngleStats {
        n_fluctuations: n,
        mean_omega,
        mean_square_deviation: msd,
        variance,
        std_error,
        n_realizations: omegas.len(),
        seed,
    }
}
