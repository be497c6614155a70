//! Parametric noise models and sampled noisy trajectories.
//!
//! A [`NoiseRealization`] is one draw of a [`NoiseModel`] for a given
//! operational time. Piecewise-constant models publish the scaled times
//! where the offset jumps so the propagator grid can align with them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{polar_to_cartesian, ParamPoint};
use crate::path::{PathSpec, Segment};
use crate::rng::{CounterRng, RealizationSeed, Stream};

/// Noise models, all amplitudes in units of `Ω` and times in units of `1/Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// `ε e^{i(ηt + φ_c)}` on each component, random phases `φ_c`.
    Monochromatic { eta: f64, epsilon: f64 },
    /// `ε cos(ηt + φ_c)`: amplitude-only version of the above.
    MonochromaticRealPart { eta: f64, epsilon: f64 },
    /// `±ε` square wave of the given half period on each component, with a
    /// common initial phase plus a random per-component phase.
    SquareWaveProbe {
        half_period: f64,
        initial_phase: f64,
        epsilon: f64,
    },
    /// Random step offsets in `[−γ, γ]` of the angle held constant on each
    /// loop segment, redrawn every `tau_step`.
    SphereAngular { gamma: f64, tau_step: f64 },
    /// Real offsets in `[−ε, ε]` per component, piecewise constant on
    /// windows of length `tau_step`.
    CartesianRandom { epsilon: f64, tau_step: f64 },
    /// As [`NoiseModel::CartesianRandom`] with independent real and
    /// imaginary parts.
    CartesianRandomComplex { epsilon: f64, tau_step: f64 },
}

impl NoiseModel {
    /// Model that leaves the loop untouched.
    pub fn silent() -> Self {
        NoiseModel::Monochromatic {
            eta: 0.0,
            epsilon: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Monochromatic { .. } => "monochromatic",
            NoiseModel::MonochromaticRealPart { .. } => "monochromatic_real_part",
            NoiseModel::SquareWaveProbe { .. } => "square_wave_probe",
            NoiseModel::SphereAngular { .. } => "sphere_angular",
            NoiseModel::CartesianRandom { .. } => "cartesian_random",
            NoiseModel::CartesianRandomComplex { .. } => "cartesian_random_complex",
        }
    }

    /// Short human-readable descriptor with parameters.
    pub fn describe(&self) -> String {
        match *self {
            NoiseModel::Monochromatic { eta, epsilon }
            | NoiseModel::MonochromaticRealPart { eta, epsilon } => {
                format!("{}(eta={eta},epsilon={epsilon})", self.name())
            }
            NoiseModel::SquareWaveProbe {
                half_period,
                initial_phase,
                epsilon,
            } => format!(
                "{}(half_period={half_period},initial_phase={initial_phase},epsilon={epsilon})",
                self.name()
            ),
            NoiseModel::SphereAngular { gamma, tau_step } => {
                format!("{}(gamma={gamma},tau_step={tau_step})", self.name())
            }
            NoiseModel::CartesianRandom { epsilon, tau_step }
            | NoiseModel::CartesianRandomComplex { epsilon, tau_step } => {
                format!("{}(epsilon={epsilon},tau_step={tau_step})", self.name())
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            NoiseModel::Monochromatic { epsilon, .. }
            | NoiseModel::MonochromaticRealPart { epsilon, .. }
            | NoiseModel::SquareWaveProbe { epsilon, .. }
            | NoiseModel::CartesianRandom { epsilon, .. }
            | NoiseModel::CartesianRandomComplex { epsilon, .. } => epsilon,
            NoiseModel::SphereAngular { gamma, .. } => gamma,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.amplitude() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidArgument(format!(
                "{}: {what} = {v}",
                self.name()
            )))
        };
        let amp = self.amplitude();
        if !(amp >= 0.0 && amp.is_finite()) {
            return bad("amplitude must be >= 0", amp);
        }
        match *self {
            NoiseModel::Monochromatic { eta, .. }
            | NoiseModel::MonochromaticRealPart { eta, .. } => {
                if !eta.is_finite() {
                    return bad("eta must be finite", eta);
                }
            }
            NoiseModel::SquareWaveProbe {
                half_period,
                initial_phase,
                ..
            } => {
                if !(half_period > 0.0 && half_period.is_finite()) {
                    return bad("half_period must be > 0", half_period);
                }
                if !initial_phase.is_finite() {
                    return bad("initial_phase must be finite", initial_phase);
                }
            }
            NoiseModel::SphereAngular { tau_step, .. }
            | NoiseModel::CartesianRandom { tau_step, .. }
            | NoiseModel::CartesianRandomComplex { tau_step, .. } => {
                if !(tau_step > 0.0 && tau_step.is_finite()) {
                    return bad("tau_step must be > 0", tau_step);
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Offsets {
    Smooth {
        eta: f64,
        epsilon: f64,
        phases: [f64; 3],
        real_part: bool,
    },
    /// One Cartesian offset per piece.
    Pieces(Vec<[C64; 3]>),
    /// Per piece: the loop segment it belongs to and the offset of the
    /// segment's constant angle.
    Angles(Vec<(Segment, f64)>),
}

/// One sampled noisy trajectory `r_n(s) = r(s) + ε(s)` for a fixed
/// operational time.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRealization {
    offsets: Offsets,
    /// Interior scaled times where the offset is discontinuous, sorted.
    breakpoints: Vec<f64>,
    tau: f64,
    seed: RealizationSeed,
    model: NoiseModel,
}

impl NoiseRealization {
    /// Monochromatic realization with explicitly chosen phases.
    pub fn monochromatic(
        eta: f64,
        epsilon: f64,
        phases: [f64; 3],
        real_part: bool,
        tau: f64,
    ) -> Self {
        let model = if real_part {
            NoiseModel::MonochromaticRealPart { eta, epsilon }
        } else {
            NoiseModel::Monochromatic { eta, epsilon }
        };
        Self {
            offsets: Offsets::Smooth {
                eta,
                epsilon,
                phases,
                real_part,
            },
            breakpoints: Vec::new(),
            tau,
            seed: RealizationSeed::new(0, 0),
            model,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn seed(&self) -> RealizationSeed {
        self.seed
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    /// Number of constant pieces (1 for smooth models).
    pub fn piece_count(&self) -> usize {
        self.breakpoints.len() + 1
    }

    /// Index of the piece containing `s`; pieces are closed on the left.
    pub fn piece_index(&self, s: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= s)
    }

    /// Scaled-time interval of piece `i`.
    pub fn piece_range(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
        let hi = self.breakpoints.get(i).copied().unwrap_or(1.0);
        (lo, hi)
    }

    /// Noisy point at `s`, using the offset of piece `piece`. Lets callers
    /// evaluate either side of a discontinuity.
    pub fn noisy_point_on(&self, spec: &PathSpec, s: f64, piece: usize) -> ParamPoint {
        match &self.offsets {
            Offsets::Smooth { .. } => spec.point_unchecked(s) + self.smooth_offset(s),
            Offsets::Pieces(values) => {
                spec.point_unchecked(s) + ParamPoint::from_components(values[piece])
            }
            Offsets::Angles(pieces) => {
                let (segment, xi) = pieces[piece];
                let (theta, phi) = spec.angles_on(segment, s);
                match segment {
                    Segment::Descent | Segment::Ascent => {
                        polar_to_cartesian(spec.omega_amp, theta, phi + xi)
                    }
                    Segment::Equator => polar_to_cartesian(spec.omega_amp, theta + xi, phi),
                }
            }
        }
    }

    /// Offset vector `ε(s)` relative to the ideal loop.
    pub fn offset(&self, spec: &PathSpec, s: f64) -> ParamPoint {
        match &self.offsets {
            Offsets::Smooth { .. } => self.smooth_offset(s),
            Offsets::Pieces(values) => ParamPoint::from_components(values[self.piece_index(s)]),
            Offsets::Angles(_) => {
                self.noisy_point_on(spec, s, self.piece_index(s)) - spec.point_unchecked(s)
            }
        }
    }

    fn smooth_offset(&self, s: f64) -> ParamPoint {
        let Offsets::Smooth {
            eta,
            epsilon,
            phases,
            real_part,
        } = self.offsets
        else {
            unreachable!()
        };
        let c = phases.map(|phase| {
            let arg = eta * self.tau * s + phase;
            if real_part {
                C64::new(epsilon * arg.cos(), 0.0)
            } else {
                C64::from_polar(epsilon, arg)
            }
        });
        ParamPoint::from_components(c)
    }
}

/// `noisy_point = ideal_point + offset`, evaluated on the piece containing `s`.
pub fn noisy_point(real: &NoiseRealization, spec: &PathSpec, s: f64) -> Result<ParamPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "scaled time {s} outside [0, 1]"
        )));
    }
    Ok(real.noisy_point_on(spec, s, real.piece_index(s)))
}

/// Slack used when flooring ratios that are integral up to round-off.
const RATIO_SLACK: f64 = 1e-9;

/// Draw one realization of `model` for operational time `tau`.
pub fn sample_realization(
    model: &NoiseModel,
    tau: f64,
    spec: &PathSpec,
    seed: impl Into<RealizationSeed>,
) -> Result<NoiseRealization> {
    let _ = spec;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "operational time must be > 0, got {tau}"
        )));
    }
    model.validate()?;
    let seed = seed.into();
    let rng = CounterRng::new(seed, Stream::Noise);

    let (offsets, breakpoints) = match *model {
        NoiseModel::Monochromatic { eta, epsilon }
        | NoiseModel::MonochromaticRealPart { eta, epsilon } => {
            let phases = [0u64, 1, 2].map(|c| rng.uniform(0.0, TAU, c, 0));
            let real_part = matches!(model, NoiseModel::MonochromaticRealPart { .. });
            (
                Offsets::Smooth {
                    eta,
                    epsilon,
                    phases,
                    real_part,
                },
                Vec::new(),
            )
        }
        NoiseModel::SquareWaveProbe {
            half_period,
            initial_phase,
            epsilon,
        } => square_wave(&rng, half_period, initial_phase, epsilon, tau),
        NoiseModel::SphereAngular { gamma, tau_step } => {
            sphere_angular(&rng, gamma, tau_step, tau)?
        }
        NoiseModel::CartesianRandom { epsilon, tau_step } => {
            cartesian(&rng, epsilon, tau_step, tau, false)
        }
        NoiseModel::CartesianRandomComplex { epsilon, tau_step } => {
            cartesian(&rng, epsilon, tau_step, tau, true)
        }
    };
    Ok(NoiseRealization {
        offsets,
        breakpoints,
        tau,
        seed,
        model: *model,
    })
}

fn cartesian(
    rng: &CounterRng,
    epsilon: f64,
    tau_step: f64,
    tau: f64,
    complex: bool,
) -> (Offsets, Vec<f64>) {
    // Windows are aligned to t = j·tau_step from the start of the gate.
    let pieces = ((tau / tau_step) - RATIO_SLACK).ceil().max(1.0) as usize;
    let breakpoints: Vec<f64> = (1..pieces).map(|j| j as f64 * tau_step / tau).collect();
    let values = (0..pieces)
        .map(|j| {
            [0u64, 1, 2].map(|c| {
                let re = rng.symmetric(epsilon, c, j as u64);
                let im = if complex {
                    rng.symmetric(epsilon, c + 3, j as u64)
                } else {
                    0.0
                };
                C64::new(re, im)
            })
        })
        .collect();
    (Offsets::Pieces(values), breakpoints)
}

fn sphere_angular(
    rng: &CounterRng,
    gamma: f64,
    tau_step: f64,
    tau: f64,
) -> Result<(Offsets, Vec<f64>)> {
    let segment_time = tau / 3.0;
    let n = (segment_time / tau_step + RATIO_SLACK).floor() as usize;
    if n == 0 {
        return Err(Error::NoiseStepExceedsSegment {
            segment_time,
            step: tau_step,
        });
    }
    let ds = tau_step / tau;
    let mut breakpoints = Vec::with_capacity(3 * n);
    let mut pieces = Vec::with_capacity(3 * n);
    for segment in Segment::ALL {
        let (start, _) = segment.range();
        if segment != Segment::Descent {
            breakpoints.push(start);
        }
        // The last sub-segment absorbs the remainder of the segment.
        for j in 1..n {
            breakpoints.push(start + j as f64 * ds);
        }
        for j in 0..n {
            pieces.push((
                segment,
                rng.symmetric(gamma, segment.index() as u64, j as u64),
            ));
        }
    }
    Ok((Offsets::Angles(pieces), breakpoints))
}

fn square_wave(
    rng: &CounterRng,
    half_period: f64,
    initial_phase: f64,
    epsilon: f64,
    tau: f64,
) -> (Offsets, Vec<f64>) {
    // Component c is ε·sgn cos(π t / half_period + initial_phase + φ_c) and
    // flips where the argument crosses π/2 + mπ.
    let phases = [0u64, 1, 2].map(|c| initial_phase + rng.uniform(0.0, TAU, c, 0));
    let mut breakpoints = Vec::new();
    for &phase in &phases {
        let first = ((phase - PI / 2.0) / PI).floor() as i64;
        let mut m = first;
        loop {
            let t = half_period * (PI / 2.0 + m as f64 * PI - phase) / PI;
            if t >= tau {
                break;
            }
            if t > 0.0 {
                breakpoints.push(t / tau);
            }
            m += 1;
        }
    }
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let value_at = |s: f64| {
        phases.map(|phase| {
            let arg = PI * s * tau / half_period + phase;
            C64::new(if arg.cos() >= 0.0 { epsilon } else { -epsilon }, 0.0)
        })
    };
    let mut values = Vec::with_capacity(breakpoints.len() + 1);
    let mut lo = 0.0;
    for &b in breakpoints.iter().chain(std::iter::once(&1.0)) {
        values.push(value_at(0.5 * (lo + b)));
        lo = b;
    }
    (Offsets::Pieces(values), breakpoints)
}
