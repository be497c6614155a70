//! Time-ordered evolution along a (noisy) loop.
//!
//! The scaled interval `[0, 1]` is cut at the loop's segment boundaries and
//! at every noise breakpoint; each resulting interval gets its share of the
//! step budget, so no step ever straddles a discontinuity. The propagator is
//! the ordered product of closed-form step exponentials with later steps
//! multiplied on the left.

use crate::error::{Error, Result};
use crate::linalg::{step_exp, CMat};
use crate::model::{polar_to_cartesian, ParamPoint};
use crate::noise::NoiseRealization;
use crate::path::{PathSpec, Segment, SEGMENT_BREAKS};
use crate::tolerance::TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingRule {
    /// Hamiltonian sampled at the centre of each step (second order).
    Midpoint,
    /// Hamiltonian sampled at the start of each step.
    LeftEndpoint,
}

/// Minimum total step count for any evolution.
pub const MIN_STEPS: usize = 100;
pub const DEFAULT_STEPS_PER_UNIT: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    /// Operational time `τ` in units of `1/Ω`.
    pub tau: f64,
    /// Steps per unit of `Ωτ`.
    pub steps_per_unit: usize,
    pub sampling: SamplingRule,
}

impl EvolutionConfig {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            steps_per_unit: DEFAULT_STEPS_PER_UNIT,
            sampling: SamplingRule::Midpoint,
        }
    }

    pub fn with_steps_per_unit(mut self, steps_per_unit: usize) -> Self {
        self.steps_per_unit = steps_per_unit;
        self
    }

    pub fn with_sampling(mut self, sampling: SamplingRule) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if self.steps_per_unit == 0 {
            return Err(Error::InvalidArgument("steps_per_unit must be >= 1".into()));
        }
        Ok(())
    }

    /// Step budget `max(100, steps_per_unit · ⌈Ωτ⌉)` over the full loop.
    pub fn target_steps(&self, omega_amp: f64) -> usize {
        let units = (omega_amp * self.tau).ceil().max(1.0) as usize;
        (self.steps_per_unit * units).max(MIN_STEPS)
    }
}

/// Result of a time-ordered evolution.
#[derive(Clone, Copy, Debug)]
pub struct Propagator {
    pub v: CMat,
    pub tau: f64,
    pub n_steps: usize,
    pub unitarity_defect: f64,
}

impl Propagator {
    fn finish(v: CMat, tau: f64, n_steps: usize) -> Result<Self> {
        let unitarity_defect = v.unitarity_defect();
        if unitarity_defect.is_nan() || unitarity_defect > TOL.propagator_unitarity {
            return Err(Error::Contract(format!(
                "propagator unitarity defect {unitarity_defect:e} exceeds {:e}",
                TOL.propagator_unitarity
            )));
        }
        Ok(Self {
            v,
            tau,
            n_steps,
            unitarity_defect,
        })
    }
}

/// Evolve over the full loop.
pub fn evolve(
    spec: &PathSpec,
    real: Option<&NoiseRealization>,
    cfg: &EvolutionConfig,
) -> Result<Propagator> {
    evolve_range(spec, real, cfg, 0.0, 1.0)
}

/// Evolve over the scaled-time window `[s0, s1]`. The step density is the
/// one the full loop would use.
pub fn evolve_range(
    spec: &PathSpec,
    real: Option<&NoiseRealization>,
    cfg: &EvolutionConfig,
    s0: f64,
    s1: f64,
) -> Result<Propagator> {
    let mut cuts: Vec<f64> = SEGMENT_BREAKS.to_vec();
    if let Some(r) = real {
        cuts.extend_from_slice(r.breakpoints());
    }
    let density = cfg.target_steps(spec.omega_amp);
    ordered_product(cfg, density, &cuts, s0, s1, |s, mid| match real {
        Some(r) => r.noisy_point_on(spec, s, r.piece_index(mid)),
        None => {
            let (theta, phi) = spec.angles_on(Segment::of(mid), s);
            polar_to_cartesian(spec.omega_amp, theta, phi)
        }
    })
}

/// Evolve along an arbitrary parameter trajectory `point(s)` over `[0, 1]`,
/// cutting the grid at `breakpoints`. The step budget assumes a unit
/// amplitude.
pub fn evolve_along<F>(point: F, breakpoints: &[f64], cfg: &EvolutionConfig) -> Result<Propagator>
where
    F: Fn(f64) -> ParamPoint,
{
    ordered_product(cfg, cfg.target_steps(1.0), breakpoints, 0.0, 1.0, |s, _| {
        point(s)
    })
}

/// `point(s, interval_mid)` is sampled per step; the interval midpoint lets
/// piecewise trajectories pick the correct side of a cut.
fn ordered_product<F>(
    cfg: &EvolutionConfig,
    density: usize,
    breakpoints: &[f64],
    s0: f64,
    s1: f64,
    point: F,
) -> Result<Propagator>
where
    F: Fn(f64, f64) -> ParamPoint,
{
    cfg.validate()?;
    if !(0.0 <= s0 && s0 <= s1 && s1 <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid window [{s0}, {s1}]"
        )));
    }
    let cuts = grid_cuts(breakpoints, s0, s1);
    let density = density as f64;

    let mut v = CMat::identity(4);
    let mut n_steps = 0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let m = ((len * density).ceil() as usize).max(1);
        let ds = len / m as f64;
        let dt = cfg.tau * ds;
        let mid = 0.5 * (lo + hi);
        for k in 0..m {
            let s = match cfg.sampling {
                SamplingRule::Midpoint => lo + (k as f64 + 0.5) * ds,
                SamplingRule::LeftEndpoint => lo + k as f64 * ds,
            };
            v = step_exp(&point(s, mid), dt) * v;
        }
        n_steps += m;
    }
    Propagator::finish(v, cfg.tau * (s1 - s0), n_steps)
}

/// Breakpoints inside `[s0, s1]` plus the window ends, sorted and deduplicated.
fn grid_cuts(breakpoints: &[f64], s0: f64, s1: f64) -> Vec<f64> {
    let mut cuts = vec![s0, s1];
    cuts.extend(breakpoints.iter().copied().filter(|&b| s0 < b && b < s1));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Noiseless propagators of the three loop segments.
pub fn evolve_segments(spec: &PathSpec, cfg: &EvolutionConfig) -> Result<[Propagator; 3]> {
    let mut out = Vec::with_capacity(3);
    for seg in Segment::ALL {
        let (lo, hi) = seg.range();
        out.push(evolve_range(spec, None, cfg, lo, hi)?);
    }
    Ok([out[0], out[1], out[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_reference;
    use crate::model::hamiltonian;
    use crate::noise::{sample_realization, NoiseModel};
    use crate::path::optimal_time;

    #[test]
    fn segments_compose_to_full_loop() {
        let spec = PathSpec::default();
        let cfg = EvolutionConfig::new(optimal_time(1).unwrap());
        let [u1, u2, u3] = evolve_segments(&spec, &cfg).unwrap();
        let full = evolve(&spec, None, &cfg).unwrap();
        assert!((u3.v * u2.v * u1.v).max_diff(&full.v) < 1e-9);
        assert!(u1.v.unitarity_defect() < 1e-10);
    }

    #[test]
    fn windows_compose_when_grid_contains_cut() {
        let spec = PathSpec::default();
        let cfg = EvolutionConfig::new(23.0);
        let model = NoiseModel::CartesianRandom {
            epsilon: 0.1,
            tau_step: 1.0,
        };
        let real = sample_realization(&model, cfg.tau, &spec, 4).unwrap();
        let cut = real.breakpoints()[7];
        let a = evolve_range(&spec, Some(&real), &cfg, 0.0, cut).unwrap();
        let b = evolve_range(&spec, Some(&real), &cfg, cut, 1.0).unwrap();
        let full = evolve(&spec, Some(&real), &cfg).unwrap();
        assert!((b.v * a.v).max_diff(&full.v) < 1e-9);
    }

    #[test]
    fn silent_sphere_noise_matches_segment_propagators() {
        let spec = PathSpec::default();
        let cfg = EvolutionConfig::new(optimal_time(1).unwrap());
        let model = NoiseModel::SphereAngular {
            gamma: 0.0,
            tau_step: 0.5,
        };
        let real = sample_realization(&model, cfg.tau, &spec, 1).unwrap();
        let segs = evolve_segments(&spec, &cfg).unwrap();
        for (seg, u) in Segment::ALL.iter().zip(segs.iter()) {
            let (lo, hi) = seg.range();
            let sub = evolve_range(&spec, Some(&real), &cfg, lo, hi).unwrap();
            // Extra cuts change the step layout only; both converge to U_i.
            assert!(sub.v.max_diff(&u.v) < 1e-4);
        }
        // Sub-segments with the same grid compose exactly.
        let cuts: Vec<f64> = real
            .breakpoints()
            .iter()
            .copied()
            .filter(|&b| b < 1.0 / 3.0)
            .collect();
        let mut prod = CMat::identity(4);
        let mut lo = 0.0;
        for &b in cuts.iter().chain(std::iter::once(&(1.0 / 3.0))) {
            prod = evolve_range(&spec, Some(&real), &cfg, lo, b).unwrap().v * prod;
            lo = b;
        }
        let whole = evolve_range(&spec, Some(&real), &cfg, 0.0, 1.0 / 3.0).unwrap();
        assert!(prod.max_diff(&whole.v) < 1e-9);
    }

    #[test]
    fn constant_hamiltonian_oracle() {
        let p = ParamPoint::real(0.0, 0.0, 1.0);
        for tau in [0.5, 12.0, 75.0] {
            let v = evolve_along(|_| p, &[], &EvolutionConfig::new(tau)).unwrap();
            let reference = expm_reference(&hamiltonian(&p), tau).unwrap();
            assert!(v.v.max_diff(&reference) < 1e-9);
        }
    }

    #[test]
    fn midpoint_rule_is_second_order_for_smooth_noise() {
        let spec = PathSpec::default();
        let tau = 20.0;
        let real =
            crate::noise::NoiseRealization::monochromatic(0.3, 0.1, [0.1, 1.2, 2.5], false, tau);
        let run = |spu| {
            evolve(
                &spec,
                Some(&real),
                &EvolutionConfig::new(tau).with_steps_per_unit(spu),
            )
            .unwrap()
            .v
        };
        let exact = run(1280);
        let e10 = run(10).max_diff(&exact);
        let e20 = run(20).max_diff(&exact);
        let e40 = run(40).max_diff(&exact);
        assert!(e10 / e20 > 3.0, "ratio {}", e10 / e20);
        assert!(e20 / e40 > 3.0, "ratio {}", e20 / e40);
        assert!(run(20).max_diff(&run(10)) / run(40).max_diff(&run(20)) >= 2.0);
    }

    #[test]
    fn left_endpoint_converges_to_same_limit() {
        let spec = PathSpec::default();
        let tau = 15.0;
        let real =
            crate::noise::NoiseRealization::monochromatic(0.2, 0.1, [0.3, 0.0, 4.0], true, tau);
        let mid = evolve(
            &spec,
            Some(&real),
            &EvolutionConfig::new(tau).with_steps_per_unit(400),
        )
        .unwrap();
        let left = |spu| {
            let cfg = EvolutionConfig::new(tau)
                .with_steps_per_unit(spu)
                .with_sampling(SamplingRule::LeftEndpoint);
            evolve(&spec, Some(&real), &cfg).unwrap().v.max_diff(&mid.v)
        };
        let (e1, e2) = (left(100), left(400));
        assert!(e2 < e1 / 3.0);
        assert!(e2 < 1e-2);
    }

    #[test]
    fn step_budget() {
        assert_eq!(EvolutionConfig::new(1.0).target_steps(1.0), 100);
        assert_eq!(EvolutionConfig::new(18.25).target_steps(1.0), 40 * 19);
        let spec = PathSpec::default();
        let p = evolve(&spec, None, &EvolutionConfig::new(18.25)).unwrap();
        assert!(p.n_steps >= 760);
        assert!(p.unitarity_defect <= 1e-8);
    }

    #[test]
    fn invalid_config() {
        let spec = PathSpec::default();
        assert!(evolve(&spec, None, &EvolutionConfig::new(-1.0)).is_err());
        assert!(evolve(
            &spec,
            None,
            &EvolutionConfig::new(1.0).with_steps_per_unit(0)
        )
        .is_err());
    }
}
