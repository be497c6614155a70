//! Meridian–equator–meridian loops on the parameter sphere.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::model::{polar_to_cartesian, ParamPoint};

/// Scaled-time boundaries between the three loop segments.
pub const SEGMENT_BREAKS: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];

/// Which of the three loop segments a scaled time falls in, and the
/// constant angle on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    /// North pole to equator along `φ = 0`.
    Descent,
    /// Along the equator from `φ = 0` to `φ = phi_max`.
    Equator,
    /// Equator back to the pole along `φ = phi_max`.
    Ascent,
}

impl Segment {
    pub const ALL: [Segment; 3] = [Segment::Descent, Segment::Equator, Segment::Ascent];

    pub fn index(self) -> usize {
        match self {
            Segment::Descent => 0,
            Segment::Equator => 1,
            Segment::Ascent => 2,
        }
    }

    pub fn of(s: f64) -> Segment {
        if s < SEGMENT_BREAKS[0] {
            Segment::Descent
        } else if s < SEGMENT_BREAKS[1] {
            Segment::Equator
        } else {
            Segment::Ascent
        }
    }

    /// Scaled-time interval `[start, end]` covered by the segment.
    pub fn range(self) -> (f64, f64) {
        match self {
            Segment::Descent => (0.0, SEGMENT_BREAKS[0]),
            Segment::Equator => (SEGMENT_BREAKS[0], SEGMENT_BREAKS[1]),
            Segment::Ascent => (SEGMENT_BREAKS[1], 1.0),
        }
    }
}

/// Ideal loop schedule: the equator arc spans `[0, phi_max]` and each
/// segment takes one third of the scaled time at constant angular speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSpec {
    pub phi_max: f64,
    pub omega_amp: f64,
}

impl Default for PathSpec {
    fn default() -> Self {
        Self {
            phi_max: FRAC_PI_2,
            omega_amp: 1.0,
        }
    }
}

impl PathSpec {
    pub fn new(phi_max: f64, omega_amp: f64) -> Result<Self> {
        if !(omega_amp > 0.0 && omega_amp.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega_amp must be positive, got {omega_amp}"
            )));
        }
        if !phi_max.is_finite() {
            return Err(Error::InvalidArgument("phi_max must be finite".into()));
        }
        Ok(Self { phi_max, omega_amp })
    }

    /// Polar angles `(ϑ(s), φ(s))` without range checking.
    pub fn angles(&self, s: f64) -> (f64, f64) {
        self.angles_on(Segment::of(s), s)
    }

    /// Angles from the formula of `segment`, extended to any `s`.
    pub fn angles_on(&self, segment: Segment, s: f64) -> (f64, f64) {
        match segment {
            Segment::Descent => (1.5 * PI * s, 0.0),
            Segment::Equator => (FRAC_PI_2, 3.0 * self.phi_max * (s - SEGMENT_BREAKS[0])),
            Segment::Ascent => (1.5 * PI * (1.0 - s), self.phi_max),
        }
    }

    pub(crate) fn point_unchecked(&self, s: f64) -> ParamPoint {
        let (theta, phi) = self.angles(s);
        polar_to_cartesian(self.omega_amp, theta, phi)
    }
}

pub fn ideal_point(spec: &PathSpec, s: f64) -> Result<ParamPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "scaled time {s} outside [0, 1]"
        )));
    }
    Ok(spec.point_unchecked(s))
}

/// Dimensionless `Ωτ*_k = (3π/2)√(16k² − 1)` at which the noiseless
/// `phi_max = π/2` loop reproduces the holonomy exactly.
pub fn optimal_time(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "optimal time index k must be >= 1".into(),
        ));
    }
    let k = k as f64;
    Ok(1.5 * PI * (16.0 * k * k - 1.0).sqrt())
}

/// The wedge bounded by two meridians and the equator encloses a solid
/// angle equal to its equatorial arc.
pub fn ideal_solid_angle(spec: &PathSpec) -> f64 {
    spec.phi_max
}
