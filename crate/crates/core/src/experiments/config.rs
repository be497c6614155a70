//! Sweep configuration.
//!
//! Files are flat `key = value` lines with dotted keys, e.g.
//!
//! ```text
//! seed = 7
//! realizations = 100
//! noise.epsilon = 0.1
//! grid.inv_step = "logspace:0.05:5:20"
//! grid.k = [1, 4]
//! ```
//!
//! Values use TOML syntax (strings quoted, arrays in brackets). Settings
//! are resolved as preset defaults, then the file, then command-line
//! overrides. Unknown keys are rejected.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::path::PathSpec;
use crate::propagator::{EvolutionConfig, SamplingRule, DEFAULT_STEPS_PER_UNIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    FidVsTime,
    MonoSurface,
    SphereSurface,
    CartesianVsFreq,
    CartesianVsCount,
    SolidAngleVsN,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::FidVsTime,
        Experiment::MonoSurface,
        Experiment::SphereSurface,
        Experiment::CartesianVsFreq,
        Experiment::CartesianVsCount,
        Experiment::SolidAngleVsN,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::FidVsTime => "fid_vs_time",
            Experiment::MonoSurface => "mono_surface",
            Experiment::SphereSurface => "sphere_surface",
            Experiment::CartesianVsFreq => "cartesian_vs_freq",
            Experiment::CartesianVsCount => "cartesian_vs_count",
            Experiment::SolidAngleVsN => "solid_angle_vs_N",
        }
    }

    /// Keys that influence this experiment's data; these, and only these,
    /// enter the config hash.
    fn keys(self) -> &'static [&'static str] {
        const COMMON: [&str; 5] = [
            "seed",
            "realizations",
            "path.phi_max",
            "evolution.steps_per_unit",
            "evolution.sampling",
        ];
        match self {
            Experiment::FidVsTime => &[
                COMMON[0],
                COMMON[1],
                COMMON[2],
                COMMON[3],
                COMMON[4],
                "grid.time",
                "noise.epsilon",
                "noise.etas",
                "noise.variant",
                "noise.initial_phase",
            ],
            Experiment::MonoSurface => &[
                COMMON[0],
                COMMON[1],
                COMMON[2],
                COMMON[3],
                COMMON[4],
                "grid.k",
                "grid.eta",
                "grid.epsilon",
                "noise.variant",
                "noise.initial_phase",
            ],
            Experiment::SphereSurface => &[
                COMMON[0],
                COMMON[1],
                COMMON[2],
                COMMON[3],
                COMMON[4],
                "grid.k",
                "grid.gamma_s",
                "grid.inv_step",
            ],
            Experiment::CartesianVsFreq | Experiment::CartesianVsCount => &[
                COMMON[0],
                COMMON[1],
                COMMON[2],
                COMMON[3],
                COMMON[4],
                "grid.k",
                "grid.inv_step",
                "noise.epsilon",
                "noise.complex",
            ],
            Experiment::SolidAngleVsN => &[
                COMMON[0],
                COMMON[1],
                COMMON[2],
                "grid.k",
                "grid.n",
                "noise.epsilon",
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Which smooth probe the monochromatic runs use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoVariant {
    Monochromatic,
    RealPart,
    /// Square wave of half period `π/η`.
    SquareWave,
}

impl MonoVariant {
    pub fn id(self) -> &'static str {
        match self {
            MonoVariant::Monochromatic => "monochromatic",
            MonoVariant::RealPart => "monochromatic_real_part",
            MonoVariant::SquareWave => "square_wave_probe",
        }
    }
}

impl FromStr for MonoVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            MonoVariant::Monochromatic,
            MonoVariant::RealPart,
            MonoVariant::SquareWave,
        ]
        .into_iter()
        .find(|v| v.id() == s)
        .ok_or_else(|| Error::Config(format!("unknown noise.variant '{s}'")))
    }
}

/// Resolution preset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Desk,
    Fine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub realizations: usize,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
    pub output: Option<PathBuf>,
    pub phi_max: f64,
    pub steps_per_unit: usize,
    pub sampling: SamplingRule,
    /// Optimal-time indices `k` for `τ*_k`.
    pub k: Vec<u32>,
    /// `Ωτ`
    pub time_grid: Grid,
    /// `η/Ω`
    pub eta_grid: Grid,
    /// `ε_η/Ω`
    pub epsilon_grid: Grid,
    /// `γ_s = γ/(π/2)`
    pub gamma_grid: Grid,
    /// `(Ωτ_step)⁻¹`
    pub inv_step_grid: Grid,
    /// Fluctuation counts `N`.
    pub n_grid: Vec<u32>,
    /// Fixed noise amplitude where the experiment has one.
    pub epsilon: f64,
    /// Noise frequencies of the noisy time-sweep curves.
    pub etas: Vec<f64>,
    pub variant: MonoVariant,
    pub initial_phase: f64,
    pub complex: bool,
}

pub const KEYS: [&str; 20] = [
    "experiment",
    "seed",
    "realizations",
    "threads",
    "output",
    "path.phi_max",
    "evolution.steps_per_unit",
    "evolution.sampling",
    "grid.k",
    "grid.time",
    "grid.eta",
    "grid.epsilon",
    "grid.gamma_s",
    "grid.inv_step",
    "grid.n",
    "noise.epsilon",
    "noise.etas",
    "noise.variant",
    "noise.initial_phase",
    "noise.complex",
];

fn grid(spec: &str) -> Grid {
    Grid::parse(spec).expect("preset grid")
}

impl SweepConfig {
    pub fn preset(experiment: Experiment, preset: Preset) -> Self {
        let fine = preset == Preset::Fine;
        let k = match experiment {
            Experiment::CartesianVsFreq | Experiment::CartesianVsCount => vec![1, 2, 3, 4],
            _ => vec![1],
        };
        Self {
            experiment,
            seed: 1,
            realizations: if fine { 200 } else { 50 },
            threads: 0,
            output: None,
            phi_max: FRAC_PI_2,
            steps_per_unit: DEFAULT_STEPS_PER_UNIT,
            sampling: SamplingRule::Midpoint,
            k,
            time_grid: grid(if fine {
                "range:5:40:0.1"
            } else {
                "range:5:40:0.5"
            }),
            eta_grid: grid(if fine {
                "range:0.01:1:0.01"
            } else {
                "range:0.05:1:0.05"
            }),
            epsilon_grid: grid(if fine {
                "linspace:0:0.4:21"
            } else {
                "linspace:0:0.4:9"
            }),
            gamma_grid: grid(if fine {
                "linspace:0:1:21"
            } else {
                "linspace:0:1:11"
            }),
            inv_step_grid: grid(if fine {
                "logspace:0.05:5:60"
            } else {
                "logspace:0.05:5:20"
            }),
            n_grid: if fine {
                (1..=100).collect()
            } else {
                vec![
                    1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40, 50, 60, 80, 100,
                ]
            },
            epsilon: 0.1,
            etas: vec![0.1, 0.2, 0.3],
            variant: MonoVariant::Monochromatic,
            initial_phase: 0.0,
            complex: false,
        }
    }

    /// Applies every `key = value` of a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let mut flat = Vec::new();
        flatten("", &toml::Value::Table(table), &mut flat);
        for (key, value) in flat {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn load(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn set(&mut self, key: &str, v: &toml::Value) -> Result<()> {
        let bad = |want: &str| Error::Config(format!("{key}: expected {want}, got {v}"));
        let real = || match v {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(bad("a number")),
        };
        let uint = || match v {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(bad("a non-negative integer")),
        };
        let text = || v.as_str().ok_or_else(|| bad("a string"));
        let grid_value = || -> Result<Grid> {
            match v {
                toml::Value::String(s) => Grid::parse(s),
                toml::Value::Array(a) => Grid::new(
                    a.iter()
                        .map(|x| match x {
                            toml::Value::Float(f) => Ok(*f),
                            toml::Value::Integer(i) => Ok(*i as f64),
                            _ => Err(bad("an array of numbers")),
                        })
                        .collect::<Result<_>>()?,
                ),
                toml::Value::Float(_) | toml::Value::Integer(_) => Grid::new(vec![real()?]),
                _ => Err(bad("an array or a grid string")),
            }
            .map_err(|e| Error::Config(format!("{key}: {}", strip(&e))))
        };
        match key {
            "experiment" => self.experiment = text()?.parse()?,
            "seed" => self.seed = uint()?,
            "realizations" => self.realizations = uint()? as usize,
            "threads" => self.threads = uint()? as usize,
            "output" => self.output = Some(PathBuf::from(text()?)),
            "path.phi_max" => self.phi_max = real()?,
            "evolution.steps_per_unit" => self.steps_per_unit = uint()? as usize,
            "evolution.sampling" => {
                self.sampling = match text()? {
                    "midpoint" => SamplingRule::Midpoint,
                    "left_endpoint" => SamplingRule::LeftEndpoint,
                    _ => return Err(bad("\"midpoint\" or \"left_endpoint\"")),
                }
            }
            "grid.k" => self.k = grid_value()?.as_counts(key)?,
            "grid.time" => self.time_grid = grid_value()?,
            "grid.eta" => self.eta_grid = grid_value()?,
            "grid.epsilon" => self.epsilon_grid = grid_value()?,
            "grid.gamma_s" => self.gamma_grid = grid_value()?,
            "grid.inv_step" => self.inv_step_grid = grid_value()?,
            "grid.n" => self.n_grid = grid_value()?.as_counts(key)?,
            "noise.epsilon" => self.epsilon = real()?,
            "noise.etas" => self.etas = grid_value()?.values().to_vec(),
            "noise.variant" => self.variant = text()?.parse()?,
            "noise.initial_phase" => self.initial_phase = real()?,
            "noise.complex" => self.complex = v.as_bool().ok_or_else(|| bad("true or false"))?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Checks value domains; every violation is a config error.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.realizations == 0 {
            return fail("realizations must be >= 1".into());
        }
        if self.steps_per_unit == 0 {
            return fail("evolution.steps_per_unit must be >= 1".into());
        }
        PathSpec::new(self.phi_max, 1.0).map_err(|e| Error::Config(strip(&e)))?;
        if self.k.is_empty() {
            return fail("grid.k is empty".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return fail(format!("noise.epsilon must be >= 0, got {}", self.epsilon));
        }
        if !self.initial_phase.is_finite() {
            return fail("noise.initial_phase must be finite".into());
        }
        match self.experiment {
            Experiment::FidVsTime => {
                positive("grid.time", self.time_grid.first())?;
                if self.etas.iter().any(|e| e.is_nan() || *e < 0.0) {
                    return fail("noise.etas must be >= 0".into());
                }
            }
            Experiment::MonoSurface => {
                let needs_positive = self.variant == MonoVariant::SquareWave;
                if self.eta_grid.first() < 0.0 || (needs_positive && self.eta_grid.first() == 0.0) {
                    return fail("grid.eta must be >= 0 (> 0 for the square wave)".into());
                }
                if self.epsilon_grid.first() < 0.0 {
                    return fail("grid.epsilon must be >= 0".into());
                }
            }
            Experiment::SphereSurface => {
                if self.gamma_grid.first() < 0.0 || self.gamma_grid.last() > 1.0 {
                    return fail("grid.gamma_s must lie in [0, 1]".into());
                }
                positive("grid.inv_step", self.inv_step_grid.first())?;
            }
            Experiment::CartesianVsFreq | Experiment::CartesianVsCount => {
                positive("grid.inv_step", self.inv_step_grid.first())?;
            }
            Experiment::SolidAngleVsN => {
                if self.n_grid.is_empty() {
                    return fail("grid.n is empty".into());
                }
            }
        }
        if self.variant == MonoVariant::SquareWave
            && self.experiment == Experiment::FidVsTime
            && self.etas.iter().any(|e| *e <= 0.0)
        {
            return fail("noise.etas must be > 0 for the square wave".into());
        }
        Ok(())
    }

    pub fn path_spec(&self) -> PathSpec {
        PathSpec::new(self.phi_max, 1.0).expect("validated phi_max")
    }

    pub fn evolution(&self, tau: f64) -> EvolutionConfig {
        EvolutionConfig::new(tau)
            .with_steps_per_unit(self.steps_per_unit)
            .with_sampling(self.sampling)
    }

    fn value_of(&self, key: &str) -> String {
        let list = |v: &[u32]| {
            format!(
                "[{}]",
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        };
        match key {
            "experiment" => format!("\"{}\"", self.experiment),
            "seed" => self.seed.to_string(),
            "realizations" => self.realizations.to_string(),
            "threads" => self.threads.to_string(),
            "output" => format!(
                "\"{}\"",
                self.output
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default()
            ),
            "path.phi_max" => format!("{:?}", self.phi_max),
            "evolution.steps_per_unit" => self.steps_per_unit.to_string(),
            "evolution.sampling" => match self.sampling {
                SamplingRule::Midpoint => "\"midpoint\"".into(),
                SamplingRule::LeftEndpoint => "\"left_endpoint\"".into(),
            },
            "grid.k" => list(&self.k),
            "grid.time" => self.time_grid.to_string(),
            "grid.eta" => self.eta_grid.to_string(),
            "grid.epsilon" => self.epsilon_grid.to_string(),
            "grid.gamma_s" => self.gamma_grid.to_string(),
            "grid.inv_step" => self.inv_step_grid.to_string(),
            "grid.n" => list(&self.n_grid),
            "noise.epsilon" => format!("{:?}", self.epsilon),
            "noise.etas" => format!("{:?}", self.etas),
            "noise.variant" => format!("\"{}\"", self.variant.id()),
            "noise.initial_phase" => format!("{:?}", self.initial_phase),
            "noise.complex" => self.complex.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Resolved `key = value` lines that determine the data, in a fixed
    /// order. Re-reading them yields the same configuration.
    pub fn canonical(&self) -> String {
        let mut s = format!("experiment = {}\n", self.value_of("experiment"));
        for key in self.experiment.keys() {
            s.push_str(&format!("{key} = {}\n", self.value_of(key)));
        }
        s
    }

    /// SHA-256 of [`SweepConfig::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

fn positive(key: &str, first: f64) -> Result<()> {
    if first > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{key} values must be > 0")))
    }
}

/// Error message without the variant prefix.
fn strip(e: &Error) -> String {
    match e {
        Error::Config(m) | Error::InvalidArgument(m) => m.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<(String, toml::Value)>) {
    match v {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}
