//! Seeded parameter sweeps that regenerate the fidelity and solid-angle
//! tables, plus the oracle self-test.

pub mod config;
pub mod grid;
pub mod selftest;
pub mod sweeps;
pub mod table;

pub use config::{Experiment, MonoVariant, Preset, SweepConfig};
pub use grid::Grid;
pub use selftest::{run_selftest, Check};
pub use sweeps::{
    run, run_cartesian_sweeps, run_fid_vs_time, run_mono_surface, run_solid_angle,
    run_sphere_surface, run_sphere_surfaces,
};
pub use table::{strip_wall_time, Cell, Row, Table, TOOL_VERSION};
