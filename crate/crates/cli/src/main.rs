use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holonoise::experiments::{run, run_selftest, Experiment, Preset, SweepConfig, Table};
use holonoise::Error;

const CONFIG_HELP: &str = "\
CONFIG FILE
  Flat `key = value` lines with dotted keys; values in TOML syntax.
  Precedence: preset (desk or --fine) < config file < command-line flags.

  seed = 1                         master seed
  realizations = 50                noise realizations per grid point
  threads = 0                      worker threads (0 = all cores)
  output = \"out.csv\"               output path (default: stdout)
  path.phi_max = 1.5707963267948966  loop azimuth span = target solid angle
  evolution.steps_per_unit = 40    integration steps per unit of Ωτ (min 100 per gate)
  evolution.sampling = \"midpoint\"  or \"left_endpoint\"
  grid.k = [1]                     optimal times τ*_k (cartesian default [1, 2, 3, 4])
  grid.time = \"range:5:40:0.5\"     Ωτ            (fid-vs-time)
  grid.eta = \"range:0.05:1:0.05\"   η/Ω           (mono-surface)
  grid.epsilon = \"linspace:0:0.4:9\" ε_η/Ω        (mono-surface)
  grid.gamma_s = \"linspace:0:1:11\" γ/(π/2)       (sphere-surface)
  grid.inv_step = \"logspace:0.05:5:20\"  (Ωτ_step)⁻¹ (sphere-surface, cartesian-sweep)
  grid.n = [1, 2, 3, ...]          fluctuation counts N (solid-angle)
  noise.epsilon = 0.1              fixed amplitude/Ω (fid-vs-time, cartesian-sweep, solid-angle)
  noise.etas = [0.1, 0.2, 0.3]     noisy curves of fid-vs-time
  noise.variant = \"monochromatic\"  or \"monochromatic_real_part\", \"square_wave_probe\"
  noise.initial_phase = 0.0        square-wave initial phase
  noise.complex = false            complex Cartesian offsets

  Grids are arrays or generators: linspace:a:b:n, logspace:a:b:n, range:a:b:step.
  --fine raises realizations to 200 and refines every grid.

OUTPUT
  CSV with a `#` preamble (tool version, config hash, seed, resolved config),
  one header line, data rows; the last column is wall_time_s. Fidelity tables
  end with f,std_error,f_leakage_aware,retained,n_realizations,n_steps,seed.
  cartesian-sweep writes a second table keyed by N next to --out
  (`name.csv` -> `name_by_count.csv`).

EXIT CODES
  0 success, 1 configuration error, 2 numerical contract violation.";

#[derive(Parser, Debug)]
#[command(name = "holonoise", version, about = "Holonomic gate fidelity under parametric noise", after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity against operational time, noiseless and monochromatic noise.
    FidVsTime(Common),
    /// Fidelity over monochromatic noise frequency and amplitude at τ*_k.
    MonoSurface(Common),
    /// Fidelity over angular noise amplitude and step frequency at τ*_k.
    SphereSurface(Common),
    /// Cartesian random noise against step frequency, and by fluctuation count.
    CartesianSweep(Common),
    /// Solid-angle fluctuations against the number of noise pieces.
    SolidAngle(Common),
    /// Oracle cross-checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Realizations per grid point.
    #[arg(long)]
    realizations: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// High-resolution preset (200 realizations, finer grids).
    #[arg(long)]
    fine: bool,
    /// Loop azimuth span, equal to the target solid angle.
    #[arg(long)]
    phi_max: Option<f64>,
    /// Optimal-time indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn resolve(&self, experiment: Experiment) -> Result<SweepConfig, Error> {
        let preset = if self.fine {
            Preset::Fine
        } else {
            Preset::Desk
        };
        let mut cfg = SweepConfig::preset(experiment, preset);
        if let Some(path) = &self.config {
            cfg.load(path)?;
            // A config file may not switch the experiment behind the subcommand's back.
            if cfg.experiment != experiment
                && !(matches!(experiment, Experiment::CartesianVsFreq)
                    && matches!(cfg.experiment, Experiment::CartesianVsCount))
            {
                return Err(Error::Config(format!(
                    "config names experiment '{}' but the subcommand runs '{experiment}'",
                    cfg.experiment
                )));
            }
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.realizations {
            cfg.realizations = v;
        }
        if let Some(v) = &self.out {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = self.phi_max {
            cfg.phi_max = v;
        }
        if let Some(v) = &self.k {
            cfg.k = v.clone();
            if cfg.k.contains(&0) {
                return Err(Error::Config("--k entries must be >= 1".into()));
            }
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn emit(cfg: &SweepConfig, tables: &[Table]) -> Result<(), Error> {
    match &cfg.output {
        Some(path) => {
            for (i, t) in tables.iter().enumerate() {
                let p = if i == 0 {
                    path.clone()
                } else {
                    companion_path(path, "by_count")
                };
                t.write_csv(cfg, &p)?;
                eprintln!("wrote {} ({} rows)", p.display(), t.rows.len());
            }
        }
        None => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", t.to_csv(cfg));
            }
        }
    }
    Ok(())
}

fn sweep(common: &Common, experiment: Experiment) -> Result<(), Error> {
    let cfg = common.resolve(experiment)?;
    let tables = run(&cfg)?;
    emit(&cfg, &tables)
}

fn selftest(seed: u64) -> Result<(), Error> {
    let checks = run_selftest(seed)?;
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Error::Contract(format!(
            "{failed} of {} self-test checks failed",
            checks.len()
        )));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::FidVsTime(c) => sweep(c, Experiment::FidVsTime),
        Command::MonoSurface(c) => sweep(c, Experiment::MonoSurface),
        Command::SphereSurface(c) => sweep(c, Experiment::SphereSurface),
        Command::CartesianSweep(c) => sweep(c, Experiment::CartesianVsFreq),
        Command::SolidAngle(c) => sweep(c, Experiment::SolidAngleVsN),
        Command::Selftest { seed } => selftest(*seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
