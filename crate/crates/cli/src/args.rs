use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dctraj_core::baseline::PsoOptions;
use dctraj_core::bcd::BcdOptions;
use dctraj_core::model::{generate_scenario, io, Scenario, ScenarioOverrides, ScheduleFill};
use dctraj_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dctraj", version, about = "Periodic 3D trajectory design for drone cells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random scenario and write it as JSON.
    Generate(GenerateArgs),
    /// Run the block-coordinate descent and write the solution tables.
    Solve(SolveArgs),
    /// Run the static PSO baseline and write its solution tables.
    Baseline(BaselineArgs),
    /// Sweep DC counts and seeds, comparing trajectories with the baseline.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 20)]
    pub users: usize,
    #[arg(long, default_value_t = 5)]
    pub dcs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

/// Where a command takes its scenario from.
#[derive(Debug, Args)]
pub struct ScenarioSource {
    /// Scenario JSON; when absent one is generated from the flags below.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub users: usize,
    #[arg(long, default_value_t = 5)]
    pub dcs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    #[command(flatten)]
    pub bcd: BcdArgs,
    /// Output directory.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    #[command(flatten)]
    pub pso: PsoArgs,
    #[arg(long, default_value = "full")]
    pub schedule_fill: ScheduleFill,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 20)]
    pub users: usize,
    /// DC counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7])]
    pub dcs: Vec<usize>,
    /// Scenario seeds per DC count; run `i` uses `seed + i`.
    #[arg(long, default_value_t = 5)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub overrides: OverrideArgs,
    #[command(flatten)]
    pub bcd: BcdArgs,
    #[command(flatten)]
    pub pso: PsoArgs,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Replacements for scenario parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct OverrideArgs {
    #[arg(long)]
    pub r_bs: Option<f64>,
    #[arg(long)]
    pub num_slots: Option<usize>,
    #[arg(long)]
    pub s_min: Option<usize>,
    #[arg(long)]
    pub n_u: Option<usize>,
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub h_max_rate: Option<f64>,
    /// D2B pathloss bound, dB; `inf` disables it.
    #[arg(long)]
    pub l_db: Option<f64>,
    /// Convergence threshold on the per-slot trajectory change, m.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub h_min: Option<f64>,
    #[arg(long)]
    pub h_init: Option<f64>,
    #[arg(long)]
    pub h_cap: Option<f64>,
}

impl OverrideArgs {
    pub fn to_overrides(&self) -> ScenarioOverrides {
        ScenarioOverrides {
            r_bs: self.r_bs,
            num_slots: self.num_slots,
            s_min: self.s_min,
            n_u: self.n_u,
            v_max: self.v_max,
            h_max_rate: self.h_max_rate,
            l_db: self.l_db,
            epsilon: self.epsilon,
            h_min: self.h_min,
            h_init: self.h_init,
            h_cap: self.h_cap,
        }
    }

    /// Overwrites the given fields of a loaded scenario. User positions are
    /// kept, so `r_bs` must still cover them.
    pub fn apply(&self, s: &mut Scenario) -> Result<()> {
        let o = self.to_overrides();
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field {
                    s.$field = v;
                }
            )*};
        }
        set!(r_bs, num_slots, s_min, n_u, v_max, h_max_rate, l_db, epsilon, h_min, h_init);
        if let Some(v) = o.h_cap {
            s.limits.h_cap = v;
        }
        s.validate()
    }
}

#[derive(Debug, Clone, Args)]
pub struct BcdArgs {
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    #[arg(long, default_value = "full")]
    pub schedule_fill: ScheduleFill,
    /// Cross-check association and scheduling against brute force on
    /// instances small enough to enumerate.
    #[arg(long)]
    pub oracle: bool,
}

impl BcdArgs {
    pub fn options(&self, s: &Scenario) -> BcdOptions {
        BcdOptions {
            max_iterations: self.max_iterations,
            schedule_fill: self.schedule_fill,
            oracle: self.oracle,
            ..BcdOptions::for_scenario(s)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PsoArgs {
    #[arg(long, default_value_t = 40)]
    pub swarm_size: usize,
    #[arg(long, default_value_t = 0.729)]
    pub inertia: f64,
    #[arg(long, default_value_t = 1.494)]
    pub cognitive: f64,
    #[arg(long, default_value_t = 1.494)]
    pub social: f64,
    #[arg(long, default_value_t = 200)]
    pub iterations_per_drone: usize,
    #[arg(long, default_value_t = 10)]
    pub outer_rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub pso_seed: u64,
}

impl PsoArgs {
    pub fn options(&self) -> PsoOptions {
        PsoOptions {
            swarm_size: self.swarm_size,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            iterations_per_drone: self.iterations_per_drone,
            outer_rounds: self.outer_rounds,
            seed: self.pso_seed,
        }
    }
}

impl ScenarioSource {
    pub fn load(&self) -> Result<Scenario> {
        match &self.scenario {
            Some(path) => {
                let mut s = io::load_scenario(path).map_err(|e| match e {
                    Error::Io(err) => Error::Parse(format!("{}: {err}", path.display())),
                    other => other,
                })?;
                self.overrides.apply(&mut s)?;
                Ok(s)
            }
            None => generate_scenario(self.seed, self.users, self.dcs, &self.overrides.to_overrides()),
        }
    }
}
