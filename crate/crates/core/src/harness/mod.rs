//! Experiment orchestration: configuration, replica management, scaling
//! sweeps and report files.
//!
//! Replica `r` of a single run draws from stream `r` of the generator keyed
//! by the master seed; replica `r` of sweep row `i` uses stream `(i << 32) | r`.
//! Replicas run on the rayon pool and are gathered in index order, so output
//! files depend only on the configuration.

mod config;
mod output;
mod selftest;
mod sweep;

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{SpeciesPair, TwoSpeciesConfiguration};
use crate::grid::GridSpec;
use crate::kinetic::{integrate, KineticState, KineticSystem};
use crate::kmc::{estimate_density_field, init_poisson, init_profile, replica_rng, simulate, DensityField, Trajectory};
use crate::models::validate_conditions;

pub use config::{Density, ExperimentConfig, InitialDensities, Mode, OutputFormat, SimulationSettings};
pub use output::{OutputDir, Table};
pub use selftest::{selftest, SelftestCheck};
pub use sweep::{
    kinetic_reference, relative_l2, replica_table, run_scaling_sweep, sweep_stream, ConvergenceRow,
    ConvergenceTable, ReplicaRecord, SweepReport, CONVERGENCE_COLUMNS,
};

/// Poisson initial data with intensities `factor·ρ₀±`; profiles live on `grid`.
pub fn initial_configuration<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    grid: &GridSpec,
    factor: f64,
    rng: &mut R,
) -> Result<TwoSpeciesConfiguration> {
    match (&cfg.initial.plus, &cfg.initial.minus) {
        (Density::Constant(p), Density::Constant(m)) => init_poisson(&cfg.domain, factor * p, factor * m, rng),
        (p, m) => {
            let scale = |v: Vec<f64>| v.into_iter().map(|x| factor * x).collect::<Vec<_>>();
            init_profile(grid, &scale(p.on_grid(grid.len())), &scale(m.on_grid(grid.len())), rng)
        }
    }
}

/// Files written by a run; `passed` is set by validation runs.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub passed: Option<bool>,
    pub convergence: Option<ConvergenceTable>,
}

fn density_table(field: &DensityField) -> Table {
    let g = field.grid();
    let mut cols = vec!["cell_index".to_owned()];
    cols.extend((0..g.dim()).map(|k| format!("x{k}")));
    cols.extend(["rho_plus".to_owned(), "rho_minus".to_owned()]);
    let mut t = Table::new(cols);
    for i in 0..g.len() {
        let mut row = vec![i as f64];
        row.extend_from_slice(&g.cell_center(i)[..g.dim()]);
        row.extend([field.plus()[i], field.minus()[i]]);
        t.push(row);
    }
    t
}

fn kinetic_series_table(states: &[KineticState]) -> Table {
    let dim = states.first().map_or(1, |s| s.grid().dim());
    let mut cols = vec!["t".to_owned(), "cell_index".to_owned()];
    cols.extend((0..dim).map(|k| format!("x{k}")));
    cols.extend(["rho_plus".to_owned(), "rho_minus".to_owned()]);
    let mut t = Table::new(cols);
    for s in states {
        for row in density_table(&s.field).rows {
            let mut r = vec![s.time];
            r.extend(row);
            t.push(r);
        }
    }
    t
}

#[derive(Serialize)]
struct ReplicaSummary<'a> {
    replica: usize,
    final_time: f64,
    final_counts: SpeciesPair<usize>,
    occupation: &'a crate::kmc::OccupationStats,
    counters: &'a crate::kmc::EventCounters,
}

fn run_simulate(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let fine = cfg.kinetic_grid()?;
    let coarse = cfg.comparison_grid()?;
    let times = cfg.observer_times();
    let opts = cfg.simulation.options(false);
    let runs: Vec<Result<Trajectory>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(cfg.seed, r as u64);
            let init = initial_configuration(cfg, &fine, 1.0, &mut rng)?;
            simulate(&cfg.model, &cfg.domain, &init, cfg.t_end, &times, &opts, &mut rng)
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let k = runs.len() as f64;
    let mut mean_counts = Table::new(["t", "mean_plus", "mean_minus"]);
    let mut summaries = Vec::with_capacity(runs.len());
    let mut finals = Vec::with_capacity(runs.len());
    for (r, tr) in runs.iter().enumerate() {
        let mut t = Table::new(["t", "n_plus", "n_minus"]);
        for s in &tr.snapshots {
            t.push(vec![s.time, s.counts.plus as f64, s.counts.minus as f64]);
        }
        out.write_table(&format!("replica_{r:04}_trajectory"), &t, cfg.format)?;
        let field = estimate_density_field(std::slice::from_ref(&tr.final_state), &coarse);
        out.write_table(&format!("replica_{r:04}_density"), &density_table(&field), cfg.format)?;
        finals.push(tr.final_state.clone());
        summaries.push(ReplicaSummary {
            replica: r,
            final_time: tr.final_time,
            final_counts: tr.final_state.counts(),
            occupation: &tr.occupation,
            counters: &tr.counters,
        });
    }
    for (i, &t) in times.iter().enumerate() {
        let (p, m) = runs.iter().fold((0.0, 0.0), |(p, m), tr| {
            let c = tr.snapshots[i].counts;
            (p + c.plus as f64, m + c.minus as f64)
        });
        mean_counts.push(vec![t, p / k, m / k]);
    }
    out.write_table("trajectory_mean", &mean_counts, cfg.format)?;
    out.write_table("density_mean", &density_table(&estimate_density_field(&finals, &coarse)), cfg.format)?;
    out.write_json("replicas.json", &summaries)?;
    Ok(())
}

fn run_kinetic(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let grid = cfg.kinetic_grid()?;
    let sys = KineticSystem::new(&cfg.model, grid, cfg.branching_form)?;
    let field = DensityField::new(
        grid,
        cfg.initial.plus.on_grid(grid.len()),
        cfg.initial.minus.on_grid(grid.len()),
    )?;
    let run = integrate(&sys, &KineticState { time: 0.0, field }, cfg.t_end, cfg.dt, &cfg.observer_times())?;
    out.write_table("kinetic", &kinetic_series_table(&run.states), cfg.format)?;
    out.write_json(
        "kinetic_summary.json",
        &serde_json::json!({ "t_end": cfg.t_end, "dt": cfg.dt, "clipped": run.clipped }),
    )?;
    Ok(())
}

/// Runs the configured mode and writes every output file, including the
/// echoed configuration, into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut out = OutputDir::create(&cfg.output_dir)?;
    out.write_text("config.json", &format!("{}\n", cfg.to_json_pretty()))?;
    let mut passed = None;
    let mut convergence = None;
    match cfg.mode {
        Mode::Simulate => run_simulate(cfg, &mut out)?,
        Mode::Kinetic => run_kinetic(cfg, &mut out)?,
        Mode::Validate => {
            let report = validate_conditions(&cfg.model, cfg.alpha, cfg.beta, cfg.domain.dim())?;
            passed = Some(report.pass);
            out.write_json("conditions.json", &report)?;
        }
        Mode::Sweep => {
            let rep = run_scaling_sweep(cfg)?;
            out.write_table("convergence", &rep.table.to_table(), cfg.format)?;
            out.write_table("sweep_replicas", &replica_table(&rep.replicas), cfg.format)?;
            out.write_table("kinetic_reference", &density_table(&rep.kinetic), cfg.format)?;
            convergence = Some(rep.table);
        }
    }
    Ok(RunOutcome {
        files: out.into_files(),
        passed,
        convergence,
    })
}

/// Simulate, kinetic and validate modes.
pub fn run_single(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    if cfg.mode == Mode::Sweep {
        return Err(Error::usage("run_single handles simulate, kinetic and validate"));
    }
    run_experiment(cfg)
}
