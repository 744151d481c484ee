use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::output::Table;
use super::{initial_configuration, ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::geometry::{Species, SpeciesPair};
use crate::grid::GridSpec;
use crate::kinetic::{integrate, KineticState, KineticSystem};
use crate::kmc::{estimate_density_field, replica_rng, simulate, DensityField};
use crate::models::apply_vlasov_scaling;

/// RNG stream of replica `replica` in sweep row `row`.
pub fn sweep_stream(row: usize, replica: u64) -> u64 {
    ((row as u64) << 32) | replica
}

/// Stream reserved for the bootstrap of a row; no replica index reaches it.
fn bootstrap_stream(row: usize) -> u64 {
    sweep_stream(row, u64::from(u32::MAX))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// Replicas that reached `t_eval`.
    pub replicas: usize,
    pub t_eval: f64,
    pub err_minus: f64,
    pub err_plus: f64,
    pub se_minus: f64,
    pub se_plus: f64,
    pub wall_s: f64,
}

/// Distance between rescaled empirical densities and the kinetic solution,
/// one row per scaling parameter, sorted by `n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

pub const CONVERGENCE_COLUMNS: [&str; 8] =
    ["n", "replicas", "t_eval", "err_minus", "err_plus", "se_minus", "se_plus", "wall_s"];

impl ConvergenceTable {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(CONVERGENCE_COLUMNS);
        for r in &self.rows {
            t.push(vec![
                f64::from(r.n),
                r.replicas as f64,
                r.t_eval,
                r.err_minus,
                r.err_plus,
                r.se_minus,
                r.se_plus,
                r.wall_s,
            ]);
        }
        t
    }
}

/// Outcome of one simulated replica of a sweep row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicaRecord {
    pub n: u32,
    pub replica: usize,
    pub completed: bool,
    pub err_minus: f64,
    pub err_plus: f64,
    pub count_plus: usize,
    pub count_minus: usize,
    pub births: u64,
    pub deaths: u64,
    pub rejections: u64,
}

pub const REPLICA_COLUMNS: [&str; 10] = [
    "n",
    "replica",
    "completed",
    "err_minus",
    "err_plus",
    "count_plus",
    "count_minus",
    "births",
    "deaths",
    "rejections",
];

pub fn replica_table(records: &[ReplicaRecord]) -> Table {
    let mut t = Table::new(REPLICA_COLUMNS);
    for r in records {
        t.push(vec![
            f64::from(r.n),
            r.replica as f64,
            if r.completed { 1.0 } else { 0.0 },
            r.err_minus,
            r.err_plus,
            r.count_plus as f64,
            r.count_minus as f64,
            r.births as f64,
            r.deaths as f64,
            r.rejections as f64,
        ]);
    }
    t
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub table: ConvergenceTable,
    /// Per-replica records in row order, then replica order.
    pub replicas: Vec<ReplicaRecord>,
    /// Kinetic solution at `t_eval` on the comparison grid.
    pub kinetic: DensityField,
}

/// `‖a − b‖₂ / ‖b‖₂`, or the plain distance when `b` vanishes.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let norm = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

fn errors(field: &DensityField, target: &DensityField) -> SpeciesPair<f64> {
    SpeciesPair::new(
        relative_l2(field.plus(), target.plus()),
        relative_l2(field.minus(), target.minus()),
    )
}

fn mean_field(grid: GridSpec, fields: &[&DensityField]) -> DensityField {
    let mut out = DensityField::zeros(grid);
    let w = 1.0 / fields.len() as f64;
    for f in fields {
        for s in Species::ALL {
            for (o, v) in out.species_mut(s).iter_mut().zip(f.species(s)) {
                *o += w * v;
            }
        }
    }
    out
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Bootstrap standard error of the error of the replica-mean field.
fn bootstrap_se<R: Rng>(fields: &[DensityField], target: &DensityField, resamples: usize, rng: &mut R) -> SpeciesPair<f64> {
    let k = fields.len();
    let mut errs = SpeciesPair::new(Vec::with_capacity(resamples), Vec::with_capacity(resamples));
    for _ in 0..resamples {
        let pick: Vec<&DensityField> = (0..k).map(|_| &fields[rng.random_range(0..k)]).collect();
        let e = errors(&mean_field(*target.grid(), &pick), target);
        errs.plus.push(e.plus);
        errs.minus.push(e.minus);
    }
    errs.map(|v| std_dev(&v))
}

/// Kinetic solution from the configured initial densities at `t_eval`,
/// averaged onto the comparison grid.
pub fn kinetic_reference(cfg: &ExperimentConfig) -> Result<DensityField> {
    let fine = cfg.kinetic_grid()?;
    let coarse = cfg.comparison_grid()?;
    let sys = KineticSystem::new(&cfg.model, fine, cfg.branching_form)?;
    let field = DensityField::new(
        fine,
        cfg.initial.plus.on_grid(fine.len()),
        cfg.initial.minus.on_grid(fine.len()),
    )?;
    let run = integrate(&sys, &KineticState { time: 0.0, field }, cfg.t_eval, cfg.dt, &[])?;
    let end = run.states.last().expect("integrate records t_end").field.clone();
    DensityField::new(
        coarse,
        fine.coarsen(end.plus(), &coarse)?,
        fine.coarsen(end.minus(), &coarse)?,
    )
}

enum ReplicaOutcome {
    Done { field: DensityField, record: ReplicaRecord },
    Exploded(ReplicaRecord, Error),
}

/// For each `n`: simulate the Vlasov-scaled model from Poisson data with
/// intensities `n·ρ₀±`, estimate densities at `t_eval` on the comparison
/// grid, divide by `n` and compare with the unscaled kinetic solution.
pub fn run_scaling_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    if cfg.mode != Mode::Sweep {
        return Err(Error::usage("run_scaling_sweep needs mode = sweep"));
    }
    cfg.validate()?;
    let fine = cfg.kinetic_grid()?;
    let coarse = cfg.comparison_grid()?;
    let target = kinetic_reference(cfg)?;
    let opts = cfg.simulation.options(true);
    let mut rows = Vec::with_capacity(cfg.scaling.len());
    let mut records = Vec::with_capacity(cfg.scaling.len() * cfg.replicas);
    for (row, &n) in cfg.scaling.iter().enumerate() {
        let start = Instant::now();
        let scaled = apply_vlasov_scaling(&cfg.model, n)?;
        let nf = f64::from(n);
        let outcomes: Vec<Result<ReplicaOutcome>> = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(cfg.seed, sweep_stream(row, r as u64));
                let init = initial_configuration(cfg, &fine, nf, &mut rng)?;
                let mut record = ReplicaRecord {
                    n,
                    replica: r,
                    completed: false,
                    err_minus: f64::NAN,
                    err_plus: f64::NAN,
                    count_plus: 0,
                    count_minus: 0,
                    births: 0,
                    deaths: 0,
                    rejections: 0,
                };
                match simulate(&scaled, &cfg.domain, &init, cfg.t_end, &[cfg.t_eval], &opts, &mut rng) {
                    Ok(tr) => {
                        let snap = tr.snapshots[0].configuration.as_ref().expect("configurations recorded");
                        let field = estimate_density_field(std::slice::from_ref(snap), &coarse).scaled(1.0 / nf);
                        let e = errors(&field, &target);
                        record.completed = true;
                        record.err_plus = e.plus;
                        record.err_minus = e.minus;
                        record.count_plus = snap.plus().len();
                        record.count_minus = snap.minus().len();
                        record.births = tr.counters.births.plus + tr.counters.births.minus;
                        record.deaths = tr.counters.deaths.plus + tr.counters.deaths.minus;
                        record.rejections = tr.counters.rejections;
                        Ok(ReplicaOutcome::Done { field, record })
                    }
                    Err(e @ Error::Explosion { .. }) => Ok(ReplicaOutcome::Exploded(record, e)),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let mut fields = Vec::with_capacity(cfg.replicas);
        let mut first_failure = None;
        for o in outcomes {
            match o? {
                ReplicaOutcome::Done { field, record } => {
                    fields.push(field);
                    records.push(record);
                }
                ReplicaOutcome::Exploded(record, e) => {
                    log::warn!("n = {n}, replica {}: {e}", record.replica);
                    records.push(record);
                    first_failure.get_or_insert(e);
                }
            }
        }
        if fields.is_empty() {
            return Err(first_failure.expect("at least one replica ran"));
        }
        let refs: Vec<&DensityField> = fields.iter().collect();
        let err = errors(&mean_field(coarse, &refs), &target);
        let mut rng = replica_rng(cfg.seed, bootstrap_stream(row));
        let se = bootstrap_se(&fields, &target, cfg.bootstrap_resamples, &mut rng);
        let wall_s = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        log::info!("n = {n}: err = ({:.4}, {:.4}) ± ({:.4}, {:.4})", err.minus, err.plus, se.minus, se.plus);
        rows.push(ConvergenceRow {
            n,
            replicas: fields.len(),
            t_eval: cfg.t_eval,
            err_minus: err.minus,
            err_plus: err.plus,
            se_minus: se.minus,
            se_plus: se.plus,
            wall_s,
        });
    }
    rows.sort_by_key(|r| r.n);
    Ok(SweepReport {
        table: ConvergenceTable { rows },
        replicas: records,
        kinetic: target,
    })
}
