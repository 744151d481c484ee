//! Mesoscopic kinetic equations on a periodic grid.
//!
//! Every model has its own pair of integro-differential equations for the
//! densities `ρ⁺`, `ρ⁻`; convolutions are taken with cell-sampled kernels.
//! The spatially homogeneous reduction in [`homogeneous`] replaces every
//! convolution by kernel mass times density and serves as an oracle.

mod convolution;
pub mod homogeneous;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Kernel, Species, SpeciesPair};
use crate::grid::GridSpec;
use crate::kmc::DensityField;
use crate::models::ModelSpec;

pub use convolution::{convolve_periodic, ConvolutionMethod, PeriodicConvolver};
pub use homogeneous::{
    homogeneous_fixed_point, homogeneous_rhs, HomogeneousState, HomogeneousSystem, MassRule,
};

/// Where the minus-environment factor of the density-branching plus birth
/// term is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchingForm {
    /// `(a⁺ ∗ ρ⁺)(x)·e^{−(ψ⁻ ∗ ρ⁻)(x)}`: factor at the offspring site.
    #[default]
    Printed,
    /// `a⁺ ∗ (ρ⁺ e^{−ψ⁻ ∗ ρ⁻})`: factor at the parent site.
    ParentSite,
}

/// Gridded densities at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticState {
    pub time: f64,
    pub field: DensityField,
}

impl KineticState {
    pub fn constant(grid: GridSpec, plus: f64, minus: f64) -> Self {
        KineticState {
            time: 0.0,
            field: DensityField::new(grid, vec![plus; grid.len()], vec![minus; grid.len()])
                .expect("lengths match by construction"),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    /// Writes `t,cell_index,x0[,x1[,x2]],rho_plus,rho_minus` rows.
    pub fn write_csv_rows<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let g = self.grid();
        for i in 0..g.len() {
            let c = g.cell_center(i);
            write!(out, "{},{}", self.time, i)?;
            for x in &c[..g.dim()] {
                write!(out, ",{x}")?;
            }
            writeln!(out, ",{},{}", self.field.plus()[i], self.field.minus()[i])?;
        }
        Ok(())
    }

    pub fn csv_header(dim: usize) -> String {
        let mut h = String::from("t,cell_index");
        for k in 0..dim {
            h.push_str(&format!(",x{k}"));
        }
        h.push_str(",rho_plus,rho_minus");
        h
    }
}

pub(crate) fn check_supported(m: &ModelSpec) -> Result<()> {
    if m.supports_kinetic() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "kinetic equations are available for the Glauber pair only at s = 0".into(),
        ))
    }
}

/// A model bound to a grid with its convolution operators prepared.
#[derive(Debug)]
pub struct KineticSystem {
    model: ModelSpec,
    grid: GridSpec,
    form: BranchingForm,
    ops: Vec<(Kernel, PeriodicConvolver)>,
}

impl KineticSystem {
    pub fn new(model: &ModelSpec, grid: GridSpec, form: BranchingForm) -> Result<Self> {
        check_supported(model)?;
        model.validate()?;
        model.check_domain(grid.domain())?;
        let mut ops: Vec<(Kernel, PeriodicConvolver)> = Vec::new();
        for (_, k) in model.kernels() {
            if !ops.iter().any(|(seen, _)| *seen == k) {
                ops.push((k, PeriodicConvolver::new(&k, &grid, ConvolutionMethod::Auto)?));
            }
        }
        Ok(KineticSystem {
            model: model.clone(),
            grid,
            form,
            ops,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn form(&self) -> BranchingForm {
        self.form
    }

    fn op(&self, k: &Kernel) -> &PeriodicConvolver {
        &self.ops.iter().find(|(seen, _)| seen == k).expect("every model kernel is prepared").1
    }

    fn conv(&self, k: &Kernel, f: &[f64]) -> Vec<f64> {
        self.op(k).apply(f)
    }

    /// Grid-quadrature mass of a model kernel.
    pub fn grid_mass(&self, k: &Kernel) -> f64 {
        self.op(k).grid_mass()
    }

    /// Largest linear loss or gain rate of the equations; used to check `dt`.
    pub fn linear_rate_scale(&self) -> f64 {
        let mass = |k: &Kernel| self.grid_mass(k);
        match &self.model {
            ModelSpec::BdlpPair(p) => (p.mortality_minus + mass(&p.branching_minus))
                .max(p.mortality_plus + mass(&p.branching_plus)),
            ModelSpec::GlauberPair(_) => 1.0,
            ModelSpec::BdlpInGlauber(p) => (p.mortality_plus + mass(&p.branching_plus)).max(1.0),
            ModelSpec::DensityBranching(p) => (p.mortality_plus + mass(&p.branching_plus)).max(1.0),
        }
    }

    /// `(∂ρ⁺, ∂ρ⁻)` at the given densities.
    pub fn rhs(&self, field: &DensityField) -> Result<SpeciesPair<Vec<f64>>> {
        if field.grid() != &self.grid {
            return Err(Error::usage("density field lives on a different grid"));
        }
        Ok(self.rhs_slices(field.plus(), field.minus()))
    }

    fn rhs_slices(&self, rp: &[f64], rm: &[f64]) -> SpeciesPair<Vec<f64>> {
        let n = rp.len();
        let mut dp = vec![0.0; n];
        let mut dm = vec![0.0; n];
        match &self.model {
            ModelSpec::BdlpPair(p) => {
                let am = self.conv(&p.competition_minus, rm);
                let ap = self.conv(&p.branching_minus, rm);
                let bm = self.conv(&p.competition_plus, rp);
                let bp = self.conv(&p.branching_plus, rp);
                let fm = self.conv(&p.cross_competition, rm);
                let fp = self.conv(&p.cross_branching, rm);
                for i in 0..n {
                    dm[i] = -p.mortality_minus * rm[i] - rm[i] * am[i] + ap[i] + p.immigration;
                    dp[i] = -(p.mortality_plus + fm[i]) * rp[i] - rp[i] * bm[i] + bp[i] + fp[i];
                }
            }
            ModelSpec::GlauberPair(g) => {
                let self_m = self.conv(&g.self_minus, rm);
                let self_p = self.conv(&g.self_plus, rp);
                let on_m = self.conv(&g.cross_on_minus, rp);
                let on_p = self.conv(&g.cross_on_plus, rm);
                for i in 0..n {
                    dm[i] = -rm[i] + g.activity_minus * (-self_m[i]).exp() * (-on_m[i]).exp();
                    dp[i] = -rp[i] + g.activity_plus * (-self_p[i]).exp() * (-on_p[i]).exp();
                }
            }
            ModelSpec::BdlpInGlauber(p) => {
                let psi = self.conv(&p.self_minus, rm);
                let phi = self.conv(&p.cross_competition, rm);
                let am = self.conv(&p.competition_plus, rp);
                let ap = self.conv(&p.branching_plus, rp);
                let bp = self.conv(&p.cross_branching, rm);
                for i in 0..n {
                    dm[i] = -rm[i] + p.activity_minus * (-psi[i]).exp();
                    dp[i] = -(p.mortality_plus + phi[i]) * rp[i] - rp[i] * am[i] + ap[i] + bp[i];
                }
            }
            ModelSpec::DensityBranching(p) => {
                let self_m = self.conv(&p.self_minus, rm);
                let crowd = self.conv(&p.crowding_plus, rp);
                let supp = self.conv(&p.parent_suppression, rm);
                let births = match self.form {
                    BranchingForm::Printed => {
                        let ap = self.conv(&p.branching_plus, rp);
                        ap.iter().zip(&supp).map(|(a, s)| a * (-s).exp()).collect::<Vec<_>>()
                    }
                    BranchingForm::ParentSite => {
                        let weighted: Vec<f64> = rp.iter().zip(&supp).map(|(r, s)| r * (-s).exp()).collect();
                        self.conv(&p.branching_plus, &weighted)
                    }
                };
                for i in 0..n {
                    dm[i] = -rm[i] + p.activity_minus * (-self_m[i]).exp();
                    dp[i] = -p.mortality_plus * rp[i] * crowd[i].exp() + births[i];
                }
            }
        }
        SpeciesPair::new(dp, dm)
    }
}

/// `(∂ρ⁺, ∂ρ⁻)` for the printed equations of `m` at `state`.
pub fn kinetic_rhs(m: &ModelSpec, state: &KineticState) -> Result<SpeciesPair<Vec<f64>>> {
    KineticSystem::new(m, *state.grid(), BranchingForm::Printed)?.rhs(&state.field)
}

/// States at each output time plus the number of clipped undershoots.
#[derive(Clone, Debug)]
pub struct KineticRun {
    pub states: Vec<KineticState>,
    pub clipped: u64,
}

/// Splits `[t0, targets…]` into uniform RK4 segments with steps at most `dt`.
pub(crate) fn step_schedule(t0: f64, targets: &[f64], dt: f64) -> Result<Vec<(f64, usize, f64)>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::usage(format!("time step must be positive, got {dt}")));
    }
    let mut t = t0;
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        if !target.is_finite() || target < t {
            return Err(Error::usage(format!(
                "output times must be finite, non-decreasing and not before {t0}"
            )));
        }
        let steps = ((target - t) / dt - 1e-9).ceil().max(0.0) as usize;
        let h = if steps == 0 { 0.0 } else { (target - t) / steps as f64 };
        out.push((target, steps, h));
        t = target;
    }
    Ok(out)
}

/// Classical RK4 on a flat state; negative entries are clipped after every step.
pub(crate) fn rk4_segments<F>(
    mut y: Vec<f64>,
    t0: f64,
    schedule: &[(f64, usize, f64)],
    clipped: &mut u64,
    mut f: F,
    mut emit: impl FnMut(f64, &[f64]),
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let n = y.len();
    let mut tmp = vec![0.0; n];
    let mut t = t0;
    for &(target, steps, h) in schedule {
        for step in 0..steps {
            let k1 = f(&y);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            let k2 = f(&tmp);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            let k3 = f(&tmp);
            for i in 0..n {
                tmp[i] = y[i] + h * k3[i];
            }
            let k4 = f(&tmp);
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if y[i] < 0.0 {
                    y[i] = 0.0;
                    *clipped += 1;
                }
            }
            let now = if step + 1 == steps { target } else { t + (step + 1) as f64 * h };
            if let Some(i) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    time: now,
                    species: if i < n / 2 { "plus" } else { "minus" },
                });
            }
        }
        t = target;
        emit(t, &y);
    }
    Ok(y)
}

/// Integrates from `state0` to `t_end` with fixed-step RK4, recording the
/// state at each of `output_times` and always at `t_end`.
pub fn integrate(
    sys: &KineticSystem,
    state0: &KineticState,
    t_end: f64,
    dt: f64,
    output_times: &[f64],
) -> Result<KineticRun> {
    if state0.grid() != sys.grid() {
        return Err(Error::usage("initial state lives on a different grid"));
    }
    if output_times.iter().any(|&t| t > t_end) {
        return Err(Error::usage("output time beyond t_end"));
    }
    let mut targets = output_times.to_vec();
    if targets.last() != Some(&t_end) {
        targets.push(t_end);
    }
    let schedule = step_schedule(state0.time, &targets, dt)?;
    if dt * sys.linear_rate_scale() > 0.5 {
        log::warn!(
            "dt = {dt} exceeds the stability heuristic for linear rate {}",
            sys.linear_rate_scale()
        );
    }
    let n = sys.grid().len();
    let mut y = Vec::with_capacity(2 * n);
    y.extend_from_slice(state0.field.plus());
    y.extend_from_slice(state0.field.minus());
    let grid = *sys.grid();
    let mut states = Vec::with_capacity(targets.len());
    let mut clipped = 0;
    rk4_segments(
        y,
        state0.time,
        &schedule,
        &mut clipped,
        |y| {
            let d = sys.rhs_slices(&y[..n], &y[n..]);
            let mut out = d.plus;
            out.extend_from_slice(&d.minus);
            out
        },
        |t, y| {
            states.push(KineticState {
                time: t,
                field: DensityField::new(grid, y[..n].to_vec(), y[n..].to_vec()).expect("grid sized"),
            })
        },
    )?;
    if clipped > 0 {
        log::warn!("clipped {clipped} negative density values during integration");
    }
    Ok(KineticRun { states, clipped })
}

/// Shifts every cell index by `shift` cells along each axis (periodically).
pub fn shift_field(grid: &GridSpec, f: &[f64], shift: &[usize]) -> Vec<f64> {
    let m = grid.cells_per_axis();
    let mut out = vec![0.0; f.len()];
    for (i, v) in f.iter().enumerate() {
        let mut c = grid.unravel(i);
        for (k, s) in shift.iter().enumerate().take(grid.dim()) {
            c[k] = (c[k] + s) % m;
        }
        out[grid.ravel(&c)] = *v;
    }
    out
}

impl DensityField {
    /// Sup-norm distance per species.
    pub fn sup_distance(&self, other: &DensityField) -> SpeciesPair<f64> {
        let d = |s: Species| {
            self.species(s)
                .iter()
                .zip(other.species(s))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        SpeciesPair::new(d(Species::Plus), d(Species::Minus))
    }
}

#[cfg(test)]
mod tests;
