//! Spatially constant solutions: every convolution `φ ∗ ρ` becomes `⟨φ⟩ρ`.

use std::cell::Cell;

use serde::Serialize;

use super::{check_supported, rk4_segments, step_schedule, ConvolutionMethod, PeriodicConvolver};
use crate::error::Result;
use crate::geometry::{Kernel, SpeciesPair};
use crate::grid::GridSpec;
use crate::models::ModelSpec;

/// Iteration budget for the root search.
const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HomogeneousState {
    pub time: f64,
    pub plus: f64,
    pub minus: f64,
}

/// Which kernel mass `⟨φ⟩` enters the reduced equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MassRule {
    /// `∫ φ(x) dx` over `R^dim`.
    Exact { dim: usize },
    /// Cell-centre quadrature on a grid, matching the gridded solver.
    Grid(GridSpec),
}

#[derive(Clone, Debug)]
pub struct HomogeneousSystem {
    model: ModelSpec,
    masses: Vec<(Kernel, f64)>,
}

impl HomogeneousSystem {
    pub fn new(model: &ModelSpec, rule: MassRule) -> Result<Self> {
        check_supported(model)?;
        model.validate()?;
        let mut masses = Vec::new();
        for (_, k) in model.kernels() {
            let mass = match rule {
                MassRule::Exact { dim } => k.mass(dim),
                MassRule::Grid(g) => PeriodicConvolver::new(&k, &g, ConvolutionMethod::Direct)?.grid_mass(),
            };
            masses.push((k, mass));
        }
        Ok(HomogeneousSystem {
            model: model.clone(),
            masses,
        })
    }

    pub fn mass(&self, k: &Kernel) -> f64 {
        self.masses
            .iter()
            .find(|(seen, _)| seen == k)
            .map(|&(_, m)| m)
            .expect("every model kernel has a mass")
    }

    /// `(dρ⁺/dt, dρ⁻/dt)` for constant densities.
    pub fn rhs(&self, rp: f64, rm: f64) -> SpeciesPair<f64> {
        let w = |k: &Kernel| self.mass(k);
        let (dp, dm) = match &self.model {
            ModelSpec::BdlpPair(p) => (
                -(p.mortality_plus + w(&p.cross_competition) * rm) * rp - w(&p.competition_plus) * rp * rp
                    + w(&p.branching_plus) * rp
                    + w(&p.cross_branching) * rm,
                -p.mortality_minus * rm - w(&p.competition_minus) * rm * rm
                    + w(&p.branching_minus) * rm
                    + p.immigration,
            ),
            ModelSpec::GlauberPair(g) => (
                -rp + g.activity_plus * (-w(&g.self_plus) * rp - w(&g.cross_on_plus) * rm).exp(),
                -rm + g.activity_minus * (-w(&g.self_minus) * rm - w(&g.cross_on_minus) * rp).exp(),
            ),
            ModelSpec::BdlpInGlauber(p) => (
                -(p.mortality_plus + w(&p.cross_competition) * rm) * rp - w(&p.competition_plus) * rp * rp
                    + w(&p.branching_plus) * rp
                    + w(&p.cross_branching) * rm,
                -rm + p.activity_minus * (-w(&p.self_minus) * rm).exp(),
            ),
            ModelSpec::DensityBranching(p) => (
                -p.mortality_plus * rp * (w(&p.crowding_plus) * rp).exp()
                    + w(&p.branching_plus) * rp * (-w(&p.parent_suppression) * rm).exp(),
                -rm + p.activity_minus * (-w(&p.self_minus) * rm).exp(),
            ),
        };
        SpeciesPair::new(dp, dm)
    }

    /// RK4 with the same step schedule and clipping as the gridded solver.
    pub fn integrate(&self, h0: HomogeneousState, t_end: f64, dt: f64, output_times: &[f64]) -> Result<Vec<HomogeneousState>> {
        let mut targets = output_times.to_vec();
        if targets.last() != Some(&t_end) {
            targets.push(t_end);
        }
        let schedule = step_schedule(h0.time, &targets, dt)?;
        let mut out = Vec::with_capacity(targets.len());
        let mut clipped = 0;
        rk4_segments(
            vec![h0.plus, h0.minus],
            h0.time,
            &schedule,
            &mut clipped,
            |y| {
                let d = self.rhs(y[0], y[1]);
                vec![d.plus, d.minus]
            },
            |t, y| {
                out.push(HomogeneousState {
                    time: t,
                    plus: y[0],
                    minus: y[1],
                })
            },
        )?;
        Ok(out)
    }

    /// A non-negative zero of the reduced equations: for each `ρ⁺` the minus
    /// equation is solved for its stable root, then the plus equation along
    /// that curve, then a damped Newton polish on the full system.
    pub fn fixed_point(&self) -> Option<SpeciesPair<f64>> {
        let budget = Cell::new(MAX_ITERATIONS);
        let minus_at = |rp: f64| stable_root(|rm| self.rhs(rp, rm).minus, &budget);
        let rp = stable_root(|rp| minus_at(rp).map_or(f64::NAN, |rm| self.rhs(rp, rm).plus), &budget)?;
        let rm = minus_at(rp)?;
        Some(self.polish(rp, rm))
    }

    fn residual(&self, x: [f64; 2]) -> [f64; 2] {
        let d = self.rhs(x[0], x[1]);
        [d.plus, d.minus]
    }

    fn polish(&self, rp: f64, rm: f64) -> SpeciesPair<f64> {
        let norm = |r: [f64; 2]| r[0].hypot(r[1]);
        let mut x = [rp, rm];
        let mut r = self.residual(x);
        for _ in 0..50 {
            if norm(r) < 1e-15 {
                break;
            }
            let mut jac = [[0.0; 2]; 2];
            for j in 0..2 {
                let eps = 1e-7 * x[j].abs().max(1.0);
                let mut hi = x;
                let mut lo = x;
                hi[j] += eps;
                lo[j] = (lo[j] - eps).max(0.0);
                let (fh, fl) = (self.residual(hi), self.residual(lo));
                for i in 0..2 {
                    jac[i][j] = (fh[i] - fl[i]) / (hi[j] - lo[j]);
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let step = [
                (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                (jac[0][0] * r[1] - jac[1][0] * r[0]) / det,
            ];
            let mut lambda = 1.0;
            let mut improved = false;
            while lambda > 1e-4 {
                let cand = [(x[0] - lambda * step[0]).max(0.0), (x[1] - lambda * step[1]).max(0.0)];
                let rc = self.residual(cand);
                if norm(rc) < norm(r) {
                    x = cand;
                    r = rc;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        SpeciesPair::new(x[0], x[1])
    }
}

/// Smallest zero of `f` on `[0, ∞)` approached by the flow `ρ' = f(ρ)` from
/// small positive data: `0` when it is a stable zero, otherwise the first
/// crossing from positive to negative values.
fn stable_root<F: FnMut(f64) -> f64>(mut f: F, budget: &Cell<usize>) -> Option<f64> {
    let take = || {
        let left = budget.get().checked_sub(1)?;
        budget.set(left);
        Some(())
    };
    let f0 = f(0.0);
    take()?;
    let mut lo = 0.0;
    if f0.is_nan() {
        return None;
    }
    if f0 <= 0.0 {
        let probe = 1e-9;
        if f(probe) <= 0.0 {
            return Some(0.0);
        }
        lo = probe;
    }
    let mut hi = 1.0f64.max(2.0 * lo);
    loop {
        take()?;
        let v = f(hi);
        if v.is_nan() {
            return None;
        }
        if v < 0.0 {
            break;
        }
        if v == 0.0 {
            return Some(hi);
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    while hi - lo > 1e-15 * hi.max(1e-300) {
        take()?;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.is_nan() {
            return None;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `(dρ⁺/dt, dρ⁻/dt)` for constant densities with exact kernel masses in dimension `dim`.
pub fn homogeneous_rhs(m: &ModelSpec, h: &HomogeneousState, dim: usize) -> Result<SpeciesPair<f64>> {
    Ok(HomogeneousSystem::new(m, MassRule::Exact { dim })?.rhs(h.plus, h.minus))
}

/// Constant stationary densities with exact kernel masses in dimension `dim`,
/// or `None` if the variant has no kinetic limit or no root is found.
pub fn homogeneous_fixed_point(m: &ModelSpec, dim: usize) -> Option<SpeciesPair<f64>> {
    HomogeneousSystem::new(m, MassRule::Exact { dim }).ok()?.fixed_point()
}
