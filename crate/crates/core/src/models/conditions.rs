//! Parameter inequalities under which each model's correlation-function
//! evolution is well posed in the Ruelle-bound scale indexed by `(α, β)`.
//!
//! The domination hypotheses between quadratic forms are checked through
//! the pointwise sufficient condition `p(u) ≤ θ·q(u)` with the optimal
//! `θ = sup p/q` and additive constant `b = 0`. For radial kernels in the
//! supported library `log(p/q)` is affine in `|u|²` on the support of `p`,
//! so the supremum is attained at `|u| = 0` or `|u| = cutoff(p)`.

use serde::Serialize;

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::geometry::Kernel;

/// One strict inequality `lhs < rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// Set for rows that check a sufficient pointwise domination.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub theorem: String,
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<ConditionRow>,
    pub pass: bool,
}

/// Row-major `(α, β)` grid; both ends inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub step: f64,
}

impl ScanGrid {
    pub fn symmetric(half_width: f64, step: f64) -> Self {
        ScanGrid {
            alpha_min: -half_width,
            alpha_max: half_width,
            beta_min: -half_width,
            beta_max: half_width,
            step,
        }
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::usage(format!("empty scan range [{lo}, {hi}]")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| lo + i as f64 * step).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanHit {
    pub alpha: f64,
    pub beta: f64,
    pub report: ConditionReport,
}

const POINTWISE: &str = "pointwise-sufficient";

fn row(label: &str, lhs: f64, rhs: f64) -> ConditionRow {
    ConditionRow {
        label: label.to_owned(),
        lhs,
        rhs,
        pass: lhs < rhs,
        note: None,
    }
}

fn pointwise_row(label: &str, lhs: f64, rhs: f64) -> ConditionRow {
    ConditionRow {
        note: Some(POINTWISE.to_owned()),
        ..row(label, lhs, rhs)
    }
}

/// Smallest `θ` with `p ≤ θ·q` pointwise; infinite when `p` leaves the support of `q`.
pub(crate) fn domination_constant(p: &Kernel, q: &Kernel) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    if q.is_zero() || p.cutoff() > q.cutoff() {
        return f64::INFINITY;
    }
    [0.0, p.cutoff()]
        .iter()
        .map(|&r| p.eval(r) / q.eval(r))
        .fold(0.0, f64::max)
}

/// Evaluates every parameter inequality of the model's well-posedness
/// theorem at `(α, β)`. Kernel functionals are taken in dimension `dim`.
pub fn validate_conditions(m: &ModelSpec, alpha: f64, beta: f64, dim: usize) -> Result<ConditionReport> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::usage("α and β must be finite"));
    }
    if !(1..=crate::geometry::MAX_DIM).contains(&dim) {
        return Err(Error::usage(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    let (ea, eb) = (alpha.exp(), beta.exp());
    let mass = |k: &Kernel| k.mass(dim);
    let mayer = |k: &Kernel, c: f64| k.mayer_scaled(dim, c);
    let rows = match m {
        ModelSpec::BdlpPair(p) => {
            let t1 = domination_constant(&p.branching_plus, &p.competition_plus);
            let t2 = domination_constant(&p.branching_minus, &p.competition_minus);
            let t3 = domination_constant(&p.cross_branching, &p.cross_competition);
            vec![
                pointwise_row("ϑ₁ = sup b⁺/b⁻ < e^α", t1, ea),
                pointwise_row("ϑ₃ = sup φ⁺/φ⁻ < e^α", t3, ea),
                pointwise_row("ϑ₂ = sup a⁺/a⁻ < e^β", t2, eb),
                row(
                    "e^α⟨b⁻⟩ + e^β⟨φ⁻⟩ + e^{−α}b₁ + ⟨b⁺⟩ + ⟨φ⁺⟩ < m⁺",
                    ea * mass(&p.competition_plus)
                        + eb * mass(&p.cross_competition)
                        + mass(&p.branching_plus)
                        + mass(&p.cross_branching),
                    p.mortality_plus,
                ),
                row(
                    "e^β⟨a⁻⟩ + e^{−β}(b₂ + z) + ⟨a⁺⟩ < m⁻",
                    eb * mass(&p.competition_minus)
                        + p.immigration / eb
                        + mass(&p.branching_minus),
                    p.mortality_minus,
                ),
            ]
        }
        ModelSpec::GlauberPair(g) => {
            let s = g.s;
            vec![
                row(
                    "e^{e^α C(sψ⁺)} + e^{−β} z⁻ e^{e^α C((1−s)ψ⁺)} e^{e^β C(φ⁻)} < 2",
                    (ea * mayer(&g.cross_on_minus, s)).exp()
                        + g.activity_minus / eb
                            * (ea * mayer(&g.cross_on_minus, 1.0 - s)).exp()
                            * (eb * mayer(&g.self_minus, 1.0)).exp(),
                    2.0,
                ),
                row(
                    "e^{e^β C(sψ⁻)} + e^{−α} z⁺ e^{e^β C((1−s)ψ⁻)} e^{e^α C(φ⁺)} < 2",
                    (eb * mayer(&g.cross_on_plus, s)).exp()
                        + g.activity_plus / ea
                            * (eb * mayer(&g.cross_on_plus, 1.0 - s)).exp()
                            * (ea * mayer(&g.self_plus, 1.0)).exp(),
                    2.0,
                ),
            ]
        }
        ModelSpec::BdlpInGlauber(p) => {
            let theta = domination_constant(&p.branching_plus, &p.competition_plus);
            let vartheta = domination_constant(&p.cross_branching, &p.cross_competition);
            vec![
                pointwise_row("θ = sup a⁺/a⁻ < e^α", theta, ea),
                pointwise_row("ϑ = sup b⁺/φ < e^α", vartheta, ea),
                row("z⁻ exp(e^β C(ψ)) < e^β", p.activity_minus * (eb * mayer(&p.self_minus, 1.0)).exp(), eb),
                row(
                    "e^α⟨a⁻⟩ + e^β⟨φ⟩ + ⟨a⁺⟩ + ⟨b⁺⟩ + e^{−α}b < m⁺",
                    ea * mass(&p.competition_plus)
                        + eb * mass(&p.cross_competition)
                        + mass(&p.branching_plus)
                        + mass(&p.cross_branching),
                    p.mortality_plus,
                ),
            ]
        }
        ModelSpec::DensityBranching(p) => {
            let vartheta = domination_constant(&p.branching_plus, &p.crowding_plus);
            let growth = (mass(&p.branching_plus)).max(vartheta / ea);
            let second = (ea * mayer(&p.crowding_plus, -1.0)).exp()
                + if p.mortality_plus > 0.0 {
                    growth / p.mortality_plus * (eb * mayer(&p.parent_suppression, 1.0)).exp()
                } else {
                    f64::INFINITY
                };
            vec![
                row("0 < sup φ⁺", 0.0, p.crowding_plus.sup()),
                pointwise_row("ϑ = sup a⁺/φ⁺ < ∞", vartheta, f64::INFINITY),
                row("z⁻ exp(e^β C(φ⁻)) < e^β", p.activity_minus * (eb * mayer(&p.self_minus, 1.0)).exp(), eb),
                row(
                    "e^{e^α C(−φ⁺)} + max{⟨a⁺⟩ + b e^{−α}, ϑ e^{−α}} e^{e^β C(ψ⁻)} / m⁺ < 2",
                    second,
                    2.0,
                ),
            ]
        }
    };
    let pass = rows.iter().all(|r| r.pass);
    Ok(ConditionReport {
        theorem: m.name().to_owned(),
        alpha,
        beta,
        rows,
        pass,
    })
}

/// First grid point, α-major, at which every condition holds.
pub fn feasible_region_scan(m: &ModelSpec, grid: &ScanGrid, dim: usize) -> Result<Option<ScanHit>> {
    if !(grid.step > 0.0 && grid.step.is_finite()) {
        return Err(Error::usage(format!("scan step must be positive, got {}", grid.step)));
    }
    let alphas = ScanGrid::axis(grid.alpha_min, grid.alpha_max, grid.step)?;
    let betas = ScanGrid::axis(grid.beta_min, grid.beta_max, grid.step)?;
    for &alpha in &alphas {
        for &beta in &betas {
            let report = validate_conditions(m, alpha, beta, dim)?;
            if report.pass {
                return Ok(Some(ScanHit { alpha, beta, report }));
            }
        }
    }
    Ok(None)
}
