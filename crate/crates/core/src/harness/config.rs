use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TorusDomain;
use crate::grid::GridSpec;
use crate::kinetic::BranchingForm;
use crate::kmc::SimOptions;
use crate::models::ModelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Kinetic,
    Sweep,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A constant density or one value per kinetic-grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Density {
    Constant(f64),
    Profile(Vec<f64>),
}

impl Density {
    /// Per-cell values on a grid with `cells` cells.
    pub fn on_grid(&self, cells: usize) -> Vec<f64> {
        match self {
            Density::Constant(c) => vec![*c; cells],
            Density::Profile(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDensities {
    pub plus: Density,
    pub minus: Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSettings {
    pub particle_cap: usize,
    pub burn_in: f64,
    pub resync_every: u64,
}

impl SimulationSettings {
    pub fn options(&self, record_configurations: bool) -> SimOptions {
        SimOptions {
            particle_cap: self.particle_cap,
            record_configurations,
            burn_in: self.burn_in,
            resync_every: self.resync_every,
        }
    }
}

/// One experiment, with every setting spelled out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: TorusDomain,
    pub model: ModelSpec,
    pub mode: Mode,
    pub initial: InitialDensities,
    pub t_end: f64,
    /// Comparison time of the scaling sweep.
    pub t_eval: f64,
    /// Spacing of recorded snapshots and kinetic states.
    pub observe_every: f64,
    pub dt: f64,
    /// Kinetic grid cells per axis.
    pub grid: usize,
    /// Cells per axis of the grid on which empirical densities are compared;
    /// must divide `grid`.
    pub density_grid: usize,
    pub branching_form: BranchingForm,
    pub scaling: Vec<u32>,
    pub replicas: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub simulation: SimulationSettings,
    pub alpha: f64,
    pub beta: f64,
    pub bootstrap_resamples: usize,
    /// Record wall-clock times; off keeps outputs byte-reproducible.
    pub timing: bool,
}

fn check(ok: bool, field: &str, message: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, message))
    }
}

/// Dotted path of the field a deserialization error refers to.
fn offending_field(path: &str, message: &str) -> String {
    let root = matches!(path, "." | "?" | "");
    let missing = message
        .strip_prefix("missing field `")
        .and_then(|rest| rest.split('`').next());
    match (root, missing) {
        (true, Some(name)) => name.to_owned(),
        (false, Some(name)) => format!("{path}.{name}"),
        (true, None) => "<document>".to_owned(),
        (false, None) => path.to_owned(),
    }
}

impl ExperimentConfig {
    /// Parses and validates; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let message = e.into_inner().to_string();
            Error::config(offending_field(&path, &message), message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn kinetic_grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.domain, self.grid).map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn comparison_grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.domain, self.density_grid).map_err(|e| Error::config("density_grid", e.to_string()))
    }

    /// Observation times `0, Δ, 2Δ, …` up to `t_end`.
    pub fn observer_times(&self) -> Vec<f64> {
        let k = (self.t_end / self.observe_every + 1e-9).floor() as usize;
        (0..=k).map(|i| (i as f64 * self.observe_every).min(self.t_end)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.model
            .check_domain(&self.domain)
            .map_err(|e| Error::config("model", e.to_string()))?;
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        check(finite_nonneg(self.t_end), "t_end", "must be finite and non-negative")?;
        check(
            finite_nonneg(self.t_eval) && self.t_eval <= self.t_end,
            "t_eval",
            "must lie in [0, t_end]",
        )?;
        check(
            self.observe_every > 0.0 && self.observe_every.is_finite(),
            "observe_every",
            "must be positive",
        )?;
        check(self.dt > 0.0 && self.dt.is_finite(), "dt", "must be positive")?;
        check(self.grid >= 1, "grid", "must be at least 1")?;
        let cells = self.kinetic_grid()?.len();
        check(
            self.density_grid >= 1 && self.grid.is_multiple_of(self.density_grid),
            "density_grid",
            "must be a positive divisor of grid",
        )?;
        self.comparison_grid()?;
        for (name, d) in [("initial.plus", &self.initial.plus), ("initial.minus", &self.initial.minus)] {
            match d {
                Density::Constant(c) => check(finite_nonneg(*c), name, "must be finite and non-negative")?,
                Density::Profile(v) => {
                    check(v.len() == cells, name, format!("profile needs {cells} values, got {}", v.len()))?;
                    check(v.iter().all(|&c| finite_nonneg(c)), name, "values must be finite and non-negative")?;
                }
            }
        }
        check(
            !self.scaling.is_empty() || self.mode != Mode::Sweep,
            "scaling",
            "needs at least one n for a sweep",
        )?;
        check(self.scaling.iter().all(|&n| n >= 1), "scaling", "every n must be at least 1")?;
        check(self.scaling.len() < 1 << 31, "scaling", "too many rows")?;
        check(self.replicas >= 1, "replicas", "must be at least 1")?;
        check(self.replicas < u32::MAX as usize, "replicas", "too many replicas")?;
        check(self.simulation.particle_cap >= 1, "simulation.particle_cap", "must be at least 1")?;
        check(
            finite_nonneg(self.simulation.burn_in),
            "simulation.burn_in",
            "must be finite and non-negative",
        )?;
        check(self.simulation.resync_every >= 1, "simulation.resync_every", "must be at least 1")?;
        check(self.alpha.is_finite(), "alpha", "must be finite")?;
        check(self.beta.is_finite(), "beta", "must be finite")?;
        check(self.bootstrap_resamples >= 1, "bootstrap_resamples", "must be at least 1")?;
        if matches!(self.mode, Mode::Kinetic | Mode::Sweep) {
            check(
                self.model.supports_kinetic(),
                "model",
                "kinetic equations are available for the Glauber pair only at s = 0",
            )?;
        }
        Ok(())
    }

    /// Widom-Rowlinson convergence sweep: unit-mass tophat cross potentials,
    /// `z± = 0.3`, `ρ₀± = 0.2` on `[0, 10)`, compared at `t = 2`.
    pub fn widom_rowlinson_sweep() -> Self {
        ExperimentConfig {
            domain: TorusDomain::new(1, 10.0).expect("valid domain"),
            model: ModelSpec::default_widom_rowlinson(),
            mode: Mode::Sweep,
            initial: InitialDensities {
                plus: Density::Constant(0.2),
                minus: Density::Constant(0.2),
            },
            t_end: 2.0,
            t_eval: 2.0,
            observe_every: 0.5,
            dt: 0.01,
            grid: 1024,
            density_grid: 8,
            branching_form: BranchingForm::Printed,
            scaling: vec![10, 50, 250],
            replicas: 64,
            seed: 20_240_601,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            simulation: SimulationSettings {
                particle_cap: 1_000_000,
                burn_in: 0.0,
                resync_every: 10_000,
            },
            alpha: 0.0,
            beta: 0.0,
            bootstrap_resamples: 200,
            timing: false,
        }
    }
}
