//! Two-component spatial birth-and-death dynamics on a periodic torus.

// `!(x >= 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod kinetic;
pub mod kmc;
pub mod models;
mod quadrature;

pub use error::{Error, Result};
pub use geometry::{Kernel, Point, Species, SpeciesPair, TorusDomain, TwoSpeciesConfiguration};
pub use grid::GridSpec;
pub use harness::{run_experiment, run_scaling_sweep, run_single, ConvergenceTable, ExperimentConfig};
pub use kinetic::{
    convolve_periodic, homogeneous_fixed_point, homogeneous_rhs, integrate, kinetic_rhs, BranchingForm,
    HomogeneousState, KineticState, KineticSystem,
};
pub use kmc::{DensityField, SimOptions, Simulator, Trajectory};
pub use models::{apply_vlasov_scaling, ConditionReport, ModelSpec, ScaledModel};
