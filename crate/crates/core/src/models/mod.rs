//! The four two-component rate models, their Vlasov-scaled versions and the
//! parameter conditions under which their correlation-function evolutions
//! are well posed.
//!
//! Kernel names describe roles rather than symbols. Where a model's kernel
//! doubles as the name of a generic birth or death intensity, the field
//! doc comment gives the symbol it stands for.

mod conditions;
mod rates;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

pub use conditions::{
    feasible_region_scan, validate_conditions, ConditionReport, ConditionRow, ScanGrid, ScanHit,
};
pub use rates::{birth_intensity, birth_total_bound, death_intensity, sample_birth};
pub(crate) use rates::{activity_acceptance, ParentChannel, RateStructure};

use crate::error::{Error, Result};
use crate::geometry::{Kernel, TorusDomain};

/// Spatial logistic branching with competition for both species; the minus
/// species also branches into plus offspring and is fed by immigration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdlpPair {
    /// `m⁺`
    pub mortality_plus: f64,
    /// `m⁻`
    pub mortality_minus: f64,
    /// `a⁻`: minus–minus competition.
    pub competition_minus: Kernel,
    /// `a⁺`: minus offspring dispersal.
    pub branching_minus: Kernel,
    /// `b⁻`: plus–plus competition.
    pub competition_plus: Kernel,
    /// `b⁺`: plus offspring dispersal.
    pub branching_plus: Kernel,
    /// `φ⁻`: death of plus particles caused by minus neighbours.
    pub cross_competition: Kernel,
    /// `φ⁺`: plus offspring created around minus parents.
    pub cross_branching: Kernel,
    /// `z`: minus immigration.
    pub immigration: f64,
}

/// Two Glauber-type populations with activity-driven births damped by
/// Boltzmann factors. Widom-Rowlinson is the case of zero self potentials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlauberPair {
    /// Split of the cross energy between death (`s`) and birth (`1 − s`), in `[0, 1/2]`.
    pub s: f64,
    /// `z⁺`
    pub activity_plus: f64,
    /// `z⁻`
    pub activity_minus: f64,
    /// `ψ⁺`: felt by minus particles from plus neighbours.
    pub cross_on_minus: Kernel,
    /// `ψ⁻`: felt by plus particles from minus neighbours.
    pub cross_on_plus: Kernel,
    /// `φ⁺`
    pub self_plus: Kernel,
    /// `φ⁻`
    pub self_minus: Kernel,
}

/// Plus particles follow BDLP dynamics inside a Glauber minus environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdlpInGlauber {
    /// `m⁺`
    pub mortality_plus: f64,
    /// `a⁻`
    pub competition_plus: Kernel,
    /// `a⁺`
    pub branching_plus: Kernel,
    /// `φ`: death of plus particles caused by minus neighbours.
    pub cross_competition: Kernel,
    /// `b⁺`: plus offspring created around minus parents.
    pub cross_branching: Kernel,
    /// `ψ`: minus self repulsion.
    pub self_minus: Kernel,
    /// `z⁻`
    pub activity_minus: f64,
}

/// Plus particles whose death rate grows with local plus density and whose
/// fecundity is suppressed by the minus environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityBranching {
    /// `m⁺`
    pub mortality_plus: f64,
    /// `φ⁺`: multiplies the plus death rate by `exp(E_{φ⁺})`.
    pub crowding_plus: Kernel,
    /// `φ⁻`: minus self repulsion.
    pub self_minus: Kernel,
    /// `ψ⁻`: damps the fecundity of a plus parent by `exp(−E_{ψ⁻})`.
    pub parent_suppression: Kernel,
    /// `a⁺`
    pub branching_plus: Kernel,
    /// `z⁻`
    pub activity_minus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    BdlpPair(BdlpPair),
    GlauberPair(GlauberPair),
    BdlpInGlauber(BdlpInGlauber),
    DensityBranching(DensityBranching),
}

// Internally tagged enums lose the field path on errors, so the tag is
// split off by hand and the body goes through serde_path_to_error.
impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mut value = serde_json::Value::deserialize(deserializer)?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| de::Error::custom("model record must be an object"))?;
        let tag = obj
            .remove("model")
            .ok_or_else(|| de::Error::missing_field("model"))?;
        let tag = tag
            .as_str()
            .ok_or_else(|| de::Error::custom("`model` must be a string"))?
            .to_owned();
        fn body<T: serde::de::DeserializeOwned, E: de::Error>(v: serde_json::Value) -> std::result::Result<T, E> {
            serde_path_to_error::deserialize(v).map_err(|e| {
                let path = e.path().to_string();
                E::custom(format!("{path}: {}", e.into_inner()))
            })
        }
        match tag.as_str() {
            "bdlp_pair" => body(value).map(ModelSpec::BdlpPair),
            "glauber_pair" => body(value).map(ModelSpec::GlauberPair),
            "bdlp_in_glauber" => body(value).map(ModelSpec::BdlpInGlauber),
            "density_branching" => body(value).map(ModelSpec::DensityBranching),
            other => Err(de::Error::unknown_variant(
                other,
                &["bdlp_pair", "glauber_pair", "bdlp_in_glauber", "density_branching"],
            )),
        }
    }
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::BdlpPair(_) => "bdlp_pair",
            ModelSpec::GlauberPair(_) => "glauber_pair",
            ModelSpec::BdlpInGlauber(_) => "bdlp_in_glauber",
            ModelSpec::DensityBranching(_) => "density_branching",
        }
    }

    /// Every kernel with its field name.
    pub fn kernels(&self) -> Vec<(&'static str, Kernel)> {
        match self {
            ModelSpec::BdlpPair(m) => vec![
                ("competition_minus", m.competition_minus),
                ("branching_minus", m.branching_minus),
                ("competition_plus", m.competition_plus),
                ("branching_plus", m.branching_plus),
                ("cross_competition", m.cross_competition),
                ("cross_branching", m.cross_branching),
            ],
            ModelSpec::GlauberPair(m) => vec![
                ("cross_on_minus", m.cross_on_minus),
                ("cross_on_plus", m.cross_on_plus),
                ("self_plus", m.self_plus),
                ("self_minus", m.self_minus),
            ],
            ModelSpec::BdlpInGlauber(m) => vec![
                ("competition_plus", m.competition_plus),
                ("branching_plus", m.branching_plus),
                ("cross_competition", m.cross_competition),
                ("cross_branching", m.cross_branching),
                ("self_minus", m.self_minus),
            ],
            ModelSpec::DensityBranching(m) => vec![
                ("crowding_plus", m.crowding_plus),
                ("self_minus", m.self_minus),
                ("parent_suppression", m.parent_suppression),
                ("branching_plus", m.branching_plus),
            ],
        }
    }

    fn scalars(&self) -> Vec<(&'static str, f64)> {
        match self {
            ModelSpec::BdlpPair(m) => vec![
                ("mortality_plus", m.mortality_plus),
                ("mortality_minus", m.mortality_minus),
                ("immigration", m.immigration),
            ],
            ModelSpec::GlauberPair(m) => vec![
                ("activity_plus", m.activity_plus),
                ("activity_minus", m.activity_minus),
            ],
            ModelSpec::BdlpInGlauber(m) => vec![
                ("mortality_plus", m.mortality_plus),
                ("activity_minus", m.activity_minus),
            ],
            ModelSpec::DensityBranching(m) => vec![
                ("mortality_plus", m.mortality_plus),
                ("activity_minus", m.activity_minus),
            ],
        }
    }

    /// Checks parameter ranges and kernel shapes. Reports the offending field.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.scalars() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("model.{name}"),
                    format!("must be a finite non-negative number, got {v}"),
                ));
            }
        }
        if let ModelSpec::GlauberPair(g) = self {
            if !(0.0..=0.5).contains(&g.s) {
                return Err(Error::config("model.s", format!("must lie in [0, 1/2], got {}", g.s)));
            }
        }
        for (name, k) in self.kernels() {
            k.validate()
                .map_err(|e| Error::config(format!("model.{name}"), e.to_string()))?;
        }
        Ok(())
    }

    /// Checks every kernel range against the torus.
    pub fn check_domain(&self, dom: &TorusDomain) -> Result<()> {
        for (name, k) in self.kernels() {
            dom.check_kernel(&k)
                .map_err(|e| Error::config(format!("model.{name}"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn max_cutoff(&self) -> f64 {
        self.kernels()
            .iter()
            .map(|(_, k)| k.cutoff())
            .fold(0.0, f64::max)
    }

    /// Whether the mesoscopic limit of this model is available.
    pub fn supports_kinetic(&self) -> bool {
        !matches!(self, ModelSpec::GlauberPair(g) if g.s != 0.0)
    }

    /// The effective rates after Vlasov scaling with parameter `n`: pair
    /// interactions inside death rates and exponential factors are divided
    /// by `n`, activities and immigration multiplied by `n`, offspring
    /// dispersal kernels and mortalities left alone.
    fn vlasov_effective(&self, n: u32) -> ModelSpec {
        let inv = 1.0 / f64::from(n);
        let nf = f64::from(n);
        match self {
            ModelSpec::BdlpPair(m) => ModelSpec::BdlpPair(BdlpPair {
                competition_minus: m.competition_minus.scaled(inv),
                competition_plus: m.competition_plus.scaled(inv),
                cross_competition: m.cross_competition.scaled(inv),
                immigration: m.immigration * nf,
                ..m.clone()
            }),
            ModelSpec::GlauberPair(m) => ModelSpec::GlauberPair(GlauberPair {
                activity_plus: m.activity_plus * nf,
                activity_minus: m.activity_minus * nf,
                cross_on_minus: m.cross_on_minus.scaled(inv),
                cross_on_plus: m.cross_on_plus.scaled(inv),
                self_plus: m.self_plus.scaled(inv),
                self_minus: m.self_minus.scaled(inv),
                ..m.clone()
            }),
            ModelSpec::BdlpInGlauber(m) => ModelSpec::BdlpInGlauber(BdlpInGlauber {
                competition_plus: m.competition_plus.scaled(inv),
                cross_competition: m.cross_competition.scaled(inv),
                self_minus: m.self_minus.scaled(inv),
                activity_minus: m.activity_minus * nf,
                ..m.clone()
            }),
            ModelSpec::DensityBranching(m) => ModelSpec::DensityBranching(DensityBranching {
                crowding_plus: m.crowding_plus.scaled(inv),
                self_minus: m.self_minus.scaled(inv),
                parent_suppression: m.parent_suppression.scaled(inv),
                activity_minus: m.activity_minus * nf,
                ..m.clone()
            }),
        }
    }

    /// Parameters satisfying the BDLP-pair conditions at `α = β = 0`.
    pub fn default_bdlp_pair() -> ModelSpec {
        ModelSpec::BdlpPair(BdlpPair {
            mortality_plus: 3.0,
            mortality_minus: 3.0,
            competition_minus: Kernel::tophat(0.5, 1.0),
            branching_minus: Kernel::tophat(0.25, 1.0),
            competition_plus: Kernel::tophat(0.5, 1.0),
            branching_plus: Kernel::tophat(0.25, 1.0),
            cross_competition: Kernel::tophat(0.25, 1.0),
            cross_branching: Kernel::tophat(0.125, 1.0),
            immigration: 1.0,
        })
    }

    /// Widom-Rowlinson with `z± = 0.3` and unit-mass tophat cross potentials.
    pub fn default_widom_rowlinson() -> ModelSpec {
        ModelSpec::widom_rowlinson(0.3, 0.3, Kernel::tophat(0.5, 1.0), Kernel::tophat(0.5, 1.0))
    }

    pub fn widom_rowlinson(z_plus: f64, z_minus: f64, on_minus: Kernel, on_plus: Kernel) -> ModelSpec {
        ModelSpec::GlauberPair(GlauberPair {
            s: 0.0,
            activity_plus: z_plus,
            activity_minus: z_minus,
            cross_on_minus: on_minus,
            cross_on_plus: on_plus,
            self_plus: Kernel::Zero,
            self_minus: Kernel::Zero,
        })
    }

    /// Parameters satisfying the BDLP-in-Glauber conditions at `α = β = 0`.
    pub fn default_bdlp_in_glauber() -> ModelSpec {
        ModelSpec::BdlpInGlauber(BdlpInGlauber {
            mortality_plus: 4.0,
            competition_plus: Kernel::tophat(0.5, 1.0),
            branching_plus: Kernel::tophat(0.25, 1.0),
            cross_competition: Kernel::tophat(0.5, 1.0),
            cross_branching: Kernel::tophat(0.25, 1.0),
            self_minus: Kernel::tophat(0.5, 1.0),
            activity_minus: 0.3,
        })
    }

    /// Parameters satisfying the density-dependent branching conditions at `α = β = 0`.
    pub fn default_density_branching() -> ModelSpec {
        ModelSpec::DensityBranching(DensityBranching {
            mortality_plus: 2.5,
            crowding_plus: Kernel::tophat(0.1, 1.0),
            self_minus: Kernel::tophat(0.5, 1.0),
            parent_suppression: Kernel::tophat(0.25, 1.0),
            branching_plus: Kernel::tophat(0.1, 1.0),
            activity_minus: 0.3,
        })
    }

    /// The four defaults above.
    pub fn defaults() -> [ModelSpec; 4] {
        [
            ModelSpec::default_bdlp_pair(),
            ModelSpec::default_widom_rowlinson(),
            ModelSpec::default_bdlp_in_glauber(),
            ModelSpec::default_density_branching(),
        ]
    }
}

impl AsRef<ModelSpec> for ModelSpec {
    fn as_ref(&self) -> &ModelSpec {
        self
    }
}

/// A base model under Vlasov scaling with parameter `n`. Rate evaluations
/// through [`AsRef<ModelSpec>`] see the effective model, whose birth rates
/// already include the prefactor `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledModel {
    base: ModelSpec,
    n: u32,
    effective: ModelSpec,
}

impl ScaledModel {
    pub fn base(&self) -> &ModelSpec {
        &self.base
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn effective(&self) -> &ModelSpec {
        &self.effective
    }
}

impl AsRef<ModelSpec> for ScaledModel {
    fn as_ref(&self) -> &ModelSpec {
        &self.effective
    }
}

pub fn apply_vlasov_scaling(base: &ModelSpec, n: u32) -> Result<ScaledModel> {
    if n == 0 {
        return Err(Error::usage("scaling parameter n must be at least 1"));
    }
    Ok(ScaledModel {
        base: base.clone(),
        n,
        effective: base.vlasov_effective(n),
    })
}
