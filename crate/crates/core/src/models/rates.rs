use rand::Rng;

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::geometry::{
    relative_energy, Kernel, Point, Species, SpeciesPair, TorusDomain, TwoSpeciesConfiguration,
};

/// Death rate `d±(x, ·)` of a particle at `x`, where `cfg` does not contain `x`.
pub fn death_intensity<M: AsRef<ModelSpec>>(
    model: &M,
    species: Species,
    x: &Point,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> Result<f64> {
    if cfg.contains(species, x) {
        return Err(Error::usage(
            "death intensity expects the configuration without the dying particle",
        ));
    }
    let e = |k: &Kernel, s: Species| relative_energy(x, cfg.species(s), k, dom);
    use Species::{Minus, Plus};
    Ok(match (model.as_ref(), species) {
        (ModelSpec::BdlpPair(m), Minus) => m.mortality_minus + e(&m.competition_minus, Minus),
        (ModelSpec::BdlpPair(m), Plus) => {
            m.mortality_plus + e(&m.competition_plus, Plus) + e(&m.cross_competition, Minus)
        }
        (ModelSpec::GlauberPair(m), Minus) => (-m.s * e(&m.cross_on_minus, Plus)).exp(),
        (ModelSpec::GlauberPair(m), Plus) => (-m.s * e(&m.cross_on_plus, Minus)).exp(),
        (ModelSpec::BdlpInGlauber(_), Minus) => 1.0,
        (ModelSpec::BdlpInGlauber(m), Plus) => {
            m.mortality_plus + e(&m.competition_plus, Plus) + e(&m.cross_competition, Minus)
        }
        (ModelSpec::DensityBranching(_), Minus) => 1.0,
        (ModelSpec::DensityBranching(m), Plus) => m.mortality_plus * e(&m.crowding_plus, Plus).exp(),
    })
}

/// Birth density `b±(x, γ)` of a new particle at `x`.
pub fn birth_intensity<M: AsRef<ModelSpec>>(
    model: &M,
    species: Species,
    x: &Point,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> f64 {
    let e = |k: &Kernel, s: Species| relative_energy(x, cfg.species(s), k, dom);
    use Species::{Minus, Plus};
    match (model.as_ref(), species) {
        (ModelSpec::BdlpPair(m), Minus) => e(&m.branching_minus, Minus) + m.immigration,
        (ModelSpec::BdlpPair(m), Plus) => e(&m.branching_plus, Plus) + e(&m.cross_branching, Minus),
        (ModelSpec::GlauberPair(m), Minus) => {
            m.activity_minus
                * (-(1.0 - m.s) * e(&m.cross_on_minus, Plus)).exp()
                * (-e(&m.self_minus, Minus)).exp()
        }
        (ModelSpec::GlauberPair(m), Plus) => {
            m.activity_plus
                * (-(1.0 - m.s) * e(&m.cross_on_plus, Minus)).exp()
                * (-e(&m.self_plus, Plus)).exp()
        }
        (ModelSpec::BdlpInGlauber(m), Minus) => m.activity_minus * (-e(&m.self_minus, Minus)).exp(),
        (ModelSpec::BdlpInGlauber(m), Plus) => {
            e(&m.branching_plus, Plus) + e(&m.cross_branching, Minus)
        }
        (ModelSpec::DensityBranching(m), Minus) => m.activity_minus * (-e(&m.self_minus, Minus)).exp(),
        (ModelSpec::DensityBranching(m), Plus) => cfg
            .plus()
            .iter()
            .map(|y| {
                let w = (-relative_energy(y, cfg.minus(), &m.parent_suppression, dom)).exp();
                w * m.branching_plus.eval_sq(dom.distance_sq(x, y))
            })
            .sum(),
    }
}

/// Energy `coef·E_kernel(x, γ_source)` entering a rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Coupling {
    pub source: Species,
    pub kernel: Kernel,
    pub coef: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum DeathForm {
    /// `base + Σ coef·E`
    Affine,
    /// `base·exp(Σ coef·E)`
    Exponential,
}

#[derive(Clone, Debug)]
pub(crate) struct DeathLaw {
    pub form: DeathForm,
    pub base: f64,
    pub couplings: Vec<Coupling>,
}

impl DeathLaw {
    pub fn rate(&self, energies: &[f64]) -> f64 {
        let s: f64 = self
            .couplings
            .iter()
            .zip(energies)
            .map(|(c, e)| c.coef * e)
            .sum();
        match self.form {
            DeathForm::Affine => self.base + s,
            DeathForm::Exponential => self.base * s.exp(),
        }
    }
}

/// `z·exp(−Σ coef·E)` with non-negative coefficients, so bounded by `z`.
#[derive(Clone, Debug)]
pub(crate) struct Activity {
    pub z: f64,
    pub suppressors: Vec<Coupling>,
}

/// `Σ_{y ∈ γ_source} w(y)·k(x − y)` with `w(y) = exp(−coef·E(y, ·))` or 1.
#[derive(Clone, Debug)]
pub(crate) struct ParentChannel {
    pub source: Species,
    pub kernel: Kernel,
    pub mass: f64,
    pub suppressor: Option<Coupling>,
}

#[derive(Clone, Debug)]
pub(crate) struct BirthLaw {
    pub activity: Option<Activity>,
    pub parents: Vec<ParentChannel>,
}

/// Every model rewritten in one shape: death rates as functions of a few
/// neighbour energies, births as an activity part plus parent-kernel parts.
/// Zero kernels and vanishing coefficients are dropped.
#[derive(Clone, Debug)]
pub(crate) struct RateStructure {
    pub death: SpeciesPair<DeathLaw>,
    pub birth: SpeciesPair<BirthLaw>,
}

fn coupling(source: Species, kernel: Kernel, coef: f64) -> Option<Coupling> {
    (!kernel.is_zero() && coef != 0.0).then_some(Coupling {
        source,
        kernel,
        coef,
    })
}

fn couplings<const N: usize>(list: [(Species, Kernel, f64); N]) -> Vec<Coupling> {
    list.into_iter()
        .filter_map(|(s, k, c)| coupling(s, k, c))
        .collect()
}

fn activity(z: f64, suppressors: Vec<Coupling>) -> Option<Activity> {
    (z > 0.0).then_some(Activity { z, suppressors })
}

fn parents(dim: usize, list: Vec<(Species, Kernel, Option<Coupling>)>) -> Vec<ParentChannel> {
    list.into_iter()
        .filter(|(_, k, _)| !k.is_zero())
        .map(|(source, kernel, suppressor)| ParentChannel {
            source,
            kernel,
            mass: kernel.mass(dim),
            suppressor,
        })
        .collect()
}

fn law(form: DeathForm, base: f64, couplings: Vec<Coupling>) -> DeathLaw {
    DeathLaw {
        form,
        base,
        couplings,
    }
}

impl RateStructure {
    pub fn new(model: &ModelSpec, dim: usize) -> Self {
        use DeathForm::{Affine, Exponential};
        use Species::{Minus, Plus};
        match model {
            ModelSpec::BdlpPair(m) => RateStructure {
                death: SpeciesPair::new(
                    law(
                        Affine,
                        m.mortality_plus,
                        couplings([
                            (Plus, m.competition_plus, 1.0),
                            (Minus, m.cross_competition, 1.0),
                        ]),
                    ),
                    law(Affine, m.mortality_minus, couplings([(Minus, m.competition_minus, 1.0)])),
                ),
                birth: SpeciesPair::new(
                    BirthLaw {
                        activity: None,
                        parents: parents(
                            dim,
                            vec![(Plus, m.branching_plus, None), (Minus, m.cross_branching, None)],
                        ),
                    },
                    BirthLaw {
                        activity: activity(m.immigration, vec![]),
                        parents: parents(dim, vec![(Minus, m.branching_minus, None)]),
                    },
                ),
            },
            ModelSpec::GlauberPair(m) => RateStructure {
                death: SpeciesPair::new(
                    law(Exponential, 1.0, couplings([(Minus, m.cross_on_plus, -m.s)])),
                    law(Exponential, 1.0, couplings([(Plus, m.cross_on_minus, -m.s)])),
                ),
                birth: SpeciesPair::new(
                    BirthLaw {
                        activity: activity(
                            m.activity_plus,
                            couplings([(Minus, m.cross_on_plus, 1.0 - m.s), (Plus, m.self_plus, 1.0)]),
                        ),
                        parents: vec![],
                    },
                    BirthLaw {
                        activity: activity(
                            m.activity_minus,
                            couplings([
                                (Plus, m.cross_on_minus, 1.0 - m.s),
                                (Minus, m.self_minus, 1.0),
                            ]),
                        ),
                        parents: vec![],
                    },
                ),
            },
            ModelSpec::BdlpInGlauber(m) => RateStructure {
                death: SpeciesPair::new(
                    law(
                        Affine,
                        m.mortality_plus,
                        couplings([
                            (Plus, m.competition_plus, 1.0),
                            (Minus, m.cross_competition, 1.0),
                        ]),
                    ),
                    law(Affine, 1.0, vec![]),
                ),
                birth: SpeciesPair::new(
                    BirthLaw {
                        activity: None,
                        parents: parents(
                            dim,
                            vec![(Plus, m.branching_plus, None), (Minus, m.cross_branching, None)],
                        ),
                    },
                    BirthLaw {
                        activity: activity(m.activity_minus, couplings([(Minus, m.self_minus, 1.0)])),
                        parents: vec![],
                    },
                ),
            },
            ModelSpec::DensityBranching(m) => RateStructure {
                death: SpeciesPair::new(
                    law(Exponential, m.mortality_plus, couplings([(Plus, m.crowding_plus, 1.0)])),
                    law(Affine, 1.0, vec![]),
                ),
                birth: SpeciesPair::new(
                    BirthLaw {
                        activity: None,
                        parents: parents(
                            dim,
                            vec![(
                                Plus,
                                m.branching_plus,
                                coupling(Minus, m.parent_suppression, 1.0),
                            )],
                        ),
                    },
                    BirthLaw {
                        activity: activity(m.activity_minus, couplings([(Minus, m.self_minus, 1.0)])),
                        parents: vec![],
                    },
                ),
            },
        }
    }

    /// Largest range of any kernel consulted by a rate.
    pub fn max_cutoff(&self) -> f64 {
        let mut r: f64 = 0.0;
        for s in Species::ALL {
            for c in &self.death.get(s).couplings {
                r = r.max(c.kernel.cutoff());
            }
            let b = self.birth.get(s);
            if let Some(a) = &b.activity {
                for c in &a.suppressors {
                    r = r.max(c.kernel.cutoff());
                }
            }
            for p in &b.parents {
                r = r.max(p.kernel.cutoff());
                if let Some(c) = &p.suppressor {
                    r = r.max(c.kernel.cutoff());
                }
            }
        }
        r
    }
}

fn parent_weight(
    channel: &ParentChannel,
    y: &Point,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> f64 {
    channel.suppressor.map_or(1.0, |c| {
        (-c.coef * relative_energy(y, cfg.species(c.source), &c.kernel, dom)).exp()
    })
}

fn channel_bounds(
    law: &BirthLaw,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> (f64, Vec<f64>) {
    let activity = law.activity.as_ref().map_or(0.0, |a| a.z * dom.volume());
    let parents = law
        .parents
        .iter()
        .map(|ch| {
            let w: f64 = cfg
                .species(ch.source)
                .iter()
                .map(|y| parent_weight(ch, y, cfg, dom))
                .sum();
            w * ch.mass
        })
        .collect();
    (activity, parents)
}

/// Certified upper bound `B̄ ≥ ∫ b(x, γ) dx` over the torus. Activity parts
/// contribute `z·|Λ|`; parent-kernel parts contribute their exact total.
pub fn birth_total_bound<M: AsRef<ModelSpec>>(
    model: &M,
    species: Species,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> f64 {
    let rs = RateStructure::new(model.as_ref(), dom.dim());
    let (a, p) = channel_bounds(rs.birth.get(species), cfg, dom);
    a + p.iter().sum::<f64>()
}

/// Proposal acceptance factor `exp(−Σ coef·E(x))` of an activity channel.
pub(crate) fn activity_acceptance<E>(a: &Activity, mut energy: E) -> f64
where
    E: FnMut(Species, &Kernel) -> f64,
{
    let s: f64 = a
        .suppressors
        .iter()
        .map(|c| c.coef * energy(c.source, &c.kernel))
        .sum();
    (-s).exp()
}

/// One thinned proposal from the birth density of `species`. Returns a new
/// point with probability `∫b / B̄`, distributed with density `b / ∫b`;
/// `None` is a thinning rejection.
pub fn sample_birth<M: AsRef<ModelSpec>, R: Rng + ?Sized>(
    model: &M,
    species: Species,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
    rng: &mut R,
) -> Result<Option<Point>> {
    let rs = RateStructure::new(model.as_ref(), dom.dim());
    let law = rs.birth.get(species);
    let (activity, parent_bounds) = channel_bounds(law, cfg, dom);
    let total = activity + parent_bounds.iter().sum::<f64>();
    if !(total > 0.0) {
        return Err(Error::usage("birth bound is zero; nothing to sample"));
    }
    let mut u = rng.random::<f64>() * total;
    if let Some(a) = law.activity.as_ref().filter(|_| u < activity) {
        let x = dom.uniform_point(rng);
        let accept = activity_acceptance(a, |s, k| relative_energy(&x, cfg.species(s), k, dom));
        return Ok((rng.random::<f64>() < accept).then_some(x));
    }
    u -= activity;
    let mut idx = parent_bounds.len() - 1;
    for (i, b) in parent_bounds.iter().enumerate() {
        if u < *b {
            idx = i;
            break;
        }
        u -= b;
    }
    let ch = &law.parents[idx];
    let pool = cfg.species(ch.source);
    let weights: Vec<f64> = pool.iter().map(|y| parent_weight(ch, y, cfg, dom)).collect();
    let mut v = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut parent = pool.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if v < *w {
            parent = i;
            break;
        }
        v -= w;
    }
    let offset = ch.kernel.sample_offset(dom.dim(), rng);
    let x = dom.translate(&pool[parent], &offset);
    if cfg.contains(Species::Plus, &x) || cfg.contains(Species::Minus, &x) {
        return Ok(None);
    }
    Ok(Some(x))
}
