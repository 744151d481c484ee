//! Exact event-driven simulation of the two-component birth-and-death
//! process, Poisson initial states and empirical observables.
//!
//! The simulator is a thinned Gillespie scheme. Death events use exact
//! per-particle rates held in sum trees; birth events are proposed from a
//! dominating envelope and accepted with the ratio of the true density to
//! the envelope, so a rejected proposal still consumes an event time. Every
//! neighbour energy entering a rate is cached per particle and updated
//! locally through cell lists when a particle appears or disappears.

mod cells;
mod observe;
mod tree;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Species, SpeciesPair, TorusDomain, TwoSpeciesConfiguration};
use crate::models::{
    activity_acceptance, birth_total_bound, death_intensity, ModelSpec, ParentChannel, RateStructure,
};
use cells::CellIndex;
use tree::RateTree;

pub use observe::{
    estimate_density_field, estimate_pair_correlation, init_poisson, init_profile, replica_rng,
    DensityField,
};

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    /// Abort once the total particle count exceeds this.
    pub particle_cap: usize,
    /// Keep full configurations in snapshots, not only counts.
    pub record_configurations: bool,
    /// Occupation statistics integrate over `[burn_in, t_end]`.
    pub burn_in: f64,
    /// Caches are rebuilt from scratch after this many events.
    pub resync_every: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            particle_cap: 1_000_000,
            record_configurations: false,
            burn_in: 0.0,
            resync_every: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub counts: SpeciesPair<usize>,
    pub configuration: Option<TwoSpeciesConfiguration>,
}

/// Exact time averages of the counts over the occupation window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct OccupationStats {
    pub duration: f64,
    pub mean: SpeciesPair<f64>,
    pub mean_square: SpeciesPair<f64>,
    /// Time average of `n⁺·n⁻`.
    pub mean_cross: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EventCounters {
    pub births: SpeciesPair<u64>,
    pub deaths: SpeciesPair<u64>,
    pub rejections: u64,
    /// Largest relative disagreement between cached and rebuilt rates.
    pub max_cache_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub final_time: f64,
    pub final_state: TwoSpeciesConfiguration,
    pub occupation: OccupationStats,
    pub counters: EventCounters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Birth(Species),
    Death(Species),
    Rejected(Species),
}

/// Per parent channel: unit weights need no cache; suppressed parents keep
/// their suppressor energy and weight.
#[derive(Clone, Debug)]
enum ParentCache {
    Unit,
    Weighted { energy: Vec<f64>, weights: RateTree },
}

#[derive(Clone, Debug)]
pub struct Simulator {
    dom: TorusDomain,
    rates: RateStructure,
    points: SpeciesPair<Vec<Point>>,
    cells: SpeciesPair<CellIndex>,
    /// `energies[s][i·k + j]`: coupling `j` of the death law of particle `i`.
    energies: SpeciesPair<Vec<f64>>,
    death: SpeciesPair<RateTree>,
    parents: SpeciesPair<Vec<ParentCache>>,
    time: f64,
    opts: SimOptions,
    counters: EventCounters,
    since_resync: u64,
    scratch: Vec<(usize, f64)>,
}

impl Simulator {
    pub fn new<M: AsRef<ModelSpec>>(
        model: &M,
        dom: &TorusDomain,
        init: &TwoSpeciesConfiguration,
        opts: SimOptions,
    ) -> Result<Self> {
        let model = model.as_ref();
        model.validate()?;
        model.check_domain(dom)?;
        init.check_domain(dom)?;
        if init.len() > opts.particle_cap {
            return Err(Error::Explosion {
                time: 0.0,
                count: init.len(),
                cap: opts.particle_cap,
            });
        }
        let rates = RateStructure::new(model, dom.dim());
        let range = rates.max_cutoff();
        let parents = SpeciesPair::new(
            parent_caches(&rates.birth.plus.parents),
            parent_caches(&rates.birth.minus.parents),
        );
        let mut sim = Simulator {
            dom: *dom,
            points: SpeciesPair::default(),
            cells: SpeciesPair::new(CellIndex::new(dom, range), CellIndex::new(dom, range)),
            energies: SpeciesPair::default(),
            death: SpeciesPair::default(),
            parents,
            rates,
            time: 0.0,
            opts,
            counters: EventCounters::default(),
            since_resync: 0,
            scratch: Vec::new(),
        };
        for s in Species::ALL {
            for p in init.species(s) {
                sim.points.get_mut(s).push(*p);
                sim.cells.get_mut(s).push(p);
            }
        }
        sim.rebuild_caches();
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn counts(&self) -> SpeciesPair<usize> {
        SpeciesPair::new(self.points.plus.len(), self.points.minus.len())
    }

    pub fn configuration(&self) -> TwoSpeciesConfiguration {
        TwoSpeciesConfiguration::from_parts_unchecked(self.points.plus.clone(), self.points.minus.clone())
    }

    pub fn counters(&self) -> &EventCounters {
        &self.counters
    }

    /// Cached total death rate of one species.
    pub fn death_total(&self, s: Species) -> f64 {
        self.death.get(s).total()
    }

    /// Cached birth envelope of one species.
    pub fn birth_bound(&self, s: Species) -> f64 {
        let law = self.rates.birth.get(s);
        let activity = law.activity.as_ref().map_or(0.0, |a| a.z * self.dom.volume());
        activity
            + law
                .parents
                .iter()
                .zip(self.parents.get(s))
                .map(|(ch, cache)| ch.mass * self.parent_weight_total(ch, cache))
                .sum::<f64>()
    }

    fn parent_weight_total(&self, ch: &ParentChannel, cache: &ParentCache) -> f64 {
        match cache {
            ParentCache::Unit => self.points.get(ch.source).len() as f64,
            ParentCache::Weighted { weights, .. } => weights.total(),
        }
    }

    /// Σ death rates + Σ birth envelopes from the caches.
    pub fn total_event_rate(&self) -> f64 {
        Species::ALL
            .iter()
            .map(|&s| self.death_total(s) + self.birth_bound(s))
            .sum()
    }

    /// Largest relative difference between cached death rates and the
    /// explicit model formulas evaluated from scratch.
    pub fn cache_discrepancy<M: AsRef<ModelSpec>>(&self, model: &M) -> Result<f64> {
        let cfg = self.configuration();
        let mut worst: f64 = 0.0;
        for s in Species::ALL {
            for (i, p) in self.points.get(s).iter().enumerate() {
                let mut without = cfg.clone();
                without.remove(s, p);
                let exact = death_intensity(model, s, p, &without, &self.dom)?;
                let cached = self.death.get(s).get(i);
                worst = worst.max(rel_diff(cached, exact));
            }
            let exact = birth_total_bound(model, s, &cfg, &self.dom);
            worst = worst.max(rel_diff(self.birth_bound(s), exact));
        }
        Ok(worst)
    }

    /// Performs one event, or moves the clock to `t_max` and returns `None`
    /// when the next event would fall after it.
    pub fn step<R: Rng + ?Sized>(&mut self, t_max: f64, rng: &mut R) -> Result<Option<Event>> {
        match self.draw_wait(rng) {
            Some(w) if self.time + w <= t_max => {
                self.time += w;
                self.fire(rng).map(Some)
            }
            _ => {
                self.time = t_max;
                Ok(None)
            }
        }
    }

    /// Runs to `t_end`, recording the state at each observer time.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        t_end: f64,
        observer_times: &[f64],
        rng: &mut R,
    ) -> Result<Trajectory> {
        if !(t_end.is_finite() && t_end >= self.time) {
            return Err(Error::usage(format!(
                "t_end must be finite and not before the current time, got {t_end}"
            )));
        }
        if observer_times.windows(2).any(|w| !(w[0] < w[1]))
            || observer_times.iter().any(|&t| !(t >= self.time && t <= t_end))
        {
            return Err(Error::usage(
                "observer times must increase strictly within [now, t_end]",
            ));
        }
        let mut occ = Accumulator::default();
        let mut snapshots = Vec::with_capacity(observer_times.len());
        let mut next_obs = 0;
        loop {
            let next = self.draw_wait(rng).map_or(f64::INFINITY, |w| self.time + w);
            // the current state holds on [time, next)
            while next_obs < observer_times.len() && observer_times[next_obs] < next {
                snapshots.push(self.snapshot(observer_times[next_obs]));
                next_obs += 1;
            }
            let counts = self.counts();
            occ.add(self.time.max(self.opts.burn_in), next.min(t_end), counts);
            if next > t_end {
                self.time = t_end;
                break;
            }
            self.time = next;
            self.fire(rng)?;
        }
        Ok(Trajectory {
            snapshots,
            final_time: self.time,
            final_state: self.configuration(),
            occupation: occ.finish(),
            counters: self.counters,
        })
    }

    fn snapshot(&self, time: f64) -> Snapshot {
        Snapshot {
            time,
            counts: self.counts(),
            configuration: self.opts.record_configurations.then(|| self.configuration()),
        }
    }

    fn draw_wait<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let total = self.total_event_rate();
        if !(total > 0.0) {
            return None;
        }
        Some(-(1.0 - rng.random::<f64>()).ln() / total)
    }

    fn fire<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Event> {
        let channels = [
            self.death_total(Species::Plus),
            self.death_total(Species::Minus),
            self.birth_bound(Species::Plus),
            self.birth_bound(Species::Minus),
        ];
        let total: f64 = channels.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut pick = channels.iter().rposition(|&c| c > 0.0).unwrap_or(0);
        for (i, &c) in channels.iter().enumerate() {
            if u < c && c > 0.0 {
                pick = i;
                break;
            }
            u -= c;
        }
        let s = if pick % 2 == 0 { Species::Plus } else { Species::Minus };
        let event = if pick < 2 {
            let tree = self.death.get(s);
            let i = tree.sample(rng.random::<f64>() * tree.total());
            self.remove(s, i);
            *self.counters.deaths.get_mut(s) += 1;
            Event::Death(s)
        } else if let Some(x) = self.propose_birth(s, rng) {
            self.insert(s, x);
            *self.counters.births.get_mut(s) += 1;
            let n = self.points.plus.len() + self.points.minus.len();
            if n > self.opts.particle_cap {
                return Err(Error::Explosion {
                    time: self.time,
                    count: n,
                    cap: self.opts.particle_cap,
                });
            }
            Event::Birth(s)
        } else {
            self.counters.rejections += 1;
            Event::Rejected(s)
        };
        self.since_resync += 1;
        if self.since_resync >= self.opts.resync_every {
            self.rebuild_caches();
        }
        Ok(event)
    }

    fn propose_birth<R: Rng + ?Sized>(&self, s: Species, rng: &mut R) -> Option<Point> {
        let law = self.rates.birth.get(s);
        let activity = law.activity.as_ref().map_or(0.0, |a| a.z * self.dom.volume());
        let bounds: Vec<f64> = law
            .parents
            .iter()
            .zip(self.parents.get(s))
            .map(|(ch, cache)| ch.mass * self.parent_weight_total(ch, cache))
            .collect();
        let total = activity + bounds.iter().sum::<f64>();
        let mut u = rng.random::<f64>() * total;
        let x = match law.activity.as_ref().filter(|_| u < activity) {
            Some(a) => {
                let x = self.dom.uniform_point(rng);
                let accept = activity_acceptance(a, |src, k| self.energy_at(&x, src, k, None));
                if rng.random::<f64>() >= accept {
                    return None;
                }
                x
            }
            None => {
                u -= activity;
                let mut ci = bounds.iter().rposition(|&b| b > 0.0)?;
                for (i, &b) in bounds.iter().enumerate() {
                    if u < b && b > 0.0 {
                        ci = i;
                        break;
                    }
                    u -= b;
                }
                let ch = &law.parents[ci];
                let pool = self.points.get(ch.source);
                let parent = match &self.parents.get(s)[ci] {
                    ParentCache::Unit => rng.random_range(0..pool.len()),
                    ParentCache::Weighted { weights, .. } => {
                        weights.sample(rng.random::<f64>() * weights.total())
                    }
                };
                let offset = ch.kernel.sample_offset(self.dom.dim(), rng);
                self.dom.translate(&pool[parent], &offset)
            }
        };
        (!self.occupied(&x)).then_some(x)
    }

    fn occupied(&self, x: &Point) -> bool {
        Species::ALL.iter().any(|&t| {
            let pts = self.points.get(t);
            let mut hit = false;
            self.cells.get(t).for_same_cell(x, |i| hit |= pts[i] == *x);
            hit
        })
    }

    /// `E_k(x, γ_src)`, leaving out particle `exclude` of `src`.
    fn energy_at(&self, x: &Point, src: Species, k: &crate::geometry::Kernel, exclude: Option<usize>) -> f64 {
        if k.is_zero() {
            return 0.0;
        }
        let pts = self.points.get(src);
        let mut e = 0.0;
        self.cells.get(src).for_candidates(x, |i| {
            if Some(i) != exclude {
                e += k.eval_sq(self.dom.distance_sq(x, &pts[i]));
            }
        });
        e
    }

    /// Fills the scratch list with `(index, distance²)` of particles of `t`
    /// within `range` of `x`.
    fn gather(&mut self, t: Species, x: &Point, range: f64, exclude: Option<usize>) -> Vec<(usize, f64)> {
        let mut out = std::mem::take(&mut self.scratch);
        out.clear();
        let pts = self.points.get(t);
        let r2 = range * range;
        self.cells.get(t).for_candidates(x, |i| {
            if Some(i) == exclude {
                return;
            }
            let d2 = self.dom.distance_sq(x, &pts[i]);
            if d2 <= r2 {
                out.push((i, d2));
            }
        });
        out
    }

    /// Adds `sign·k(x − y)` to every cached energy whose source species is
    /// `s`. `exclude` is the index of `x` itself in species `s`, if present.
    fn propagate(&mut self, s: Species, x: &Point, sign: f64, exclude: Option<usize>) {
        for t in Species::ALL {
            let skip = if t == s { exclude } else { None };
            let k = self.rates.death.get(t).couplings.len();
            for j in 0..k {
                let c = self.rates.death.get(t).couplings[j];
                if c.source != s {
                    continue;
                }
                let near = self.gather(t, x, c.kernel.cutoff(), skip);
                for &(i, d2) in &near {
                    let e = &mut self.energies.get_mut(t)[i * k + j];
                    *e = (*e + sign * c.kernel.eval_sq(d2)).max(0.0);
                    let rate = self.rates.death.get(t).rate(&self.energies.get(t)[i * k..(i + 1) * k]);
                    self.death.get_mut(t).set(i, rate);
                }
                self.scratch = near;
            }
            for ci in 0..self.rates.birth.get(t).parents.len() {
                let ch = self.rates.birth.get(t).parents[ci].clone();
                let Some(sup) = ch.suppressor.filter(|c| c.source == s) else {
                    continue;
                };
                let skip = if ch.source == s { exclude } else { None };
                let near = self.gather(ch.source, x, sup.kernel.cutoff(), skip);
                if let ParentCache::Weighted { energy, weights } = &mut self.parents.get_mut(t)[ci] {
                    for &(q, d2) in &near {
                        energy[q] = (energy[q] + sign * sup.kernel.eval_sq(d2)).max(0.0);
                        weights.set(q, (-sup.coef * energy[q]).exp());
                    }
                }
                self.scratch = near;
            }
        }
    }

    fn insert(&mut self, s: Species, x: Point) {
        let own: Vec<f64> = self
            .rates
            .death
            .get(s)
            .couplings
            .iter()
            .map(|c| self.energy_at(&x, c.source, &c.kernel, None))
            .collect();
        let mut parent_energy = Vec::new();
        for t in Species::ALL {
            for ch in &self.rates.birth.get(t).parents {
                if let (true, Some(sup)) = (ch.source == s, ch.suppressor) {
                    parent_energy.push(self.energy_at(&x, sup.source, &sup.kernel, None));
                }
            }
        }
        self.propagate(s, &x, 1.0, None);
        let rate = self.rates.death.get(s).rate(&own);
        self.points.get_mut(s).push(x);
        self.cells.get_mut(s).push(&x);
        self.energies.get_mut(s).extend(own);
        self.death.get_mut(s).push(rate);
        let mut fresh = parent_energy.into_iter();
        for t in Species::ALL {
            for (ch, cache) in self.rates.birth.get(t).parents.iter().zip(self.parents.get_mut(t)) {
                if let (true, Some(sup), ParentCache::Weighted { energy, weights }) =
                    (ch.source == s, ch.suppressor, cache)
                {
                    let e = fresh.next().expect("one energy per suppressed channel");
                    energy.push(e);
                    weights.push((-sup.coef * e).exp());
                }
            }
        }
    }

    fn remove(&mut self, s: Species, i: usize) {
        let x = self.points.get(s)[i];
        self.propagate(s, &x, -1.0, Some(i));
        self.points.get_mut(s).swap_remove(i);
        self.cells.get_mut(s).swap_remove(i);
        let k = self.rates.death.get(s).couplings.len();
        let energies = self.energies.get_mut(s);
        if let Some(len) = energies.len().checked_div(k) {
            let last = len - 1;
            if i != last {
                energies.copy_within(last * k..(last + 1) * k, i * k);
            }
            energies.truncate(last * k);
        }
        self.death.get_mut(s).swap_remove(i);
        for t in Species::ALL {
            for (ch, cache) in self.rates.birth.get(t).parents.iter().zip(self.parents.get_mut(t)) {
                if let (true, ParentCache::Weighted { energy, weights }) = (ch.source == s, cache) {
                    energy.swap_remove(i);
                    weights.swap_remove(i);
                }
            }
        }
    }

    /// Recomputes every cached energy, rate and weight from the positions,
    /// recording the largest disagreement with the incremental caches.
    fn rebuild_caches(&mut self) {
        let mut drift: f64 = 0.0;
        for s in Species::ALL {
            let law = self.rates.death.get(s).clone();
            let k = law.couplings.len();
            let n = self.points.get(s).len();
            let mut energies = Vec::with_capacity(n * k);
            let mut rates = Vec::with_capacity(n);
            for i in 0..n {
                let x = self.points.get(s)[i];
                for c in &law.couplings {
                    let skip = if c.source == s { Some(i) } else { None };
                    energies.push(self.energy_at(&x, c.source, &c.kernel, skip));
                }
                rates.push(law.rate(&energies[i * k..]));
            }
            if self.death.get(s).len() == n {
                for (cached, fresh) in self.death.get(s).values().iter().zip(&rates) {
                    drift = drift.max(rel_diff(*cached, *fresh));
                }
            }
            *self.energies.get_mut(s) = energies;
            self.death.get_mut(s).reset(&rates);
        }
        for t in Species::ALL {
            for ci in 0..self.rates.birth.get(t).parents.len() {
                let ch = self.rates.birth.get(t).parents[ci].clone();
                let Some(sup) = ch.suppressor else { continue };
                let pool = self.points.get(ch.source).clone();
                let fresh: Vec<f64> = pool
                    .iter()
                    .enumerate()
                    .map(|(q, y)| {
                        let skip = if sup.source == ch.source { Some(q) } else { None };
                        self.energy_at(y, sup.source, &sup.kernel, skip)
                    })
                    .collect();
                let w: Vec<f64> = fresh.iter().map(|e| (-sup.coef * e).exp()).collect();
                if let ParentCache::Weighted { energy, weights } = &mut self.parents.get_mut(t)[ci] {
                    if weights.len() == w.len() {
                        for (cached, f) in weights.values().iter().zip(&w) {
                            drift = drift.max(rel_diff(*cached, *f));
                        }
                    }
                    *energy = fresh;
                    weights.reset(&w);
                }
            }
        }
        self.counters.max_cache_drift = self.counters.max_cache_drift.max(drift);
        self.since_resync = 0;
    }
}

fn parent_caches(channels: &[ParentChannel]) -> Vec<ParentCache> {
    channels
        .iter()
        .map(|ch| match ch.suppressor {
            None => ParentCache::Unit,
            Some(_) => ParentCache::Weighted {
                energy: Vec::new(),
                weights: RateTree::default(),
            },
        })
        .collect()
}

/// Relative difference with an absolute floor of 1e-12.
fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

#[derive(Default)]
struct Accumulator {
    duration: f64,
    n: [f64; 2],
    n2: [f64; 2],
    cross: f64,
}

impl Accumulator {
    fn add(&mut self, t0: f64, t1: f64, counts: SpeciesPair<usize>) {
        if !(t1 > t0) {
            return;
        }
        let dt = t1 - t0;
        let (p, m) = (counts.plus as f64, counts.minus as f64);
        self.duration += dt;
        self.n[0] += p * dt;
        self.n[1] += m * dt;
        self.n2[0] += p * p * dt;
        self.n2[1] += m * m * dt;
        self.cross += p * m * dt;
    }

    fn finish(&self) -> OccupationStats {
        if self.duration <= 0.0 {
            return OccupationStats::default();
        }
        let d = self.duration;
        OccupationStats {
            duration: d,
            mean: SpeciesPair::new(self.n[0] / d, self.n[1] / d),
            mean_square: SpeciesPair::new(self.n2[0] / d, self.n2[1] / d),
            mean_cross: self.cross / d,
        }
    }
}

/// Simulates from `init` to `t_end`.
pub fn simulate<M: AsRef<ModelSpec>, R: Rng + ?Sized>(
    model: &M,
    dom: &TorusDomain,
    init: &TwoSpeciesConfiguration,
    t_end: f64,
    observer_times: &[f64],
    opts: &SimOptions,
    rng: &mut R,
) -> Result<Trajectory> {
    Simulator::new(model, dom, init, opts.clone())?.run(t_end, observer_times, rng)
}

/// Σ death intensities + Σ birth envelopes, evaluated from scratch with the
/// explicit model formulas.
pub fn total_event_rate<M: AsRef<ModelSpec>>(
    model: &M,
    cfg: &TwoSpeciesConfiguration,
    dom: &TorusDomain,
) -> Result<f64> {
    let mut total = 0.0;
    for s in Species::ALL {
        for p in cfg.species(s) {
            let mut without = cfg.clone();
            without.remove(s, p);
            total += death_intensity(model, s, p, &without, dom)?;
        }
        total += birth_total_bound(model, s, cfg, dom);
    }
    Ok(total)
}
