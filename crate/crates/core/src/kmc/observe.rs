use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, Point, Species, TorusDomain, TwoSpeciesConfiguration, MAX_DIM};
use crate::grid::GridSpec;

/// Independent stream `stream` of the generator family keyed by `master`.
pub fn replica_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::usage(format!("Poisson mean must be finite and non-negative, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::usage(e.to_string()))?;
    Ok(d.sample(rng) as usize)
}

fn key(p: &Point) -> [u64; MAX_DIM] {
    let mut k = [0; MAX_DIM];
    for (slot, c) in k.iter_mut().zip(p.coords()) {
        *slot = c.to_bits();
    }
    k
}

/// Draws points from `draw` until one is not in `seen`.
fn fresh<R: Rng + ?Sized, D: FnMut(&mut R) -> Point>(
    seen: &mut HashSet<[u64; MAX_DIM]>,
    rng: &mut R,
    mut draw: D,
) -> Point {
    loop {
        let p = draw(rng);
        if seen.insert(key(&p)) {
            return p;
        }
    }
}

/// Independent Poisson point processes with the given intensities.
pub fn init_poisson<R: Rng + ?Sized>(
    dom: &TorusDomain,
    intensity_plus: f64,
    intensity_minus: f64,
    rng: &mut R,
) -> Result<TwoSpeciesConfiguration> {
    let mut seen = HashSet::new();
    let mut out = [Vec::new(), Vec::new()];
    for (list, rho) in out.iter_mut().zip([intensity_plus, intensity_minus]) {
        let n = poisson_count(rho * dom.volume(), rng)?;
        *list = (0..n).map(|_| fresh(&mut seen, rng, |r| dom.uniform_point(r))).collect();
    }
    let [plus, minus] = out;
    Ok(TwoSpeciesConfiguration::from_parts_unchecked(plus, minus))
}

/// Poisson point processes with piecewise-constant intensities on `grid`.
pub fn init_profile<R: Rng + ?Sized>(
    grid: &GridSpec,
    intensity_plus: &[f64],
    intensity_minus: &[f64],
    rng: &mut R,
) -> Result<TwoSpeciesConfiguration> {
    for f in [intensity_plus, intensity_minus] {
        if f.len() != grid.len() {
            return Err(Error::usage(format!(
                "profile has {} cells, grid has {}",
                f.len(),
                grid.len()
            )));
        }
    }
    let dom = *grid.domain();
    let h = grid.cell_width();
    let vol = grid.cell_volume();
    let mut seen = HashSet::new();
    let mut out = [Vec::new(), Vec::new()];
    for (list, field) in out.iter_mut().zip([intensity_plus, intensity_minus]) {
        for (cell, &rho) in field.iter().enumerate() {
            let corner = grid.unravel(cell);
            for _ in 0..poisson_count(rho * vol, rng)? {
                let p = fresh(&mut seen, rng, |r| {
                    let mut c = [0.0; MAX_DIM];
                    for k in 0..dom.dim() {
                        c[k] = (corner[k] as f64 + r.random::<f64>()) * h;
                    }
                    dom.point(&c[..dom.dim()]).expect("finite coordinates")
                });
                list.push(p);
            }
        }
    }
    let [plus, minus] = out;
    Ok(TwoSpeciesConfiguration::from_parts_unchecked(plus, minus))
}

/// Piecewise-constant density estimate on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityField {
    grid: GridSpec,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl DensityField {
    pub fn new(grid: GridSpec, plus: Vec<f64>, minus: Vec<f64>) -> Result<Self> {
        if plus.len() != grid.len() || minus.len() != grid.len() {
            return Err(Error::usage("field length does not match the grid"));
        }
        Ok(DensityField { grid, plus, minus })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        DensityField {
            grid,
            plus: vec![0.0; grid.len()],
            minus: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    pub fn species(&self, s: Species) -> &[f64] {
        match s {
            Species::Plus => &self.plus,
            Species::Minus => &self.minus,
        }
    }

    pub fn species_mut(&mut self, s: Species) -> &mut Vec<f64> {
        match s {
            Species::Plus => &mut self.plus,
            Species::Minus => &mut self.minus,
        }
    }

    /// Field with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> DensityField {
        DensityField {
            grid: self.grid,
            plus: self.plus.iter().map(|v| v * c).collect(),
            minus: self.minus.iter().map(|v| v * c).collect(),
        }
    }
}

/// Per-cell particle counts averaged over snapshots, divided by the cell volume.
pub fn estimate_density_field(snapshots: &[TwoSpeciesConfiguration], grid: &GridSpec) -> DensityField {
    let mut field = DensityField::zeros(*grid);
    if snapshots.is_empty() {
        return field;
    }
    let w = 1.0 / (snapshots.len() as f64 * grid.cell_volume());
    for cfg in snapshots {
        for s in Species::ALL {
            let out = field.species_mut(s);
            for p in cfg.species(s) {
                out[grid.cell_of(p)] += w;
            }
        }
    }
    field
}

/// Radially averaged two-point correlation estimate `(bin centre, k̂⁽²⁾)`.
/// Ordered pairs are counted; a point is never paired with itself.
pub fn estimate_pair_correlation(
    snapshots: &[TwoSpeciesConfiguration],
    pair: (Species, Species),
    edges: &[f64],
    dom: &TorusDomain,
) -> Result<Vec<(f64, f64)>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) || edges[0] < 0.0 {
        return Err(Error::usage("bin edges must be non-negative and strictly increasing"));
    }
    if *edges.last().unwrap() > 0.5 * dom.side_length() {
        return Err(Error::usage("bin edges must not exceed half the side length"));
    }
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    for cfg in snapshots {
        let (a, b) = (cfg.species(pair.0), cfg.species(pair.1));
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if pair.0 == pair.1 && i == j {
                    continue;
                }
                let d = dom.distance(x, y);
                let k = edges.partition_point(|&e| e <= d);
                if k >= 1 && k <= bins && d < edges[bins] {
                    counts[k - 1] += 1;
                }
            }
        }
    }
    let norm = snapshots.len().max(1) as f64 * dom.volume();
    Ok((0..bins)
        .map(|k| {
            let shell = ball_volume(dom.dim(), edges[k + 1]) - ball_volume(dom.dim(), edges[k]);
            (0.5 * (edges[k] + edges[k + 1]), counts[k] as f64 / (norm * shell))
        })
        .collect())
}
