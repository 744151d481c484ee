//! The periodic arena, particle positions, radial interaction kernels and
//! the kernel functionals (mass, Mayer integral, relative energy) that every
//! rate model and parameter condition is built from.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::radial_integral;

pub const MAX_DIM: usize = 3;

/// Absolute tolerance used for every quadrature-backed kernel functional.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Axis-aligned periodic box `[0, L)^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRecord", into = "DomainRecord")]
pub struct TorusDomain {
    dim: usize,
    side_length: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRecord {
    dim: usize,
    side_length: f64,
}

impl TryFrom<DomainRecord> for TorusDomain {
    type Error = Error;

    fn try_from(r: DomainRecord) -> Result<Self> {
        TorusDomain::new(r.dim, r.side_length)
    }
}

impl From<TorusDomain> for DomainRecord {
    fn from(d: TorusDomain) -> Self {
        DomainRecord {
            dim: d.dim,
            side_length: d.side_length,
        }
    }
}

impl TorusDomain {
    pub fn new(dim: usize, side_length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::usage(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if !(side_length > 0.0 && side_length.is_finite()) {
            return Err(Error::usage(format!("side length must be positive, got {side_length}")));
        }
        Ok(TorusDomain { dim, side_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn volume(&self) -> f64 {
        self.side_length.powi(self.dim as i32)
    }

    /// Reduces a coordinate into `[0, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let r = x.rem_euclid(self.side_length);
        // rem_euclid rounds tiny negative inputs up to L itself
        if r >= self.side_length {
            0.0
        } else {
            r
        }
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::usage("point coordinates must be finite"));
        }
        let mut x = [0.0; MAX_DIM];
        for (slot, &c) in x.iter_mut().zip(coords) {
            *slot = self.wrap(c);
        }
        Ok(Point {
            coords: x,
            dim: self.dim as u8,
        })
    }

    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut x = [0.0; MAX_DIM];
        for slot in x.iter_mut().take(self.dim) {
            *slot = self.wrap(rng.random::<f64>() * self.side_length);
        }
        Point {
            coords: x,
            dim: self.dim as u8,
        }
    }

    /// `p + offset`, wrapped back onto the torus.
    pub fn translate(&self, p: &Point, offset: &[f64; MAX_DIM]) -> Point {
        let mut x = [0.0; MAX_DIM];
        for i in 0..self.dim {
            x[i] = self.wrap(p.coords[i] + offset[i]);
        }
        Point {
            coords: x,
            dim: self.dim as u8,
        }
    }

    /// Squared minimum-image distance. Callers guarantee matching dimensions.
    #[inline]
    pub fn distance_sq(&self, p: &Point, q: &Point) -> f64 {
        let l = self.side_length;
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut d = (p.coords[i] - q.coords[i]).abs();
            if d > 0.5 * l {
                d = l - d;
            }
            acc += d * d;
        }
        acc
    }

    #[inline]
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        self.distance_sq(p, q).sqrt()
    }

    /// Rejects kernels whose range would wrap around the torus.
    pub fn check_kernel(&self, k: &Kernel) -> Result<()> {
        if k.cutoff() > 0.5 * self.side_length {
            return Err(Error::usage(format!(
                "kernel cutoff {} exceeds half the side length {}",
                k.cutoff(),
                self.side_length
            )));
        }
        Ok(())
    }
}

/// A position on the torus; coordinates are always reduced into `[0, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    fn lex_cmp(&self, other: &Point) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Minimum distance over periodic images.
pub fn torus_distance(p: &Point, q: &Point, dom: &TorusDomain) -> Result<f64> {
    for pt in [p, q] {
        if pt.dim() != dom.dim() {
            return Err(Error::DimensionMismatch {
                expected: dom.dim(),
                found: pt.dim(),
            });
        }
    }
    Ok(dom.distance(p, q))
}

/// Radial, non-negative, compactly supported pair potential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    #[default]
    Zero,
    /// `A·1{|u| ≤ r}`.
    Tophat { amplitude: f64, radius: f64 },
    /// `A·exp(−|u|²/(2σ²))·1{|u| ≤ R}`.
    TruncatedGaussian { amplitude: f64, width: f64, cutoff: f64 },
}

impl Kernel {
    pub fn tophat(amplitude: f64, radius: f64) -> Self {
        Kernel::Tophat { amplitude, radius }
    }

    pub fn truncated_gaussian(amplitude: f64, width: f64, cutoff: f64) -> Self {
        Kernel::TruncatedGaussian {
            amplitude,
            width,
            cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Kernel::Zero => true,
            Kernel::Tophat { amplitude, radius } => {
                amplitude >= 0.0 && amplitude.is_finite() && radius > 0.0 && radius.is_finite()
            }
            Kernel::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
            } => {
                amplitude >= 0.0
                    && amplitude.is_finite()
                    && width > 0.0
                    && width.is_finite()
                    && cutoff > 0.0
                    && cutoff.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::usage(format!("invalid kernel parameters {self:?}")))
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { amplitude, .. } | Kernel::TruncatedGaussian { amplitude, .. } => {
                amplitude
            }
        }
    }

    /// Support radius; zero for the zero kernel.
    pub fn cutoff(&self) -> f64 {
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { radius, .. } => radius,
            Kernel::TruncatedGaussian { cutoff, .. } => cutoff,
        }
    }

    /// True when the kernel vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.amplitude() == 0.0
    }

    /// Pointwise supremum.
    pub fn sup(&self) -> f64 {
        self.amplitude()
    }

    /// Same shape with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Kernel {
        match *self {
            Kernel::Zero => Kernel::Zero,
            Kernel::Tophat { amplitude, radius } => Kernel::Tophat {
                amplitude: amplitude * factor,
                radius,
            },
            Kernel::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
            } => Kernel::TruncatedGaussian {
                amplitude: amplitude * factor,
                width,
                cutoff,
            },
        }
    }

    #[inline]
    pub fn eval(&self, distance: f64) -> f64 {
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { amplitude, radius } => {
                if distance <= radius {
                    amplitude
                } else {
                    0.0
                }
            }
            Kernel::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
            } => {
                if distance <= cutoff {
                    amplitude * (-distance * distance / (2.0 * width * width)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Evaluation from a squared distance, skipping the square root outside the support.
    #[inline]
    pub fn eval_sq(&self, distance_sq: f64) -> f64 {
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { amplitude, radius } => {
                if distance_sq <= radius * radius {
                    amplitude
                } else {
                    0.0
                }
            }
            Kernel::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
            } => {
                if distance_sq <= cutoff * cutoff {
                    amplitude * (-distance_sq / (2.0 * width * width)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `⟨φ⟩ = ∫ φ(u) du` over `ℝ^dim`.
    pub fn mass(&self, dim: usize) -> f64 {
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { amplitude, radius } => amplitude * ball_volume(dim, radius),
            Kernel::TruncatedGaussian { cutoff, .. } => {
                if self.is_zero() {
                    return 0.0;
                }
                radial_integral(|r| self.eval(r), dim, cutoff, QUADRATURE_TOL)
            }
        }
    }

    /// `C(φ) = ∫ |e^{−φ(u)} − 1| du`.
    pub fn mayer(&self, dim: usize) -> f64 {
        self.mayer_scaled(dim, 1.0)
    }

    /// `C(cφ) = ∫ |e^{−c·φ(u)} − 1| du` for any real `c`; `c < 0` gives the
    /// attractive form `∫ (e^{|c|φ} − 1)`.
    pub fn mayer_scaled(&self, dim: usize, c: f64) -> f64 {
        if self.is_zero() || c == 0.0 {
            return 0.0;
        }
        match *self {
            Kernel::Zero => 0.0,
            Kernel::Tophat { amplitude, radius } => {
                (-c * amplitude).exp_m1().abs() * ball_volume(dim, radius)
            }
            Kernel::TruncatedGaussian { cutoff, .. } => radial_integral(
                |r| (-c * self.eval(r)).exp_m1().abs(),
                dim,
                cutoff,
                QUADRATURE_TOL,
            ),
        }
    }

    /// Draws an offset `u` with density `φ(u)/⟨φ⟩`. The kernel must be non-zero.
    pub fn sample_offset<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> [f64; MAX_DIM] {
        match *self {
            Kernel::Zero => [0.0; MAX_DIM],
            Kernel::Tophat { radius, .. } => uniform_in_ball(dim, radius, rng),
            Kernel::TruncatedGaussian { width, cutoff, .. } => {
                let two_var = 2.0 * width * width;
                if cutoff <= 2.0 * width {
                    loop {
                        let u = uniform_in_ball(dim, cutoff, rng);
                        let r2: f64 = u.iter().map(|c| c * c).sum();
                        if rng.random::<f64>() < (-r2 / two_var).exp() {
                            return u;
                        }
                    }
                } else {
                    loop {
                        let mut u = [0.0; MAX_DIM];
                        for c in u.iter_mut().take(dim) {
                            let z: f64 = StandardNormal.sample(rng);
                            *c = width * z;
                        }
                        let r2: f64 = u.iter().map(|c| c * c).sum();
                        if r2 <= cutoff * cutoff {
                            return u;
                        }
                    }
                }
            }
        }
    }
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        1 => 2.0 * radius,
        2 => PI * radius * radius,
        3 => 4.0 / 3.0 * PI * radius.powi(3),
        _ => panic!("unsupported dimension {dim}"),
    }
}

fn uniform_in_ball<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> [f64; MAX_DIM] {
    loop {
        let mut u = [0.0; MAX_DIM];
        for c in u.iter_mut().take(dim) {
            *c = radius * (2.0 * rng.random::<f64>() - 1.0);
        }
        let r2: f64 = u.iter().map(|c| c * c).sum();
        if r2 <= radius * radius {
            return u;
        }
    }
}

/// `E_φ(x, pts) = Σ_{y ∈ pts} φ(x − y)`, summing over exactly the points given.
pub fn relative_energy(x: &Point, pts: &[Point], k: &Kernel, dom: &TorusDomain) -> f64 {
    if k.is_zero() {
        return 0.0;
    }
    pts.iter().map(|y| k.eval_sq(dom.distance_sq(x, y))).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Plus,
    Minus,
}

impl Species {
    pub const ALL: [Species; 2] = [Species::Plus, Species::Minus];

    pub fn other(self) -> Species {
        match self {
            Species::Plus => Species::Minus,
            Species::Minus => Species::Plus,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Species::Plus => 0,
            Species::Minus => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::Plus => "plus",
            Species::Minus => "minus",
        }
    }
}

/// One value per species.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpeciesPair<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> SpeciesPair<T> {
    pub fn new(plus: T, minus: T) -> Self {
        SpeciesPair { plus, minus }
    }

    pub fn get(&self, s: Species) -> &T {
        match s {
            Species::Plus => &self.plus,
            Species::Minus => &self.minus,
        }
    }

    pub fn get_mut(&mut self, s: Species) -> &mut T {
        match s {
            Species::Plus => &mut self.plus,
            Species::Minus => &mut self.minus,
        }
    }

    pub fn map<U, F: FnMut(T) -> U>(self, mut f: F) -> SpeciesPair<U> {
        SpeciesPair {
            plus: f(self.plus),
            minus: f(self.minus),
        }
    }
}

/// A finite two-species point configuration `(γ⁺, γ⁻)` with no repeated positions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwoSpeciesConfiguration {
    plus: Vec<Point>,
    minus: Vec<Point>,
}

impl TwoSpeciesConfiguration {
    pub fn new(plus: Vec<Point>, minus: Vec<Point>) -> Result<Self> {
        let cfg = TwoSpeciesConfiguration { plus, minus };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds without the duplicate check. Callers that generate points
    /// themselves must uphold the invariant.
    pub(crate) fn from_parts_unchecked(plus: Vec<Point>, minus: Vec<Point>) -> Self {
        TwoSpeciesConfiguration { plus, minus }
    }

    fn check(&self) -> Result<()> {
        let mut all: Vec<&Point> = self.plus.iter().chain(&self.minus).collect();
        if let Some(first) = all.first() {
            let dim = first.dim();
            if let Some(bad) = all.iter().find(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.dim(),
                });
            }
        }
        all.sort_by(|a, b| a.lex_cmp(b));
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("configuration contains coincident points"));
        }
        Ok(())
    }

    /// Checks the points against a domain.
    pub fn check_domain(&self, dom: &TorusDomain) -> Result<()> {
        for p in self.plus.iter().chain(&self.minus) {
            if p.dim() != dom.dim() {
                return Err(Error::DimensionMismatch {
                    expected: dom.dim(),
                    found: p.dim(),
                });
            }
            if p.coords().iter().any(|&c| !(0.0..dom.side_length()).contains(&c)) {
                return Err(Error::usage("point lies outside the domain"));
            }
        }
        Ok(())
    }

    pub fn plus(&self) -> &[Point] {
        &self.plus
    }

    pub fn minus(&self) -> &[Point] {
        &self.minus
    }

    pub fn species(&self, s: Species) -> &[Point] {
        match s {
            Species::Plus => &self.plus,
            Species::Minus => &self.minus,
        }
    }

    pub fn counts(&self) -> SpeciesPair<usize> {
        SpeciesPair::new(self.plus.len(), self.minus.len())
    }

    /// `|η| = |η⁺| + |η⁻|`.
    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, s: Species, x: &Point) -> bool {
        self.species(s).iter().any(|p| p == x)
    }

    /// Adds a point, enforcing disjointness.
    pub fn insert(&mut self, s: Species, x: Point) -> Result<()> {
        if self.contains(Species::Plus, &x) || self.contains(Species::Minus, &x) {
            return Err(Error::usage("point already present in the configuration"));
        }
        match s {
            Species::Plus => self.plus.push(x),
            Species::Minus => self.minus.push(x),
        }
        Ok(())
    }

    /// Removes the first occurrence of `x` from species `s`.
    pub fn remove(&mut self, s: Species, x: &Point) -> bool {
        let list = match s {
            Species::Plus => &mut self.plus,
            Species::Minus => &mut self.minus,
        };
        match list.iter().position(|p| p == x) {
            Some(i) => {
                list.remove(i);
                true
            }
            None => false,
        }
    }
}
