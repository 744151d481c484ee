use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{k_inverse, k_transform, lp_exponential};
use crate::error::Result;
use crate::geometry::{Kernel, Point, TorusDomain, TwoSpeciesConfiguration};
use crate::grid::GridSpec;
use crate::kinetic::{ConvolutionMethod, PeriodicConvolver};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestCheck {
    pub name: String,
    /// Largest deviation seen.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &str, worst: f64, tolerance: f64) -> SelftestCheck {
    SelftestCheck {
        name: name.to_owned(),
        worst,
        tolerance,
        pass: worst <= tolerance,
    }
}

fn random_configuration(dom: &TorusDomain, np: usize, nm: usize, rng: &mut ChaCha8Rng) -> TwoSpeciesConfiguration {
    let mut draw = |n| (0..n).map(|_| dom.uniform_point(rng)).collect::<Vec<Point>>();
    let plus = draw(np);
    let minus = draw(nm);
    TwoSpeciesConfiguration::new(plus, minus).expect("continuous draws do not collide")
}

/// Combinatorics identities on small configurations and agreement of the two
/// convolution paths; deterministic.
pub fn selftest() -> Result<Vec<SelftestCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_7e57);
    let dom = TorusDomain::new(2, 5.0)?;
    let mut round_trip = 0.0f64;
    let mut exponential = 0.0f64;
    for _ in 0..10 {
        let w: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let g = move |xi: &TwoSpeciesConfiguration| {
            let s: f64 = xi.plus().iter().map(|p| (w[0] * p.coords()[0]).sin()).sum();
            let t: f64 = xi.minus().iter().map(|p| (w[1] * p.coords()[1]).cos()).sum();
            s * t + w[2] * xi.len() as f64
        };
        for np in 0..=3 {
            for nm in 0..=(5 - np).min(3) {
                let eta = random_configuration(&dom, np, nm, &mut rng);
                let back = k_inverse(|xi: &TwoSpeciesConfiguration| k_transform(g, xi).expect("small"), &eta)?;
                let forth = k_transform(|xi: &TwoSpeciesConfiguration| k_inverse(g, xi).expect("small"), &eta)?;
                round_trip = round_trip.max((back - g(&eta)).abs()).max((forth - g(&eta)).abs());
            }
        }
        let fp = move |p: &Point| w[0] * p.coords()[0].cos();
        let fm = move |p: &Point| w[1] - p.coords()[1].sin();
        for np in 0..=4 {
            for nm in 0..=(8 - np).min(4) {
                let eta = random_configuration(&dom, np, nm, &mut rng);
                let lhs = k_transform(|xi: &TwoSpeciesConfiguration| lp_exponential(fp, fm, xi), &eta)?;
                let rhs = lp_exponential(|p: &Point| 1.0 + fp(p), |p: &Point| 1.0 + fm(p), &eta);
                exponential = exponential.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            }
        }
    }
    let mut conv = 0.0f64;
    let k = Kernel::truncated_gaussian(1.0, 0.8, 2.0);
    for (dim, m) in [(1, 16), (1, 64), (1, 256), (2, 16)] {
        let grid = GridSpec::new(TorusDomain::new(dim, 8.0)?, m)?;
        let f: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>()).collect();
        let fast = PeriodicConvolver::new(&k, &grid, ConvolutionMethod::Fft)?.apply(&f);
        let direct = PeriodicConvolver::new(&k, &grid, ConvolutionMethod::Direct)?.apply(&f);
        let scale = direct.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let worst = fast.iter().zip(&direct).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        conv = conv.max(worst / scale);
    }
    Ok(vec![
        check("k_transform_round_trip", round_trip, 1e-12),
        check("lebesgue_poisson_exponential", exponential, 1e-12),
        check("fft_vs_direct_convolution", conv, 1e-10),
    ])
}
