//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI, TAU};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use twocomp::combinatorics::{k_inverse, k_transform, lp_exponential};
use twocomp::harness::{run_experiment, ExperimentConfig, Mode};
use twocomp::kinetic::{ConvolutionMethod, HomogeneousState, HomogeneousSystem, MassRule, PeriodicConvolver};
use twocomp::kmc::{replica_rng, simulate};
use twocomp::models::{validate_conditions, BdlpPair};
use twocomp::{
    integrate, BranchingForm, DensityField, GridSpec, Kernel, KineticState, KineticSystem, ModelSpec, Point,
    SimOptions, TorusDomain, TwoSpeciesConfiguration,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

type Criterion = (u32, &'static str, f64, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "combinatorics exactness", 5.0, combinatorics),
        (2, "kernel calculus", 5.0, kernel_calculus),
        (3, "validator fidelity", 1.0, validator),
        (4, "simulator analytic laws", 120.0, analytic_laws),
        (5, "small-instance jump oracle", 180.0, jump_oracle),
        (6, "kinetic solver", 60.0, kinetic_solver),
        (7, "fixed points", 60.0, fixed_points),
        (8, "vlasov convergence", 900.0, vlasov_convergence),
        (9, "reproducibility", 900.0, reproducibility),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let v = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let pass = v.pass && secs < budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id} {name}: {} ({}; {secs:.1}s of {budget}s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// 1

fn random_configuration(dom: &TorusDomain, np: usize, nm: usize, rng: &mut ChaCha8Rng) -> TwoSpeciesConfiguration {
    let plus = (0..np).map(|_| dom.uniform_point(rng)).collect();
    let minus = (0..nm).map(|_| dom.uniform_point(rng)).collect();
    TwoSpeciesConfiguration::new(plus, minus).unwrap()
}

/// A non-additive configuration function with random coefficients.
fn test_function(w: [f64; 6]) -> impl Fn(&TwoSpeciesConfiguration) -> f64 + Copy {
    move |xi: &TwoSpeciesConfiguration| {
        let (np, nm) = (xi.plus().len() as f64, xi.minus().len() as f64);
        let s: f64 = xi.plus().iter().map(|p| (w[3] * p.coords()[0] + p.coords()[1]).sin()).sum();
        let c: f64 = xi.minus().iter().map(|p| (w[4] * p.coords()[1]).cos()).product();
        w[0] + w[1] * np - w[2] * nm + s * c + w[5] * np * nm
    }
}

fn combinatorics() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dom = TorusDomain::new(2, 4.0).unwrap();
    let mut round_trip = 0.0f64;
    let mut exponential = 0.0f64;
    for _ in 0..100 {
        let w: [f64; 6] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let g = test_function(w);
        for np in 0..=6 {
            for nm in 0..=(6 - np) {
                let eta = random_configuration(&dom, np, nm, &mut rng);
                let scale = g(&eta).abs().max(1.0);
                let a = k_inverse(|xi: &TwoSpeciesConfiguration| k_transform(g, xi).unwrap(), &eta).unwrap();
                let b = k_transform(|xi: &TwoSpeciesConfiguration| k_inverse(g, xi).unwrap(), &eta).unwrap();
                round_trip = round_trip.max((a - g(&eta)).abs() / scale).max((b - g(&eta)).abs() / scale);
            }
        }
        let (a, b, c) = (w[0], w[1], w[2]);
        let fp = move |p: &Point| a * (b * p.coords()[0]).cos();
        let fm = move |p: &Point| c - (p.coords()[1]).sin();
        for np in 0..=8 {
            for nm in 0..=(8 - np) {
                let eta = random_configuration(&dom, np, nm, &mut rng);
                let lhs = k_transform(|xi: &TwoSpeciesConfiguration| lp_exponential(fp, fm, xi), &eta).unwrap();
                // e_λ(1 + f, η) as a direct product
                let rhs: f64 = eta.plus().iter().map(|p| 1.0 + fp(p)).product::<f64>()
                    * eta.minus().iter().map(|p| 1.0 + fm(p)).product::<f64>();
                exponential = exponential.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            }
        }
    }
    verdict(
        round_trip <= 1e-12 && exponential <= 1e-12,
        format!("round trip {round_trip:.2e}, exponential identity {exponential:.2e}, tolerance 1e-12"),
    )
}

// ---------------------------------------------------------------------------
// 2

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// `∫_{|x| ≤ r_max} f(|x|) dx` by composite five-point Gauss-Legendre.
fn radial_gl(f: impl Fn(f64) -> f64, dim: usize, r_max: f64) -> f64 {
    let surface = [2.0, TAU, 2.0 * TAU][dim - 1];
    let panels = 400;
    let h = r_max / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * h;
        for (x, w) in GL5 {
            let r = mid + 0.5 * h * x;
            sum += w * 0.5 * h * f(r) * r.powi(dim as i32 - 1);
        }
    }
    surface * sum
}

fn ball(dim: usize, r: f64) -> f64 {
    [2.0 * r, PI * r * r, 4.0 / 3.0 * PI * r.powi(3)][dim - 1]
}

fn kernel_calculus() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_order = f64::NEG_INFINITY;
    let mut worst_quad = 0.0f64;
    let mut worst_closed = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for i in 0..100 {
        let dim = rng.random_range(1..=3);
        let amp = rng.random_range(0.0..3.0);
        let k = if i % 2 == 0 {
            Kernel::tophat(amp, rng.random_range(0.1..2.0))
        } else {
            Kernel::truncated_gaussian(amp, rng.random_range(0.2..1.5), rng.random_range(0.2..3.0))
        };
        let (mass, mayer) = (k.mass(dim), k.mayer(dim));
        worst_order = worst_order.max(mayer - mass);
        let oracle_mass = radial_gl(|r| k.eval(r), dim, k.cutoff());
        let oracle_mayer = radial_gl(|r| 1.0 - (-k.eval(r)).exp(), dim, k.cutoff());
        worst_quad = worst_quad.max(rel(mass, oracle_mass)).max(rel(mayer, oracle_mayer));
        if let Kernel::Tophat { amplitude, radius } = k {
            let v = ball(dim, radius);
            let (closed_mass, closed_mayer) = (amplitude * v, (1.0 - (-amplitude).exp()) * v);
            worst_closed = worst_closed
                .max(rel(closed_mass, oracle_mass))
                .max(rel(closed_mayer, oracle_mayer))
                .max(rel(mass, closed_mass))
                .max(rel(mayer, closed_mayer));
        }
    }
    verdict(
        worst_order <= 1e-8 && worst_quad <= 1e-8 && worst_closed <= 1e-8,
        format!(
            "max C-mass {worst_order:.2e}, quadrature {worst_quad:.2e}, tophat closed forms {worst_closed:.2e}, tolerance 1e-8"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3

fn validator() -> Verdict {
    // in one dimension C(tophat(ln 2, 1)) = (1 − 1/2)·2 = 1
    let psi = Kernel::tophat(LN_2, 1.0);
    let c = psi.mayer(1);
    let pass_at = |z: f64| validate_conditions(&ModelSpec::widom_rowlinson(z, z, psi, psi), 0.0, 0.0, 1).unwrap().pass;
    let (low, high) = (pass_at(0.3), pass_at(0.4));
    verdict(
        (c - 1.0).abs() < 1e-12 && low && !high,
        format!("C = {c}, z=0.3 pass={low}, z=0.4 pass={high}"),
    )
}

// ---------------------------------------------------------------------------
// 4

fn birth_death(m_minus: f64, z: f64) -> ModelSpec {
    ModelSpec::BdlpPair(BdlpPair {
        mortality_plus: 1.0,
        mortality_minus: m_minus,
        competition_minus: Kernel::Zero,
        branching_minus: Kernel::Zero,
        competition_plus: Kernel::Zero,
        branching_plus: Kernel::Zero,
        cross_competition: Kernel::Zero,
        cross_branching: Kernel::Zero,
        immigration: z,
    })
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn analytic_laws() -> Verdict {
    let dom = TorusDomain::new(1, 10.0).unwrap();

    let death = birth_death(1.0, 0.0);
    let counts: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(4, r);
            let minus = (0..100).map(|_| dom.uniform_point(&mut rng)).collect();
            let init = TwoSpeciesConfiguration::new(vec![], minus).unwrap();
            let tr = simulate(&death, &dom, &init, 1.0, &[1.0], &SimOptions::default(), &mut rng).unwrap();
            tr.snapshots[0].counts.minus as f64
        })
        .collect();
    let p = (-1.0f64).exp();
    let mean = counts.iter().sum::<f64>() / 200.0;
    let sigma = (100.0 * p * (1.0 - p) / 200.0).sqrt();
    let z_death = (mean - 100.0 * p) / sigma;

    let z = 1.0;
    let immigration = birth_death(1.0, z);
    let opts = SimOptions { burn_in: 20.0, ..SimOptions::default() };
    let occ: Vec<(f64, f64)> = (0..32u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(41, r);
            let tr = simulate(&immigration, &dom, &TwoSpeciesConfiguration::empty(), 200.0, &[], &opts, &mut rng).unwrap();
            (tr.occupation.mean.minus, tr.occupation.mean_square.minus)
        })
        .collect();
    let means: Vec<f64> = occ.iter().map(|o| o.0).collect();
    let (pooled, se) = mean_and_se(&means);
    let second = occ.iter().map(|o| o.1).sum::<f64>() / occ.len() as f64;
    let dispersion = (second - pooled * pooled) / pooled;
    let target = z * dom.volume();
    let z_imm = (pooled - target) / se;
    verdict(
        z_death.abs() <= 3.0 && z_imm.abs() <= 3.0 && (0.9..=1.1).contains(&dispersion),
        format!(
            "pure death mean {mean:.3} vs {:.3} ({z_death:+.2}σ); immigration-death mean {pooled:.3} vs {target} ({z_imm:+.2}σ), variance/mean {dispersion:.3}",
            100.0 * p
        ),
    )
}

// ---------------------------------------------------------------------------
// 5

const WR_SIDE: f64 = 2.0;
const WR_Z: f64 = 1.0;
const WR_AMP: f64 = 1.5;
const WR_RADIUS: f64 = 0.5;
const BURN_IN: f64 = 10.0;
const HORIZON: f64 = 2000.0;
const RUNS: u64 = 32;

/// Time averages of `n⁺`, `n⁻`, `(n⁺)²` and `n⁺n⁻`.
type CountStats = [f64; 4];

fn torus_gap(x: f64, y: f64) -> f64 {
    let d = (x - y).abs() % WR_SIDE;
    d.min(WR_SIDE - d)
}

/// Discrete-time chain: per step of length `dt` at most one event, with
/// probability rate·dt. Births are uniform proposals accepted with
/// probability `exp(−ψ energy)`.
fn jump_chain(seed: u64, dt: f64) -> CountStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let proposal = WR_Z * WR_SIDE;
    let steps = (HORIZON / dt).round() as u64;
    let burn = (BURN_IN / dt).round() as u64;
    let mut acc = [0.0f64; 4];
    for step in 0..steps {
        let (np, nm) = (pts[0].len(), pts[1].len());
        if step >= burn {
            let (a, b) = (np as f64, nm as f64);
            acc[0] += a;
            acc[1] += b;
            acc[2] += a * a;
            acc[3] += a * b;
        }
        let total = (np + nm) as f64 + 2.0 * proposal;
        let u: f64 = rng.random();
        if u >= total * dt {
            continue;
        }
        let mut r = u / dt;
        if r < np as f64 {
            pts[0].swap_remove(r as usize);
            continue;
        }
        r -= np as f64;
        if r < nm as f64 {
            pts[1].swap_remove(r as usize);
            continue;
        }
        r -= nm as f64;
        let s = if r < proposal { 0 } else { 1 };
        let x = rng.random::<f64>() * WR_SIDE;
        let energy: f64 = pts[1 - s]
            .iter()
            .filter(|&&y| torus_gap(x, y) <= WR_RADIUS)
            .map(|_| WR_AMP)
            .sum();
        if rng.random::<f64>() < (-energy).exp() {
            pts[s].push(x);
        }
    }
    let n = (steps - burn) as f64;
    acc.map(|v| v / n)
}

fn compare(label: &str, a: &[CountStats], b: &[CountStats]) -> (f64, String) {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (k, name) in ["n+", "n-", "(n+)^2", "n+n-"].iter().enumerate() {
        let (ma, sa) = mean_and_se(&a.iter().map(|s| s[k]).collect::<Vec<_>>());
        let (mb, sb) = mean_and_se(&b.iter().map(|s| s[k]).collect::<Vec<_>>());
        let zk = (ma - mb) / (sa * sa + sb * sb).sqrt();
        worst = worst.max(zk.abs());
        parts.push(format!("{name} {ma:.3}/{mb:.3} ({zk:+.2}σ)"));
    }
    (worst, format!("{label}: {}", parts.join(", ")))
}

fn jump_oracle() -> Verdict {
    let dom = TorusDomain::new(1, WR_SIDE).unwrap();
    let psi = Kernel::tophat(WR_AMP, WR_RADIUS);
    let model = ModelSpec::widom_rowlinson(WR_Z, WR_Z, psi, psi);
    let opts = SimOptions { burn_in: BURN_IN, ..SimOptions::default() };
    let sim: Vec<CountStats> = (0..RUNS)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(5, r);
            let tr = simulate(&model, &dom, &TwoSpeciesConfiguration::empty(), HORIZON, &[], &opts, &mut rng).unwrap();
            let o = tr.occupation;
            [o.mean.plus, o.mean.minus, o.mean_square.plus, o.mean_cross]
        })
        .collect();
    let chain: Vec<CountStats> = (0..RUNS).into_par_iter().map(|r| jump_chain(500 + r, 1e-4)).collect();
    let (worst, detail) = compare("simulator/oracle", &sim, &chain);
    verdict(worst <= 3.0, detail)
}

// ---------------------------------------------------------------------------
// 6

fn grid1(l: f64, m: usize) -> GridSpec {
    GridSpec::new(TorusDomain::new(1, l).unwrap(), m).unwrap()
}

fn bumpy(grid: &GridSpec, base: f64, amp: f64, phase: f64) -> Vec<f64> {
    let l = grid.domain().side_length();
    (0..grid.len())
        .map(|i| base + amp * (TAU * grid.cell_center(i)[0] / l + phase).sin())
        .collect()
}

fn rk4_scalar(sys: &HomogeneousSystem, mut y: (f64, f64), t: f64, dt: f64) -> (f64, f64) {
    let steps = (t / dt).round() as usize;
    let f = |(p, m): (f64, f64)| {
        let d = sys.rhs(p, m);
        (d.plus, d.minus)
    };
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f((y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1));
        let k3 = f((y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1));
        let k4 = f((y.0 + dt * k3.0, y.1 + dt * k3.1));
        y.0 += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y.1 += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    y
}

fn kinetic_solver() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut conv = 0.0f64;
    for m in [16, 64, 256] {
        let grid = grid1(8.0, m);
        let f: Vec<f64> = (0..m).map(|_| rng.random()).collect();
        for k in [Kernel::tophat(0.7, 1.3), Kernel::truncated_gaussian(1.0, 0.8, 2.0)] {
            let fast = PeriodicConvolver::new(&k, &grid, ConvolutionMethod::Fft).unwrap().apply(&f);
            let slow = PeriodicConvolver::new(&k, &grid, ConvolutionMethod::Direct).unwrap().apply(&f);
            let scale = slow.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = fast.iter().zip(&slow).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            conv = conv.max(err / scale);
        }
    }

    // h = 2/15, so radius-1 tophats carry their exact mass on the grid
    let grid = grid1(64.0 * 2.0 / 15.0, 64);
    let times = [1.0, 2.0, 3.0, 4.0, 5.0];
    let mut constant = 0.0f64;
    for model in ModelSpec::defaults() {
        let sys = KineticSystem::new(&model, grid, BranchingForm::Printed).unwrap();
        let reduced = HomogeneousSystem::new(&model, MassRule::Exact { dim: 1 }).unwrap();
        let run = integrate(&sys, &KineticState::constant(grid, 0.4, 0.3), 5.0, 0.01, &times).unwrap();
        for st in &run.states {
            let (p, m) = rk4_scalar(&reduced, (0.4, 0.3), st.time, 1e-3);
            for (&a, &b) in st.field.plus().iter().zip(st.field.minus()) {
                constant = constant.max((a - p).abs()).max((b - m).abs());
            }
        }
    }

    let g = grid1(10.0, 64);
    let sys = KineticSystem::new(&ModelSpec::default_widom_rowlinson(), g, BranchingForm::Printed).unwrap();
    let init = KineticState {
        time: 0.0,
        field: DensityField::new(g, bumpy(&g, 0.4, 0.3, 0.0), bumpy(&g, 0.4, 0.3, 2.0)).unwrap(),
    };
    let end = |dt| integrate(&sys, &init, 2.0, dt, &[]).unwrap().states.pop().unwrap().field;
    let (a, b, c) = (end(0.2), end(0.1), end(0.05));
    let (ab, bc) = (a.sup_distance(&b), b.sup_distance(&c));
    let ratio = ab.plus.max(ab.minus) / bc.plus.max(bc.minus);

    verdict(
        conv <= 1e-10 && constant <= 1e-6 && (ratio - 16.0).abs() <= 2.0,
        format!("fft/direct {conv:.2e}, constant data vs reduced ODE {constant:.2e}, Richardson ratio {ratio:.2}"),
    )
}

// ---------------------------------------------------------------------------
// 7

fn fixed_points() -> Verdict {
    let mut worst = 0.0f64;
    let mut missing = Vec::new();
    for dim in 1..=3 {
        for model in ModelSpec::defaults() {
            let sys = HomogeneousSystem::new(&model, MassRule::Exact { dim }).unwrap();
            let Some(fp) = sys.fixed_point() else {
                missing.push(format!("{} d={dim}", model.name()));
                continue;
            };
            let h0 = HomogeneousState { time: 0.0, plus: 0.5, minus: 0.5 };
            let end = *sys.integrate(h0, 50.0, 0.01, &[]).unwrap().last().unwrap();
            worst = worst.max((end.plus - fp.plus).abs()).max((end.minus - fp.minus).abs());
        }
    }
    verdict(
        worst <= 1e-4 && missing.is_empty(),
        format!("max |ρ(50) − ρ*| {worst:.2e} over four models in dims 1-3, tolerance 1e-4; no root for {missing:?}"),
    )
}

// ---------------------------------------------------------------------------
// 8 and 9

fn sweep_config(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::widom_rowlinson_sweep()
    }
}

fn vlasov_convergence() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = sweep_config(tmp.path());
    let rows = run_experiment(&cfg).unwrap().convergence.unwrap().rows;
    let ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
    let decreasing = rows.windows(2).all(|w| {
        w[1].err_minus < w[0].err_minus + w[0].se_minus && w[1].err_plus < w[0].err_plus + w[0].se_plus
    });
    let last = rows.last().unwrap();
    let complete = rows.iter().all(|r| r.replicas == cfg.replicas);
    let errs: Vec<String> = rows
        .iter()
        .map(|r| format!("n={} err-={:.4}±{:.4} err+={:.4}±{:.4}", r.n, r.err_minus, r.se_minus, r.err_plus, r.se_plus))
        .collect();
    verdict(
        ns == [10, 50, 250] && complete && decreasing && last.err_minus < 0.05 && last.err_plus < 0.05,
        errs.join("; "),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn reproducibility() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    let mut differing = Vec::new();
    for (mode, tag) in [(Mode::Sweep, "sweep"), (Mode::Simulate, "simulate"), (Mode::Kinetic, "kinetic")] {
        let dir = tmp.path().join(tag);
        let mut cfg = sweep_config(&dir);
        cfg.mode = mode;
        if mode == Mode::Simulate {
            cfg.replicas = 8;
        }
        run_experiment(&cfg).unwrap();
        let first = snapshot(&dir);
        std::fs::remove_dir_all(&dir).unwrap();
        run_experiment(&cfg).unwrap();
        let second = snapshot(&dir);
        compared += first.len();
        if first.keys().ne(second.keys()) {
            differing.push(format!("{tag}: file sets differ"));
        }
        for (name, bytes) in &first {
            if second.get(name) != Some(bytes) {
                differing.push(format!("{tag}/{name}"));
            }
        }
    }
    verdict(
        differing.is_empty() && compared > 0,
        format!("{compared} files compared across sweep, simulate and kinetic runs; differing: {differing:?}"),
    )
}
