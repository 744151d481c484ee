use super::*;
use crate::geometry::TorusDomain;
use crate::models::{BdlpPair, GlauberPair};

fn grid1(l: f64, m: usize) -> GridSpec {
    GridSpec::new(TorusDomain::new(1, l).unwrap(), m).unwrap()
}

/// Grid on which a radius-1 tophat has exact quadrature mass: `h = 2/15`.
fn exact_tophat_grid() -> GridSpec {
    grid1(64.0 * 2.0 / 15.0, 64)
}

fn bumpy(grid: &GridSpec, base: f64, amp: f64, phase: f64) -> Vec<f64> {
    let l = grid.domain().side_length();
    (0..grid.len())
        .map(|i| {
            let c = grid.cell_center(i);
            let s: f64 = c[..grid.dim()]
                .iter()
                .map(|x| (std::f64::consts::TAU * x / l + phase).sin())
                .sum();
            base + amp * s
        })
        .collect()
}

fn all_models() -> Vec<ModelSpec> {
    let mut g = ModelSpec::default_widom_rowlinson();
    if let ModelSpec::GlauberPair(p) = &mut g {
        p.self_plus = Kernel::truncated_gaussian(0.3, 0.5, 1.0);
        p.self_minus = Kernel::tophat(0.2, 0.7);
    }
    let mut v = ModelSpec::defaults().to_vec();
    v.push(g);
    v
}

#[test]
fn rhs_examples() {
    let g = grid1(10.0, 16);
    let zero = KineticState::constant(g, 0.0, 0.0);
    let d = kinetic_rhs(&ModelSpec::default_bdlp_pair(), &zero).unwrap();
    assert!(d.minus.iter().all(|&v| v == 1.0) && d.plus.iter().all(|&v| v == 0.0));
    let wr = ModelSpec::widom_rowlinson(0.7, 0.4, Kernel::tophat(0.5, 1.0), Kernel::tophat(0.5, 1.0));
    let d = kinetic_rhs(&wr, &zero).unwrap();
    assert!(d.minus.iter().all(|&v| v == 0.4) && d.plus.iter().all(|&v| v == 0.7));
}

#[test]
fn glauber_constant_fields_match_hand_formula() {
    let g = grid1(10.0, 32);
    let m = ModelSpec::GlauberPair(GlauberPair {
        s: 0.0,
        activity_plus: 0.8,
        activity_minus: 1.1,
        cross_on_minus: Kernel::tophat(0.4, 1.0),
        cross_on_plus: Kernel::tophat(0.6, 1.0),
        self_plus: Kernel::tophat(0.1, 1.0),
        self_minus: Kernel::tophat(0.2, 1.0),
    });
    let (rp, rm) = (0.6, 0.9);
    let d = kinetic_rhs(&m, &KineticState::constant(g, rp, rm)).unwrap();
    // offsets -3..=3 of width 10/32 lie within distance 1 of the origin
    let w = 7.0 * 10.0 / 32.0;
    let expect_m = -rm + 1.1 * (-0.2 * w * rm - 0.4 * w * rp).exp();
    let expect_p = -rp + 0.8 * (-0.1 * w * rp - 0.6 * w * rm).exp();
    for i in 0..g.len() {
        assert!((d.minus[i] - expect_m).abs() < 1e-13);
        assert!((d.plus[i] - expect_p).abs() < 1e-13);
    }
}

#[test]
fn s_positive_is_unsupported() {
    let mut m = ModelSpec::default_widom_rowlinson();
    if let ModelSpec::GlauberPair(p) = &mut m {
        p.s = 0.5;
    }
    let st = KineticState::constant(grid1(10.0, 16), 0.1, 0.1);
    assert!(matches!(kinetic_rhs(&m, &st), Err(Error::Unsupported(_))));
}

#[test]
fn constant_fields_agree_with_reduced_system() {
    for dim in 1..=2 {
        let g = GridSpec::new(TorusDomain::new(dim, 6.0).unwrap(), 16).unwrap();
        for m in all_models() {
            let hs = HomogeneousSystem::new(&m, MassRule::Grid(g)).unwrap();
            for form in [BranchingForm::Printed, BranchingForm::ParentSite] {
                let sys = KineticSystem::new(&m, g, form).unwrap();
                for (rp, rm) in [(0.0, 0.0), (0.3, 0.7), (1.2, 0.1)] {
                    let d = sys.rhs(&KineticState::constant(g, rp, rm).field).unwrap();
                    let h = hs.rhs(rp, rm);
                    for i in 0..g.len() {
                        assert!((d.plus[i] - h.plus).abs() < 1e-12, "{} {form:?}", m.name());
                        assert!((d.minus[i] - h.minus).abs() < 1e-12, "{} {form:?}", m.name());
                    }
                }
            }
        }
    }
}

#[test]
fn branching_forms_differ_only_off_constant_data() {
    let g = grid1(10.0, 64);
    let m = ModelSpec::default_density_branching();
    let printed = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
    let parent = KineticSystem::new(&m, g, BranchingForm::ParentSite).unwrap();
    let f = DensityField::new(g, bumpy(&g, 1.0, 0.5, 0.0), bumpy(&g, 1.0, 0.8, 1.3)).unwrap();
    let a = printed.rhs(&f).unwrap();
    let b = parent.rhs(&f).unwrap();
    assert_eq!(a.minus, b.minus);
    assert!(a.plus.iter().zip(&b.plus).any(|(x, y)| (x - y).abs() > 1e-6));
}

#[test]
fn pure_decay_is_exponential() {
    let g = grid1(10.0, 16);
    let m = ModelSpec::widom_rowlinson(0.0, 0.0, Kernel::tophat(0.5, 1.0), Kernel::tophat(0.5, 1.0));
    let sys = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
    let init = DensityField::new(g, bumpy(&g, 1.0, 0.5, 0.0), vec![2.0; 16]).unwrap();
    let run = integrate(&sys, &KineticState { time: 0.0, field: init.clone() }, 1.0, 0.01, &[]).unwrap();
    let end = &run.states.last().unwrap();
    assert_eq!(end.time, 1.0);
    let decay = (-1.0f64).exp();
    for s in Species::ALL {
        for (a, b) in end.field.species(s).iter().zip(init.species(s)) {
            assert!((a - b * decay).abs() < 1e-8);
        }
    }
    assert_eq!(run.clipped, 0);
}

#[test]
fn constant_data_follows_reduced_ode() {
    for dim in 1..=2 {
        let g = GridSpec::new(TorusDomain::new(dim, 6.0).unwrap(), 16).unwrap();
        for m in all_models() {
            let sys = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
            let hs = HomogeneousSystem::new(&m, MassRule::Grid(g)).unwrap();
            let times = [0.5, 1.0, 2.0];
            let run = integrate(&sys, &KineticState::constant(g, 0.4, 0.6), 3.0, 0.01, &times).unwrap();
            let ode = hs
                .integrate(HomogeneousState { time: 0.0, plus: 0.4, minus: 0.6 }, 3.0, 0.01, &times)
                .unwrap();
            assert_eq!(run.states.len(), ode.len());
            for (st, h) in run.states.iter().zip(&ode) {
                assert_eq!(st.time, h.time);
                for i in 0..g.len() {
                    assert!((st.field.plus()[i] - h.plus).abs() < 1e-9, "{}", m.name());
                    assert!((st.field.minus()[i] - h.minus).abs() < 1e-9, "{}", m.name());
                }
            }
        }
    }
}

#[test]
fn rk4_is_fourth_order() {
    let g = grid1(10.0, 64);
    let m = ModelSpec::default_widom_rowlinson();
    let sys = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
    let init = KineticState {
        time: 0.0,
        field: DensityField::new(g, bumpy(&g, 0.4, 0.3, 0.0), bumpy(&g, 0.4, 0.3, 2.0)).unwrap(),
    };
    let end = |dt| integrate(&sys, &init, 2.0, dt, &[]).unwrap().states.pop().unwrap().field;
    let (a, b, c) = (end(0.2), end(0.1), end(0.05));
    let ab = a.sup_distance(&b);
    let bc = b.sup_distance(&c);
    let ratio = ab.plus.max(ab.minus) / bc.plus.max(bc.minus);
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
}

#[test]
fn translation_equivariance() {
    let g = GridSpec::new(TorusDomain::new(2, 8.0).unwrap(), 32).unwrap();
    for m in all_models() {
        let sys = KineticSystem::new(&m, g, BranchingForm::ParentSite).unwrap();
        let p = bumpy(&g, 0.5, 0.3, 0.4);
        let q = bumpy(&g, 0.7, 0.2, 2.2);
        let shift = [5, 11];
        let run = |p: Vec<f64>, q: Vec<f64>| {
            let st = KineticState { time: 0.0, field: DensityField::new(g, p, q).unwrap() };
            integrate(&sys, &st, 1.0, 0.05, &[]).unwrap().states.pop().unwrap().field
        };
        let a = run(p.clone(), q.clone());
        let b = run(shift_field(&g, &p, &shift), shift_field(&g, &q, &shift));
        let shifted = DensityField::new(g, shift_field(&g, a.plus(), &shift), shift_field(&g, a.minus(), &shift)).unwrap();
        let d = shifted.sup_distance(&b);
        assert!(d.plus < 1e-10 && d.minus < 1e-10, "{} {d:?}", m.name());
    }
}

#[test]
fn long_time_limit_is_the_fixed_point() {
    let g = exact_tophat_grid();
    for m in ModelSpec::defaults() {
        let sys = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
        let run = integrate(&sys, &KineticState::constant(g, 0.5, 0.5), 50.0, 0.01, &[]).unwrap();
        assert_eq!(run.clipped, 0);
        let fp = homogeneous_fixed_point(&m, 1).unwrap();
        let end = &run.states[0].field;
        for i in 0..g.len() {
            assert!((end.plus()[i] - fp.plus).abs() < 1e-4, "{}", m.name());
            assert!((end.minus()[i] - fp.minus).abs() < 1e-4, "{}", m.name());
        }
    }
}

#[test]
fn output_schedule() {
    let g = grid1(10.0, 16);
    let sys = KineticSystem::new(&ModelSpec::default_bdlp_pair(), g, BranchingForm::Printed).unwrap();
    let st = KineticState::constant(g, 0.1, 0.1);
    let run = integrate(&sys, &st, 1.0, 0.3, &[0.0, 0.25, 1.0]).unwrap();
    let times: Vec<f64> = run.states.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.0, 0.25, 1.0]);
    assert_eq!(run.states[0].field, st.field);
    assert!(integrate(&sys, &st, 1.0, 0.0, &[]).is_err());
    assert!(integrate(&sys, &st, 1.0, 0.1, &[0.5, 0.2]).is_err());
    assert!(integrate(&sys, &st, 1.0, 0.1, &[2.0]).is_err());
}

#[test]
fn runaway_growth_is_reported() {
    let g = grid1(10.0, 16);
    let m = ModelSpec::BdlpPair(BdlpPair {
        mortality_plus: 0.0,
        mortality_minus: 0.0,
        competition_minus: Kernel::Zero,
        branching_minus: Kernel::tophat(200.0, 1.0),
        competition_plus: Kernel::Zero,
        branching_plus: Kernel::Zero,
        cross_competition: Kernel::Zero,
        cross_branching: Kernel::Zero,
        immigration: 0.0,
    });
    let sys = KineticSystem::new(&m, g, BranchingForm::Printed).unwrap();
    let res = integrate(&sys, &KineticState::constant(g, 0.0, 1.0), 100.0, 0.01, &[]);
    assert!(matches!(res, Err(Error::NonFinite { species: "minus", .. })), "{res:?}");
}

#[test]
fn csv_rows() {
    let g = GridSpec::new(TorusDomain::new(2, 4.0).unwrap(), 2).unwrap();
    let st = KineticState::constant(g, 1.5, 0.5);
    let mut out = Vec::new();
    st.write_csv_rows(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(KineticState::csv_header(2), "t,cell_index,x0,x1,rho_plus,rho_minus");
    assert_eq!(text.lines().next().unwrap(), "0,0,1,1,1.5,0.5");
    assert_eq!(text.lines().count(), 4);
}
