use proptest::prelude::*;
use singular_nls::coeffs::{coercivity_constants, CoefficientPair};
use singular_nls::grid::{BoundaryCondition, Domain, Field, Grid};
use singular_nls::localization::{
    dilate, localization_verdict, measure_support, support_containment, Verdict, VerdictOptions,
};
use singular_nls::solver::{continuation_solve, Profile, ProblemSpec, SolverConfig};
use singular_nls::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rect() -> Grid {
    Grid::new(Domain::rectangle((-1.0, 1.0), (-1.0, 0.5)).unwrap(), 0.05).unwrap()
}

fn mask(len: usize, seed: u64, density: u64) -> Vec<bool> {
    (0..len as u64).map(|k| (k.wrapping_mul(2654435761).wrapping_add(seed * 97)) % 1000 < density).collect()
}

fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(x, y)| !*x || *y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn support_shrinks_as_threshold_grows(t1 in 1e-4f64..1.0, f in 1.0f64..10.0, amp in 0.1f64..3.0) {
        let g = rect();
        let u = Field::from_fn(g, BoundaryCondition::None, |p| c(amp * (-3.0 * p[0] * p[0]).exp(), p[1] * amp)).unwrap();
        let lo = measure_support(&u, t1).unwrap();
        let hi = measure_support(&u, t1 * f).unwrap();
        prop_assert!(subset(&hi.mask, &lo.mask));
    }

    #[test]
    fn dilation_monotone(seed in 0u64..500, e1 in 0.0f64..0.3, de in 0.0f64..0.3, density in 1u64..60) {
        let g = rect();
        let k = mask(g.len(), seed, density);
        let small = dilate(&g, &k, e1).unwrap();
        prop_assert!(subset(&k, &small));
        prop_assert!(subset(&small, &dilate(&g, &k, e1 + de).unwrap()));
        let bigger_k: Vec<bool> = k.iter().zip(mask(g.len(), seed + 1, density)).map(|(a, b)| *a || b).collect();
        prop_assert!(subset(&small, &dilate(&g, &bigger_k, e1).unwrap()));
    }

    #[test]
    fn dilation_composition(seed in 0u64..500, e1 in 0.0f64..0.2, e2 in 0.0f64..0.2, density in 1u64..30) {
        let g = rect();
        let k = mask(g.len(), seed, density);
        let comp = dilate(&g, &dilate(&g, &k, e1).unwrap(), e2).unwrap();
        let direct = dilate(&g, &k, e1 + e2).unwrap();
        prop_assert!(subset(&comp, &direct));
        let padded = dilate(&g, &comp, g.h() * 2f64.sqrt()).unwrap();
        prop_assert!(subset(&direct, &padded));
    }
}

fn one_d_verdict(amp: f64) -> Verdict {
    let g = Grid::new(Domain::interval(-2.0, 2.0).unwrap(), 0.01).unwrap();
    let bc = BoundaryCondition::Dirichlet;
    let pair = CoefficientPair::new(c(0.0, 1.0), c(1.0, 0.0), 0.5).unwrap();
    let f = Profile::bump(vec![0.0], 0.25, 2.0, c(amp, 0.0)).sample(&g, bc).unwrap();
    let spec = ProblemSpec::new(pair, bc, f).unwrap();
    let cfg = SolverConfig::default();
    let res = continuation_solve(&spec, &cfg).unwrap();
    let cert = coercivity_constants(&pair).unwrap();
    localization_verdict(&res, &spec, &cfg, &cert, &[1.2], 0.3, 0.7, &VerdictOptions::default()).unwrap()
}

#[test]
fn zero_forcing_is_sound_and_vanishes() {
    let v = one_d_verdict(0.0);
    assert!(v.hypothesis_ok && v.observed_ok, "{:?}", v.details.failed_clauses);
    assert_eq!(v.details.support.support_cells, 0);
}

#[test]
fn small_forcing_predicts_and_observes_vanishing() {
    let v = one_d_verdict(0.5);
    assert!(v.hypothesis_ok, "{:?}", v.details.failed_clauses);
    assert!(v.observed_ok && v.sound());
}

#[test]
fn large_forcing_fails_energy_clause() {
    let v = one_d_verdict(1e3);
    assert!(!v.hypothesis_ok);
    assert!(!v.details.energy_ok);
    assert!(v.details.failed_clauses.iter().any(|s| s.starts_with("energy smallness")));
    assert!(v.sound());
}

#[test]
fn moderate_forcing_support_stays_near_source() {
    let g = Grid::new(Domain::interval(-2.0, 2.0).unwrap(), 0.01).unwrap();
    let bc = BoundaryCondition::Dirichlet;
    let pair = CoefficientPair::new(c(0.0, 1.0), c(1.0, 0.0), 0.5).unwrap();
    let f = Profile::bump(vec![0.0], 0.25, 2.0, c(10.0, 0.0)).sample(&g, bc).unwrap();
    let spec = ProblemSpec::new(pair, bc, f.clone()).unwrap();
    let res = continuation_solve(&spec, &SolverConfig::default()).unwrap();
    let report = support_containment(&res.u, &f, 0.25, 1e-4).unwrap();
    assert!(report.contained && report.all_centres_vanish, "{}", report.max_abs_outside);
    assert!(!report.centres.is_empty());
}
