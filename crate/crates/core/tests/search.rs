use dirac_harmonic::geometry::{ChartedSphere, SphereGrid};
use dirac_harmonic::spectral::{descend, golden_theta, AnsatzSpace, SearchProblem, MAP_PARAMS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn problem(n: usize) -> SearchProblem {
    let m = ChartedSphere::round();
    let grid = SphereGrid::new(&m, n, n).unwrap();
    let space = AnsatzSpace::joint_default(&m);
    SearchProblem::new(m.clone(), m, grid, space).unwrap()
}

fn perturbed_golden(p: &SearchProblem, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = golden_theta(&p.space);
    for t in theta.iter_mut().skip(MAP_PARAMS) {
        *t += 1e-3 * rng.gen_range(-1.0..1.0);
    }
    theta
}

fn assert_monotone(trace: &[dirac_harmonic::spectral::TraceRow], start: f64) {
    let mut last = start;
    for row in trace.iter().filter(|r| r.accepted) {
        assert!(row.residual <= last, "{row:?} after {last}");
        last = row.residual;
    }
}

#[test]
fn basin_with_all_parameters_free() {
    let p = problem(16);
    let theta = perturbed_golden(&p, 1);
    let r = descend(&p, &theta, 500).unwrap();
    assert!(r.converged && r.residual <= 1e-12, "{}", r.residual);
    assert_monotone(&r.trace, r.initial_residual);
    // the map may slide along holomorphic maps but stays holomorphic
    let eps = r.theta[6].hypot(r.theta[7]);
    assert!(eps <= 1e-8, "{eps}");
    let drift = (0..6).map(|i| (r.theta[i] - theta[i]).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-3, "{drift}");
}

#[test]
fn basin_with_map_fixed() {
    let mut p = problem(16);
    p.fix_map();
    let theta = perturbed_golden(&p, 2);
    let r = descend(&p, &theta, 500).unwrap();
    assert!(r.residual <= 1e-12, "{}", r.residual);
    assert_eq!(&r.theta[..MAP_PARAMS], &theta[..MAP_PARAMS]);
}

#[test]
fn probe_stays_away_from_solutions() {
    let mut p = problem(12);
    p.fix_antiholomorphic_weight();
    let mut theta = perturbed_golden(&p, 3);
    theta[6] = 0.1;
    let r = descend(&p, &theta, 500).unwrap();
    assert!(r.residual >= 1e-7, "{}", r.residual);
    assert!(!r.converged);
    assert_monotone(&r.trace, r.initial_residual);
    assert_eq!(r.theta[6], 0.1);
    assert_eq!(r.theta[2], 1.0);
}

#[test]
fn budget_exhaustion_is_flagged() {
    let p = problem(10);
    let theta = perturbed_golden(&p, 4);
    let r = descend(&p, &theta, 2).unwrap();
    assert_eq!(r.iterations, 2);
    assert!(r.budget_exhausted && !r.converged);
    assert!(r.residual <= r.initial_residual);
}
