use std::f64::consts::PI;

use ks_core::diffusion::Diffusion;
use ks_core::elliptic::{solve_jl, solve_standard};
use ks_core::functionals::key_identity_residual;
use ks_core::grid::quadrature;
use ks_core::stepper::{run, NullSink, Status, Stepper};
use ks_core::{Field64, Grid64, InitialCondition, ProblemConfig, SolverConfig, Variant};

fn l2(a: &[f64], b: &[f64], grid: &Grid64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).collect();
    quadrature(&d, grid).sqrt()
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn standard_elliptic_is_second_order() {
    // v = cos πx solves −v'' + v = (1 + π²) cos πx with zero Neumann data.
    let errors: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let g = Grid64::new(n).unwrap();
            let u = Field64::from_fn(&g, |x| (1.0 + PI * PI) * (PI * x).cos());
            let exact = Field64::from_fn(&g, |x| (PI * x).cos());
            l2(&solve_standard(&u, &g).unwrap(), &exact, &g)
        })
        .collect();
    for p in orders(&errors) {
        assert!(p >= 1.9, "order {p}, errors {errors:?}");
    }
}

#[test]
fn jl_elliptic_is_second_order() {
    // v = cos 2πx/(4π²) has zero mean and −v'' = cos 2πx = u − M with M = 1.
    let errors: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let g = Grid64::new(n).unwrap();
            let u = Field64::from_fn(&g, |x| 1.0 + (2.0 * PI * x).cos());
            let m = quadrature(&u, &g);
            let exact = Field64::from_fn(&g, |x| (2.0 * PI * x).cos() / (4.0 * PI * PI));
            l2(&solve_jl(&u, &g, m).unwrap(), &exact, &g)
        })
        .collect();
    for p in orders(&errors) {
        assert!(p >= 1.9, "order {p}, errors {errors:?}");
    }
}

#[test]
fn key_identity_converges() {
    for d in [
        Diffusion::InverseU,
        Diffusion::InverseOnePlusU,
        Diffusion::PowerOnePlusU(-2.0),
    ] {
        let res: Vec<f64> = [64, 128, 256, 512]
            .iter()
            .map(|&n| key_identity_residual(|x| 2.0 + (PI * x).cos(), &d, &Grid64::new(n).unwrap()).unwrap())
            .collect();
        for w in res.windows(2) {
            assert!(w[0] / w[1] >= 1.8, "{}: {res:?}", d.kind_name());
        }
    }
}

/// Averages adjacent cells pairwise, mapping a field on `2n` cells to `n`.
fn coarsen(u: &[f64]) -> Vec<f64> {
    u.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// Observed orders from successive L² differences of the final states on
/// the given grids (each twice the previous).
fn refinement_orders(sizes: &[usize]) -> Vec<f64> {
    let problem = ProblemConfig {
        variant: Variant::Standard,
        diffusion: Diffusion::InverseU,
        initial_condition: InitialCondition::CosineBump {
            mass: 2.0,
            amplitude: 0.5,
            frequency: 1.0,
        },
        t_end: 0.5,
    };
    let finals: Vec<Vec<f64>> = sizes.iter().map(|&n| run_to_end(problem, n)).collect();
    let diffs: Vec<f64> = finals
        .windows(2)
        .zip(sizes)
        .map(|(w, &n)| l2(&coarsen(&w[1]), &w[0], &Grid64::new(n).unwrap()))
        .collect();
    orders(&diffs)
}

fn run_to_end(problem: ProblemConfig, n: usize) -> Vec<f64> {
    let stepper = Stepper::new(problem, SolverConfig::default(), Grid64::new(n).unwrap()).unwrap();
    let mut s = stepper.initial_state().unwrap();
    while s.status == Status::Running {
        stepper.step(&mut s).unwrap();
    }
    assert_eq!(s.status, Status::Finished);
    s.u.into_vec()
}

// Upwinding makes the scheme first order, approached from below: the
// observed order is about 0.89 on 64/128/256 and 0.95 on 128/256/512.
#[test]
#[ignore = "pre-asymptotic: observed order is ~0.89 on 64/128/256"]
fn refinement_order_reaches_one_on_coarse_grids() {
    let p = refinement_orders(&[64, 128, 256]);
    assert!(p[0] >= 1.0, "observed order {p:?}");
}

#[test]
fn refinement_order_approaches_one() {
    let p = refinement_orders(&[64, 128, 256, 512]);
    assert!(p[0] < p[1], "orders {p:?}");
    assert!(p[1] >= 0.9, "orders {p:?}");
}

#[test]
fn mass_is_conserved_over_a_long_run() {
    let problem = ProblemConfig {
        variant: Variant::JaegerLuckhaus,
        diffusion: Diffusion::InverseOnePlusU,
        initial_condition: InitialCondition::GaussianBump {
            mass: 3.0,
            center: 0.3,
            width: 0.1,
            floor: 0.2,
        },
        t_end: 0.5,
    };
    let out = run(
        problem,
        SolverConfig::default(),
        Grid64::new(64).unwrap(),
        &mut NullSink,
    )
    .unwrap();
    assert_eq!(out.state.status, Status::Finished);
    assert!(out.max_mass_drift <= 1e-10, "drift {}", out.max_mass_drift);
}
