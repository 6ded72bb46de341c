//! Numerical self-checks run by `ks1d verify`. Each check compares the
//! discrete operators against an exact or analytic answer.

use std::f64::consts::PI;

use ks_core::elliptic::{solve_jl, solve_standard};
use ks_core::functionals::{check_regularity, dissipation, key_identity_residual, lyapunov_functional, source_term};
use ks_core::grid::{face_gradient, quadrature};
use ks_core::{Diffusion64 as Diffusion, Field64 as Field, Grid64 as Grid, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// `log2(e_k / e_{k+1})` for consecutive errors.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// L² errors of the elliptic solve against a manufactured solution:
/// `v = cos πx` for the standard problem, `v = cos 2πx / (4π²)` for the
/// zero-mean one.
pub fn elliptic_errors(variant: Variant, sizes: &[usize]) -> Vec<f64> {
    sizes
        .iter()
        .map(|&n| {
            let g = Grid::new(n).expect("valid grid");
            let (v, exact) = match variant {
                Variant::Standard => {
                    let u = Field::from_fn(&g, |x| (1.0 + PI * PI) * (PI * x).cos());
                    (solve_standard(&u, &g), Field::from_fn(&g, |x| (PI * x).cos()))
                }
                Variant::JaegerLuckhaus => {
                    let u = Field::from_fn(&g, |x| 1.0 + (2.0 * PI * x).cos());
                    let m = quadrature(&u, &g);
                    (
                        solve_jl(&u, &g, m),
                        Field::from_fn(&g, |x| (2.0 * PI * x).cos() / (4.0 * PI * PI)),
                    )
                }
            };
            let v = v.expect("manufactured problem is solvable");
            let sq: Vec<f64> = v.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).collect();
            quadrature(&sq, &g).sqrt()
        })
        .collect()
}

/// Key-identity residuals for `φ = 2 + cos πx`.
pub fn key_identity_residuals(d: &Diffusion, sizes: &[usize]) -> Vec<f64> {
    sizes
        .iter()
        .map(|&n| {
            key_identity_residual(|x| 2.0 + (PI * x).cos(), d, &Grid::new(n).expect("valid grid"))
                .expect("φ is positive")
        })
        .collect()
}

/// `exp(Σ_k c_k cos kπx)` with up to seven random modes, `|c_k| ≤ 1/(1+k)`,
/// rescaled to the given mass.
pub fn random_smooth_field(rng: &mut impl Rng, grid: &Grid, mass: f64) -> Field {
    let modes = rng.random_range(1..=7);
    let coeffs: Vec<f64> = (0..modes)
        .map(|k| rng.random_range(-1.0..1.0) / (1.0 + k as f64))
        .collect();
    let raw = Field::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * PI * x).cos())
            .sum::<f64>()
            .exp()
    });
    let scale = mass / quadrature(&raw, grid);
    raw.map(|x| x * scale)
}

/// Smallest regularity slack divided by `1 + |F|` over `count` random
/// fields per critical family, with masses drawn from `[0.5, 10]`.
pub fn worst_random_slack(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..count {
        let n = [32, 64, 128, 256][rng.random_range(0..4)];
        let g = Grid::new(n).expect("valid grid");
        let mass = rng.random_range(0.5..=10.0);
        let u = random_smooth_field(&mut rng, &g, mass);
        for d in [Diffusion::InverseU, Diffusion::InverseOnePlusU] {
            let f = lyapunov_functional(&u, &d, &g).expect("positive field");
            let s = check_regularity(&u, &d, &g, mass).expect("critical diffusion");
            worst = worst.min(s.lower_bound.min(s.entropy_bound) / (1.0 + f.abs()));
        }
    }
    worst
}

pub fn run_checks() -> Vec<Check> {
    let mut checks = Vec::new();

    let g = Grid::new(128).unwrap();
    let x2 = Field::from_fn(&g, |x| x * x);
    let err = (quadrature(&x2, &g) - (1.0 / 3.0 - g.h() * g.h() / 12.0)).abs();
    checks.push(Check::new(
        "midpoint quadrature of x^2",
        err <= 1e-14,
        format!("error {err:.2e}"),
    ));

    let lin = Field::from_fn(&g, |x| 3.0 * x - 1.0);
    let grad = face_gradient(&lin, &g);
    let err = grad.interior().iter().map(|q| (q - 3.0).abs()).fold(0.0, f64::max);
    checks.push(Check::new(
        "face gradient of a linear field",
        err <= 1e-12,
        format!("error {err:.2e}"),
    ));

    let sizes = [32, 64, 128, 256];
    for (name, variant) in [
        ("standard elliptic order >= 1.9", Variant::Standard),
        ("zero-mean elliptic order >= 1.9", Variant::JaegerLuckhaus),
    ] {
        let p = observed_orders(&elliptic_errors(variant, &sizes));
        let min = p.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::new(name, min >= 1.9, format!("orders {p:.3?}")));
    }

    for (name, d) in [
        ("key identity, inverse_u", Diffusion::InverseU),
        ("key identity, inverse_one_plus_u", Diffusion::InverseOnePlusU),
        ("key identity, power_one_plus_u(-2)", Diffusion::PowerOnePlusU(-2.0)),
    ] {
        let r = key_identity_residuals(&d, &[64, 128, 256, 512]);
        let ratios: Vec<f64> = r.windows(2).map(|w| w[0] / w[1]).collect();
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::new(name, min >= 1.8, format!("ratios {ratios:.3?}")));
    }

    let u = Field::constant(&g, 2.0);
    let v = solve_standard(&u, &g).unwrap();
    let d = Diffusion::InverseU;
    let dis = dissipation(&u, &v, &d, &g).unwrap();
    let src = source_term(&u, &v, &d, &g).unwrap();
    checks.push(Check::new(
        "steady state D = source = 1",
        (dis - 1.0).abs() <= 1e-12 && (src - 1.0).abs() <= 1e-12,
        format!("D {dis}, source {src}"),
    ));

    let mut worst = 0.0f64;
    for d in [
        Diffusion::InverseU,
        Diffusion::InverseOnePlusU,
        Diffusion::PowerOnePlusU(-2.0),
        Diffusion::PowerOnePlusU(-0.5),
        Diffusion::PowerU(-1.5),
    ] {
        for u in [0.1, 0.7, 1.0, 3.0, 40.0] {
            let delta = 1e-5 * u;
            let fd = (d.primitive(u + delta).unwrap() - d.primitive(u - delta).unwrap()) / (2.0 * delta);
            worst = worst.max((fd - d.value(u).unwrap()).abs() / d.value(u).unwrap());
        }
    }
    checks.push(Check::new(
        "primitive differentiates to a(u)",
        worst <= 1e-8,
        format!("relative error {worst:.2e}"),
    ));

    let worst = worst_random_slack(1000, 20_241_019);
    checks.push(Check::new(
        "regularity slacks on 1000 random fields",
        worst >= -1e-8,
        format!("worst slack / (1 + |F|) = {worst:.3e}"),
    ));

    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        for c in run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn random_fields_have_the_requested_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Grid::new(64).unwrap();
        for _ in 0..20 {
            let u = random_smooth_field(&mut rng, &g, 3.0);
            assert!((quadrature(&u, &g) - 3.0).abs() < 1e-12);
            assert!(u.min() > 0.0);
        }
    }
}
