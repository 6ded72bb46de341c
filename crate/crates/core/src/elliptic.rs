//! Neumann solves for the chemical concentration `v`.
//!
//! * Standard: `v'' - v + u = 0`
//! * Jäger-Luckhaus: `v'' - M + u = 0` with `∫v = 0`
//!
//! Both use the three-point Neumann Laplacian of [`crate::grid::laplacian`],
//! so `laplacian(v)` reproduces the equations to elimination rounding.

use crate::error::{KsError, Result};
use crate::grid::{quadrature, Field, Grid};
use crate::scalar::Scalar;

/// Pivots smaller than this abort the elimination.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Mass mismatch beyond which the Jäger-Luckhaus problem is rejected.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// `lower[i] x[i-1] + main[i] x[i] + upper[i] x[i+1] = rhs[i]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T = f64> {
    pub lower: Vec<T>,
    pub main: Vec<T>,
    pub upper: Vec<T>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> TridiagonalSystem<T> {
    /// Discretisation of `v'' - v = -u` with zero-flux boundary rows.
    pub fn standard(u: &[T], grid: &Grid<T>) -> Self {
        let mut sys = Self::neumann_laplacian(grid);
        for (m, r) in sys.main.iter_mut().zip(sys.rhs.iter_mut().zip(u)) {
            *m = *m - T::one();
            *r.0 = -*r.1;
        }
        sys
    }

    /// Discretisation of `v'' = mass - u`. Singular: constants span the
    /// null space.
    pub fn jaeger_luckhaus(u: &[T], grid: &Grid<T>, mass: T) -> Self {
        let mut sys = Self::neumann_laplacian(grid);
        for (r, &ui) in sys.rhs.iter_mut().zip(u) {
            *r = mass - ui;
        }
        sys
    }

    fn neumann_laplacian(grid: &Grid<T>) -> Self {
        let n = grid.n_cells();
        let inv_h2 = (grid.h() * grid.h()).recip();
        let mut main = vec![-T::lit(2.0) * inv_h2; n];
        main[0] = -inv_h2;
        main[n - 1] = -inv_h2;
        let mut lower = vec![inv_h2; n];
        lower[0] = T::zero();
        let mut upper = vec![inv_h2; n];
        upper[n - 1] = T::zero();
        Self {
            lower,
            main,
            upper,
            rhs: vec![T::zero(); n],
        }
    }

    /// Forward elimination and back substitution (Thomas algorithm).
    pub fn solve(&self) -> Result<Vec<T>> {
        let n = self.main.len();
        let floor = T::lit(PIVOT_FLOOR);
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];

        let mut pivot = self.main[0];
        if pivot.abs() < floor || !pivot.is_finite() {
            return Err(KsError::Pivot {
                row: 0,
                pivot: pivot.to_f64_lossy(),
            });
        }
        c[0] = self.upper[0] / pivot;
        d[0] = self.rhs[0] / pivot;
        for i in 1..n {
            pivot = self.main[i] - self.lower[i] * c[i - 1];
            if pivot.abs() < floor || !pivot.is_finite() {
                return Err(KsError::Pivot {
                    row: i,
                    pivot: pivot.to_f64_lossy(),
                });
            }
            c[i] = self.upper[i] / pivot;
            d[i] = (self.rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Solves `v'' - v + u = 0` with homogeneous Neumann conditions.
pub fn solve_standard<T: Scalar>(u: &[T], grid: &Grid<T>) -> Result<Field<T>> {
    TridiagonalSystem::standard(u, grid).solve().map(Field::new)
}

/// Solves `v'' = mass - u`, `∫v = 0`, with homogeneous Neumann conditions.
///
/// The discrete problem is solved with the discrete mass of `u` so that it is
/// exactly compatible; a discrete mass further than [`COMPATIBILITY_TOL`]
/// from `mass` is an error. The null space is removed by pinning `v_0`
/// (extra diagonal term on row 0) and the mean is subtracted afterwards.
pub fn solve_jl<T: Scalar>(u: &[T], grid: &Grid<T>, mass: T) -> Result<Field<T>> {
    let discrete_mass = quadrature(u, grid);
    if (discrete_mass - mass).abs() > T::lit(COMPATIBILITY_TOL) || !discrete_mass.is_finite() {
        return Err(KsError::Compatibility {
            mass: discrete_mass.to_f64_lossy(),
            expected: mass.to_f64_lossy(),
        });
    }
    let mut sys = TridiagonalSystem::jaeger_luckhaus(u, grid, discrete_mass);
    sys.main[0] = sys.main[0] - (grid.h() * grid.h()).recip();
    let mut v = Field::new(sys.solve()?);
    let mean = quadrature(&v, grid);
    v.iter_mut().for_each(|x| *x = *x - mean);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Grid = crate::grid::Grid<f64>;
    type Field = crate::grid::Field<f64>;
    use crate::grid::laplacian;
    use std::f64::consts::PI;

    fn standard_residual(u: &[f64], v: &[f64], g: &Grid) -> f64 {
        let lap = laplacian(v, g);
        (0..g.n_cells())
            .map(|i| (lap[i] - v[i] + u[i]).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3 5 3] -> x = [1 1 1]
        let sys = TridiagonalSystem {
            lower: vec![0.0, 1.0, 1.0],
            main: vec![2.0, 3.0, 2.0],
            upper: vec![1.0, 1.0, 0.0],
            rhs: vec![3.0f64, 5.0, 3.0],
        };
        let x = sys.solve().unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let sys = TridiagonalSystem {
            lower: vec![0.0, 1.0],
            main: vec![0.0, 1.0],
            upper: vec![1.0, 0.0],
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(sys.solve(), Err(KsError::Pivot { row: 0, .. })));
    }

    #[test]
    fn standard_matrix_is_diagonally_dominant() {
        let g = Grid::new(16).unwrap();
        let sys = TridiagonalSystem::standard(&[1.0; 16], &g);
        let inv_h2 = 256.0;
        assert_eq!(sys.main[5], -2.0 * inv_h2 - 1.0);
        for i in 0..16 {
            assert!(sys.main[i].abs() > sys.lower[i].abs() + sys.upper[i].abs());
        }
    }

    #[test]
    fn constant_source_gives_constant_solution() {
        let g = Grid::new(32).unwrap();
        let v = solve_standard(&vec![2.5; 32], &g).unwrap();
        assert!(v.iter().all(|&x| (x - 2.5).abs() < 1e-12));
        let v = solve_standard(&vec![0.0; 32], &g).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn standard_residual_and_maximum_principle() {
        let g = Grid::new(100).unwrap();
        let u = Field::from_fn(&g, |x| 1.0 + 5.0 * (-(x - 0.3f64).powi(2) / 0.01).exp());
        let v = solve_standard(&u, &g).unwrap();
        assert!(standard_residual(&u, &v, &g) <= 1e-10 * (1.0 + u.max_abs()));
        assert!(v.min() >= u.min() - 1e-12 && v.max() <= u.max() + 1e-12);
    }

    #[test]
    fn jl_constant_and_incompatible() {
        let g = Grid::new(32).unwrap();
        let v = solve_jl(&vec![3.0; 32], &g, 3.0).unwrap();
        assert!(v.iter().all(|&x| x.abs() < 1e-12));
        let err = solve_jl(&vec![3.1; 32], &g, 3.0).unwrap_err();
        assert!(matches!(err, KsError::Compatibility { .. }));
    }

    #[test]
    fn jl_residual_and_zero_mean() {
        let g = Grid::new(64).unwrap();
        let u = Field::from_fn(&g, |x| 2.0 + (2.0 * PI * x).cos() + 0.5 * (PI * x).cos());
        let m = quadrature(&u, &g);
        let v = solve_jl(&u, &g, m).unwrap();
        let lap = laplacian(&v, &g);
        let res = (0..64).map(|i| (lap[i] - m + u[i]).abs()).fold(0.0, f64::max);
        assert!(res <= 1e-10 * (1.0 + u.max_abs()), "residual {res}");
        assert!(quadrature(&v, &g).abs() <= 1e-12);
    }

    #[test]
    fn f32_solve() {
        let g = crate::grid::Grid::<f32>::new(16).unwrap();
        let v = solve_standard(&[1.5f32; 16], &g).unwrap();
        assert!(v.iter().all(|&x| (x - 1.5).abs() < 1e-4));
    }
}
