//! Uniform cell-centred mesh of (0,1) and the discrete calculus built on it.
//!
//! Cell `i` covers `[i h, (i+1) h]` with centre `x_i = (i + 1/2) h`. Face `i`
//! sits at `x = i h`, so there are `n_cells + 1` faces and faces `0` and
//! `n_cells` are the domain boundary. Homogeneous Neumann conditions are
//! imposed by pinning every boundary-face gradient or flux to zero, which
//! makes the midpoint mass exactly conserved by any flux-form update.

use std::ops::{Deref, DerefMut, Index};

use crate::error::{KsError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T = f64> {
    n_cells: usize,
    h: T,
}

impl<T: Scalar> Grid<T> {
    pub const MIN_CELLS: usize = 4;

    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < Self::MIN_CELLS {
            return Err(KsError::InvalidGrid(n_cells));
        }
        Ok(Self {
            n_cells,
            h: T::one() / T::from_count(n_cells),
        })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn n_faces(&self) -> usize {
        self.n_cells + 1
    }

    /// Cell width.
    #[inline]
    pub fn h(&self) -> T {
        self.h
    }

    /// Centre of cell `i`.
    #[inline]
    pub fn center(&self, i: usize) -> T {
        (T::from_count(i) + T::lit(0.5)) * self.h
    }

    /// Position of face `i` (face 0 is `x = 0`).
    #[inline]
    pub fn face(&self, i: usize) -> T {
        T::from_count(i) * self.h
    }

    pub fn centers(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_cells).map(|i| self.center(i))
    }
}

/// Cell-centred samples of a scalar function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T = f64>(Vec<T>);

impl<T: Scalar> Field<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn constant(grid: &Grid<T>, value: T) -> Self {
        Self(vec![value; grid.n_cells()])
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T) -> T) -> Self {
        Self(grid.centers().map(f).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn max(&self) -> T {
        self.0.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.0.iter().copied().fold(T::infinity(), T::min)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: T, other: &Self, beta: T) -> Self {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect(),
        )
    }
}

impl<T> Deref for Field<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Field<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

/// Values living on the `n_cells + 1` faces of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceArray<T = f64>(Vec<T>);

impl<T: Scalar> FaceArray<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self(vec![T::zero(); grid.n_faces()])
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    /// The interior faces `1..n_cells`.
    pub fn interior(&self) -> &[T] {
        &self.0[1..self.0.len() - 1]
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> Index<usize> for FaceArray<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[inline]
fn check_len<T: Scalar>(f: &[T], grid: &Grid<T>) {
    assert_eq!(
        f.len(),
        grid.n_cells(),
        "field has {} values on a {}-cell grid",
        f.len(),
        grid.n_cells()
    );
}

/// Two-point difference `(f_i - f_{i-1}) / h` on interior faces; zero on the
/// two boundary faces.
pub fn face_gradient<T: Scalar>(f: &[T], grid: &Grid<T>) -> FaceArray<T> {
    check_len(f, grid);
    let mut out = FaceArray::zeros(grid);
    let inv_h = grid.h().recip();
    for (face, w) in out.as_mut_slice()[1..grid.n_cells()].iter_mut().enumerate() {
        *w = (f[face + 1] - f[face]) * inv_h;
    }
    out
}

/// Arithmetic mean of the two cells adjacent to each interior face. Boundary
/// entries copy the adjacent cell.
pub fn face_means<T: Scalar>(f: &[T], grid: &Grid<T>) -> FaceArray<T> {
    check_len(f, grid);
    let n = grid.n_cells();
    let mut out = FaceArray::zeros(grid);
    let half = T::lit(0.5);
    let faces = out.as_mut_slice();
    faces[0] = f[0];
    faces[n] = f[n - 1];
    for i in 1..n {
        faces[i] = half * (f[i - 1] + f[i]);
    }
    out
}

/// Cell-centred divergence `(w_{i+1} - w_i) / h` of a face quantity.
pub fn divergence<T: Scalar>(w: &FaceArray<T>, grid: &Grid<T>) -> Field<T> {
    assert_eq!(w.values().len(), grid.n_faces());
    let inv_h = grid.h().recip();
    Field::new(w.values().windows(2).map(|pair| (pair[1] - pair[0]) * inv_h).collect())
}

/// Neumann Laplacian: divergence of [`face_gradient`]. This is the stencil
/// used by the elliptic solvers.
pub fn laplacian<T: Scalar>(f: &[T], grid: &Grid<T>) -> Field<T> {
    divergence(&face_gradient(f, grid), grid)
}

/// Midpoint rule `h * sum_i f_i`.
pub fn quadrature<T: Scalar>(f: &[T], grid: &Grid<T>) -> T {
    check_len(f, grid);
    f.iter().fold(T::zero(), |acc, &x| acc + x) * grid.h()
}

/// Midpoint rule over interior faces, `h * sum_{faces 1..n} w_f`. Boundary
/// faces carry zero gradient, so this is the natural quadrature for
/// integrands built from face gradients.
pub fn face_quadrature<T: Scalar>(w: &FaceArray<T>, grid: &Grid<T>) -> T {
    w.interior().iter().fold(T::zero(), |acc, &x| acc + x) * grid.h()
}

#[cfg(test)]
mod tests {
    use super::*;

    type Grid = crate::grid::Grid<f64>;
    type Field = crate::grid::Field<f64>;
    use std::f64::consts::PI;

    #[test]
    fn grid_rejects_too_few_cells() {
        assert_eq!(Grid::new(3), Err(KsError::InvalidGrid(3)));
        let g = Grid::new(4).unwrap();
        assert_eq!(g.n_faces(), 5);
    }

    #[test]
    fn width_times_cells_is_one() {
        for n in [4, 7, 10, 128, 1000, 4096] {
            let g = Grid::new(n).unwrap();
            assert!((g.h() * n as f64 - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = Grid::new(9).unwrap();
        let grad = face_gradient(&Field::constant(&g, 2.5), &g);
        assert!(grad.values().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn gradient_of_linear_field() {
        let g = Grid::new(4).unwrap();
        let f = Field::from_fn(&g, |x| x);
        let grad = face_gradient(&f, &g);
        assert_eq!(grad[0], 0.0);
        assert_eq!(grad[4], 0.0);
        for &w in grad.interior() {
            assert!((w - 1.0).abs() < 1e-14);
        }
    }

    fn cosine_gradient_error(n: usize) -> f64 {
        let g = Grid::new(n).unwrap();
        let f = Field::from_fn(&g, |x| (PI * x).cos());
        let grad = face_gradient(&f, &g);
        (1..n)
            .map(|i| (grad[i] + PI * (PI * g.face(i)).sin()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gradient_is_second_order() {
        let errs: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| cosine_gradient_error(n)).collect();
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn quadrature_examples() {
        let g = Grid::new(13).unwrap();
        assert!((quadrature(&Field::constant(&g, 3.0), &g) - 3.0).abs() < 1e-14);

        let g = Grid::new(10).unwrap();
        let lin = Field::from_fn(&g, |x| x);
        assert!((quadrature(&lin, &g) - 0.5).abs() < 1e-15);

        let g = Grid::new(64).unwrap();
        let c = Field::from_fn(&g, |x| (2.0 * PI * x).cos());
        assert!(quadrature(&c, &g).abs() < 1e-12);
    }

    #[test]
    fn laplacian_of_constant_vanishes_and_sums_to_zero() {
        let g = Grid::new(16).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * x).exp());
        assert!(laplacian(&Field::constant(&g, 1.0), &g).iter().all(|&x| x == 0.0));
        // Neumann Laplacian integrates to zero.
        assert!(quadrature(&laplacian(&f, &g), &g).abs() < 1e-10);
    }

    #[test]
    fn f32_grid_works() {
        let g = crate::grid::Grid::<f32>::new(8).unwrap();
        let f = crate::grid::Field::from_fn(&g, |x| 2.0 * x);
        assert!((quadrature(&f, &g) - 1.0).abs() < 1e-6);
    }
}
