//! Discrete energy functionals, the energy-balance audit and the regularity
//! estimates, evaluated on cell-centred states.
//!
//! Conventions shared by every evaluator:
//!
//! * `u` at a face is the arithmetic mean of the two adjacent cells;
//! * the inner flux `(a(u)/u) ∂x u` lives on faces and vanishes on the
//!   boundary faces;
//! * `∂x² v` uses the Neumann Laplacian of the elliptic solver, so the `v`
//!   returned by [`crate::elliptic`] satisfies its equation to rounding inside
//!   these formulas.

use crate::config::Variant;
use crate::diffusion::{CriticalFamily, Diffusion};
use crate::error::{KsError, Result};
use crate::grid::{divergence, face_means, face_quadrature, laplacian, quadrature, FaceArray, Field, Grid};
use crate::scalar::Scalar;

/// `a(u_f)² / u_f`, taken as zero where the face density vanishes (the
/// adjacent cells are then both zero, so the gradient is too).
#[inline]
fn gradient_weight<T: Scalar>(d: &Diffusion<T>, uf: T) -> T {
    if uf == T::zero() {
        return T::zero();
    }
    let a = d.value_unchecked(uf);
    a * a / uf
}

/// Face values of `(a(u)/u) ∂x u`; zero on the boundary faces.
pub fn inner_flux<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> FaceArray<T> {
    let means = face_means(u, grid);
    let inv_h = grid.h().recip();
    let mut w = FaceArray::zeros(grid);
    let faces = w.as_mut_slice();
    for f in 1..grid.n_cells() {
        let uf = means[f];
        let du = (u[f] - u[f - 1]) * inv_h;
        faces[f] = if uf == T::zero() {
            T::zero()
        } else {
            d.value_unchecked(uf) / uf * du
        };
    }
    w
}

/// `∫ a(u)²/u |∂x u|²` over interior faces.
pub fn gradient_term<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> T {
    let means = face_means(u, grid);
    let inv_h = grid.h().recip();
    let mut integrand = FaceArray::zeros(grid);
    let faces = integrand.as_mut_slice();
    for f in 1..grid.n_cells() {
        let du = (u[f] - u[f - 1]) * inv_h;
        faces[f] = gradient_weight(d, means[f]) * du * du;
    }
    face_quadrature(&integrand, grid)
}

fn mobility_field<'a, T: Scalar>(u: &'a [T], d: &Diffusion<T>) -> impl Iterator<Item = T> + 'a {
    let d = *d;
    u.iter().map(move |&x| d.mobility_unchecked(x))
}

/// The Lyapunov-like functional
/// `F(u) = ½ ∫ a(u)²/u |∂x u|² − ∫ u A(u)`.
pub fn lyapunov_functional<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> Result<T> {
    d.check_field(u)?;
    let potential: Vec<T> = u.iter().map(|&x| x * d.primitive_unchecked(x)).collect();
    Ok(T::lit(0.5) * gradient_term(u, d, grid) - quadrature(&potential, grid))
}

/// Dissipation `D(u, v) = ∫ u a(u) |∂x((a(u)/u) ∂x u) − ∂x² v + v/2|²`.
pub fn dissipation<T: Scalar>(u: &[T], v: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> Result<T> {
    d.check_field(u)?;
    let curvature = divergence(&inner_flux(u, d, grid), grid);
    let lap_v = laplacian(v, grid);
    let half = T::lit(0.5);
    let integrand: Vec<T> = mobility_field(u, d)
        .enumerate()
        .map(|(i, b)| {
            let r = curvature[i] - lap_v[i] + half * v[i];
            b * r * r
        })
        .collect();
    Ok(quadrature(&integrand, grid))
}

/// Source of the energy balance, `∫ u a(u) v² / 4`.
pub fn source_term<T: Scalar>(u: &[T], v: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> Result<T> {
    d.check_field(u)?;
    let quarter = T::lit(0.25);
    let integrand: Vec<T> = mobility_field(u, d)
        .zip(v)
        .map(|(b, &vi)| quarter * b * vi * vi)
        .collect();
    Ok(quadrature(&integrand, grid))
}

/// Jäger-Luckhaus Lyapunov functional
/// `F₀(u) = ½ ∫ a(u)²/u |∂x u|² + ∫ (−A(u) + M Ã(u)) u`.
pub fn jl_functional<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>, mass: T) -> Result<T> {
    d.check_field(u)?;
    let potential = u
        .iter()
        .map(|&x| Ok(x * (mass * d.scaled_primitive(x)? - d.primitive_unchecked(x))))
        .collect::<Result<Vec<T>>>()?;
    Ok(T::lit(0.5) * gradient_term(u, d, grid) + quadrature(&potential, grid))
}

/// Jäger-Luckhaus dissipation `D₀ = ∫ u a(u) |∂x((a(u)/u) ∂x u − ∂x v)|²`.
pub fn jl_dissipation<T: Scalar>(u: &[T], v: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> Result<T> {
    d.check_field(u)?;
    let curvature = divergence(&inner_flux(u, d, grid), grid);
    let lap_v = laplacian(v, grid);
    let integrand: Vec<T> = mobility_field(u, d)
        .enumerate()
        .map(|(i, b)| {
            let r = curvature[i] - lap_v[i];
            b * r * r
        })
        .collect();
    Ok(quadrature(&integrand, grid))
}

/// The three quantities entering one side of the energy balance
/// `dE/dt + dissipation = source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample<T = f64> {
    pub energy: T,
    pub dissipation: T,
    pub source: T,
}

impl<T: Scalar> EnergySample<T> {
    /// `F, D, source` for the standard system, `F₀, D₀, 0` for Jäger-Luckhaus.
    pub fn evaluate(u: &[T], v: &[T], d: &Diffusion<T>, grid: &Grid<T>, variant: Variant, mass: T) -> Result<Self> {
        Ok(match variant {
            Variant::Standard => Self {
                energy: lyapunov_functional(u, d, grid)?,
                dissipation: dissipation(u, v, d, grid)?,
                source: source_term(u, v, d, grid)?,
            },
            Variant::JaegerLuckhaus => Self {
                energy: jl_functional(u, d, grid, mass)?,
                dissipation: jl_dissipation(u, v, d, grid)?,
                source: T::zero(),
            },
        })
    }
}

/// `(E₁ − E₀)/Δt + (D₀ + D₁)/2 − (S₀ + S₁)/2`.
pub fn energy_residual<T: Scalar>(before: &EnergySample<T>, after: &EnergySample<T>, dt: T) -> T {
    let half = T::lit(0.5);
    (after.energy - before.energy) / dt + half * (before.dissipation + after.dissipation)
        - half * (before.source + after.source)
}

/// Scalar diagnostics of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms<T = f64> {
    pub u_linf: T,
    /// `‖u‖_{L³} = (∫u³)^{1/3}`
    pub u_l3: T,
    pub v_lp: T,
    /// `∫u|log u|` for `u^p`-type nonlinearities, `∫u log(1+u)` for
    /// `(1+u)^p`-type ones.
    pub entropy: T,
    /// `∫ a(u)²/u |∂x u|²`
    pub grad_seminorm: T,
}

pub fn norms<T: Scalar>(u: &[T], v: &[T], d: &Diffusion<T>, grid: &Grid<T>, p: T) -> Result<Norms<T>> {
    d.check_field(u)?;
    let cubes: Vec<T> = u.iter().map(|&x| x * x * x).collect();
    let v_p: Vec<T> = v.iter().map(|&x| x.abs().powf(p)).collect();
    Ok(Norms {
        u_linf: u.iter().fold(T::zero(), |m, &x| m.max(x.abs())),
        u_l3: quadrature(&cubes, grid).cbrt(),
        v_lp: quadrature(&v_p, grid).powf(p.recip()),
        entropy: entropy(u, d, grid),
        grad_seminorm: gradient_term(u, d, grid),
    })
}

fn entropy<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>) -> T {
    let density: Vec<T> = match d {
        Diffusion::InverseOnePlusU | Diffusion::PowerOnePlusU(_) => u.iter().map(|&x| x * x.ln_1p()).collect(),
        Diffusion::InverseU | Diffusion::PowerU(_) => u
            .iter()
            .map(|&x| if x == T::zero() { x } else { x * x.ln().abs() })
            .collect(),
    };
    quadrature(&density, grid)
}

/// Slacks of the two regularity estimates; both are non-negative for every
/// admissible field of the given mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularitySlack<T = f64> {
    /// `F(u) − (¼G − M log M − M³)`, with `log(1+M)` for `a = 1/(1+u)`.
    pub lower_bound: T,
    /// Right-hand side minus left-hand side of the entropy bound.
    pub entropy_bound: T,
}

/// Evaluates the lower bound on `F` and the entropy bound for the critical
/// nonlinearities, where `G = ∫ a(u)²/u |∂x u|²`:
///
/// * `a = 1/u`: `F ≥ ¼G − M log M − M³` and
///   `∫u|log u| ≤ 2 + M log M + M^{3/2} G^{1/2}`;
/// * `a = 1/(1+u)`: `F ≥ ¼G − M log(1+M) − M³` and
///   `∫u log(1+u) ≤ M³ + M log(1+M) + ¼G`, with
///   `F = ½G − ∫u log(1+u)`.
pub fn check_regularity<T: Scalar>(u: &[T], d: &Diffusion<T>, grid: &Grid<T>, mass: T) -> Result<RegularitySlack<T>> {
    let family = d.critical_family().ok_or(KsError::NotCritical(d.kind_name()))?;
    d.check_field(u)?;
    let g = gradient_term(u, d, grid);
    let ent = entropy(u, d, grid);
    let quarter = T::lit(0.25);
    let m3 = mass * mass * mass;
    Ok(match family {
        CriticalFamily::InverseU => {
            let f = lyapunov_functional(u, d, grid)?;
            let mlogm = mass * mass.ln();
            RegularitySlack {
                lower_bound: f - (quarter * g - mlogm - m3),
                entropy_bound: T::lit(2.0) + mlogm + mass * mass.sqrt() * g.sqrt() - ent,
            }
        }
        CriticalFamily::InverseOnePlusU => {
            let f = T::lit(0.5) * g - ent;
            let mlog = mass * mass.ln_1p();
            RegularitySlack {
                lower_bound: f - (quarter * g - mlog - m3),
                entropy_bound: m3 + mlog + quarter * g - ent,
            }
        }
    })
}

/// `intercept + slope·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineEnvelope<T = f64> {
    pub intercept: T,
    pub slope: T,
}

impl<T: Scalar> AffineEnvelope<T> {
    pub fn at(&self, t: T) -> T {
        self.intercept + self.slope * t
    }
}

/// Affine-in-`t` bound on `entropy + grad_seminorm` obtained by integrating
/// the energy balance, `F(t) ≤ F(0) + S t + R`, and feeding it through the
/// regularity estimates.
///
/// `source_bound` bounds the source term over the horizon and
/// `residual_integral` bounds `∫|residual|` over it, the discrete defect of
/// the balance. For `a = 1/u` the square root in the entropy bound is removed
/// with `M^{3/2}√G ≤ M³/2 + G/2`.
pub fn regularity_envelope<T: Scalar>(
    family: CriticalFamily,
    mass: T,
    initial_functional: T,
    source_bound: T,
    residual_integral: T,
) -> AffineEnvelope<T> {
    let half = T::lit(0.5);
    let m3 = mass * mass * mass;
    match family {
        CriticalFamily::InverseU => {
            // G ≤ 4(F + c), entropy ≤ 2 + M log M + M³/2 + G/2.
            let mlogm = mass * mass.ln();
            let c = mlogm + m3;
            let six = T::lit(6.0);
            AffineEnvelope {
                intercept: six * (initial_functional + residual_integral + c) + T::lit(2.0) + mlogm + half * m3,
                slope: six * source_bound,
            }
        }
        CriticalFamily::InverseOnePlusU => {
            // A is normalised at 1, so the estimates see F − M log 2.
            // G ≤ 4(F − M log 2 + c), entropy ≤ c + G/4.
            let c = mass * mass.ln_1p() + m3;
            let shifted = initial_functional - mass * T::LN_2();
            let five = T::lit(5.0);
            AffineEnvelope {
                intercept: five * (shifted + residual_integral + c) + c,
                slope: five * source_bound,
            }
        }
    }
}

/// Maximum interior discrepancy in the identity
/// `φ ∂x M(φ) = ∂x(φ a(φ) ∂x((a(φ)/φ) ∂x φ))`, where
/// `M(φ) = (a a'/φ)|∂xφ|² − (a²/2φ²)|∂xφ|² + (a²/φ) ∂x²φ`.
///
/// `phi` is sampled at the cell centres. The left side uses centred
/// differences; the right side uses the face inner flux of the energy
/// functionals followed by a centred difference. Two cells at each end are
/// excluded. The identity holds exactly in the continuum, so the result is
/// pure truncation error.
pub fn key_identity_residual<T: Scalar>(phi: impl Fn(T) -> T, d: &Diffusion<T>, grid: &Grid<T>) -> Result<T> {
    let n = grid.n_cells();
    let f = Field::from_fn(grid, phi);
    d.check_field(&f)?;
    if f.iter().any(|&x| x <= T::zero()) {
        return Err(KsError::Domain {
            kind: "key identity test function",
            domain: "phi > 0",
            value: f.min().to_f64_lossy(),
        });
    }
    let h = grid.h();
    let two_h = T::lit(2.0) * h;
    let half = T::lit(0.5);

    let mut m = vec![T::zero(); n];
    for i in 1..n - 1 {
        let p = f[i];
        let d1 = (f[i + 1] - f[i - 1]) / two_h;
        let d2 = (f[i + 1] - T::lit(2.0) * p + f[i - 1]) / (h * h);
        let a = d.value_unchecked(p);
        let ap = d.derivative_unchecked(p);
        m[i] = a * ap / p * d1 * d1 - half * a * a / (p * p) * d1 * d1 + a * a / p * d2;
    }

    let curvature = divergence(&inner_flux(&f, d, grid), grid);
    let outer: Vec<T> = (0..n).map(|i| f[i] * d.value_unchecked(f[i]) * curvature[i]).collect();

    let mut worst = T::zero();
    for i in 2..n - 2 {
        let lhs = f[i] * (m[i + 1] - m[i - 1]) / two_h;
        let rhs = (outer[i + 1] - outer[i - 1]) / two_h;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Per-record diagnostics written to the time-series CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRecord<T = f64> {
    pub t: T,
    pub mass: T,
    pub f: T,
    pub d: T,
    pub source: T,
    pub f0: Option<T>,
    pub d0: Option<T>,
    pub entropy: T,
    pub grad_seminorm: T,
    pub u_linf: T,
    pub u_l3: T,
    pub v_lp: T,
    /// Energy residual of the step that produced this record (0 at `t = 0`).
    pub energy_residual: T,
    pub regest1_slack: Option<T>,
    pub regest2_slack: Option<T>,
    /// Accepted steps so far. Not serialised.
    pub step: usize,
    /// `Σ |residual| Δt` over all steps so far. Not serialised.
    pub residual_integral: T,
}

impl<T: Scalar> MonitorRecord<T> {
    pub const CSV_HEADER: &'static str =
        "t,mass,F,D,source,F0,D0,entropy,grad_seminorm,u_linf,u_l3,v_lp,energy_residual,regest1_slack,regest2_slack";

    /// Evaluates every diagnostic on the state `(u, v)`.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        t: T,
        u: &[T],
        v: &[T],
        d: &Diffusion<T>,
        grid: &Grid<T>,
        variant: Variant,
        mass: T,
        v_norm_exponent: T,
    ) -> Result<Self> {
        let n = norms(u, v, d, grid, v_norm_exponent)?;
        let (f0, d0) = match variant {
            Variant::Standard => (None, None),
            Variant::JaegerLuckhaus => (
                Some(jl_functional(u, d, grid, mass)?),
                Some(jl_dissipation(u, v, d, grid)?),
            ),
        };
        let slack = match d.critical_family() {
            Some(_) => Some(check_regularity(u, d, grid, mass)?),
            None => None,
        };
        Ok(Self {
            t,
            mass: quadrature(u, grid),
            f: lyapunov_functional(u, d, grid)?,
            d: dissipation(u, v, d, grid)?,
            source: source_term(u, v, d, grid)?,
            f0,
            d0,
            entropy: n.entropy,
            grad_seminorm: n.grad_seminorm,
            u_linf: n.u_linf,
            u_l3: n.u_l3,
            v_lp: n.v_lp,
            energy_residual: T::zero(),
            regest1_slack: slack.map(|s| s.lower_bound),
            regest2_slack: slack.map(|s| s.entropy_bound),
            step: 0,
            residual_integral: T::zero(),
        })
    }

    /// The `(E, D, S)` triple the energy audit differences for `variant`.
    pub fn energy_sample(&self, variant: Variant) -> EnergySample<T> {
        match variant {
            Variant::Standard => EnergySample {
                energy: self.f,
                dissipation: self.d,
                source: self.source,
            },
            Variant::JaegerLuckhaus => EnergySample {
                energy: self.f0.unwrap_or_else(T::nan),
                dissipation: self.d0.unwrap_or_else(T::nan),
                source: T::zero(),
            },
        }
    }

    /// One CSV row in [`Self::CSV_HEADER`] order; absent values are empty.
    pub fn to_csv_row(&self) -> String {
        fn opt<T: Scalar>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.mass,
            self.f,
            self.d,
            self.source,
            opt(self.f0),
            opt(self.d0),
            self.entropy,
            self.grad_seminorm,
            self.u_linf,
            self.u_l3,
            self.v_lp,
            self.energy_residual,
            opt(self.regest1_slack),
            opt(self.regest2_slack),
        )
    }
}

/// Residual series of the discrete energy balance.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAudit<T = f64> {
    pub residuals: Vec<T>,
    pub max_abs: T,
}

/// Audits the energy balance over records taken at consecutive accepted
/// steps, using the record times for `Δt`. Standard mode differences `F`
/// against `D` and the source; Jäger-Luckhaus mode differences `F₀` against
/// `D₀` with no source.
pub fn audit_energy<T: Scalar>(records: &[MonitorRecord<T>], variant: Variant) -> EnergyAudit<T> {
    let residuals: Vec<T> = records
        .windows(2)
        .map(|w| {
            energy_residual(
                &w[0].energy_sample(variant),
                &w[1].energy_sample(variant),
                w[1].t - w[0].t,
            )
        })
        .collect();
    let max_abs = residuals.iter().fold(T::zero(), |m, r| m.max(r.abs()));
    EnergyAudit { residuals, max_abs }
}
