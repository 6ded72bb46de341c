//! The diffusion nonlinearity `a(u)` and the primitives the energy
//! functionals are built from.
//!
//! Both primitives are normalised at `u = 1`:
//!
//! * `A(u) = ∫₁ᵘ a(r) dr` ([`Diffusion::primitive`])
//! * `Ã(u) = ∫₁ᵘ a(r)/r dr` ([`Diffusion::scaled_primitive`])

use crate::error::{KsError, Result};
use crate::scalar::Scalar;

/// Diffusion nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diffusion<T = f64> {
    /// `a(u) = 1/u`
    InverseU,
    /// `a(u) = 1/(1+u)`
    InverseOnePlusU,
    /// `a(u) = (1+u)^p`
    PowerOnePlusU(T),
    /// `a(u) = u^p`
    PowerU(T),
}

/// Position of a nonlinearity relative to the critical one-dimensional
/// exponent `p = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl Criticality {
    pub fn as_str(self) -> &'static str {
        match self {
            Criticality::Subcritical => "subcritical",
            Criticality::Critical => "critical",
            Criticality::Supercritical => "supercritical",
        }
    }
}

/// Critical exponent `1 - 2/n` for `a(u) ~ u^p` in space dimension `n`.
pub fn critical_exponent(dimension: u32) -> f64 {
    1.0 - 2.0 / f64::from(dimension)
}

impl<T: Scalar> Diffusion<T> {
    /// Configuration name of the kind (`inverse_u`, ...).
    pub fn kind_name(&self) -> &'static str {
        match self {
            Diffusion::InverseU => "inverse_u",
            Diffusion::InverseOnePlusU => "inverse_one_plus_u",
            Diffusion::PowerOnePlusU(_) => "power_one_plus_u",
            Diffusion::PowerU(_) => "power_u",
        }
    }

    /// Growth exponent `p` of `a(u) ~ u^p`; `-1` for the two inverse kinds.
    pub fn exponent(&self) -> T {
        match *self {
            Diffusion::InverseU | Diffusion::InverseOnePlusU => -T::one(),
            Diffusion::PowerOnePlusU(p) | Diffusion::PowerU(p) => p,
        }
    }

    pub fn criticality(&self) -> Criticality {
        let p = self.exponent();
        let critical = T::lit(critical_exponent(1));
        if p > critical {
            Criticality::Subcritical
        } else if p < critical {
            Criticality::Supercritical
        } else {
            Criticality::Critical
        }
    }

    /// `a` blows up as `u -> 0`.
    pub fn singular_at_zero(&self) -> bool {
        match *self {
            Diffusion::InverseU => true,
            Diffusion::PowerU(p) => p < T::zero(),
            _ => false,
        }
    }

    /// Whether admissible states must be strictly positive. True for the
    /// singular kinds and for `u^p` with `p > 0`, where `a(0) = 0` violates
    /// positivity of the diffusion.
    pub fn requires_positive(&self) -> bool {
        match *self {
            Diffusion::InverseU => true,
            Diffusion::PowerU(p) => p != T::zero(),
            _ => false,
        }
    }

    /// One of the two nonlinearities `1/u`, `1/(1+u)` (or their power
    /// spellings) for which the regularity estimates are stated.
    pub fn critical_family(&self) -> Option<CriticalFamily> {
        match *self {
            Diffusion::InverseU => Some(CriticalFamily::InverseU),
            Diffusion::PowerU(p) if p == -T::one() => Some(CriticalFamily::InverseU),
            Diffusion::InverseOnePlusU => Some(CriticalFamily::InverseOnePlusU),
            Diffusion::PowerOnePlusU(p) if p == -T::one() => Some(CriticalFamily::InverseOnePlusU),
            _ => None,
        }
    }

    fn check(&self, u: T) -> Result<()> {
        let ok = if self.requires_positive() {
            u > T::zero()
        } else {
            u >= T::zero()
        };
        if ok && u.is_finite() {
            Ok(())
        } else {
            Err(self.domain_error(u))
        }
    }

    fn domain_error(&self, u: T) -> KsError {
        KsError::Domain {
            kind: self.kind_name(),
            domain: if self.requires_positive() { "u > 0" } else { "u >= 0" },
            value: u.to_f64_lossy(),
        }
    }

    fn check_positive(&self, u: T) -> Result<()> {
        if u > T::zero() && u.is_finite() {
            Ok(())
        } else {
            Err(KsError::Domain {
                kind: self.kind_name(),
                domain: "u > 0",
                value: u.to_f64_lossy(),
            })
        }
    }

    /// `a(u)`.
    pub fn value(&self, u: T) -> Result<T> {
        self.check(u)?;
        Ok(self.value_unchecked(u))
    }

    /// `a(u)` without the domain check; callers guarantee admissibility.
    #[inline]
    pub fn value_unchecked(&self, u: T) -> T {
        match *self {
            Diffusion::InverseU => u.recip(),
            Diffusion::InverseOnePlusU => (T::one() + u).recip(),
            Diffusion::PowerOnePlusU(p) => (T::one() + u).powf(p),
            Diffusion::PowerU(p) => u.powf(p),
        }
    }

    /// `a'(u)`.
    pub fn derivative(&self, u: T) -> Result<T> {
        self.check(u)?;
        Ok(self.derivative_unchecked(u))
    }

    #[inline]
    pub fn derivative_unchecked(&self, u: T) -> T {
        match *self {
            Diffusion::InverseU => -(u * u).recip(),
            Diffusion::InverseOnePlusU => -((T::one() + u) * (T::one() + u)).recip(),
            Diffusion::PowerOnePlusU(p) => p * (T::one() + u).powf(p - T::one()),
            Diffusion::PowerU(p) => p * u.powf(p - T::one()),
        }
    }

    /// `A(u) = ∫₁ᵘ a(r) dr`.
    pub fn primitive(&self, u: T) -> Result<T> {
        self.check(u)?;
        Ok(self.primitive_unchecked(u))
    }

    #[inline]
    pub fn primitive_unchecked(&self, u: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        match *self {
            Diffusion::InverseU => u.ln(),
            Diffusion::InverseOnePlusU => ((one + u) / two).ln(),
            Diffusion::PowerOnePlusU(p) if p == -one => ((one + u) / two).ln(),
            Diffusion::PowerOnePlusU(p) => ((one + u).powf(p + one) - two.powf(p + one)) / (p + one),
            Diffusion::PowerU(p) if p == -one => u.ln(),
            Diffusion::PowerU(p) => (u.powf(p + one) - one) / (p + one),
        }
    }

    /// `Ã(u) = ∫₁ᵘ a(r)/r dr`; defined for `u > 0` only.
    pub fn scaled_primitive(&self, u: T) -> Result<T> {
        self.check_positive(u)?;
        Ok(self.scaled_primitive_unchecked(u))
    }

    pub fn scaled_primitive_unchecked(&self, u: T) -> T {
        let one = T::one();
        match *self {
            Diffusion::InverseU => one - u.recip(),
            Diffusion::InverseOnePlusU => (T::lit(2.0) * u / (one + u)).ln(),
            Diffusion::PowerU(p) if p == T::zero() => u.ln(),
            Diffusion::PowerU(p) => (u.powf(p) - one) / p,
            Diffusion::PowerOnePlusU(p) => scaled_primitive_one_plus_u(p, u),
        }
    }

    /// `b(u) = u a(u)`, the weight of the chemotactic source term. Equals
    /// `1` for `a = 1/u` and `u/(1+u)` for `a = 1/(1+u)`.
    pub fn mobility(&self, u: T) -> Result<T> {
        self.check(u)?;
        Ok(self.mobility_unchecked(u))
    }

    #[inline]
    pub fn mobility_unchecked(&self, u: T) -> T {
        match *self {
            Diffusion::InverseU => T::one(),
            Diffusion::InverseOnePlusU => u / (T::one() + u),
            _ => u * self.value_unchecked(u),
        }
    }

    /// Checks every entry of `u` against the admissible range.
    pub fn check_field(&self, u: &[T]) -> Result<()> {
        u.iter().try_for_each(|&x| self.check(x))
    }
}

/// The two nonlinearities covered by the regularity estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalFamily {
    InverseU,
    InverseOnePlusU,
}

/// Largest integer exponent handled by the closed-form branches.
const MAX_CLOSED_FORM_EXPONENT: i32 = 64;

/// `∫₁ᵘ (1+r)^p / r dr`.
///
/// Integer `p` uses partial fractions. Other exponents integrate
/// `(1 + e^s)^p` over `s ∈ [0, ln u]` with composite Gauss-Legendre; the
/// integrand is analytic in a strip of half-width π around the real axis, so
/// 12-point panels of length at most 3 reach full double precision.
fn scaled_primitive_one_plus_u<T: Scalar>(p: T, u: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    if p.fract() == T::zero() && p.abs() <= T::from_count(MAX_CLOSED_FORM_EXPONENT as usize) {
        let k = p.to_i32().expect("integer exponent");
        if k == 0 {
            return u.ln();
        }
        if k < 0 {
            // 1/(r(1+r)^m) = 1/r - Σ_{j=1}^{m} 1/(1+r)^j
            let mut acc = (two * u / (one + u)).ln();
            let inv = (one + u).recip();
            let half = T::lit(0.5);
            let (mut pu, mut p2) = (one, one);
            for j in 1..(-k) {
                pu = pu * inv;
                p2 = p2 * half;
                acc = acc + (pu - p2) / T::from_count(j as usize);
            }
            return acc;
        }
        // (1+r)^m / r = 1/r + Σ_{j=1}^{m} C(m,j) r^{j-1}
        let mut acc = u.ln();
        let mut binom = one;
        let mut uj = one;
        for j in 1..=k {
            binom = binom * T::from_count((k - j + 1) as usize) / T::from_count(j as usize);
            uj = uj * u;
            acc = acc + binom * (uj - one) / T::from_count(j as usize);
        }
        return acc;
    }

    let upper = u.ln();
    let panels = (upper.abs() / T::lit(3.0)).ceil().to_usize().unwrap_or(1).max(1);
    let width = upper / T::from_count(panels);
    let half = width * T::lit(0.5);
    let mut acc = T::zero();
    for k in 0..panels {
        let mid = width * (T::from_count(k) + T::lit(0.5));
        for (&node, &weight) in GAUSS_LEGENDRE_NODES.iter().zip(&GAUSS_LEGENDRE_WEIGHTS) {
            for s in [mid - half * T::lit(node), mid + half * T::lit(node)] {
                acc = acc + T::lit(weight) * (one + s.exp()).powf(p);
            }
        }
    }
    acc * half
}

// Positive nodes and weights of the 12-point Gauss-Legendre rule on [-1, 1].
const GAUSS_LEGENDRE_NODES: [f64; 6] = [
    0.125_233_408_511_468_9,
    0.367_831_498_998_180_2,
    0.587_317_954_286_617_4,
    0.769_902_674_194_304_7,
    0.904_117_256_370_474_9,
    0.981_560_634_246_719_3,
];
const GAUSS_LEGENDRE_WEIGHTS: [f64; 6] = [
    0.249_147_045_813_402_8,
    0.233_492_536_538_354_8,
    0.203_167_426_723_065_9,
    0.160_078_328_543_346_2,
    0.106_939_325_995_318_4,
    0.047_175_336_386_511_8,
];
