//! Problem and solver configuration.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::diffusion::Diffusion;
use crate::error::{KsError, Result};
use crate::grid::{quadrature, Field, Grid};
use crate::scalar::Scalar;

/// Which elliptic equation couples `v` to `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `0 = v'' - v + u`
    Standard,
    /// `0 = v'' - M + u`, `∫v = 0`
    JaegerLuckhaus,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::JaegerLuckhaus => "jaeger_luckhaus",
        }
    }
}

/// Initial density profiles. Every profile is rescaled so that its midpoint
/// mass equals `mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition<T = f64> {
    Constant {
        mass: T,
    },
    /// `mass * (1 + amplitude * cos(frequency * π x))`
    CosineBump {
        mass: T,
        amplitude: T,
        frequency: T,
    },
    /// `floor + s * exp(-(x - center)² / (2 width²))` with `s` fixed by the mass.
    GaussianBump {
        mass: T,
        center: T,
        width: T,
        floor: T,
    },
}

impl<T: Scalar> InitialCondition<T> {
    pub fn mass(&self) -> T {
        match *self {
            InitialCondition::Constant { mass }
            | InitialCondition::CosineBump { mass, .. }
            | InitialCondition::GaussianBump { mass, .. } => mass,
        }
    }

    /// Checks parameter ranges and positivity required by `diffusion`.
    pub fn validate(&self, diffusion: &Diffusion<T>) -> Result<()> {
        let invalid = |msg: String| Err(KsError::InvalidConfig(msg));
        let mass = self.mass();
        if !(mass > T::zero() && mass.is_finite()) {
            return invalid(format!("initial mass must be positive and finite, got {mass}"));
        }
        let strict = diffusion.requires_positive();
        match *self {
            InitialCondition::Constant { .. } => {}
            InitialCondition::CosineBump {
                amplitude, frequency, ..
            } => {
                if !(frequency > T::zero() && frequency.is_finite()) {
                    return invalid(format!("cosine frequency must be positive, got {frequency}"));
                }
                if !amplitude.is_finite() || amplitude.abs() > T::one() {
                    return invalid(format!("cosine amplitude must lie in [-1, 1], got {amplitude}"));
                }
                if strict && amplitude.abs() >= T::one() {
                    return invalid(format!(
                        "{} needs u0 >= m0 > 0 but cosine amplitude {amplitude} lets u0 touch 0",
                        diffusion.kind_name()
                    ));
                }
            }
            InitialCondition::GaussianBump {
                center, width, floor, ..
            } => {
                if !(width > T::zero() && width.is_finite()) {
                    return invalid(format!("gaussian width must be positive, got {width}"));
                }
                if !(center >= T::zero() && center <= T::one()) {
                    return invalid(format!("gaussian center must lie in [0, 1], got {center}"));
                }
                if !(floor >= T::zero()) || floor >= mass {
                    return invalid(format!("gaussian floor must lie in [0, mass), got {floor}"));
                }
                if strict && floor == T::zero() {
                    return invalid(format!(
                        "{} needs u0 >= m0 > 0 but gaussian floor is 0",
                        diffusion.kind_name()
                    ));
                }
            }
        }
        Ok(())
    }

    /// Samples the profile on `grid` and renormalises it to the target mass.
    pub fn realize(&self, grid: &Grid<T>) -> Field<T> {
        let mass = self.mass();
        let mut u = match *self {
            InitialCondition::Constant { mass } => Field::constant(grid, mass),
            InitialCondition::CosineBump {
                mass,
                amplitude,
                frequency,
            } => Field::from_fn(grid, |x| {
                mass * (T::one() + amplitude * (frequency * T::PI() * x).cos())
            }),
            InitialCondition::GaussianBump {
                mass,
                center,
                width,
                floor,
            } => {
                let two_w2 = T::lit(2.0) * width * width;
                let bump = Field::from_fn(grid, |x| (-(x - center).powi(2) / two_w2).exp());
                let scale = (mass - floor) / quadrature(&bump, grid);
                bump.map(|b| floor + scale * b)
            }
        };
        let factor = mass / quadrature(&u, grid);
        u.iter_mut().for_each(|x| *x = *x * factor);
        u
    }
}

/// Everything defining the continuous problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig<T = f64> {
    pub variant: Variant,
    pub diffusion: Diffusion<T>,
    pub initial_condition: InitialCondition<T>,
    pub t_end: T,
}

impl<T: Scalar> ProblemConfig<T> {
    pub fn mass(&self) -> T {
        self.initial_condition.mass()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > T::zero() && self.t_end.is_finite()) {
            return Err(KsError::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !self.diffusion.exponent().is_finite() {
            return Err(KsError::InvalidConfig("diffusion exponent must be finite".into()));
        }
        self.initial_condition.validate(&self.diffusion)
    }
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T = f64> {
    /// Fraction of the explicit diffusive limit `h² / (2 max a)`.
    pub cfl_diff: T,
    /// Fraction of the advective limit `h / max|v_x|`.
    pub cfl_adv: T,
    /// Step size below which the run stops with `DtCollapse`.
    pub dt_min: T,
    /// `‖u‖∞` above which the run stops with `BlowupSuspected`.
    pub blowup_threshold: T,
    /// Emit a monitor record every this many accepted steps.
    pub record_every: usize,
    /// Exponent of the `‖v‖_{L^p}` monitor.
    pub v_norm_exponent: T,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            cfl_diff: T::lit(0.4),
            cfl_adv: T::lit(0.9),
            dt_min: T::lit(1e-12),
            blowup_threshold: T::lit(1e6),
            record_every: 10,
            v_norm_exponent: T::lit(2.0),
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: T| x > T::zero() && x <= T::one();
        let err = |msg: String| Err(KsError::InvalidConfig(msg));
        if !in_unit(self.cfl_diff) {
            return err(format!("cfl_diff must lie in (0, 1], got {}", self.cfl_diff));
        }
        if !in_unit(self.cfl_adv) {
            return err(format!("cfl_adv must lie in (0, 1], got {}", self.cfl_adv));
        }
        if !(self.dt_min > T::zero()) {
            return err(format!("dt_min must be positive, got {}", self.dt_min));
        }
        if !(self.blowup_threshold > T::zero()) {
            return err(format!(
                "blowup_threshold must be positive, got {}",
                self.blowup_threshold
            ));
        }
        if !(self.v_norm_exponent >= T::one() && self.v_norm_exponent.is_finite()) {
            return err(format!(
                "v_norm_exponent must lie in [1, inf), got {}",
                self.v_norm_exponent
            ));
        }
        if self.record_every == 0 {
            return err("record_every must be at least 1".into());
        }
        Ok(())
    }

    /// The blowup trigger must sit above the initial peak.
    pub fn validate_initial(&self, u0: &[T]) -> Result<()> {
        let peak = u0.iter().copied().fold(T::neg_infinity(), T::max);
        if self.blowup_threshold <= peak {
            return Err(KsError::InvalidConfig(format!(
                "blowup_threshold {} does not exceed the initial maximum {peak}",
                self.blowup_threshold
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Grid = crate::grid::Grid<f64>;

    #[test]
    fn realized_profiles_hit_the_mass() {
        let g = Grid::new(128).unwrap();
        let ics = [
            InitialCondition::Constant { mass: 4.0 },
            InitialCondition::CosineBump {
                mass: 4.0,
                amplitude: 0.5,
                frequency: 1.0,
            },
            InitialCondition::GaussianBump {
                mass: 10.0,
                center: 0.5,
                width: 0.05,
                floor: 0.1,
            },
            InitialCondition::GaussianBump {
                mass: 1.0,
                center: 0.0,
                width: 0.2,
                floor: 0.0,
            },
        ];
        for ic in ics {
            let u = ic.realize(&g);
            assert!((quadrature(&u, &g) - ic.mass()).abs() <= 1e-12, "{ic:?}");
            assert!(u.min() >= 0.0);
        }
    }

    #[test]
    fn gaussian_floor_is_respected() {
        let g = Grid::new(64).unwrap();
        let ic = InitialCondition::GaussianBump {
            mass: 10.0,
            center: 0.5,
            width: 0.03,
            floor: 0.2,
        };
        let u = ic.realize(&g);
        assert!(u.min() >= 0.2 * (1.0 - 1e-12));
    }

    #[test]
    fn singular_diffusion_rejects_touching_zero() {
        let d = Diffusion::InverseU;
        let ic = InitialCondition::GaussianBump {
            mass: 1.0,
            center: 0.5,
            width: 0.1,
            floor: 0.0,
        };
        assert!(matches!(ic.validate(&d), Err(KsError::InvalidConfig(_))));
        assert!(ic.validate(&Diffusion::InverseOnePlusU).is_ok());
        let cos = InitialCondition::CosineBump {
            mass: 1.0,
            amplitude: 1.0,
            frequency: 2.0,
        };
        assert!(cos.validate(&d).is_err());
        assert!(cos.validate(&Diffusion::InverseOnePlusU).is_ok());
    }

    #[test]
    fn solver_defaults_validate() {
        let s = SolverConfig::<f64>::default();
        s.validate().unwrap();
        assert_eq!(s.record_every, 10);
        assert!(s.validate_initial(&[1.0, 2e6]).is_err());
        let bad = SolverConfig { cfl_diff: 1.5, ..s };
        assert!(bad.validate().is_err());
    }
}
