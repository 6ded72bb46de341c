//! Finite-volume solver for the one-dimensional quasilinear
//! parabolic-elliptic Keller-Segel system
//!
//! ```text
//! ∂t u = ∂x(a(u) ∂x u − u ∂x v),   0 = ∂x² v − v + u   on (0, 1),
//! ```
//!
//! with no-flux boundaries, together with discrete evaluators for its
//! Lyapunov-like energy balance `dF/dt + D = ∫ u a(u) v²/4` and the
//! regularity estimates that follow from it. The Jäger-Luckhaus variant
//! `0 = ∂x² v − M + u`, `∫v = 0` is also supported.
//!
//! Every numerical type is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the double-precision instantiations used by the
//! command-line runner.

pub mod config;
pub mod diffusion;
pub mod elliptic;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod scalar;
pub mod stepper;

pub use config::{InitialCondition, ProblemConfig, SolverConfig, Variant};
pub use diffusion::{CriticalFamily, Criticality, Diffusion};
pub use error::{KsError, Result};
pub use functionals::{AffineEnvelope, EnergyAudit, MonitorRecord, Norms, RegularitySlack};
pub use grid::{FaceArray, Field, Grid};
pub use scalar::Scalar;
pub use stepper::{run, MonitorSink, NullSink, RunOutcome, SimState, Status, Stepper};

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Diffusion64 = Diffusion<f64>;
pub type ProblemConfig64 = ProblemConfig<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SimState64 = SimState<f64>;
pub type MonitorRecord64 = MonitorRecord<f64>;
pub type RunOutcome64 = RunOutcome<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type ProblemConfig32 = ProblemConfig<f32>;
