//! Explicit conservative finite-volume stepping of
//! `∂t u = ∂x(a(u) ∂x u − u ∂x v)` with quasi-static `v`.
//!
//! The face flux is
//!
//! ```text
//! q_f = (A(u_R) − A(u_L)) / h − u_up (v_R − v_L) / h
//! ```
//!
//! with `u_up` taken from the upwind side of the face velocity. Boundary
//! fluxes are zero, so `Σ u_i h` only changes by rounding.

use crate::config::{ProblemConfig, SolverConfig, Variant};
use crate::diffusion::Diffusion;
use crate::elliptic::{solve_jl, solve_standard};
use crate::error::Result;
use crate::functionals::{energy_residual, EnergySample, MonitorRecord};
use crate::grid::{quadrature, FaceArray, Field, Grid};
use crate::scalar::Scalar;

/// Largest growth of `dt` between consecutive steps.
pub const DT_GROWTH_CAP: f64 = 1.2;

/// A step may overshoot its stable size by this fraction to land on `t_end`.
const FINAL_STEP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Finished,
    BlowupSuspected,
    DtCollapse,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Finished => "finished",
            Status::BlowupSuspected => "blowup_suspected",
            Status::DtCollapse => "dt_collapse",
        }
    }

    pub fn is_terminal(self) -> bool {
        self != Status::Running
    }
}

/// One point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T = f64> {
    pub t: T,
    pub u: Field<T>,
    pub v: Field<T>,
    /// Size of the last accepted step (zero before the first one).
    pub dt: T,
    pub step: usize,
    pub status: Status,
}

/// Face fluxes `q_f`; positive values move mass towards `+x`.
pub fn compute_fluxes<T: Scalar>(u: &[T], v: &[T], grid: &Grid<T>, d: &Diffusion<T>) -> Result<FaceArray<T>> {
    d.check_field(u)?;
    let inv_h = grid.h().recip();
    let mut q = FaceArray::zeros(grid);
    let faces = q.as_mut_slice();
    let mut left_primitive = d.primitive_unchecked(u[0]);
    for f in 1..grid.n_cells() {
        let right_primitive = d.primitive_unchecked(u[f]);
        let velocity = (v[f] - v[f - 1]) * inv_h;
        let upwind = if velocity > T::zero() { u[f - 1] } else { u[f] };
        faces[f] = (right_primitive - left_primitive) * inv_h - upwind * velocity;
        left_primitive = right_primitive;
    }
    Ok(q)
}

/// Advances states of one problem. Holds only immutable configuration.
#[derive(Debug, Clone)]
pub struct Stepper<T = f64> {
    problem: ProblemConfig<T>,
    solver: SolverConfig<T>,
    grid: Grid<T>,
}

impl<T: Scalar> Stepper<T> {
    pub fn new(problem: ProblemConfig<T>, solver: SolverConfig<T>, grid: Grid<T>) -> Result<Self> {
        problem.validate()?;
        solver.validate()?;
        Ok(Self { problem, solver, grid })
    }

    pub fn problem(&self) -> &ProblemConfig<T> {
        &self.problem
    }

    pub fn solver(&self) -> &SolverConfig<T> {
        &self.solver
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn mass(&self) -> T {
        self.problem.mass()
    }

    /// Elliptic solve for the configured variant.
    pub fn potential(&self, u: &[T]) -> Result<Field<T>> {
        match self.problem.variant {
            Variant::Standard => solve_standard(u, &self.grid),
            Variant::JaegerLuckhaus => solve_jl(u, &self.grid, self.mass()),
        }
    }

    pub fn initial_state(&self) -> Result<SimState<T>> {
        let u = self.problem.initial_condition.realize(&self.grid);
        self.problem.diffusion.check_field(&u)?;
        self.solver.validate_initial(&u)?;
        let v = self.potential(&u)?;
        Ok(SimState {
            t: T::zero(),
            u,
            v,
            dt: T::zero(),
            step: 0,
            status: Status::Running,
        })
    }

    /// Stable step size for the current state before the growth cap.
    fn stable_dt(&self, u: &[T], v: &[T]) -> T {
        let h = self.grid.h();
        let d = &self.problem.diffusion;
        let max_a = u.iter().fold(T::zero(), |m, &x| m.max(d.value_unchecked(x)));
        let max_velocity = v.windows(2).fold(T::zero(), |m, w| m.max((w[1] - w[0]).abs())) / h;
        let mut dt = self.solver.cfl_diff * h * h / (T::lit(2.0) * max_a);
        if max_velocity > T::zero() {
            dt = dt.min(self.solver.cfl_adv * h / max_velocity);
        }
        dt
    }

    fn admissible(&self, x: T) -> bool {
        x.is_finite()
            && if self.problem.diffusion.requires_positive() {
                x > T::zero()
            } else {
                x >= T::zero()
            }
    }

    /// Performs one accepted step, or marks the state terminal.
    ///
    /// The step size is the smaller of the diffusive and advective limits,
    /// capped at [`DT_GROWTH_CAP`] times the previous step and at the time
    /// remaining. Updates that would leave the admissible range are retried
    /// with half the step; falling below `dt_min` ends the run with
    /// [`Status::DtCollapse`].
    pub fn step(&self, state: &mut SimState<T>) -> Result<()> {
        self.step_towards(state, self.problem.t_end)
    }

    /// Like [`Stepper::step`], but never steps past `stop` (clamped to
    /// `t_end`) and lands on it exactly when it is within reach.
    pub fn step_towards(&self, state: &mut SimState<T>, stop: T) -> Result<()> {
        assert_eq!(state.status, Status::Running, "step called on a terminated state");
        let t_end = self.problem.t_end;
        let stop = stop.min(t_end);
        let remaining = stop - state.t;

        let mut dt = self.stable_dt(&state.u, &state.v);
        if state.step > 0 {
            dt = dt.min(T::lit(DT_GROWTH_CAP) * state.dt);
        }
        let mut final_step = false;
        // Absorb slivers so the run ends exactly at t_end.
        if dt >= remaining || remaining - dt <= T::lit(FINAL_STEP_SLACK) * dt {
            dt = remaining;
            final_step = true;
        }

        let q = compute_fluxes(&state.u, &state.v, &self.grid, &self.problem.diffusion)?;
        let q = q.values();
        let h = self.grid.h();
        let mut next = state.u.clone();
        loop {
            if dt < self.solver.dt_min {
                state.status = Status::DtCollapse;
                return Ok(());
            }
            let ratio = dt / h;
            let mut ok = true;
            for (i, (out, &ui)) in next.iter_mut().zip(state.u.iter()).enumerate() {
                *out = ui + ratio * (q[i + 1] - q[i]);
                ok &= self.admissible(*out);
            }
            if ok {
                break;
            }
            dt = dt * T::lit(0.5);
            final_step = false;
        }

        state.v = self.potential(&next)?;
        state.u = next;
        state.t = if final_step { stop } else { state.t + dt };
        state.dt = dt;
        state.step += 1;
        if state.u.max_abs() > self.solver.blowup_threshold {
            state.status = Status::BlowupSuspected;
        } else if state.t >= t_end {
            state.status = Status::Finished;
        }
        Ok(())
    }
}

/// Receives monitor records as a run progresses.
pub trait MonitorSink<T> {
    fn record(&mut self, record: &MonitorRecord<T>);

    /// Times at which [`run`] lands exactly and calls [`Self::snapshot`].
    fn snapshot_times(&self) -> Vec<T> {
        Vec::new()
    }

    fn snapshot(&mut self, _state: &SimState<T>) {}
}

impl<T: Clone> MonitorSink<T> for Vec<MonitorRecord<T>> {
    fn record(&mut self, record: &MonitorRecord<T>) {
        self.push(record.clone());
    }
}

/// Discards every record.
pub struct NullSink;

impl<T> MonitorSink<T> for NullSink {
    fn record(&mut self, _: &MonitorRecord<T>) {}
}

/// Final state of a run plus statistics gathered over every accepted step.
#[derive(Debug, Clone)]
pub struct RunOutcome<T = f64> {
    pub state: SimState<T>,
    pub initial_mass: T,
    /// `max_n |Σu h − M| / M` over all accepted steps.
    pub max_mass_drift: T,
    pub max_u_linf: T,
    /// Largest `|residual|` of the step-by-step energy audit.
    pub max_abs_residual: T,
    /// `Σ |residual| Δt`.
    pub residual_integral: T,
    /// Largest source term seen at any step.
    pub max_source: T,
    pub records: usize,
}

/// Runs `problem` to `t_end` or a terminal status, emitting a record at
/// `t = 0`, every `record_every` accepted steps and at termination.
///
/// The energy residual is computed between every pair of consecutive
/// accepted steps, independent of `record_every`.
pub fn run<T: Scalar>(
    problem: ProblemConfig<T>,
    solver: SolverConfig<T>,
    grid: Grid<T>,
    sink: &mut dyn MonitorSink<T>,
) -> Result<RunOutcome<T>> {
    let stepper = Stepper::new(problem, solver, grid)?;
    let mut state = stepper.initial_state()?;
    let d = problem.diffusion;
    let variant = problem.variant;
    let mass = problem.mass();
    let v_exponent = solver.v_norm_exponent;
    let mut pending: Vec<T> = sink.snapshot_times();
    pending.sort_by(|a, b| b.partial_cmp(a).expect("finite snapshot times"));

    let record = |state: &SimState<T>, residual: T, integral: T| -> Result<MonitorRecord<T>> {
        let mut rec = MonitorRecord::evaluate(state.t, &state.u, &state.v, &d, &grid, variant, mass, v_exponent)?;
        rec.energy_residual = residual;
        rec.residual_integral = integral;
        rec.step = state.step;
        Ok(rec)
    };

    let mut sample = EnergySample::evaluate(&state.u, &state.v, &d, &grid, variant, mass)?;
    let mut outcome = RunOutcome {
        initial_mass: quadrature(&state.u, &grid),
        max_mass_drift: T::zero(),
        max_u_linf: state.u.max_abs(),
        max_abs_residual: T::zero(),
        residual_integral: T::zero(),
        max_source: sample.source,
        records: 1,
        state: state.clone(),
    };
    sink.record(&record(&state, T::zero(), T::zero())?);
    // `pending` is sorted descending; pop from the back.
    while pending.last().is_some_and(|&s| s <= state.t + solver.dt_min) {
        pending.pop();
        sink.snapshot(&state);
    }

    let mut last_residual = T::zero();
    let mut last_recorded_step = 0;
    while state.status == Status::Running {
        let before = state.step;
        let stop = pending.last().copied().unwrap_or(problem.t_end);
        stepper.step_towards(&mut state, stop)?;
        while state.step > before && pending.last().is_some_and(|&s| s <= state.t + solver.dt_min) {
            pending.pop();
            sink.snapshot(&state);
        }
        if state.step > before {
            let next = EnergySample::evaluate(&state.u, &state.v, &d, &grid, variant, mass)?;
            last_residual = energy_residual(&sample, &next, state.dt);
            sample = next;
            outcome.max_abs_residual = outcome.max_abs_residual.max(last_residual.abs());
            outcome.residual_integral = outcome.residual_integral + last_residual.abs() * state.dt;
            outcome.max_source = outcome.max_source.max(sample.source);
            outcome.max_u_linf = outcome.max_u_linf.max(state.u.max_abs());
            let drift = (quadrature(&state.u, &grid) - outcome.initial_mass).abs() / outcome.initial_mass;
            outcome.max_mass_drift = outcome.max_mass_drift.max(drift);
        }
        let due = state.step > last_recorded_step && state.step % solver.record_every == 0;
        if due || (state.status.is_terminal() && state.step > last_recorded_step) {
            sink.record(&record(&state, last_residual, outcome.residual_integral)?);
            outcome.records += 1;
            last_recorded_step = state.step;
        }
    }
    outcome.state = state;
    Ok(outcome)
}
