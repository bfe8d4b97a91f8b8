//! Adaptive integration of the reduced models with sampling on a fixed grid.

use serde::Serialize;

use crate::dynamics;
use crate::error::{Error, Result};
use crate::model::{self, ModelKind, PolarState, State};
use crate::ode::{self, OdeSystem, SolveStats, StepControl};

/// Variances at or below this value are treated as having crossed the axis.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub t_end: f64,
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            initial_step: 1e-3,
            t_end: 10.0,
            sample_interval: 0.01,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(self, t_end: f64) -> Self {
        IntegratorConfig { t_end, ..self }
    }

    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig { rel_tol, abs_tol, ..self }
    }

    pub fn with_sample_interval(self, sample_interval: f64) -> Self {
        IntegratorConfig { sample_interval, ..self }
    }

    pub fn validate(&self, t_start: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {tol}"));
            }
        }
        if !(self.t_end > t_start) || !self.t_end.is_finite() {
            return bad(format!("t_end ({}) must exceed the start time ({t_start})", self.t_end));
        }
        if !(self.sample_interval > 0.0) {
            return bad(format!("sample_interval must be positive, got {}", self.sample_interval));
        }
        if !(self.max_step > 0.0) || !(self.initial_step > 0.0) {
            return bad("max_step and initial_step must be positive".into());
        }
        Ok(())
    }

    /// Sample grid `t_start, t_start + Δ, …` closed with `t_end`.
    pub fn sample_times(&self, t_start: f64) -> Vec<f64> {
        let n = ((self.t_end - t_start) / self.sample_interval + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|i| t_start + i as f64 * self.sample_interval).collect();
        // drop a grid point that would sit within rounding distance of t_end
        while times.len() > 1 && self.t_end - times[times.len() - 1] < 1e-9 * self.sample_interval {
            times.pop();
        }
        times.push(self.t_end);
        times
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            initial_step: self.initial_step,
            ..StepControl::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub state: State,
    /// Polar view for the 2D and elliptic models.
    pub polar: Option<PolarState>,
}

impl TrajectorySample {
    pub fn new(state: State) -> Result<Self> {
        let polar = if state.kind().has_polar_form() { Some(model::to_polar(&state)?) } else { None };
        Ok(TrajectorySample { state, polar })
    }

    pub fn t(&self) -> f64 {
        self.state.t()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub kind: ModelKind,
    pub config: IntegratorConfig,
    pub samples: Vec<TrajectorySample>,
    #[serde(skip)]
    pub stats: SolveStats,
}

impl Trajectory {
    /// Assemble a trajectory from externally computed states, e.g. an exact
    /// solution. Times must be strictly increasing and the kinds must agree.
    pub fn from_states(kind: ModelKind, config: IntegratorConfig, states: Vec<State>) -> Result<Self> {
        if states.iter().any(|s| s.kind() != kind) {
            return Err(Error::Domain("trajectory mixes model kinds".into()));
        }
        if states.windows(2).any(|w| !(w[1].t() > w[0].t())) {
            return Err(Error::Domain("trajectory sample times must be strictly increasing".into()));
        }
        let samples = states.into_iter().map(TrajectorySample::new).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { kind, config, samples, stats: SolveStats::default() })
    }

    pub fn states(&self) -> impl Iterator<Item = &State> + '_ {
        self.samples.iter().map(|s| &s.state)
    }

    pub fn first(&self) -> &State {
        &self.samples[0].state
    }

    pub fn last(&self) -> &State {
        &self.samples[self.samples.len() - 1].state
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// First-order form `(q, q̇)' = (q̇, q̈(q))` of a model.
pub(crate) struct ModelSystem {
    pub kind: ModelKind,
}

impl OdeSystem for ModelSystem {
    fn dim(&self) -> usize {
        2 * self.kind.dim()
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.kind.dim();
        let (q, qdot) = y.split_at(n);
        dy[..n].copy_from_slice(qdot);
        match dynamics::accelerations(self.kind, q) {
            Ok(acc) => dy[n..].copy_from_slice(&acc),
            // Only reachable from an intermediate stage; NaN forces a rejection.
            Err(_) => dy[n..].fill(f64::NAN),
        }
    }

    fn admissible(&self, y: &[f64]) -> bool {
        y[..self.kind.dim()].iter().all(|&q| q > POSITIVITY_FLOOR)
    }
}

/// Integrate the model of `initial` from `initial.t()` to `config.t_end`,
/// sampling on the `config.sample_interval` grid.
pub fn integrate(initial: &State, config: &IntegratorConfig) -> Result<Trajectory> {
    config.validate(initial.t())?;
    let kind = initial.kind();
    let times = config.sample_times(initial.t());
    let system = ModelSystem { kind };
    let (ys, stats) = ode::solve(
        &system,
        initial.t(),
        &initial.to_flat(),
        config.t_end,
        &config.step_control(),
        &times,
    )?;
    let samples = times
        .iter()
        .zip(ys)
        .map(|(&t, y)| TrajectorySample::new(State::from_flat(kind, t, &y)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { kind, config: *config, samples, stats })
}
