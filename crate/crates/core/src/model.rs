//! Model kinds, phase-space states, reference parameters and the
//! dimensional/dimensionless rescalings.
//!
//! All dynamics in this crate run in dimensionless variables. For the
//! two-dimensional model the length unit is `sqrt(X0 Y0)` and the time unit
//! is `sqrt(m X0 Y0 / T0)`; for one dimension the length unit is `X0` and the
//! time unit is `X0 sqrt(m / T0)`. The three-dimensional models use the
//! geometric-mean length `L = (X0 Y0 Z0)^(1/3)` with time unit
//! `L sqrt(m / T0)`, which maps the dimensional equations onto
//! `X'' = 1 / (X (X Y Z)^(2/3))`. The elliptic model is the three-dimensional
//! one restricted to `Z = X`, so it takes `Z0 = X0`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The four reduced dynamical systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Fluid in a one-dimensional channel: `X'' = 1/X^3`.
    OneD,
    /// Fluid constrained to a plane: `X'' = 1/(X^2 Y)`, `Y'' = 1/(X Y^2)`.
    TwoD,
    /// Full three-dimensional fireball.
    ThreeD,
    /// Three-dimensional fireball on elliptic solutions `Z = X`. Only `X`
    /// and `Y` are stored.
    EllipticThreeD,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::OneD,
        ModelKind::TwoD,
        ModelKind::ThreeD,
        ModelKind::EllipticThreeD,
    ];

    /// Number of stored variances.
    pub fn dim(self) -> usize {
        match self {
            ModelKind::OneD => 1,
            ModelKind::TwoD | ModelKind::EllipticThreeD => 2,
            ModelKind::ThreeD => 3,
        }
    }

    /// Short name used on the command line (`1d`, `2d`, `3d`, `elliptic`).
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::OneD => "1d",
            ModelKind::TwoD => "2d",
            ModelKind::ThreeD => "3d",
            ModelKind::EllipticThreeD => "elliptic",
        }
    }

    pub fn has_polar_form(self) -> bool {
        matches!(self, ModelKind::TwoD | ModelKind::EllipticThreeD)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1d" | "oned" => Ok(ModelKind::OneD),
            "2d" | "twod" => Ok(ModelKind::TwoD),
            "3d" | "threed" => Ok(ModelKind::ThreeD),
            "elliptic" | "elliptic3d" | "ellipticthreed" => Ok(ModelKind::EllipticThreeD),
            other => Err(Error::InvalidConfig(format!("unknown model `{other}`"))),
        }
    }
}

/// A phase-space point: time, variances and their rates.
///
/// Every variance is strictly positive and both vectors have the length
/// demanded by the model kind. The fields are private so that these
/// invariants hold for every value in circulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    kind: ModelKind,
    t: f64,
    q: Vec<f64>,
    qdot: Vec<f64>,
}

impl State {
    pub fn new(kind: ModelKind, t: f64, q: &[f64], qdot: &[f64]) -> Result<Self> {
        let n = kind.dim();
        if q.len() != n || qdot.len() != n {
            return domain(format!(
                "{kind} state needs {n} variances and {n} rates, got {} and {}",
                q.len(),
                qdot.len()
            ));
        }
        if !t.is_finite() || q.iter().chain(qdot).any(|v| !v.is_finite()) {
            return domain("state contains a non-finite value");
        }
        if let Some(bad) = q.iter().find(|&&v| v <= 0.0) {
            return domain(format!("variance must be strictly positive, got {bad}"));
        }
        Ok(State { kind, t, q: q.to_vec(), qdot: qdot.to_vec() })
    }

    /// State at rest at `t = 0`.
    pub fn at_rest(kind: ModelKind, q: &[f64]) -> Result<Self> {
        State::new(kind, 0.0, q, &vec![0.0; q.len()])
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn qdot(&self) -> &[f64] {
        &self.qdot
    }

    /// Flat `[q..., qdot...]` layout used by the integrator.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut y = self.q.clone();
        y.extend_from_slice(&self.qdot);
        y
    }

    pub fn from_flat(kind: ModelKind, t: f64, y: &[f64]) -> Result<Self> {
        let n = kind.dim();
        if y.len() != 2 * n {
            return domain(format!("flat {kind} state needs {} entries", 2 * n));
        }
        State::new(kind, t, &y[..n], &y[n..])
    }

    pub fn with_time(&self, t: f64) -> Self {
        State { t, ..self.clone() }
    }

    /// The same point with every rate negated.
    pub fn reversed(&self) -> Self {
        State { qdot: self.qdot.iter().map(|v| -v).collect(), ..self.clone() }
    }
}

/// Dimensional reference values of the Gaussian Ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub n0: f64,
    /// Reference temperature in energy units (Boltzmann constant set to 1).
    pub t0: f64,
    pub x0: f64,
    pub y0: Option<f64>,
    pub z0: Option<f64>,
    pub mass: f64,
}

impl PhysicalParams {
    /// All reference values equal to one: the rescaling is the identity.
    pub fn unit(kind: ModelKind) -> Self {
        PhysicalParams {
            n0: 1.0,
            t0: 1.0,
            x0: 1.0,
            y0: (kind != ModelKind::OneD).then_some(1.0),
            z0: (kind == ModelKind::ThreeD).then_some(1.0),
            mass: 1.0,
        }
    }

    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                domain(format!("{name} must be strictly positive, got {v}"))
            }
        };
        positive("n0", self.n0)?;
        positive("T0", self.t0)?;
        positive("X0", self.x0)?;
        positive("m", self.mass)?;
        match kind {
            ModelKind::OneD => {}
            ModelKind::TwoD | ModelKind::EllipticThreeD => {
                positive("Y0", self.y0.ok_or_else(|| Error::Domain("Y0 is required".into()))?)?;
            }
            ModelKind::ThreeD => {
                positive("Y0", self.y0.ok_or_else(|| Error::Domain("Y0 is required".into()))?)?;
                positive("Z0", self.z0.ok_or_else(|| Error::Domain("Z0 is required".into()))?)?;
            }
        }
        if kind != ModelKind::ThreeD && self.z0.is_some() {
            return domain("Z0 is only meaningful for the 3d model");
        }
        Ok(())
    }

    /// Length unit and time unit of the dimensionless variables.
    pub fn units(&self, kind: ModelKind) -> Result<(f64, f64)> {
        self.validate(kind)?;
        let length = match kind {
            ModelKind::OneD => self.x0,
            ModelKind::TwoD => (self.x0 * self.y0.unwrap()).sqrt(),
            ModelKind::ThreeD => (self.x0 * self.y0.unwrap() * self.z0.unwrap()).cbrt(),
            ModelKind::EllipticThreeD => (self.x0 * self.x0 * self.y0.unwrap()).cbrt(),
        };
        let time = length * (self.mass / self.t0).sqrt();
        Ok((length, time))
    }
}

/// Map a dimensional state onto the dimensionless variables.
pub fn nondimensionalize(params: &PhysicalParams, state: &State) -> Result<State> {
    let (length, time) = params.units(state.kind)?;
    let velocity = length / time;
    State::new(
        state.kind,
        state.t / time,
        &state.q.iter().map(|v| v / length).collect::<Vec<_>>(),
        &state.qdot.iter().map(|v| v / velocity).collect::<Vec<_>>(),
    )
}

/// Inverse of [`nondimensionalize`].
pub fn dimensionalize(params: &PhysicalParams, state: &State) -> Result<State> {
    let (length, time) = params.units(state.kind)?;
    let velocity = length / time;
    State::new(
        state.kind,
        state.t * time,
        &state.q.iter().map(|v| v * length).collect::<Vec<_>>(),
        &state.qdot.iter().map(|v| v * velocity).collect::<Vec<_>>(),
    )
}

/// Polar view of a two-variance state.
///
/// `ttilde` is the reparametrized time `∫ dt / r^2` measured from the instant
/// of minimum radius, obtained in closed form from the state's own energy and
/// Ermakov invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarState {
    pub r: f64,
    pub phi: f64,
    pub rdot: f64,
    pub phidot: f64,
    pub ttilde: f64,
}

/// Convert a 2D state to polar coordinates `X = r cos φ, Y = r sin φ`, or an
/// elliptic state to stretched polar coordinates `X = r cos φ / √2,
/// Y = r sin φ`.
pub fn to_polar(state: &State) -> Result<PolarState> {
    let (x, y, xd, yd) = match state.kind {
        ModelKind::TwoD => (state.q[0], state.q[1], state.qdot[0], state.qdot[1]),
        ModelKind::EllipticThreeD => (
            std::f64::consts::SQRT_2 * state.q[0],
            state.q[1],
            std::f64::consts::SQRT_2 * state.qdot[0],
            state.qdot[1],
        ),
        kind => return Err(Error::UnsupportedModel { op: "to_polar", kind }),
    };
    // In the stretched case (x, y) = (√2 X, Y) is an ordinary polar pair.
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    let phi = y.atan2(x);
    let rdot = (x * xd + y * yd) / r;
    let phidot = (x * yd - y * xd) / r2;

    // H = rdot^2/2 + K/r^2 with K = r^4 phidot^2/2 + U(phi); here K is
    // recovered from the energy directly, then t - t0 = r rdot / (2H).
    let energy = crate::dynamics::energies(state)?.hamiltonian;
    let k = r2 * (energy - 0.5 * rdot * rdot);
    let ttilde = (r * rdot / (2.0 * k).sqrt()).atan() / (2.0 * k).sqrt();
    Ok(PolarState { r, phi, rdot, phidot, ttilde })
}

/// Inverse of [`to_polar`]; `ttilde` is ignored.
pub fn to_cartesian(polar: &PolarState, kind: ModelKind, t: f64) -> Result<State> {
    if !(polar.r > 0.0) {
        return domain(format!("radius must be positive, got {}", polar.r));
    }
    let (s, c) = polar.phi.sin_cos();
    let x = polar.r * c;
    let y = polar.r * s;
    let xd = polar.rdot * c - polar.r * s * polar.phidot;
    let yd = polar.rdot * s + polar.r * c * polar.phidot;
    match kind {
        ModelKind::TwoD => State::new(kind, t, &[x, y], &[xd, yd]),
        ModelKind::EllipticThreeD => {
            State::new(kind, t, &[x * FRAC_1_SQRT_2, y], &[xd * FRAC_1_SQRT_2, yd])
        }
        kind => Err(Error::UnsupportedModel { op: "to_cartesian", kind }),
    }
}
