//! Fluid fields of the Gaussian Ansatz, residuals of the ideal-gas fluid
//! equations, and the total fluid energy.
//!
//! Only the 1D and 2D models carry a field reconstruction. For a state with
//! variances `X_i` and rates `Ẋ_i`:
//!
//! ```text
//! n   = n0 Π(X0_i/X_i) exp(−Σ x_i²/(2X_i²))
//! v_i = (Ẋ_i/X_i) x_i
//! T   = T0 (X0/X)² (1D),  T0 X0 Y0/(X Y) (2D)
//! p   = n T,  ε = n T/2 (1D),  ε = n T (2D)
//! ```
//!
//! Spatial derivatives are evaluated analytically; time derivatives come
//! from finite differences across trajectory samples.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::integrate::Trajectory;
use crate::model::{dimensionalize, ModelKind, PhysicalParams, State};
use crate::quadrature::GaussHermite;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluidFields {
    pub n: f64,
    pub v: Vec<f64>,
    pub temperature: f64,
    pub p: f64,
    pub eps: f64,
}

fn check_kind(kind: ModelKind, op: &'static str) -> Result<()> {
    match kind {
        ModelKind::OneD | ModelKind::TwoD => Ok(()),
        kind => Err(Error::UnsupportedModel { op, kind }),
    }
}

fn reference_widths(params: &PhysicalParams, kind: ModelKind) -> Result<Vec<f64>> {
    params.validate(kind)?;
    Ok(match kind {
        ModelKind::OneD => vec![params.x0],
        _ => vec![params.x0, params.y0.expect("validated")],
    })
}

/// `ε / (n T)`: half the number of degrees of freedom.
fn energy_factor(kind: ModelKind) -> f64 {
    kind.dim() as f64 / 2.0
}

/// Fields at `point` for a dimensional state.
pub fn fields_at(params: &PhysicalParams, state: &State, point: &[f64]) -> Result<FluidFields> {
    let kind = state.kind();
    check_kind(kind, "fields_at")?;
    if point.len() != kind.dim() {
        return domain(format!("{kind} probe needs {} coordinates", kind.dim()));
    }
    let widths = reference_widths(params, kind)?;
    let (q, qdot) = (state.q(), state.qdot());
    let compression: f64 = widths.iter().zip(q).map(|(w, x)| w / x).product();
    let exponent: f64 = point.iter().zip(q).map(|(x, s)| x * x / (2.0 * s * s)).sum();
    let n = params.n0 * compression * (-exponent).exp();
    // T ∝ n^(2/D) at fixed Gaussian shape: (X0/X)^2 in 1D, X0Y0/(XY) in 2D
    let temperature = match kind {
        ModelKind::OneD => params.t0 * compression * compression,
        _ => params.t0 * compression,
    };
    let v = point.iter().zip(q).zip(qdot).map(|((x, s), sd)| sd / s * x).collect();
    let p = n * temperature;
    Ok(FluidFields { n, v, temperature, p, eps: energy_factor(kind) * p })
}

/// Residuals of continuity, momentum (largest component) and energy at one
/// probe and one sample, both raw and scaled by the reference magnitudes
/// `n0/τ`, `L/τ²` and `n0 T0/τ` (`L`, `τ` the model's length and time units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTriple {
    pub t: f64,
    pub probe: usize,
    pub continuity: f64,
    pub momentum: f64,
    pub energy: f64,
    pub scaled: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualTriple>,
    /// Largest scaled residual of each equation.
    pub max_scaled: [f64; 3],
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_scaled.iter().cloned().fold(0.0, f64::max)
    }
}

/// Probe offsets `{0, ±1, ±2}` standard deviations per axis.
pub fn default_probes(kind: ModelKind) -> Vec<Vec<f64>> {
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    match kind.dim() {
        1 => offsets.iter().map(|&a| vec![a]).collect(),
        _ => offsets.iter().flat_map(|&a| offsets.iter().map(move |&b| vec![a, b])).collect(),
    }
}

/// Weights of a first-derivative stencil at `times[centre]` built from the
/// given sample indices (uniform 5-point, otherwise 3-point on a possibly
/// uneven grid).
fn stencil(times: &[f64], k: usize, wide: bool) -> Vec<(usize, f64)> {
    if wide {
        let h = times[k + 1] - times[k];
        vec![
            (k - 2, 1.0 / (12.0 * h)),
            (k - 1, -8.0 / (12.0 * h)),
            (k + 1, 8.0 / (12.0 * h)),
            (k + 2, -1.0 / (12.0 * h)),
        ]
    } else {
        let h1 = times[k] - times[k - 1];
        let h2 = times[k + 1] - times[k];
        vec![
            (k - 1, -h2 / (h1 * (h1 + h2))),
            (k, (h2 - h1) / (h1 * h2)),
            (k + 1, h1 / (h2 * (h1 + h2))),
        ]
    }
}

fn uniform_around(times: &[f64], k: usize) -> bool {
    let h = times[k + 1] - times[k];
    (k - 2..k + 2).all(|i| ((times[i + 1] - times[i]) - h).abs() <= 1e-9 * h)
}

/// Residuals of the fluid equations along a dimensionless trajectory.
///
/// Probes are given in units of the instantaneous standard deviations, i.e.
/// the physical probe at sample `k` is `x_i = a_i X_i(t_k)`, held fixed while
/// time derivatives are taken across the neighbouring samples.
pub fn pde_residuals(params: &PhysicalParams, traj: &Trajectory, probes: &[Vec<f64>]) -> Result<ResidualReport> {
    let kind = traj.kind;
    check_kind(kind, "pde_residuals")?;
    if traj.len() < 3 {
        return Err(Error::InsufficientData(format!("{} samples, need at least 3", traj.len())));
    }
    if let Some(p) = probes.iter().find(|p| p.len() != kind.dim() || p.iter().any(|a| a.abs() > 5.0)) {
        return domain(format!("probe {p:?} must have {} coordinates within ±5 standard deviations", kind.dim()));
    }
    let (length, time) = params.units(kind)?;
    let states: Vec<State> = traj.states().map(|s| dimensionalize(params, s)).collect::<Result<_>>()?;
    let times: Vec<f64> = states.iter().map(State::t).collect();
    let m = params.mass;
    let scales = [params.n0 / time, length / (time * time), params.n0 * params.t0 / time];

    let range: Vec<(usize, bool)> = if states.len() >= 5 {
        (2..states.len() - 2).map(|k| (k, uniform_around(&times, k))).collect()
    } else {
        (1..states.len() - 1).map(|k| (k, false)).collect()
    };

    let mut entries = Vec::with_capacity(range.len() * probes.len());
    let mut max_scaled = [0.0f64; 3];
    for (k, wide) in range {
        let state = &states[k];
        let (q, qdot) = (state.q(), state.qdot());
        let weights = stencil(&times, k, wide);
        let divergence: f64 = q.iter().zip(qdot).map(|(s, sd)| sd / s).sum();
        for (pi, probe) in probes.iter().enumerate() {
            let x: Vec<f64> = probe.iter().zip(q).map(|(a, s)| a * s).collect();
            let here = fields_at(params, state, &x)?;

            let mut dn = 0.0;
            let mut deps = 0.0;
            let mut dv = vec![0.0; x.len()];
            for &(j, w) in &weights {
                let f = fields_at(params, &states[j], &x)?;
                dn += w * f.n;
                deps += w * f.eps;
                for (d, vj) in dv.iter_mut().zip(&f.v) {
                    *d += w * vj;
                }
            }

            // ∂_i n = −n x_i/X_i², and the same for ε (T is uniform)
            let v_dot_grad_log: f64 = here.v.iter().zip(&x).zip(q).map(|((v, xi), s)| -v * xi / (s * s)).sum();
            let continuity = dn + here.n * v_dot_grad_log + here.n * divergence;
            let energy = deps + here.eps * v_dot_grad_log + here.eps * divergence + here.p * divergence;
            let momentum = (0..x.len())
                .map(|i| {
                    let advection = here.v[i] * qdot[i] / q[i];
                    let pressure = -here.temperature * x[i] / (q[i] * q[i]) / m;
                    (dv[i] + advection + pressure).abs()
                })
                .fold(0.0, f64::max);

            let scaled = [continuity.abs() / scales[0], momentum / scales[1], energy.abs() / scales[2]];
            for (mx, s) in max_scaled.iter_mut().zip(scaled) {
                *mx = mx.max(s);
            }
            entries.push(ResidualTriple { t: state.t(), probe: pi, continuity, momentum, energy, scaled });
        }
    }
    Ok(ResidualReport { entries, max_scaled })
}

const ENERGY_NODES: [usize; 2] = [20, 24];
const ENERGY_CONVERGENCE: f64 = 1e-10;

/// Gauss–Hermite integral of `integrand(point, fields)` over space for the
/// Gaussian of `state`, adapted to its widths.
fn integrate_fields(
    params: &PhysicalParams,
    state: &State,
    nodes: usize,
    integrand: &dyn Fn(&[f64], &FluidFields) -> f64,
) -> Result<f64> {
    let rule = GaussHermite::new(nodes);
    let q = state.q();
    // x_i = √2 X_i s_i turns exp(−x²/2X²) into exp(−s²)
    let jac: f64 = q.iter().map(|s| std::f64::consts::SQRT_2 * s).product();
    let mut total = 0.0;
    let mut eval = |s: &[f64], w: f64| -> Result<()> {
        let x: Vec<f64> = s.iter().zip(q).map(|(si, qi)| std::f64::consts::SQRT_2 * qi * si).collect();
        let fields = fields_at(params, state, &x)?;
        let gauss: f64 = s.iter().map(|si| si * si).sum();
        total += w * integrand(&x, &fields) * gauss.exp();
        Ok(())
    };
    match q.len() {
        1 => {
            for (s, w) in rule.nodes().iter().zip(rule.weights()) {
                eval(&[*s], *w)?;
            }
        }
        _ => {
            for (sx, wx) in rule.nodes().iter().zip(rule.weights()) {
                for (sy, wy) in rule.nodes().iter().zip(rule.weights()) {
                    eval(&[*sx, *sy], wx * wy)?;
                }
            }
        }
    }
    Ok(total * jac)
}

fn converged(params: &PhysicalParams, state: &State, integrand: &dyn Fn(&[f64], &FluidFields) -> f64) -> Result<f64> {
    check_kind(state.kind(), "spatial quadrature")?;
    let coarse = integrate_fields(params, state, ENERGY_NODES[0], integrand)?;
    let fine = integrate_fields(params, state, ENERGY_NODES[1], integrand)?;
    let change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if change > ENERGY_CONVERGENCE {
        return Err(Error::Numeric(format!("spatial quadrature did not converge (relative change {change:e})")));
    }
    Ok(fine)
}

/// Total fluid energy `∫ (n m v²/2 + ε) dV` of a dimensional state.
pub fn total_energy(params: &PhysicalParams, state: &State) -> Result<f64> {
    let m = params.mass;
    converged(params, state, &|_, f| {
        let v2: f64 = f.v.iter().map(|v| v * v).sum();
        0.5 * f.n * m * v2 + f.eps
    })
}

/// Particle number `∫ n dV` of a dimensional state.
pub fn particle_number(params: &PhysicalParams, state: &State) -> Result<f64> {
    converged(params, state, &|_, f| f.n)
}

/// Ratio between [`total_energy`] and the dimensionless energy `H`:
/// `N T0` with `N = √(2π) n0 X0` (1D) or `2π n0 X0 Y0` (2D).
pub fn energy_scale(params: &PhysicalParams, kind: ModelKind) -> Result<f64> {
    check_kind(kind, "energy_scale")?;
    let widths = reference_widths(params, kind)?;
    let number = params.n0 * widths.iter().map(|w| (2.0 * std::f64::consts::PI).sqrt() * w).product::<f64>();
    Ok(number * params.t0)
}
