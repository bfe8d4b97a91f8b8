//! The `simulate` and `analytic` commands.

use fireball_core::analytic::{
    angular_quadrature, one_d_solution, polar_pipeline, radial, radial_3d, time_reparam, AngularSolution,
    RadialSolution,
};
use fireball_core::dynamics::hamiltonian;
use fireball_core::invariants::{angular_potential_argmin, invariant_row, noether_invariant};
use fireball_core::model::to_polar;
use fireball_core::{integrate, Error, ModelKind, State, Trajectory};
use log::info;

use crate::config::RunConfig;
use crate::output::Table;
use crate::CliError;

pub const SIMULATE_COLUMNS: [&str; 11] = ["t", "X", "Y", "Z", "Xdot", "Ydot", "Zdot", "H", "I", "Itilde", "J"];
pub const COMPARE_COLUMNS: [&str; 4] = ["r", "r_analytic", "phi", "phi_analytic"];
pub const ANALYTIC_COLUMNS: [&str; 5] = ["t", "r", "rdot", "ttilde", "phi"];

pub fn run_integration(config: &RunConfig) -> Result<Trajectory, CliError> {
    let initial = config.initial_state()?;
    let traj = integrate(&initial, &config.integrator)?;
    info!(
        "{} model: {} samples, {} accepted / {} rejected steps",
        config.model,
        traj.len(),
        traj.stats.accepted,
        traj.stats.rejected
    );
    Ok(traj)
}

/// Physical coordinates of a state; the elliptic model repeats X as Z.
fn cartesian(state: &State) -> ([Option<f64>; 3], [Option<f64>; 3]) {
    let (q, v) = (state.q(), state.qdot());
    let mut pos = [None; 3];
    let mut vel = [None; 3];
    for i in 0..q.len() {
        pos[i] = Some(q[i]);
        vel[i] = Some(v[i]);
    }
    if state.kind() == ModelKind::EllipticThreeD {
        pos[2] = pos[0];
        vel[2] = vel[0];
    }
    (pos, vel)
}

pub fn simulate(config: &RunConfig) -> Result<Table, CliError> {
    let traj = run_integration(config)?;
    let comparison = if config.compare.unwrap_or(false) { Some(analytic_comparison(&traj)?) } else { None };

    let mut columns: Vec<&str> = SIMULATE_COLUMNS.to_vec();
    if comparison.is_some() {
        columns.extend(COMPARE_COLUMNS);
    }
    let mut table = Table::new(&columns);
    for (n, state) in traj.states().enumerate() {
        let (pos, vel) = cartesian(state);
        let inv = invariant_row(state)?;
        let mut row = vec![Some(state.t())];
        row.extend(pos);
        row.extend(vel);
        row.extend([Some(inv.h), inv.i, inv.i_tilde, Some(inv.j)]);
        if let Some(cmp) = &comparison {
            row.extend(cmp[n]);
        }
        table.push(row);
    }
    Ok(table)
}

/// Numeric and closed-form radius (and angle, where defined) per sample.
pub fn analytic_comparison(traj: &Trajectory) -> Result<Vec<[Option<f64>; 4]>, CliError> {
    let first = traj.first();
    let t_start = first.t();
    let rows = match traj.kind {
        ModelKind::OneD => {
            let h = hamiltonian(first)?;
            let t0 = t_start - first.q()[0] * first.qdot()[0] / (2.0 * h);
            traj.states()
                .map(|s| Ok([Some(s.q()[0]), Some(one_d_solution(h, t0, s.t())?.0), None, None]))
                .collect::<Result<_, Error>>()?
        }
        ModelKind::ThreeD => {
            let at_zero = first.with_time(0.0);
            let (h, j) = (hamiltonian(&at_zero)?, noether_invariant(&at_zero)?);
            let r0 = norm(first.q());
            traj.states()
                .map(|s| Ok([Some(norm(s.q())), Some(radial_3d(h, j, r0, s.t() - t_start)?.0), None, None]))
                .collect::<Result<_, Error>>()?
        }
        ModelKind::TwoD | ModelKind::EllipticThreeD => {
            let times: Vec<f64> = traj.states().map(State::t).collect();
            let exact = polar_pipeline(first, &times)?;
            traj.states()
                .zip(exact)
                .map(|(s, e)| {
                    let p = to_polar(s)?;
                    Ok([Some(p.r), Some(e.r), Some(p.phi), Some(e.phi)])
                })
                .collect::<Result<_, Error>>()?
        }
    };
    Ok(rows)
}

fn norm(q: &[f64]) -> f64 {
    q.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Invalid closed-form parameters are configuration errors, not runtime failures.
fn parameter_error(e: Error) -> CliError {
    match e {
        Error::Domain(_) | Error::NoMotion { .. } | Error::UnsupportedModel { .. } | Error::InvalidConfig(_) => {
            CliError::Config(e.to_string())
        }
        other => CliError::Runtime(other),
    }
}

pub fn analytic(config: &RunConfig) -> Result<Table, CliError> {
    let times = config.integrator.sample_times(config.t_start);
    let a = config.analytic;
    let mut table = Table::new(&ANALYTIC_COLUMNS);

    if a.h.is_none() && (a.invariant.is_some() || a.t0.is_some()) {
        return Err(CliError::Config("closed-form parameters need H".into()));
    }
    let Some(h) = a.h else {
        return from_state(config, &times, table);
    };
    let t0 = a.t0.unwrap_or(0.0);
    match config.model {
        ModelKind::OneD => {
            if a.invariant.is_some() {
                return Err(CliError::Config("the 1d model has no Ermakov invariant; drop I".into()));
            }
            for &t in &times {
                let (x, xd) = one_d_solution(h, t0, t).map_err(parameter_error)?;
                table.push(vec![Some(t), Some(x), Some(xd), None, None]);
            }
        }
        ModelKind::ThreeD => {
            return Err(CliError::Config("the 3d model takes an initial state, not (H, I, t0)".into()));
        }
        kind => {
            let k = a.invariant.ok_or_else(|| CliError::Config(format!("the {kind} model needs I with H")))?;
            let radial_sol = RadialSolution::new(h, k, t0).map_err(parameter_error)?;
            let phi0 = match a.phi0 {
                Some(p) => p,
                None => angular_potential_argmin(kind).map_err(parameter_error)?,
            };
            let angular = AngularSolution { invariant: k, phi0, sign0: a.sign0.unwrap_or(1.0) };
            let ttilde: Vec<f64> =
                times.iter().map(|&t| time_reparam(&radial_sol, t)).collect::<Result<_, _>>().map_err(parameter_error)?;
            let offsets: Vec<f64> = ttilde.iter().map(|s| s - ttilde[0]).collect();
            let path = angular_quadrature(&angular, kind, &offsets).map_err(parameter_error)?;
            for (n, &t) in times.iter().enumerate() {
                let (r, rdot) = radial(&radial_sol, t).map_err(parameter_error)?;
                table.push(vec![Some(t), Some(r), Some(rdot), Some(ttilde[n]), Some(path.phi[n])]);
            }
        }
    }
    Ok(table)
}

fn from_state(config: &RunConfig, times: &[f64], mut table: Table) -> Result<Table, CliError> {
    let initial = config.initial_state()?;
    match config.model {
        ModelKind::OneD => {
            let h = hamiltonian(&initial)?;
            let t0 = initial.t() - initial.q()[0] * initial.qdot()[0] / (2.0 * h);
            for &t in times {
                let (x, xd) = one_d_solution(h, t0, t)?;
                table.push(vec![Some(t), Some(x), Some(xd), None, None]);
            }
        }
        ModelKind::ThreeD => {
            let at_zero = initial.with_time(0.0);
            let (h, j) = (hamiltonian(&at_zero)?, noether_invariant(&at_zero)?);
            let r0 = norm(initial.q());
            for &t in times {
                let (r, rdot) = radial_3d(h, j, r0, t - initial.t())?;
                table.push(vec![Some(t), Some(r), Some(rdot), None, None]);
            }
        }
        _ => {
            for (&t, p) in times.iter().zip(polar_pipeline(&initial, times)?) {
                table.push(vec![Some(t), Some(p.r), Some(p.rdot), Some(p.ttilde), Some(p.phi)]);
            }
        }
    }
    Ok(table)
}
