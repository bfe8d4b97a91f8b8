//! Closed-form solutions and quadratures.
//!
//! For the 2D and elliptic models the energy separates in (stretched) polar
//! coordinates as `H = ṙ²/2 + K/r²` with `K = I` (2D) or `K = Ĩ`
//! (elliptic). The radius then follows in closed form, and with the
//! reparametrized time `t̃ = ∫ dt/r²` the angle obeys the 1-DOF energy
//! equation `K = ½ (dφ/dt̃)² + U(φ)`, which is integrated numerically here.

use serde::Serialize;

use crate::dynamics;
use crate::error::{domain, Error, Result};
use crate::invariants::{self, angular_potential, angular_potential_argmin, angular_potential_derivative};
use crate::model::{self, ModelKind, PolarState, State};
use crate::ode::{self, OdeSystem, StepControl};

/// Radial motion `r(t) = (2H (t − t0)² + K/H)^(1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSolution {
    pub h: f64,
    /// `I` for the 2D model, `Ĩ` for the elliptic model.
    pub invariant: f64,
    /// Instant of minimum radius.
    pub t0: f64,
}

impl RadialSolution {
    pub fn new(h: f64, invariant: f64, t0: f64) -> Result<Self> {
        let sol = RadialSolution { h, invariant, t0 };
        sol.validate()?;
        Ok(sol)
    }

    /// Constants of the radial motion through `state`.
    pub fn from_state(state: &State) -> Result<Self> {
        let invariant = match state.kind() {
            ModelKind::TwoD => invariants::ermakov_invariant(state)?,
            ModelKind::EllipticThreeD => invariants::ermakov_invariant_tilde(state)?,
            kind => return Err(Error::UnsupportedModel { op: "radial solution", kind }),
        };
        let h = dynamics::hamiltonian(state)?;
        let polar = model::to_polar(state)?;
        // r ṙ = 2H (t − t0)
        RadialSolution::new(h, invariant, state.t() - polar.r * polar.rdot / (2.0 * h))
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !(self.invariant > 0.0) || !self.t0.is_finite() {
            return domain(format!(
                "radial solution needs H > 0 and K > 0, got H = {}, K = {}",
                self.h, self.invariant
            ));
        }
        Ok(())
    }
}

/// `(r, ṙ)` at time `t`.
pub fn radial(sol: &RadialSolution, t: f64) -> Result<(f64, f64)> {
    sol.validate()?;
    let dt = t - sol.t0;
    let r = (2.0 * sol.h * dt * dt + sol.invariant / sol.h).sqrt();
    Ok((r, 2.0 * sol.h * dt / r))
}

/// Three-dimensional radius `r² = 2Ht² − 2Jt + r0²` with `r0 = r(0)`.
pub fn radial_3d(h: f64, j: f64, r0: f64, t: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) || !(r0 > 0.0) {
        return domain(format!("radial_3d needs H > 0 and r0 > 0, got H = {h}, r0 = {r0}"));
    }
    let r2 = 2.0 * h * t * t - 2.0 * j * t + r0 * r0;
    if !(r2 > 0.0) {
        return domain(format!("r² = {r2} is not positive at t = {t}"));
    }
    let r = r2.sqrt();
    Ok((r, (2.0 * h * t - j) / r))
}

/// `t̃(t) = ∫_{t0}^{t} dt'/r² = arctan(√(2/K) H (t − t0)) / √(2K)`.
pub fn time_reparam(sol: &RadialSolution, t: f64) -> Result<f64> {
    sol.validate()?;
    let k = sol.invariant;
    Ok(((2.0 / k).sqrt() * sol.h * (t - sol.t0)).atan() / (2.0 * k).sqrt())
}

/// Initial data for the angular quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularSolution {
    pub invariant: f64,
    pub phi0: f64,
    /// Initial sign of `dφ/dt̃` (+1 or −1).
    pub sign0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularPath {
    pub ttilde: Vec<f64>,
    pub phi: Vec<f64>,
    /// `dφ/dt̃`; its sign is the current branch.
    pub dphi: Vec<f64>,
    /// Lower and upper turning angles, `U(φ) = K`.
    pub turning_points: [f64; 2],
}

/// `φ'' = −U'(φ)`: the energy-form equation differentiated once, which
/// passes through turning points without special treatment.
struct AngularSystem {
    kind: ModelKind,
}

impl OdeSystem for AngularSystem {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = angular_potential_derivative(self.kind, y[0]).map(|d| -d).unwrap_or(f64::NAN);
    }

    fn admissible(&self, y: &[f64]) -> bool {
        y[0] > 0.0 && y[0] < std::f64::consts::FRAC_PI_2
    }
}

const BISECTION_TOL: f64 = 1e-12;

/// Root of `U(φ) − K` between `lo` and `hi`, where the sign changes.
fn bisect(kind: ModelKind, k: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f = |phi: f64| angular_potential(kind, phi).map(|u| u - k);
    let f_lo = f(lo)?;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Turning angles of the angular motion with invariant `k`.
pub fn turning_points(kind: ModelKind, k: f64) -> Result<[f64; 2]> {
    let argmin = angular_potential_argmin(kind)?;
    let minimum = angular_potential(kind, argmin)?;
    if k < minimum * (1.0 - 1e-12) {
        return Err(Error::NoMotion { invariant: k, minimum });
    }
    if k <= minimum * (1.0 + 1e-12) {
        return Ok([argmin, argmin]);
    }
    // U blows up at both ends; walk towards each end until U exceeds K.
    let mut lo = argmin;
    loop {
        lo *= 0.5;
        if angular_potential(kind, lo)? > k {
            break;
        }
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut hi_gap = half_pi - argmin;
    loop {
        hi_gap *= 0.5;
        if angular_potential(kind, half_pi - hi_gap)? > k {
            break;
        }
    }
    Ok([bisect(kind, k, lo, argmin)?, bisect(kind, k, argmin, half_pi - hi_gap)?])
}

/// Integrate `K = ½ (dφ/dt̃)² + U(φ)` on the given `t̃` grid, which is
/// measured from the initial angle and must be nondecreasing and
/// nonnegative.
pub fn angular_quadrature(sol: &AngularSolution, kind: ModelKind, ttilde_grid: &[f64]) -> Result<AngularPath> {
    invariants::check_angle(sol.phi0)?;
    let k = sol.invariant;
    let turning = turning_points(kind, k)?;
    let u0 = angular_potential(kind, sol.phi0)?;
    let excess = k - u0;
    if excess < -1e-12 * k {
        return domain(format!("φ0 = {} is not reachable with invariant {k} (U(φ0) = {u0})", sol.phi0));
    }
    if ttilde_grid.iter().any(|&s| s < 0.0) || ttilde_grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("t̃ grid must be nonnegative and nondecreasing");
    }
    let sign = if sol.sign0 < 0.0 { -1.0 } else { 1.0 };
    let dphi0 = sign * (2.0 * excess.max(0.0)).sqrt();
    let (phi, dphi) = match ttilde_grid.last() {
        None => (vec![], vec![]),
        Some(&end) if end == 0.0 => (vec![sol.phi0; ttilde_grid.len()], vec![dphi0; ttilde_grid.len()]),
        Some(&end) => {
            let control = StepControl {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                max_step: 0.05 / k.sqrt(),
                initial_step: 1e-4 / k.sqrt(),
                ..StepControl::default()
            };
            let (ys, _) = ode::solve(&AngularSystem { kind }, 0.0, &[sol.phi0, dphi0], end, &control, ttilde_grid)?;
            ys.into_iter().map(|y| (y[0], y[1])).unzip()
        }
    };
    Ok(AngularPath { ttilde: ttilde_grid.to_vec(), phi, dphi, turning_points: turning })
}

/// Polar trajectory through `initial` at the given times, assembled from the
/// closed-form radius, the closed-form `t̃(t)` and the angular quadrature.
pub fn polar_pipeline(initial: &State, times: &[f64]) -> Result<Vec<PolarState>> {
    let kind = initial.kind();
    let radial_sol = RadialSolution::from_state(initial)?;
    let start = model::to_polar(initial)?;
    let ttilde_start = time_reparam(&radial_sol, initial.t())?;
    let ttilde: Vec<f64> = times
        .iter()
        .map(|&t| time_reparam(&radial_sol, t))
        .collect::<Result<_>>()?;
    let offsets: Vec<f64> = ttilde.iter().map(|s| (s - ttilde_start).max(0.0)).collect();
    let angular = AngularSolution {
        invariant: radial_sol.invariant,
        phi0: start.phi,
        sign0: if start.phidot < 0.0 { -1.0 } else { 1.0 },
    };
    let path = angular_quadrature(&angular, kind, &offsets)?;
    times
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            let (r, rdot) = radial(&radial_sol, t)?;
            Ok(PolarState { r, rdot, phi: path.phi[n], phidot: path.dphi[n] / (r * r), ttilde: ttilde[n] })
        })
        .collect()
}

/// Exact 1D solution `X = (2H (t − t0)² + 1/(2H))^(1/2)`, returned as `(X, Ẋ)`.
pub fn one_d_solution(h: f64, t0: f64, t: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return domain(format!("1D solution needs H > 0, got {h}"));
    }
    let dt = t - t0;
    let x = (2.0 * h * dt * dt + 0.5 / h).sqrt();
    Ok((x, 2.0 * h * dt / x))
}

/// The pair `(X, Y)` produced by the nonlinear superposition law for the 1D
/// Pinney equation and its free partner `Ÿ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Superposition {
    pub tau: f64,
    pub u: f64,
    pub x: f64,
    pub xdot: f64,
    pub y: f64,
    pub ydot: f64,
}

/// Superposition built on the particular solution `X = ((t − t0)² + 1)^(1/2)`
/// (`H = 1/2`): `τ = arctan(t − t0)`, `u = √(2I) sin τ`, `Y = u X = √(2I)(t − t0)`.
pub fn superposition_1d(invariant: f64, t0: f64, t: f64) -> Result<Superposition> {
    if !(invariant > 0.0) {
        return domain(format!("superposition needs I > 0, got {invariant}"));
    }
    let dt = t - t0;
    let (x, xdot) = one_d_solution(0.5, t0, t)?;
    let amplitude = (2.0 * invariant).sqrt();
    let tau = dt.atan();
    Ok(Superposition { tau, u: amplitude * tau.sin(), x, xdot, y: amplitude * dt, ydot: amplitude })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use crate::invariants::{general_ermakov_invariant, GeneralErmakovSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

    /// Adaptive Simpson quadrature, used as an independent oracle.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn radial_examples() {
        let sol = RadialSolution::new(1.0, 2.0, 0.0).unwrap();
        let (r, rd) = radial(&sol, 0.0).unwrap();
        assert_relative_eq!(r, SQRT_2, epsilon = 1e-15);
        assert_eq!(rd, 0.0);
        assert_relative_eq!(radial(&sol, 1.0).unwrap().0, 2.0, epsilon = 1e-15);
        let (r, _) = radial(&sol, 1e3).unwrap();
        assert!((r / 1e3 / SQRT_2 - 1.0).abs() < 1e-3);
        assert!(RadialSolution::new(-1.0, 2.0, 0.0).is_err());
        assert!(RadialSolution::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn radius_squared_has_constant_second_derivative() {
        let sol = RadialSolution::new(1.3, 2.7, 0.4).unwrap();
        let r2 = |t: f64| radial(&sol, t).unwrap().0.powi(2);
        let h = 1e-3;
        for t in [0.0, 0.7, 3.0, 10.0] {
            let d2 = (r2(t + h) - 2.0 * r2(t) + r2(t - h)) / (h * h);
            assert!((d2 - 4.0 * sol.h).abs() < 1e-6 * 4.0 * sol.h.max(1.0) * (1.0 + t * t));
        }
    }

    #[test]
    fn time_reparam_examples() {
        let sol = RadialSolution::new(1.0, 2.0, 0.0).unwrap();
        assert_eq!(time_reparam(&sol, 0.0).unwrap(), 0.0);
        assert_relative_eq!(time_reparam(&sol, 1.0).unwrap(), FRAC_PI_8, epsilon = 1e-15);
        assert!((time_reparam(&sol, 1e12).unwrap() - FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn time_reparam_matches_quadrature() {
        for (h, k, t0, t) in [(1.0, 2.0, 0.0, 1.0), (0.4, 3.3, -0.5, 6.0), (2.5, 2.1, 1.0, -2.0)] {
            let sol = RadialSolution::new(h, k, t0).unwrap();
            let inv_r2 = |s: f64| radial(&sol, s).unwrap().0.powi(-2);
            let numeric = if t >= t0 { simpson(&inv_r2, t0, t, 1e-14) } else { -simpson(&inv_r2, t, t0, 1e-14) };
            assert!((time_reparam(&sol, t).unwrap() - numeric).abs() < 1e-10);
        }
    }

    #[test]
    fn radial_3d_contract() {
        let (r, rd) = radial_3d(1.5, 0.0, 3f64.sqrt(), 1.0).unwrap();
        assert_relative_eq!(r * r, 6.0, epsilon = 1e-14);
        assert_relative_eq!(rd, 3.0 / 6f64.sqrt(), epsilon = 1e-14);
        assert!(radial_3d(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn angular_at_potential_minimum_stays_put() {
        let sol = AngularSolution { invariant: 2.0, phi0: FRAC_PI_4, sign0: 1.0 };
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let path = angular_quadrature(&sol, ModelKind::TwoD, &grid).unwrap();
        assert!(path.phi.iter().all(|p| (p - FRAC_PI_4).abs() < 1e-14));
    }

    #[test]
    fn angular_oscillates_between_turning_points() {
        let sol = AngularSolution { invariant: 3.0, phi0: FRAC_PI_4, sign0: 1.0 };
        let lo = 0.5 * (2.0f64 / 3.0).asin();
        let hi = FRAC_PI_2 - lo;
        let path = angular_quadrature(&sol, ModelKind::TwoD, &(0..2000).map(|i| i as f64 * 0.005).collect::<Vec<_>>())
            .unwrap();
        assert!((path.turning_points[0] - lo).abs() < 1e-11);
        assert!((path.turning_points[1] - hi).abs() < 1e-11);
        let min = path.phi.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = path.phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(min >= lo - 1e-8 && max <= hi + 1e-8);
        assert!(min < lo + 1e-3 && max > hi - 1e-3, "did not reach both turning points");
        let mut sign_changes = 0;
        for w in path.dphi.windows(2) {
            if w[0].signum() != w[1].signum() {
                sign_changes += 1;
            }
        }
        assert!(sign_changes >= 2);
        for (p, d) in path.phi.iter().zip(&path.dphi) {
            let k = 0.5 * d * d + invariants::angular_potential(ModelKind::TwoD, *p).unwrap();
            assert!((k - 3.0).abs() < 1e-8);
        }
    }

    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angular_errors() {
        let below = AngularSolution { invariant: 1.9, phi0: FRAC_PI_4, sign0: 1.0 };
        assert!(matches!(angular_quadrature(&below, ModelKind::TwoD, &[0.0, 1.0]), Err(Error::NoMotion { .. })));
        let outside = AngularSolution { invariant: 3.0, phi0: FRAC_PI_2, sign0: 1.0 };
        assert!(matches!(angular_quadrature(&outside, ModelKind::TwoD, &[0.0]), Err(Error::Domain(_))));
        let ell = AngularSolution { invariant: 4.4, phi0: 0.6, sign0: 1.0 };
        assert!(matches!(angular_quadrature(&ell, ModelKind::EllipticThreeD, &[0.0]), Err(Error::NoMotion { .. })));
    }

    #[test]
    fn composed_pipeline_matches_integration() {
        for kind in [ModelKind::TwoD, ModelKind::EllipticThreeD] {
            let s = State::new(kind, 0.0, &[1.0, 1.0], &[-0.5, 0.5]).unwrap();
            let traj = integrate(&s, &IntegratorConfig::default().with_t_end(10.0).with_sample_interval(0.05)).unwrap();
            let times: Vec<f64> = traj.states().map(|s| s.t()).collect();
            let polar = polar_pipeline(&s, &times).unwrap();
            for (sample, p) in traj.samples.iter().zip(&polar) {
                let num = sample.polar.unwrap();
                assert!((num.r - p.r).abs() < 1e-6, "{kind} r at t = {}", sample.t());
                assert!((num.phi - p.phi).abs() < 1e-6, "{kind} φ at t = {}", sample.t());
            }
        }
    }

    #[test]
    fn one_d_solution_examples() {
        assert_eq!(one_d_solution(0.5, 0.0, 0.0).unwrap(), (1.0, 0.0));
        assert_relative_eq!(one_d_solution(0.5, 0.0, 1.0).unwrap().0, SQRT_2, epsilon = 1e-15);
        assert!(one_d_solution(0.0, 0.0, 1.0).is_err());
        let (h, t0, t, d) = (0.8, 0.3, 0.7, 1e-4);
        let x = |s: f64| one_d_solution(h, t0, s).unwrap().0;
        let acc = (x(t + d) - 2.0 * x(t) + x(t - d)) / (d * d);
        assert!((acc - x(t).powi(-3)).abs() < 1e-6);
    }

    #[test]
    fn superposition_examples() {
        let s = superposition_1d(0.9, 2.0, 2.0).unwrap();
        assert_eq!((s.tau, s.u, s.y), (0.0, 0.0, 0.0));
        let s = superposition_1d(0.5, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.y, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.tau, FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(s.u, SQRT_2 / 2.0, epsilon = 1e-15);
        assert_relative_eq!(s.u, s.y / s.x, epsilon = 1e-15);
        assert!(superposition_1d(0.0, 0.0, 1.0).is_err());

        let spec = GeneralErmakovSpec::one_d_free_partner();
        for (i, t) in [(0.1, -3.0), (1.0, 0.5), (7.5, 12.0)] {
            let s = superposition_1d(i, 0.2, t).unwrap();
            let v = general_ermakov_invariant(&spec, s.x, s.y, s.xdot, s.ydot).unwrap();
            assert!((v - i).abs() <= 1e-12 * i.max(1.0));
        }
    }
}
