//! First integrals of the reduced models.
//!
//! * `H`: the energy (see [`crate::dynamics::energies`]).
//! * `I`: the Ermakov invariant of the 2D and elliptic models, built from the
//!   general Ermakov pair `Ẍ = f(Y/X)/(X²Y)`, `Ÿ = g(X/Y)/(XY²)`.
//! * `Ĩ = 2I`: the elliptic invariant in the normalization where the radial
//!   energy reads `H = ṙ²/2 + Ĩ/r²`.
//! * `J = 2tH − q·M q̇`: the Noether invariant of the scaling symmetry.

use serde::Serialize;

use crate::dynamics::{self, momenta};
use crate::error::{domain, Error, Result};
use crate::integrate::Trajectory;
use crate::model::{ModelKind, PolarState, State};

/// Minimum of the Ermakov invariant over the 2D phase space.
pub const TWO_D_ERMAKOV_MIN: f64 = 2.0;
/// Minimum of the elliptic `I` (not `Ĩ`).
pub const ELLIPTIC_ERMAKOV_MIN: f64 = 2.25;

/// Prefactor of the elliptic angular potential `Ĩ = ½(r²φ̇)² + c (cos²φ sinφ)^(−2/3)`.
pub fn elliptic_angular_prefactor() -> f64 {
    3.0 / 2f64.cbrt()
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coupling functions of a frequency-free Ermakov pair together with their
/// antiderivatives. `g = None` stands for `g ≡ 0`, which removes the `X/Y`
/// term entirely and lets `Y` vanish or change sign.
pub struct GeneralErmakovSpec {
    pub f: ScalarFn,
    pub f_antiderivative: ScalarFn,
    pub g: Option<(ScalarFn, ScalarFn)>,
}

impl GeneralErmakovSpec {
    /// `f = g = 1`: the 2D fireball.
    pub fn two_d() -> Self {
        GeneralErmakovSpec {
            f: Box::new(|_| 1.0),
            f_antiderivative: Box::new(|s| s),
            g: Some((Box::new(|_| 1.0), Box::new(|s| s))),
        }
    }

    /// `f(Y/X) = g(X/Y) = (Y/X)^(1/3)`, i.e. `f(s) = s^(1/3)`, `g(s) = s^(−1/3)`.
    pub fn elliptic() -> Self {
        GeneralErmakovSpec {
            f: Box::new(|s| s.cbrt()),
            f_antiderivative: Box::new(|s| 0.75 * s.powf(4.0 / 3.0)),
            g: Some((Box::new(|s| 1.0 / s.cbrt()), Box::new(|s| 1.5 * s.powf(2.0 / 3.0)))),
        }
    }

    /// `f(s) = s`, `g ≡ 0`: the 1D Pinney equation paired with a free particle.
    pub fn one_d_free_partner() -> Self {
        GeneralErmakovSpec { f: Box::new(|s| s), f_antiderivative: Box::new(|s| 0.5 * s * s), g: None }
    }

    /// Accelerations of the pair at `(X, Y)`.
    pub fn accelerations(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        if !(x > 0.0) {
            return domain(format!("X must be positive, got {x}"));
        }
        if y == 0.0 {
            return domain("the coupling force is undefined at Y = 0");
        }
        let ax = (self.f)(y / x) / (x * x * y);
        let ay = match &self.g {
            Some((g, _)) => {
                if !(y > 0.0) {
                    return domain(format!("Y must be positive when g is present, got {y}"));
                }
                g(x / y) / (x * y * y)
            }
            None => 0.0,
        };
        Ok([ax, ay])
    }
}

/// Ermakov invariant `½(XẎ − YẊ)² + F(Y/X) + G(X/Y)` for an arbitrary pair.
pub fn general_ermakov_invariant(spec: &GeneralErmakovSpec, x: f64, y: f64, xd: f64, yd: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("X must be positive, got {x}"));
    }
    let a = x * yd - y * xd;
    let mut value = 0.5 * a * a + (spec.f_antiderivative)(y / x);
    if let Some((_, g_anti)) = &spec.g {
        if !(y > 0.0) {
            return domain(format!("Y must be positive when g is present, got {y}"));
        }
        value += g_anti(x / y);
    }
    Ok(value)
}

/// Ermakov invariant `I` of the 2D or elliptic model.
pub fn ermakov_invariant(state: &State) -> Result<f64> {
    let (q, v) = (state.q(), state.qdot());
    match state.kind() {
        ModelKind::TwoD => {
            let a = q[0] * v[1] - q[1] * v[0];
            Ok(0.5 * a * a + q[1] / q[0] + q[0] / q[1])
        }
        ModelKind::EllipticThreeD => {
            let a = q[0] * v[1] - q[1] * v[0];
            let u = q[1] / q[0];
            Ok(0.5 * a * a + 0.75 * u.powf(4.0 / 3.0) + 1.5 * u.powf(-2.0 / 3.0))
        }
        kind => Err(Error::UnsupportedModel { op: "ermakov_invariant", kind }),
    }
}

/// `Ĩ = 2I` of the elliptic model.
pub fn ermakov_invariant_tilde(state: &State) -> Result<f64> {
    match state.kind() {
        ModelKind::EllipticThreeD => Ok(2.0 * ermakov_invariant(state)?),
        kind => Err(Error::UnsupportedModel { op: "ermakov_invariant_tilde", kind }),
    }
}

/// Scaling Noether invariant `J = 2tH − q·M q̇`.
pub fn noether_invariant(state: &State) -> Result<f64> {
    let h = dynamics::hamiltonian(state)?;
    let p = momenta(state.kind(), state.qdot());
    let virial: f64 = state.q().iter().zip(&p).map(|(q, p)| q * p).sum();
    Ok(2.0 * state.t() * h - virial)
}

/// Angular potential `U(φ)` of the reparametrized-time energy form.
pub fn angular_potential(kind: ModelKind, phi: f64) -> Result<f64> {
    check_angle(phi)?;
    let (s, c) = phi.sin_cos();
    match kind {
        ModelKind::TwoD => Ok(1.0 / (s * c)),
        ModelKind::EllipticThreeD => Ok(elliptic_angular_prefactor() * (c * c * s).powf(-2.0 / 3.0)),
        kind => Err(Error::UnsupportedModel { op: "angular_potential", kind }),
    }
}

/// `dU/dφ`.
pub fn angular_potential_derivative(kind: ModelKind, phi: f64) -> Result<f64> {
    check_angle(phi)?;
    let (s, c) = phi.sin_cos();
    match kind {
        ModelKind::TwoD => {
            let s2 = (2.0 * phi).sin();
            Ok(-4.0 * (2.0 * phi).cos() / (s2 * s2))
        }
        ModelKind::EllipticThreeD => {
            let w = c * c * s;
            let dw = c * (c * c - 2.0 * s * s);
            Ok(-2.0 / 3.0 * elliptic_angular_prefactor() * w.powf(-5.0 / 3.0) * dw)
        }
        kind => Err(Error::UnsupportedModel { op: "angular_potential_derivative", kind }),
    }
}

/// Angle where `U` attains its minimum.
pub fn angular_potential_argmin(kind: ModelKind) -> Result<f64> {
    match kind {
        ModelKind::TwoD => Ok(std::f64::consts::FRAC_PI_4),
        ModelKind::EllipticThreeD => Ok(std::f64::consts::FRAC_1_SQRT_2.atan()),
        kind => Err(Error::UnsupportedModel { op: "angular_potential_argmin", kind }),
    }
}

pub(crate) fn check_angle(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        domain(format!("angle {phi} is outside (0, π/2)"))
    }
}

/// `(H, K)` from a polar state, where `K` is `I` for 2D and `Ĩ` for the
/// elliptic model: `K = ½(r²φ̇)² + U(φ)` and `H = ṙ²/2 + K/r²`.
pub fn polar_invariants(polar: &PolarState, kind: ModelKind) -> Result<(f64, f64)> {
    let u = angular_potential(kind, polar.phi)?;
    let l = polar.r * polar.r * polar.phidot;
    let k = 0.5 * l * l + u;
    let h = 0.5 * polar.rdot * polar.rdot + k / (polar.r * polar.r);
    Ok((h, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantRow {
    pub t: f64,
    pub h: f64,
    pub i: Option<f64>,
    pub i_tilde: Option<f64>,
    pub j: f64,
}

/// Maximum deviation from the initial value: relative to `|v0|` for `H`,
/// `I`, `Ĩ` and to `max(1, |J0|)` for `J`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Drift {
    pub h: f64,
    pub i: Option<f64>,
    pub i_tilde: Option<f64>,
    pub j: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        [Some(self.h), self.i, self.i_tilde, Some(self.j)].into_iter().flatten().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub kind: ModelKind,
    pub rows: Vec<InvariantRow>,
    pub drift: Drift,
}

pub fn invariant_row(state: &State) -> Result<InvariantRow> {
    let kind = state.kind();
    Ok(InvariantRow {
        t: state.t(),
        h: dynamics::hamiltonian(state)?,
        i: if kind.has_polar_form() { Some(ermakov_invariant(state)?) } else { None },
        i_tilde: if kind == ModelKind::EllipticThreeD { Some(ermakov_invariant_tilde(state)?) } else { None },
        j: noether_invariant(state)?,
    })
}

pub fn invariant_report(traj: &Trajectory) -> Result<InvariantReport> {
    if traj.is_empty() {
        return Err(Error::InsufficientData("empty trajectory".into()));
    }
    let rows = traj.states().map(invariant_row).collect::<Result<Vec<_>>>()?;
    let first = rows[0];
    let rel = |v: f64, v0: f64, scale: f64| (v - v0).abs() / scale;
    let mut drift = Drift {
        h: 0.0,
        i: first.i.map(|_| 0.0),
        i_tilde: first.i_tilde.map(|_| 0.0),
        j: 0.0,
    };
    for row in &rows {
        drift.h = drift.h.max(rel(row.h, first.h, first.h.abs()));
        if let (Some(d), Some(v), Some(v0)) = (drift.i.as_mut(), row.i, first.i) {
            *d = d.max(rel(v, v0, v0.abs()));
        }
        if let (Some(d), Some(v), Some(v0)) = (drift.i_tilde.as_mut(), row.i_tilde, first.i_tilde) {
            *d = d.max(rel(v, v0, v0.abs()));
        }
        drift.j = drift.j.max(rel(row.j, first.j, first.j.abs().max(1.0)));
    }
    Ok(InvariantReport { kind: traj.kind, rows, drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use crate::model::to_polar;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rest(kind: ModelKind, q: &[f64]) -> State {
        State::at_rest(kind, q).unwrap()
    }

    #[test]
    fn ermakov_examples() {
        assert_eq!(ermakov_invariant(&rest(ModelKind::TwoD, &[1.0, 1.0])).unwrap(), 2.0);
        assert_eq!(ermakov_invariant(&rest(ModelKind::TwoD, &[1.0, 2.0])).unwrap(), 2.5);
        let e = rest(ModelKind::EllipticThreeD, &[1.0, 1.0]);
        assert_eq!(ermakov_invariant(&e).unwrap(), 2.25);
        assert_eq!(ermakov_invariant_tilde(&e).unwrap(), 4.5);
        assert!(ermakov_invariant(&rest(ModelKind::OneD, &[1.0])).is_err());
        assert!(ermakov_invariant_tilde(&rest(ModelKind::TwoD, &[1.0, 1.0])).is_err());
    }

    #[test]
    fn general_pair_examples() {
        let two = GeneralErmakovSpec::two_d();
        assert_eq!(general_ermakov_invariant(&two, 1.0, 2.0, 0.0, 0.0).unwrap(), 2.5);
        let one = GeneralErmakovSpec::one_d_free_partner();
        let i0: f64 = 0.7;
        let v = general_ermakov_invariant(&one, 1.0, 0.0, 0.0, (2.0 * i0).sqrt()).unwrap();
        assert_relative_eq!(v, i0, epsilon = 1e-15);
        let ell = GeneralErmakovSpec::elliptic();
        assert_eq!(general_ermakov_invariant(&ell, 1.0, 1.0, 0.0, 0.0).unwrap(), 2.25);
        assert!(general_ermakov_invariant(&two, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(general_ermakov_invariant(&two, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn general_pair_reproduces_model_forces() {
        for (x, y) in [(1.0, 1.0), (0.7, 2.3), (3.1, 0.4)] {
            let a = GeneralErmakovSpec::two_d().accelerations(x, y).unwrap();
            let b = dynamics::accelerations(ModelKind::TwoD, &[x, y]).unwrap();
            assert_relative_eq!(a[0], b[0], max_relative = 1e-14);
            assert_relative_eq!(a[1], b[1], max_relative = 1e-14);

            let a = GeneralErmakovSpec::elliptic().accelerations(x, y).unwrap();
            let b = dynamics::accelerations(ModelKind::EllipticThreeD, &[x, y]).unwrap();
            assert_relative_eq!(a[0], b[0], max_relative = 1e-13);
            assert_relative_eq!(a[1], b[1], max_relative = 1e-13);

            let a = GeneralErmakovSpec::one_d_free_partner().accelerations(x, y).unwrap();
            assert_relative_eq!(a[0], 1.0 / x.powi(3), max_relative = 1e-14);
            assert_eq!(a[1], 0.0);
        }
    }

    #[test]
    fn noether_examples() {
        let s = State::new(ModelKind::ThreeD, 0.0, &[1.0, 2.0, 3.0], &[0.5, -1.0, 2.0]).unwrap();
        assert_relative_eq!(noether_invariant(&s).unwrap(), -(0.5 - 2.0 + 6.0), epsilon = 1e-15);
        assert_eq!(noether_invariant(&rest(ModelKind::ThreeD, &[1.0; 3])).unwrap(), 0.0);
        let s = State::new(ModelKind::OneD, 2.0, &[1.0], &[0.0]).unwrap();
        assert_eq!(noether_invariant(&s).unwrap(), 2.0);
    }

    #[test]
    fn polar_examples() {
        let p = to_polar(&rest(ModelKind::TwoD, &[1.0, 1.0])).unwrap();
        let (h, i) = polar_invariants(&p, ModelKind::TwoD).unwrap();
        assert_relative_eq!(h, 1.0, epsilon = 1e-15);
        assert_relative_eq!(i, 2.0, epsilon = 1e-15);

        let p = to_polar(&rest(ModelKind::EllipticThreeD, &[1.0, 1.0])).unwrap();
        let (h, it) = polar_invariants(&p, ModelKind::EllipticThreeD).unwrap();
        assert_relative_eq!(it, 4.5, epsilon = 1e-14);
        assert_relative_eq!(h, 1.5, epsilon = 1e-14);

        for r in [0.3, 1.0, 7.0] {
            let p = PolarState { r, phi: std::f64::consts::FRAC_PI_4, rdot: 0.2, phidot: 0.0, ttilde: 0.0 };
            let (_, i) = polar_invariants(&p, ModelKind::TwoD).unwrap();
            assert_relative_eq!(i, 2.0, epsilon = 1e-15);
        }
        let edge = PolarState { r: 1.0, phi: 0.0, rdot: 0.0, phidot: 0.0, ttilde: 0.0 };
        assert!(polar_invariants(&edge, ModelKind::TwoD).is_err());
    }

    #[test]
    fn alternative_elliptic_prefactor_disagrees() {
        // The same angular form with prefactor 3/2 instead of 3/2^(1/3) is
        // not the elliptic invariant: at X = Y = 1 at rest it gives 9·2^(−5/3).
        let p = to_polar(&rest(ModelKind::EllipticThreeD, &[1.0, 1.0])).unwrap();
        let (s, c) = p.phi.sin_cos();
        let alternative = 1.5 * (c * c * s).powf(-2.0 / 3.0);
        assert_relative_eq!(alternative, 9.0 * 2f64.powf(-5.0 / 3.0), epsilon = 1e-14);
        assert!((alternative - 4.5).abs() > 1.0);
    }

    #[test]
    fn exact_one_d_trajectory_has_zero_drift() {
        let states: Vec<State> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.2;
                let x = (t * t + 1.0).sqrt();
                State::new(ModelKind::OneD, t, &[x], &[t / x]).unwrap()
            })
            .collect();
        let traj = Trajectory::from_states(ModelKind::OneD, IntegratorConfig::default(), states).unwrap();
        let report = invariant_report(&traj).unwrap();
        assert!(report.drift.max() <= 1e-12, "{:?}", report.drift);
    }

    #[test]
    fn integrated_drifts() {
        let cfg = IntegratorConfig::default().with_t_end(100.0).with_sample_interval(0.5);
        let s = State::new(ModelKind::TwoD, 0.0, &[1.0, 1.7], &[0.3, -0.6]).unwrap();
        let r = invariant_report(&integrate(&s, &cfg).unwrap()).unwrap();
        assert!(r.drift.max() <= 1e-8, "{:?}", r.drift);

        let s = State::new(ModelKind::EllipticThreeD, 0.0, &[0.8, 1.3], &[0.2, 0.5]).unwrap();
        let r = invariant_report(&integrate(&s, &cfg).unwrap()).unwrap();
        assert!(r.drift.i_tilde.unwrap() <= 1e-8, "{:?}", r.drift);
        for row in &r.rows {
            assert!((row.i_tilde.unwrap() - 2.0 * row.i.unwrap()).abs() <= 1e-12 * row.i_tilde.unwrap());
        }
    }

    proptest! {
        #[test]
        fn ermakov_lower_bounds(x in 0.01f64..100.0, y in 0.01f64..100.0, xd in -5f64..5.0, yd in -5f64..5.0) {
            let two = State::new(ModelKind::TwoD, 0.0, &[x, y], &[xd, yd]).unwrap();
            prop_assert!(ermakov_invariant(&two).unwrap() >= TWO_D_ERMAKOV_MIN * (1.0 - 1e-15));
            let ell = State::new(ModelKind::EllipticThreeD, 0.0, &[x, y], &[xd, yd]).unwrap();
            prop_assert!(ermakov_invariant(&ell).unwrap() >= ELLIPTIC_ERMAKOV_MIN * (1.0 - 1e-15));
        }

        #[test]
        fn polar_matches_cartesian(x in 0.05f64..20.0, y in 0.05f64..20.0, xd in -3f64..3.0, yd in -3f64..3.0,
                                   elliptic in any::<bool>()) {
            let kind = if elliptic { ModelKind::EllipticThreeD } else { ModelKind::TwoD };
            let s = State::new(kind, 0.0, &[x, y], &[xd, yd]).unwrap();
            let (h, k) = polar_invariants(&to_polar(&s).unwrap(), kind).unwrap();
            let h_ref = dynamics::hamiltonian(&s).unwrap();
            let k_ref = if elliptic { ermakov_invariant_tilde(&s).unwrap() } else { ermakov_invariant(&s).unwrap() };
            prop_assert!((h - h_ref).abs() <= 1e-10 * h_ref.max(1.0));
            prop_assert!((k - k_ref).abs() <= 1e-10 * k_ref.max(1.0));
        }
    }
}
