//! Numerical checks of the scaling symmetry, the Noether condition, Noether
//! invariants and the velocity-dependent symmetry behind the Ermakov
//! invariant.
//!
//! Partial derivatives of the Lagrangian are taken in closed form. Symmetry
//! coefficients are supplied as jets (value plus first partials), so total
//! time derivatives follow from the chain rule without differencing.

use crate::dynamics::{self, momenta};
use crate::error::{domain, Error, Result};
use crate::integrate::{IntegratorConfig, Trajectory};
use crate::model::{ModelKind, State};

/// Value and first partials of a function of `(q, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d_q: Vec<f64>,
    pub d_t: f64,
}

impl Jet {
    pub fn constant(value: f64, dim: usize) -> Self {
        Jet { value, d_q: vec![0.0; dim], d_t: 0.0 }
    }

    /// `∂_t f + q̇·∂_q f`.
    pub fn total_derivative(&self, qdot: &[f64]) -> f64 {
        self.d_t + self.d_q.iter().zip(qdot).map(|(a, b)| a * b).sum::<f64>()
    }
}

type ScalarJetFn = Box<dyn Fn(&[f64], f64) -> Jet + Send + Sync>;
type VectorJetFn = Box<dyn Fn(&[f64], f64) -> Vec<Jet> + Send + Sync>;

/// Point-symmetry generator `τ ∂_t + η·∂_q` with gauge function `Λ(q, t)`.
pub struct PointSymmetry {
    pub tau: ScalarJetFn,
    pub eta: VectorJetFn,
    pub gauge: ScalarJetFn,
}

impl PointSymmetry {
    /// `τ = 2t`, `η = c q`, `Λ = 0`. With `c = 1` this is the scaling symmetry.
    pub fn dilation(c: f64) -> Self {
        PointSymmetry {
            tau: Box::new(|q, t| Jet { value: 2.0 * t, d_q: vec![0.0; q.len()], d_t: 2.0 }),
            eta: Box::new(move |q, _| {
                (0..q.len())
                    .map(|i| {
                        let mut d_q = vec![0.0; q.len()];
                        d_q[i] = c;
                        Jet { value: c * q[i], d_q, d_t: 0.0 }
                    })
                    .collect()
            }),
            gauge: Box::new(|q, _| Jet::constant(0.0, q.len())),
        }
    }

    /// `G = 2t ∂_t + q·∂_q`.
    pub fn scaling() -> Self {
        PointSymmetry::dilation(1.0)
    }

    /// `τ = 1`, `η = 0`, `Λ = 0`.
    pub fn time_translation() -> Self {
        PointSymmetry {
            tau: Box::new(|q, _| Jet::constant(1.0, q.len())),
            eta: Box::new(|q, _| vec![Jet::constant(0.0, q.len()); q.len()]),
            gauge: Box::new(|q, _| Jet::constant(0.0, q.len())),
        }
    }
}

struct Evaluated {
    tau: Jet,
    eta: Vec<Jet>,
    gauge: Jet,
}

fn evaluate(sym: &PointSymmetry, state: &State) -> Result<Evaluated> {
    let (q, t) = (state.q(), state.t());
    let tau = (sym.tau)(q, t);
    let eta = (sym.eta)(q, t);
    let gauge = (sym.gauge)(q, t);
    let n = q.len();
    if eta.len() != n || tau.d_q.len() != n || gauge.d_q.len() != n || eta.iter().any(|j| j.d_q.len() != n) {
        return domain(format!("symmetry coefficients do not match the {} model", state.kind()));
    }
    Ok(Evaluated { tau, eta, gauge })
}

/// `G^[1]L + τ̇ L − Λ̇` at a phase-space point.
pub fn noether_condition_residual(sym: &PointSymmetry, state: &State) -> Result<f64> {
    let kind = state.kind();
    let coeffs = evaluate(sym, state)?;
    let qdot = state.qdot();
    let energies = dynamics::energies(state)?;
    let dl_dq: Vec<f64> = dynamics::potential_gradient(kind, state.q())?.iter().map(|g| -g).collect();
    let dl_dqdot = momenta(kind, qdot);

    let tau_dot = coeffs.tau.total_derivative(qdot);
    // L has no explicit time dependence.
    let mut prolonged = 0.0;
    for i in 0..qdot.len() {
        let eta_dot = coeffs.eta[i].total_derivative(qdot);
        prolonged += coeffs.eta[i].value * dl_dq[i] + (eta_dot - tau_dot * qdot[i]) * dl_dqdot[i];
    }
    Ok(prolonged + tau_dot * energies.lagrangian - coeffs.gauge.total_derivative(qdot))
}

/// `J = τ (q̇·∂L/∂q̇ − L) − η·∂L/∂q̇ + Λ`.
pub fn noether_invariant_from(sym: &PointSymmetry, state: &State) -> Result<f64> {
    let coeffs = evaluate(sym, state)?;
    let p = momenta(state.kind(), state.qdot());
    let e = dynamics::energies(state)?;
    let qdot_p: f64 = state.qdot().iter().zip(&p).map(|(a, b)| a * b).sum();
    let eta_p: f64 = coeffs.eta.iter().zip(&p).map(|(a, b)| a.value * b).sum();
    Ok(coeffs.tau.value * (qdot_p - e.lagrangian) - eta_p + coeffs.gauge.value)
}

/// Apply the first prolongation `G^[1] = τ ∂_t + η·∂_q + (η̇ − τ̇ q̇)·∂_q̇`
/// to an arbitrary scalar field `F(q, q̇, t)`, differentiating the field
/// by central differences with relative step `1e-6`.
pub fn extended_generator_apply(
    sym: &PointSymmetry,
    field: &dyn Fn(&[f64], &[f64], f64) -> f64,
    state: &State,
) -> Result<f64> {
    let coeffs = evaluate(sym, state)?;
    let (q, qdot, t) = (state.q(), state.qdot(), state.t());
    let step = |x: f64| 1e-6 * x.abs().max(1.0);

    let d_t = {
        let h = step(t);
        (field(q, qdot, t + h) - field(q, qdot, t - h)) / (2.0 * h)
    };
    let partial = |which: usize, i: usize| -> f64 {
        let base = if which == 0 { q[i] } else { qdot[i] };
        let h = step(base);
        let mut plus_q = q.to_vec();
        let mut minus_q = q.to_vec();
        let mut plus_v = qdot.to_vec();
        let mut minus_v = qdot.to_vec();
        if which == 0 {
            plus_q[i] += h;
            minus_q[i] -= h;
        } else {
            plus_v[i] += h;
            minus_v[i] -= h;
        }
        (field(&plus_q, &plus_v, t) - field(&minus_q, &minus_v, t)) / (2.0 * h)
    };

    let tau_dot = coeffs.tau.total_derivative(qdot);
    let mut value = coeffs.tau.value * d_t;
    for i in 0..q.len() {
        let eta_dot = coeffs.eta[i].total_derivative(qdot);
        value += coeffs.eta[i].value * partial(0, i) + (eta_dot - tau_dot * qdot[i]) * partial(1, i);
    }
    Ok(value)
}

/// Value and first partials of a function of `(q, q̇, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseJet {
    pub value: f64,
    pub d_q: Vec<f64>,
    pub d_qdot: Vec<f64>,
    pub d_t: f64,
}

impl PhaseJet {
    pub fn constant(value: f64, dim: usize) -> Self {
        PhaseJet { value, d_q: vec![0.0; dim], d_qdot: vec![0.0; dim], d_t: 0.0 }
    }

    /// Total time derivative along the flow with accelerations `qddot`.
    pub fn total_derivative(&self, qdot: &[f64], qddot: &[f64]) -> f64 {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        self.d_t + dot(&self.d_q, qdot) + dot(&self.d_qdot, qddot)
    }

    fn scale(&self, c: f64) -> Self {
        PhaseJet {
            value: c * self.value,
            d_q: self.d_q.iter().map(|v| c * v).collect(),
            d_qdot: self.d_qdot.iter().map(|v| c * v).collect(),
            d_t: c * self.d_t,
        }
    }

    fn add(&self, other: &PhaseJet) -> Self {
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        PhaseJet {
            value: self.value + other.value,
            d_q: sum(&self.d_q, &other.d_q),
            d_qdot: sum(&self.d_qdot, &other.d_qdot),
            d_t: self.d_t + other.d_t,
        }
    }

    fn mul(&self, other: &PhaseJet) -> Self {
        let prod = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(x, y)| x * other.value + self.value * y).collect()
        };
        PhaseJet {
            value: self.value * other.value,
            d_q: prod(&self.d_q, &other.d_q),
            d_qdot: prod(&self.d_qdot, &other.d_qdot),
            d_t: self.d_t * other.value + self.value * other.d_t,
        }
    }
}

type PhaseFn = Box<dyn Fn(&[f64], &[f64], f64) -> PhaseJet + Send + Sync>;
type GaugeFn = Box<dyn Fn(&[f64], &[f64], f64, &PhaseJet) -> PhaseJet + Send + Sync>;

/// Velocity-dependent generator of the 2D model,
///
/// ```text
/// G = τ ∂_t + [τẊ + Y A] ∂_X + [τẎ − X A] ∂_Y,   A = XẎ − YẊ,
/// ```
///
/// with a free function `τ(q, q̇, t)` and a gauge `Λ(q, q̇, t; τ)`.
pub struct DynamicalSymmetry {
    pub tau: PhaseFn,
    pub gauge: GaugeFn,
}

impl DynamicalSymmetry {
    /// The generator paired with the gauge `Λ = τL − ½A² + X/Y + Y/X`.
    pub fn ermakov(tau: PhaseFn) -> Self {
        DynamicalSymmetry { tau, gauge: Box::new(ermakov_gauge) }
    }
}

/// `τ = c`.
pub fn tau_constant(c: f64) -> PhaseFn {
    Box::new(move |q, _, _| PhaseJet::constant(c, q.len()))
}

/// `τ = X Ẏ`.
pub fn tau_x_ydot() -> PhaseFn {
    Box::new(|q, v, _| PhaseJet { value: q[0] * v[1], d_q: vec![v[1], 0.0], d_qdot: vec![0.0, q[0]], d_t: 0.0 })
}

fn lagrangian_jet(q: &[f64], v: &[f64]) -> PhaseJet {
    let (x, y) = (q[0], q[1]);
    PhaseJet {
        value: 0.5 * (v[0] * v[0] + v[1] * v[1]) - 1.0 / (x * y),
        d_q: vec![1.0 / (x * x * y), 1.0 / (x * y * y)],
        d_qdot: vec![v[0], v[1]],
        d_t: 0.0,
    }
}

fn angular_momentum_jet(q: &[f64], v: &[f64]) -> PhaseJet {
    PhaseJet { value: q[0] * v[1] - q[1] * v[0], d_q: vec![v[1], -v[0]], d_qdot: vec![-q[1], q[0]], d_t: 0.0 }
}

/// `X/Y` as a jet.
pub fn ratio_x_over_y(q: &[f64]) -> PhaseJet {
    let (x, y) = (q[0], q[1]);
    PhaseJet { value: x / y, d_q: vec![1.0 / y, -x / (y * y)], d_qdot: vec![0.0, 0.0], d_t: 0.0 }
}

fn ratio_y_over_x(q: &[f64]) -> PhaseJet {
    let (x, y) = (q[0], q[1]);
    PhaseJet { value: y / x, d_q: vec![-y / (x * x), 1.0 / x], d_qdot: vec![0.0, 0.0], d_t: 0.0 }
}

/// `Λ = τL − ½A² + X/Y + Y/X`.
pub fn ermakov_gauge(q: &[f64], v: &[f64], _t: f64, tau: &PhaseJet) -> PhaseJet {
    let a = angular_momentum_jet(q, v);
    tau.mul(&lagrangian_jet(q, v))
        .add(&a.mul(&a).scale(-0.5))
        .add(&ratio_x_over_y(q))
        .add(&ratio_y_over_x(q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalCheck {
    /// `G^[1]L + τ̇L − Λ̇` with accelerations taken from the equations of motion.
    pub residual: f64,
    /// Noether invariant of the generator.
    pub invariant: f64,
}

pub fn dynamical_symmetry_check(sym: &DynamicalSymmetry, state: &State) -> Result<DynamicalCheck> {
    if state.kind() != ModelKind::TwoD {
        return Err(Error::UnsupportedModel { op: "dynamical_symmetry_check", kind: state.kind() });
    }
    let (q, v, t) = (state.q(), state.qdot(), state.t());
    let acc = dynamics::rhs(state)?;
    let (x, y) = (q[0], q[1]);
    let (xd, yd) = (v[0], v[1]);
    let (xdd, ydd) = (acc[0], acc[1]);

    let tau = (sym.tau)(q, v, t);
    let gauge = (sym.gauge)(q, v, t, &tau);
    let lag = lagrangian_jet(q, v);
    let a = x * yd - y * xd;
    let a_dot = x * ydd - y * xdd;
    let tau_dot = tau.total_derivative(v, &acc);

    let xi = [tau.value * xd + y * a, tau.value * yd - x * a];
    let xi_dot = [
        tau_dot * xd + tau.value * xdd + yd * a + y * a_dot,
        tau_dot * yd + tau.value * ydd - xd * a - x * a_dot,
    ];
    let dl_dq = [lag.d_q[0], lag.d_q[1]];
    let p = [xd, yd];

    let prolonged: f64 = (0..2).map(|i| xi[i] * dl_dq[i] + (xi_dot[i] - tau_dot * v[i]) * p[i]).sum();
    let residual = prolonged + tau_dot * lag.value - gauge.total_derivative(v, &acc);

    let qdot_p = xd * p[0] + yd * p[1];
    let xi_p = xi[0] * p[0] + xi[1] * p[1];
    let invariant = tau.value * (qdot_p - lag.value) - xi_p + gauge.value;
    Ok(DynamicalCheck { residual, invariant })
}

/// Image of a trajectory under `t → β² t`, `q → β q` (so `q̇ → q̇/β`).
pub fn scaled_trajectory(traj: &Trajectory, beta: f64) -> Result<Trajectory> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("scaling factor must be positive, got {beta}"));
    }
    let b2 = beta * beta;
    let states = traj
        .states()
        .map(|s| {
            let q: Vec<f64> = s.q().iter().map(|v| beta * v).collect();
            let v: Vec<f64> = s.qdot().iter().map(|v| v / beta).collect();
            State::new(s.kind(), b2 * s.t(), &q, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    let config = IntegratorConfig {
        t_end: b2 * traj.config.t_end,
        sample_interval: b2 * traj.config.sample_interval,
        max_step: b2 * traj.config.max_step,
        initial_step: b2 * traj.config.initial_step,
        ..traj.config
    };
    Trajectory::from_states(traj.kind, config, states)
}

/// `(2t, q)`: action of the scaling generator on `(t, q)`.
pub fn scaling_generator_action(state: &State) -> (f64, Vec<f64>) {
    (2.0 * state.t(), state.q().to_vec())
}

/// Largest deviation `|q̈_fd − rhs(q)|` over the trajectory, where `q̈_fd`
/// differentiates the sampled velocities (5-point stencil on evenly spaced
/// samples, 3-point otherwise).
pub fn equation_residual(traj: &Trajectory) -> Result<f64> {
    let states: Vec<&State> = traj.states().collect();
    if states.len() < 3 {
        return Err(Error::InsufficientData(format!("{} samples, need at least 3", states.len())));
    }
    let t: Vec<f64> = states.iter().map(|s| s.t()).collect();
    let mut worst = 0.0f64;
    for k in 1..states.len() - 1 {
        let wide = k >= 2 && k + 2 < states.len() && {
            let h = t[k + 1] - t[k];
            (k - 2..k + 2).all(|i| ((t[i + 1] - t[i]) - h).abs() <= 1e-9 * h)
        };
        if !wide && states.len() >= 5 && (k == 1 || k + 2 == states.len()) {
            // edge samples are covered by their wide-stencil neighbours
            continue;
        }
        let acc = dynamics::rhs(states[k])?;
        for i in 0..acc.len() {
            let v = |j: usize| states[j].qdot()[i];
            let fd = if wide {
                let h = t[k + 1] - t[k];
                (v(k - 2) - 8.0 * v(k - 1) + 8.0 * v(k + 1) - v(k + 2)) / (12.0 * h)
            } else {
                let (h1, h2) = (t[k] - t[k - 1], t[k + 1] - t[k]);
                (-h2 / (h1 * (h1 + h2))) * v(k - 1) + ((h2 - h1) / (h1 * h2)) * v(k) + (h1 / (h2 * (h1 + h2))) * v(k + 1)
            };
            worst = worst.max((fd - acc[i]).abs());
        }
    }
    Ok(worst)
}

/// Scaling Noether invariant through [`noether_invariant_from`]; agrees with
/// [`crate::invariants::noether_invariant`].
pub fn scaling_noether_invariant(state: &State) -> Result<f64> {
    noether_invariant_from(&PointSymmetry::scaling(), state)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate;
    use crate::invariants::{ermakov_invariant, noether_invariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, kind: ModelKind) -> State {
        let n = kind.dim();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        State::new(kind, rng.gen_range(0.0..10.0), &q, &v).unwrap()
    }

    #[test]
    fn noether_condition_holds_for_scaling_and_time_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in ModelKind::ALL {
            for _ in 0..50 {
                let s = random_state(&mut rng, kind);
                assert!(noether_condition_residual(&PointSymmetry::scaling(), &s).unwrap().abs() <= 1e-10);
                assert_eq!(noether_condition_residual(&PointSymmetry::time_translation(), &s).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn perturbed_dilation_is_not_a_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for kind in ModelKind::ALL {
            let s = random_state(&mut rng, kind);
            assert!(noether_condition_residual(&PointSymmetry::dilation(1.1), &s).unwrap().abs() > 1e-3);
        }
    }

    #[test]
    fn noether_invariants_match_closed_forms() {
        let s = State::at_rest(ModelKind::TwoD, &[1.0, 1.0]).unwrap();
        assert_eq!(noether_invariant_from(&PointSymmetry::time_translation(), &s).unwrap(), 1.0);
        let s = State::new(ModelKind::OneD, 2.0, &[1.0], &[0.0]).unwrap();
        assert_eq!(scaling_noether_invariant(&s).unwrap(), 2.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kind in ModelKind::ALL {
            for _ in 0..50 {
                let s = random_state(&mut rng, kind);
                let j = noether_invariant(&s).unwrap();
                assert!((scaling_noether_invariant(&s).unwrap() - j).abs() <= 1e-12 * j.abs().max(1.0));
                let h = dynamics::hamiltonian(&s).unwrap();
                let e = noether_invariant_from(&PointSymmetry::time_translation(), &s).unwrap();
                assert!((e - h).abs() <= 1e-12 * h);
            }
        }
        // elliptic: J = 2tH − (2XẊ + YẎ)
        let s = State::new(ModelKind::EllipticThreeD, 1.5, &[0.7, 1.9], &[0.4, -0.3]).unwrap();
        let h = dynamics::hamiltonian(&s).unwrap();
        let by_hand = 2.0 * 1.5 * h - (2.0 * 0.7 * 0.4 + 1.9 * -0.3);
        assert!((scaling_noether_invariant(&s).unwrap() - by_hand).abs() < 1e-14);
    }

    #[test]
    fn prolonged_generator_on_fields() {
        let ermakov = |q: &[f64], v: &[f64], _t: f64| {
            let a = q[0] * v[1] - q[1] * v[0];
            0.5 * a * a + q[1] / q[0] + q[0] / q[1]
        };
        let energy = |q: &[f64], v: &[f64], _t: f64| 0.5 * (v[0] * v[0] + v[1] * v[1]) + 1.0 / (q[0] * q[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let s = random_state(&mut rng, ModelKind::TwoD);
            let sym = PointSymmetry::scaling();
            assert!(extended_generator_apply(&sym, &ermakov, &s).unwrap().abs() <= 1e-6);
            let h = dynamics::hamiltonian(&s).unwrap();
            let gh = extended_generator_apply(&sym, &energy, &s).unwrap();
            assert!((gh + 2.0 * h).abs() <= 1e-6 * h.max(1.0));
            assert_eq!(extended_generator_apply(&sym, &|_, _, _| 3.5, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn ermakov_invariant_from_dynamical_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_state(&mut rng, ModelKind::TwoD);
            let i = ermakov_invariant(&s).unwrap();
            for tau in [tau_constant(0.0), tau_constant(1.0), tau_x_ydot()] {
                let check = dynamical_symmetry_check(&DynamicalSymmetry::ermakov(tau), &s).unwrap();
                assert!(check.residual.abs() <= 1e-8, "residual {}", check.residual);
                assert!((check.invariant - i).abs() <= 1e-10 * i);
            }
        }
    }

    #[test]
    fn broken_gauge_is_detected() {
        let broken = DynamicalSymmetry {
            tau: tau_constant(0.0),
            gauge: Box::new(|q, v, t, tau| {
                let full = ermakov_gauge(q, v, t, tau);
                let drop = ratio_x_over_y(q);
                PhaseJet {
                    value: full.value - drop.value,
                    d_q: full.d_q.iter().zip(&drop.d_q).map(|(a, b)| a - b).collect(),
                    d_qdot: full.d_qdot,
                    d_t: full.d_t,
                }
            }),
        };
        let s = State::new(ModelKind::TwoD, 0.0, &[1.2, 0.7], &[0.5, -0.8]).unwrap();
        assert!(dynamical_symmetry_check(&broken, &s).unwrap().residual.abs() > 1e-3);
        let s3 = State::at_rest(ModelKind::ThreeD, &[1.0; 3]).unwrap();
        assert!(dynamical_symmetry_check(&DynamicalSymmetry::ermakov(tau_constant(0.0)), &s3).is_err());
    }

    #[test]
    fn scaled_trajectories_solve_the_equations() {
        for kind in ModelKind::ALL {
            let n = kind.dim();
            let s = State::new(kind, 0.0, &[1.0, 1.3, 0.8][..n], &[0.2, -0.1, 0.3][..n]).unwrap();
            let traj = integrate(&s, &IntegratorConfig::default().with_t_end(3.0)).unwrap();
            assert!(equation_residual(&traj).unwrap() <= 1e-5);
            for beta in [0.5, 2.0, 5.0] {
                let mapped = scaled_trajectory(&traj, beta).unwrap();
                let r = equation_residual(&mapped).unwrap();
                assert!(r <= 1e-5, "{kind} β = {beta}: {r}");
            }
            let same = scaled_trajectory(&traj, 1.0).unwrap();
            assert_eq!(same.samples, traj.samples);
            assert!(scaled_trajectory(&traj, 0.0).is_err());
            assert!(scaled_trajectory(&traj, -2.0).is_err());
        }
    }

    #[test]
    fn scaled_one_d_exact_solution() {
        let beta: f64 = 2.0;
        let states = (0..400)
            .map(|i| {
                let t = i as f64 * 0.01;
                let x = (t * t + 1.0).sqrt();
                State::new(ModelKind::OneD, t, &[x], &[t / x]).unwrap()
            })
            .collect();
        let traj = Trajectory::from_states(ModelKind::OneD, IntegratorConfig::default(), states).unwrap();
        let mapped = scaled_trajectory(&traj, beta).unwrap();
        for s in mapped.states() {
            let tb = s.t();
            assert!((s.q()[0] - 2.0 * ((tb / 4.0).powi(2) + 1.0).sqrt()).abs() < 1e-14);
        }
        assert!(equation_residual(&mapped).unwrap() <= 1e-5);
    }

    #[test]
    fn scaling_preserves_ermakov_invariant() {
        let s = State::new(ModelKind::TwoD, 0.0, &[0.9, 1.4], &[0.3, 0.6]).unwrap();
        let traj = integrate(&s, &IntegratorConfig::default().with_t_end(2.0).with_sample_interval(0.1)).unwrap();
        let mapped = scaled_trajectory(&traj, 3.0).unwrap();
        for (a, b) in traj.states().zip(mapped.states()) {
            let (ia, ib) = (ermakov_invariant(a).unwrap(), ermakov_invariant(b).unwrap());
            assert!((ia - ib).abs() <= 1e-10 * ia);
        }
    }

    #[test]
    fn near_identity_scaling_matches_generator() {
        let eps = 1e-6;
        let s = State::new(ModelKind::TwoD, 0.0, &[1.0, 1.0], &[0.1, 0.2]).unwrap();
        let traj = integrate(&s, &IntegratorConfig::default().with_t_end(10.0).with_sample_interval(0.5)).unwrap();
        let mapped = scaled_trajectory(&traj, 1.0 + eps).unwrap();
        for (a, b) in traj.states().zip(mapped.states()) {
            let (gt, gq) = scaling_generator_action(a);
            assert!((b.t() - (a.t() + eps * gt)).abs() <= 1e-10);
            for i in 0..2 {
                assert!((b.q()[i] - (a.q()[i] + eps * gq[i])).abs() <= 1e-10);
            }
        }
    }
}
