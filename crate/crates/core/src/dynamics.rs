//! Equations of motion, pseudo-potentials, Lagrangians and energies of the
//! four reduced models.
//!
//! Every model is a natural mechanical system `L = ½ q̇ᵀ M q̇ − V(q)` with a
//! constant diagonal mass matrix `M`. `M` is the identity except for the
//! elliptic model, whose kinetic term is `Ẋ² + Ẏ²/2`, i.e. `M = diag(2, 1)`.
//! All potentials are homogeneous of degree −2 in the variances.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{ModelKind, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyPair {
    pub lagrangian: f64,
    pub hamiltonian: f64,
}

/// Diagonal of the kinetic metric.
pub fn mass_diagonal(kind: ModelKind) -> &'static [f64] {
    match kind {
        ModelKind::OneD => &[1.0],
        ModelKind::TwoD => &[1.0, 1.0],
        ModelKind::ThreeD => &[1.0, 1.0, 1.0],
        ModelKind::EllipticThreeD => &[2.0, 1.0],
    }
}

fn check_positive(q: &[f64]) -> Result<()> {
    match q.iter().find(|&&v| !(v > 0.0)) {
        Some(v) => domain(format!("singular force: variance {v} is not positive")),
        None => Ok(()),
    }
}

/// Pseudo-potential `V(q)`.
pub fn potential(kind: ModelKind, q: &[f64]) -> Result<f64> {
    check_positive(q)?;
    Ok(match kind {
        ModelKind::OneD => 0.5 / (q[0] * q[0]),
        ModelKind::TwoD => 1.0 / (q[0] * q[1]),
        ModelKind::ThreeD => 1.5 * (q[0] * q[1] * q[2]).powf(-2.0 / 3.0),
        ModelKind::EllipticThreeD => 1.5 * (q[0] * q[0] * q[1]).powf(-2.0 / 3.0),
    })
}

/// Closed-form gradient `∂V/∂q`.
pub fn potential_gradient(kind: ModelKind, q: &[f64]) -> Result<Vec<f64>> {
    check_positive(q)?;
    Ok(match kind {
        ModelKind::OneD => vec![-1.0 / q[0].powi(3)],
        ModelKind::TwoD => {
            let v = 1.0 / (q[0] * q[1]);
            vec![-v / q[0], -v / q[1]]
        }
        ModelKind::ThreeD => {
            let w = (q[0] * q[1] * q[2]).powf(-2.0 / 3.0);
            q.iter().map(|&qi| -w / qi).collect()
        }
        ModelKind::EllipticThreeD => {
            let w = (q[0] * q[0] * q[1]).powf(-2.0 / 3.0);
            vec![-2.0 * w / q[0], -w / q[1]]
        }
    })
}

/// Accelerations `q̈ = −M⁻¹ ∇V`.
pub fn accelerations(kind: ModelKind, q: &[f64]) -> Result<Vec<f64>> {
    let grad = potential_gradient(kind, q)?;
    Ok(grad
        .iter()
        .zip(mass_diagonal(kind))
        .map(|(g, m)| -g / m)
        .collect())
}

/// Right-hand side of the model's equations of motion at `state`.
pub fn rhs(state: &State) -> Result<Vec<f64>> {
    accelerations(state.kind(), state.q())
}

pub fn pseudo_potential(state: &State) -> Result<f64> {
    potential(state.kind(), state.q())
}

/// Kinetic energy `½ q̇ᵀ M q̇`.
pub fn kinetic(kind: ModelKind, qdot: &[f64]) -> f64 {
    0.5 * qdot
        .iter()
        .zip(mass_diagonal(kind))
        .map(|(v, m)| m * v * v)
        .sum::<f64>()
}

/// Canonical momenta `M q̇`.
pub fn momenta(kind: ModelKind, qdot: &[f64]) -> Vec<f64> {
    qdot.iter().zip(mass_diagonal(kind)).map(|(v, m)| m * v).collect()
}

pub fn energies(state: &State) -> Result<EnergyPair> {
    let v = pseudo_potential(state)?;
    let t = kinetic(state.kind(), state.qdot());
    Ok(EnergyPair { lagrangian: t - v, hamiltonian: t + v })
}

pub fn hamiltonian(state: &State) -> Result<f64> {
    energies(state).map(|e| e.hamiltonian)
}
