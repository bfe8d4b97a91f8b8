//! Shared fixtures for the benchmarks.

use fireball_core::{ModelKind, State};

/// A generic moving initial state for each model.
pub fn moving_state(kind: ModelKind) -> State {
    let q = [1.2, 0.8, 1.5];
    let v = [0.3, -0.4, 0.1];
    let n = kind.dim();
    State::new(kind, 0.0, &q[..n], &v[..n]).expect("fixture state is valid")
}
