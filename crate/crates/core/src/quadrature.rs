//! Gauss–Hermite rules for integrals of the form `∫ e^(−s²) f(s) ds`.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss–Hermite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite recurrence, seeded with
    /// the usual asymptotic guesses for the largest roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let pim4 = PI.powf(-0.25);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..(n + 1) / 2 {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussHermite { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ e^(−s²) f(s) ds`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&s, &w)| w * f(s)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn moments() {
        let sqrt_pi = PI.sqrt();
        for n in [1, 2, 5, 20, 24, 40] {
            let rule = GaussHermite::new(n);
            assert_abs_diff_eq!(rule.integrate(|_| 1.0), sqrt_pi, epsilon = 1e-14);
            if n >= 2 {
                assert_abs_diff_eq!(rule.integrate(|s| s * s), sqrt_pi / 2.0, epsilon = 1e-14);
            }
            if n >= 3 {
                assert_abs_diff_eq!(rule.integrate(|s| s.powi(4)), 0.75 * sqrt_pi, epsilon = 1e-13);
            }
            assert_abs_diff_eq!(rule.integrate(|s| s.powi(3)), 0.0, epsilon = 1e-13);
        }
        let rule = GaussHermite::new(20);
        assert_abs_diff_eq!(rule.integrate(f64::cos), sqrt_pi * (-0.25f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let rule = GaussHermite::new(21);
        assert!(rule.nodes().windows(2).all(|w| w[0] > w[1]));
        assert_eq!(rule.nodes()[10], 0.0);
        for i in 0..21 {
            assert_abs_diff_eq!(rule.nodes()[i], -rule.nodes()[20 - i], epsilon = 0.0);
        }
    }
}
