//! Dormand–Prince 5(4) with step-size control and the 4th-order continuous
//! extension for dense output.
//!
//! The engine is generic over [`OdeSystem`]; systems may declare some states
//! inadmissible (for the fireball models: a variance at or below zero), in
//! which case the step is rejected and halved.

use crate::error::{Error, Result};

/// A first-order autonomous or non-autonomous system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Whether `y` lies in the domain where `eval` is defined.
    fn admissible(&self, _y: &[f64]) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub max_steps: usize,
    /// Consecutive inadmissible-state rejections tolerated before giving up.
    pub max_guard_rejections: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            initial_step: 1e-3,
            max_steps: 5_000_000,
            max_guard_rejections: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Interpolant over one accepted step.
struct Dense {
    t_old: f64,
    h: f64,
    coeffs: [Vec<f64>; 5],
}

impl Dense {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t_old) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Integrate from `(t0, y0)` to `t_end` (which may be below `t0`) and return
/// the solution at each of `sample_times`, which must be monotone in the
/// direction of integration and lie within `[t0, t_end]`.
pub fn solve<S: OdeSystem>(
    system: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    control: &StepControl,
    sample_times: &[f64],
) -> Result<(Vec<Vec<f64>>, SolveStats)> {
    let n = system.dim();
    assert_eq!(y0.len(), n, "initial state has the wrong dimension");
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    if sample_times.windows(2).any(|w| dir * (w[1] - w[0]) < 0.0)
        || sample_times.iter().any(|&s| dir * (s - t0) < 0.0 || dir * (s - t_end) > 0.0)
    {
        return Err(Error::InvalidConfig("sample times must be ordered within the integration interval".into()));
    }

    let mut stats = SolveStats::default();
    let mut out = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] == t0 {
        out.push(y0.to_vec());
        next_sample += 1;
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    system.eval(t, &y, &mut k[0]);
    stats.evaluations += 1;

    let span = (t_end - t0).abs();
    let mut h = control.initial_step.min(control.max_step).min(span.max(f64::MIN_POSITIVE));
    let mut guard_rejections = 0usize;
    let mut last_rejected = false;

    while dir * (t_end - t) > 0.0 {
        if stats.accepted + stats.rejected >= control.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                last_good: y,
                reason: format!("step budget of {} exhausted", control.max_steps),
            });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            if guard_rejections > 0 {
                return Err(Error::Singularity { t, last_good: y });
            }
            return Err(Error::IntegrationFailure {
                t,
                last_good: y,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }
        let hs = dir * h;

        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * k[0][i];
        }
        system.eval(t + C2 * hs, &ytmp, &mut k[1]);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * k[0][i] + A32 * k[1][i]);
        }
        system.eval(t + C3 * hs, &ytmp, &mut k[2]);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        system.eval(t + C4 * hs, &ytmp, &mut k[3]);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        system.eval(t + C5 * hs, &ytmp, &mut k[4]);
        for i in 0..n {
            ytmp[i] = y[i]
                + hs * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        system.eval(t + hs, &ytmp, &mut k[5]);
        for i in 0..n {
            ynew[i] = y[i]
                + hs * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        stats.evaluations += 5;

        // Stage values may have left the domain even if ynew did not; a
        // non-finite stage shows up as a non-finite ynew.
        if !ynew.iter().all(|v| v.is_finite()) || !system.admissible(&ynew) {
            guard_rejections += 1;
            stats.rejected += 1;
            if guard_rejections > control.max_guard_rejections {
                return Err(Error::Singularity { t, last_good: y });
            }
            h *= 0.5;
            last_rejected = true;
            continue;
        }

        system.eval(t + hs, &ynew, &mut k[6]);
        stats.evaluations += 1;

        let mut err = 0.0f64;
        for i in 0..n {
            let e = hs
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let scale = control.abs_tol.max(control.rel_tol * y[i].abs().max(ynew[i].abs()));
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            err = 1e10;
        }

        if err <= 1.0 {
            guard_rejections = 0;
            stats.accepted += 1;
            let t_new = if last { t_end } else { t + hs };

            if next_sample < sample_times.len() && dir * (sample_times[next_sample] - t_new) <= 0.0 {
                let dense = build_dense(&y, &ynew, &k, t, hs);
                let mut buf = vec![0.0; n];
                while next_sample < sample_times.len() && dir * (sample_times[next_sample] - t_new) <= 0.0 {
                    let ts = sample_times[next_sample];
                    if ts == t_new {
                        out.push(ynew.clone());
                    } else {
                        dense.eval(ts, &mut buf);
                        out.push(buf.clone());
                    }
                    next_sample += 1;
                }
            }

            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);

            let mut fac = SAFETY * err.max(1e-12).powf(-0.2);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(control.max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = (SAFETY * err.powf(-0.2)).max(FAC_MIN);
            h *= fac;
            last_rejected = true;
        }
    }

    Ok((out, stats))
}

fn build_dense(y: &[f64], ynew: &[f64], k: &[Vec<f64>; 7], t_old: f64, hs: f64) -> Dense {
    let n = y.len();
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    let mut r3 = vec![0.0; n];
    let mut r4 = vec![0.0; n];
    let mut r5 = vec![0.0; n];
    for i in 0..n {
        let ydiff = ynew[i] - y[i];
        let bspl = hs * k[0][i] - ydiff;
        r1[i] = y[i];
        r2[i] = ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - hs * k[6][i] - bspl;
        r5[i] = hs
            * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
    }
    Dense { t_old, h: hs, coeffs: [r1, r2, r3, r4, r5] }
}
