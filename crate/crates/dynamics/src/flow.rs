//! Fixed-step fourth-order Runge-Kutta for `q' = dH/dp`, `p' = -dH/dq`.

use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::phase::PhasePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
    #[error("step must be positive, got {0}")]
    BadStep(f64),
}

/// `(p', q')` at `(x, t)`.
pub fn vector_field<H: Hamiltonian + ?Sized>(h: &H, x: &PhasePoint, t: f64) -> (Vec<f64>, Vec<f64>) {
    let (hp, hq) = h.gradient(x, t);
    (hq.into_iter().map(|v| -v).collect(), hp)
}

/// One RK4 step of (signed) size `dt`.
pub fn rk4_step<H: Hamiltonian + ?Sized>(h: &H, x: &PhasePoint, t: f64, dt: f64) -> PhasePoint {
    let (k1p, k1q) = vector_field(h, x, t);
    let (k2p, k2q) = vector_field(h, &x.offset(&k1p, &k1q, dt / 2.0), t + dt / 2.0);
    let (k3p, k3q) = vector_field(h, &x.offset(&k2p, &k2q, dt / 2.0), t + dt / 2.0);
    let (k4p, k4q) = vector_field(h, &x.offset(&k3p, &k3q, dt), t + dt);
    let comb = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..a.len()).map(|i| (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]) / 6.0).collect()
    };
    x.offset(&comb(&k1p, &k2p, &k3p, &k4p), &comb(&k1q, &k2q, &k3q, &k4q), dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory has its initial point")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples of the flow from `(x0, t0)` to time `t1` (which may precede `t0`), using steps
/// of size `step` and a shorter final step so that the last sample sits at `t1`.
pub fn integrate<H: Hamiltonian + ?Sized>(
    h: &H,
    x0: &PhasePoint,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Trajectory, FlowError> {
    if step.is_nan() || step <= 0.0 {
        return Err(FlowError::BadStep(step));
    }
    let span = t1 - t0;
    let steps = (span.abs() / step).ceil().max(1.0) as usize;
    let dir = span.signum();
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(t0);
    points.push(x0.clone());
    let mut x = x0.clone();
    for k in 0..steps {
        let t = t0 + dir * step * k as f64;
        let dt = if k + 1 == steps { t1 - t } else { dir * step };
        x = rk4_step(h, &x, t, dt);
        if !x.is_finite() {
            return Err(FlowError::NonFinite(t + dt));
        }
        times.push(t + dt);
        points.push(x.clone());
    }
    Ok(Trajectory { times, points })
}

/// Endpoint of the flow only.
pub fn flow_to<H: Hamiltonian + ?Sized>(
    h: &H,
    x0: &PhasePoint,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<PhasePoint, FlowError> {
    if step.is_nan() || step <= 0.0 {
        return Err(FlowError::BadStep(step));
    }
    let span = t1 - t0;
    let steps = (span.abs() / step).ceil().max(1.0) as usize;
    let dir = span.signum();
    let mut x = x0.clone();
    for k in 0..steps {
        let t = t0 + dir * step * k as f64;
        let dt = if k + 1 == steps { t1 - t } else { dir * step };
        x = rk4_step(h, &x, t, dt);
        if !x.is_finite() {
            return Err(FlowError::NonFinite(t + dt));
        }
    }
    Ok(x)
}
