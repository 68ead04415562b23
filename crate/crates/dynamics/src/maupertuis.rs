//! Fixed-energy chords of `|p|^2/2 + U(q)` as geodesics of the Jacobi metric `sqrt(C - U) g`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chord::ChordResult;
use crate::flow::integrate;
use crate::hamiltonian::{HamiltonianDef, Potential};
use crate::phase::{norm, normalized, scale, sub, PhasePoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaupertuisError {
    #[error("energy {energy} does not exceed sup U = {sup}")]
    EnergyTooLow { energy: f64, sup: f64 },
    #[error("need at least 2 path segments, got {0}")]
    TooFewNodes(usize),
    #[error("endpoints must differ and share a dimension")]
    BadEndpoints,
    #[error("path descent did not converge in {iterations} iterations (gradient norm {gradient})")]
    NoConvergence { iterations: usize, gradient: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaupertuisOptions {
    /// Number of path segments.
    pub segments: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_gradient_tol")]
    pub gradient_tol: f64,
    /// Step of the flow used to re-check the lifted chord.
    #[serde(default = "default_step")]
    pub step: f64,
    /// Endpoint residual accepted as a chord.
    #[serde(default = "default_residual")]
    pub residual_tol: f64,
}

fn default_iterations() -> usize {
    200_000
}

fn default_gradient_tol() -> f64 {
    1e-9
}

fn default_step() -> f64 {
    1e-3
}

fn default_residual() -> f64 {
    1e-2
}

impl Default for MaupertuisOptions {
    fn default() -> Self {
        MaupertuisOptions {
            segments: 64,
            max_iterations: default_iterations(),
            gradient_tol: default_gradient_tol(),
            step: default_step(),
            residual_tol: default_residual(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPath {
    pub nodes: Vec<Vec<f64>>,
    pub jacobi_length: f64,
    pub iterations: usize,
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// Midpoint-rule Jacobi length of a polygonal path.
pub fn jacobi_length(u: &Potential, energy: f64, nodes: &[Vec<f64>]) -> f64 {
    nodes
        .windows(2)
        .map(|w| (energy - u.value(&midpoint(&w[0], &w[1]))).sqrt() * norm(&sub(&w[1], &w[0])))
        .sum()
}

fn length_gradient(u: &Potential, energy: f64, nodes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = nodes[0].len();
    let mut grad = vec![vec![0.0; n]; nodes.len()];
    for k in 0..nodes.len() - 1 {
        let d = sub(&nodes[k + 1], &nodes[k]);
        let len = norm(&d);
        let m = midpoint(&nodes[k], &nodes[k + 1]);
        let w = (energy - u.value(&m)).sqrt();
        let gu = u.gradient(&m);
        for i in 0..n {
            let along = if len > 0.0 { w * d[i] / len } else { 0.0 };
            // d w / d m_i = -dU/dq_i / (2 w); each endpoint moves m by half.
            let across = -len * gu[i] / (4.0 * w);
            grad[k][i] += -along + across;
            grad[k + 1][i] += along + across;
        }
    }
    grad
}

/// Minimizes the Jacobi length over paths from `x0` to `x1` by gradient descent with backtracking,
/// moving each interior node normal to the path.
pub fn jacobi_geodesic(
    u: &Potential,
    energy: f64,
    x0: &[f64],
    x1: &[f64],
    opts: &MaupertuisOptions,
) -> Result<JacobiPath, MaupertuisError> {
    if opts.segments < 2 {
        return Err(MaupertuisError::TooFewNodes(opts.segments));
    }
    if x0.len() != x1.len() || x0.is_empty() || x0 == x1 {
        return Err(MaupertuisError::BadEndpoints);
    }
    if energy <= u.sup() {
        return Err(MaupertuisError::EnergyTooLow { energy, sup: u.sup() });
    }
    let m = opts.segments;
    let mut nodes: Vec<Vec<f64>> = (0..=m)
        .map(|k| {
            let s = k as f64 / m as f64;
            x0.iter().zip(x1).map(|(a, b)| a + s * (b - a)).collect()
        })
        .collect();
    let mut length = jacobi_length(u, energy, &nodes);
    let mut rate = 1.0 / m as f64;
    let mut gnorm = f64::INFINITY;
    for it in 0..opts.max_iterations {
        let mut grad = length_gradient(u, energy, &nodes);
        grad[0].iter_mut().for_each(|g| *g = 0.0);
        grad[m].iter_mut().for_each(|g| *g = 0.0);
        // Sliding nodes along the path only reparametrizes it; keep the normal part.
        for k in 1..m {
            let tangent = normalized(&sub(&nodes[k + 1], &nodes[k - 1]));
            let along: f64 = grad[k].iter().zip(&tangent).map(|(g, t)| g * t).sum();
            grad[k].iter_mut().zip(&tangent).for_each(|(g, t)| *g -= along * t);
        }
        gnorm = grad.iter().flatten().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < opts.gradient_tol {
            return Ok(JacobiPath {
                nodes,
                jacobi_length: length,
                iterations: it,
            });
        }
        loop {
            let trial: Vec<Vec<f64>> = nodes
                .iter()
                .zip(&grad)
                .map(|(x, g)| x.iter().zip(g).map(|(a, b)| a - rate * b).collect())
                .collect();
            let l = jacobi_length(u, energy, &trial);
            if l <= length - 0.5 * rate * gnorm * gnorm {
                nodes = trial;
                length = l;
                rate *= 1.5;
                break;
            }
            rate *= 0.5;
            if rate < 1e-300 {
                // No decrease is representable: the path is stationary at double precision.
                return Ok(JacobiPath {
                    nodes,
                    jacobi_length: length,
                    iterations: it,
                });
            }
        }
    }
    Err(MaupertuisError::NoConvergence {
        iterations: opts.max_iterations,
        gradient: gnorm,
    })
}

/// Lifts the Jacobi geodesic to the level `{H = C}` and reports it as a chord.
///
/// The time-length is `sum |dq| / sqrt(2 (C - U))`; the residual comes from flowing the lifted
/// start point for that long and measuring the distance to `x1`.
pub fn maupertuis_chord(
    u: &Potential,
    energy: f64,
    x0: &[f64],
    x1: &[f64],
    opts: &MaupertuisOptions,
) -> Result<ChordResult, MaupertuisError> {
    let path = jacobi_geodesic(u, energy, x0, x1, opts)?;
    let nodes = &path.nodes;
    let time: f64 = nodes
        .windows(2)
        .map(|w| norm(&sub(&w[1], &w[0])) / (2.0 * (energy - u.value(&midpoint(&w[0], &w[1])))).sqrt())
        .sum();
    // One-sided second-order tangent at x0.
    let tangent: Vec<f64> = (0..x0.len())
        .map(|i| -3.0 * nodes[0][i] + 4.0 * nodes[1][i] - nodes[2][i])
        .collect();
    let speed = (2.0 * (energy - u.value(x0))).sqrt();
    let start = PhasePoint::new(scale(&normalized(&tangent), speed), x0.to_vec());
    let h = HamiltonianDef::mechanical(u.clone());
    let trajectory = integrate(&h, &start, 0.0, time, opts.step).map_err(|_| MaupertuisError::NoConvergence {
        iterations: path.iterations,
        gradient: f64::NAN,
    })?;
    let end_residual = norm(&sub(&trajectory.last().q, x1));
    Ok(ChordResult {
        found: end_residual <= opts.residual_tol,
        start,
        t0: 0.0,
        time_length: time,
        end_residual,
        trajectory,
        shots: 1,
        tolerance: opts.residual_tol,
        step: opts.step,
        horizon: time,
    })
}
