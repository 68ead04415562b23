//! Conformal factor of a contact flow, read off from its 1-homogeneous Hamiltonian lift.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::flow::rk4_step;
use crate::hamiltonian::{ContactHamiltonian, HamiltonianDef};
use crate::phase::PhasePoint;

/// `|P|` below this aborts the run.
pub const ZERO_SECTION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("start {index} has |p| = {norm}, expected 1")]
    NotUnit { index: usize, norm: f64 },
    #[error("trajectory from start {index} reached |p| < {ZERO_SECTION_FLOOR} at t = {t}")]
    HitZeroSection { index: usize, t: f64 },
    #[error("trajectory from start {index} became non-finite at t = {t}")]
    NonFinite { index: usize, t: f64 },
    #[error("horizon and step must be positive")]
    BadParameters,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalTrack {
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Start index and time at which the maximum was seen.
    pub argmax: (usize, f64),
    pub steps: usize,
}

/// Max and min over starts and sample times of `|P(t)| / |P(0)|`.
pub fn conformal_factor_track(
    h: &ContactHamiltonian,
    starts: &[PhasePoint],
    horizon: f64,
    step: f64,
) -> Result<ConformalTrack, ConformalError> {
    if !(horizon > 0.0 && step > 0.0) {
        return Err(ConformalError::BadParameters);
    }
    for (index, x) in starts.iter().enumerate() {
        let norm = x.momentum_norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ConformalError::NotUnit { index, norm });
        }
    }
    let lift = HamiltonianDef::HomogeneousContact { h: h.clone() };
    let steps = (horizon / step).ceil() as usize;
    let runs: Vec<Result<(f64, f64, f64), ConformalError>> = starts
        .par_iter()
        .enumerate()
        .map(|(index, x0)| {
            let (mut hi, mut lo, mut at) = (1.0f64, 1.0f64, 0.0);
            let mut x = x0.clone();
            for k in 0..steps {
                let t = k as f64 * step;
                let dt = step.min(horizon - t);
                x = rk4_step(&lift, &x, t, dt);
                let r = x.momentum_norm();
                if !x.is_finite() {
                    return Err(ConformalError::NonFinite { index, t: t + dt });
                }
                if r < ZERO_SECTION_FLOOR {
                    return Err(ConformalError::HitZeroSection { index, t: t + dt });
                }
                if r > hi {
                    hi = r;
                    at = t + dt;
                }
                lo = lo.min(r);
            }
            Ok((hi, lo, at))
        })
        .collect();
    let mut track = ConformalTrack {
        max_ratio: f64::NEG_INFINITY,
        min_ratio: f64::INFINITY,
        argmax: (0, 0.0),
        steps,
    };
    for (i, run) in runs.into_iter().enumerate() {
        let (hi, lo, at) = run?;
        if hi > track.max_ratio {
            track.max_ratio = hi;
            track.argmax = (i, at);
        }
        track.min_ratio = track.min_ratio.min(lo);
    }
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Bump, Potential};

    fn unit_starts() -> Vec<PhasePoint> {
        (0..6)
            .map(|k| {
                let a = k as f64;
                PhasePoint::new(vec![a.cos(), a.sin()], vec![0.1 * a, -0.2])
            })
            .collect()
    }

    #[test]
    fn reeb_flow_preserves_the_form() {
        let t = conformal_factor_track(&ContactHamiltonian::reeb(), &unit_starts(), 10.0, 1e-2).unwrap();
        assert!((t.max_ratio - 1.0).abs() < 1e-8 && (t.min_ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn constant_u_keeps_ratio_one() {
        let h = ContactHamiltonian::Position {
            u: Potential::Constant { value: 2.5 },
        };
        let t = conformal_factor_track(&h, &unit_starts(), 5.0, 1e-2).unwrap();
        assert!((t.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bump_grows_the_factor() {
        let h = ContactHamiltonian::Position {
            u: Potential::Bumps {
                bumps: vec![Bump {
                    center: vec![0.0, 0.0],
                    radius: 0.8,
                    weight: -1.0,
                }],
            },
        };
        let start = PhasePoint::new(vec![-1.0, 0.0], vec![0.4, 0.0]);
        let t = conformal_factor_track(&h, &[start], 5.0, 1e-3).unwrap();
        assert!(t.max_ratio > 2.0);
    }

    #[test]
    fn rejects_non_unit_starts() {
        let bad = PhasePoint::new(vec![2.0, 0.0], vec![0.0, 0.0]);
        assert!(matches!(
            conformal_factor_track(&ContactHamiltonian::reeb(), &[bad], 1.0, 0.1),
            Err(ConformalError::NotUnit { .. })
        ));
    }
}
