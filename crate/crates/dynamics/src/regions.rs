//! Source and target sets in phase space and their sampling.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::phase::{norm, normalized, scale, sub, PhasePoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("fiber segment needs 0 < s_lo <= s_hi, got [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error("momentum shell needs s > 0, got {0}")]
    BadShell(f64),
    #[error("dimension mismatch: region has n = {region}, problem has n = {problem}")]
    Dimension { region: usize, problem: usize },
}

/// A user-supplied region: membership and a distance-to-set estimate.
pub trait CustomRegion: Send + Sync + fmt::Debug {
    fn distance(&self, x: &PhasePoint) -> f64;
    fn sample(&self, sampling: &SourceSampling) -> Vec<PhasePoint>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionDef {
    /// `{(p, x) : s_lo <= |p| <= s_hi}`
    FiberSegment { x: Vec<f64>, s_lo: f64, s_hi: f64 },
    /// `{|p| = s}`
    MomentumShell { s: f64 },
    #[serde(skip)]
    Custom(Arc<dyn CustomRegion>),
}

/// How a region is sampled when used as a source or for separation estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSampling {
    /// Momentum directions (angles for n = 2).
    pub directions: usize,
    /// Momentum radii across a fiber segment's window, endpoints included.
    #[serde(default = "default_radii")]
    pub radii: usize,
    /// Restrict starts to this energy level (radius solved along each direction).
    #[serde(default)]
    pub energy: Option<f64>,
    /// Position window for shells: center, half-width and points per axis.
    #[serde(default)]
    pub q_center: Option<Vec<f64>>,
    #[serde(default = "default_half_width")]
    pub q_half_width: f64,
    #[serde(default = "default_per_axis")]
    pub q_per_axis: usize,
}

fn default_radii() -> usize {
    5
}

fn default_half_width() -> f64 {
    2.0
}

fn default_per_axis() -> usize {
    5
}

impl Default for SourceSampling {
    fn default() -> Self {
        SourceSampling {
            directions: 64,
            radii: default_radii(),
            energy: None,
            q_center: None,
            q_half_width: default_half_width(),
            q_per_axis: default_per_axis(),
        }
    }
}

/// Deterministic set of unit vectors in `R^n`.
pub fn unit_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let r = norm(&v);
                    if r > 0.1 && r <= 1.0 {
                        return normalized(&v);
                    }
                })
                .collect()
        }
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || lo == hi {
        return vec![hi];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

fn q_grid(n: usize, sampling: &SourceSampling) -> Vec<Vec<f64>> {
    let center = sampling.q_center.clone().unwrap_or_else(|| vec![0.0; n]);
    let axis = linspace(-sampling.q_half_width, sampling.q_half_width, sampling.q_per_axis);
    let mut out = vec![Vec::new()];
    for c in center.iter().take(n) {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |a| {
                    let mut v = prefix.clone();
                    v.push(c + a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Radius `r` in `[lo, hi]` with `H(r u, q, t) = energy`, by bisection, if `H` brackets it.
pub fn radius_on_level<H: Hamiltonian + ?Sized>(
    h: &H,
    dir: &[f64],
    q: &[f64],
    t: f64,
    energy: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let f = |r: f64| h.value(&PhasePoint::new(scale(dir, r), q.to_vec()), t) - energy;
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fb > 0.0) {
            b = m;
        } else {
            a = m;
        }
        if b - a < 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Some(0.5 * (a + b))
}

impl RegionDef {
    pub fn validate(&self, n: usize) -> Result<(), RegionError> {
        match self {
            RegionDef::FiberSegment { x, s_lo, s_hi } => {
                if x.len() != n {
                    return Err(RegionError::Dimension {
                        region: x.len(),
                        problem: n,
                    });
                }
                if !(*s_lo > 0.0 && s_lo <= s_hi) {
                    return Err(RegionError::BadWindow(*s_lo, *s_hi));
                }
                Ok(())
            }
            RegionDef::MomentumShell { s } => {
                if *s > 0.0 {
                    Ok(())
                } else {
                    Err(RegionError::BadShell(*s))
                }
            }
            RegionDef::Custom(_) => Ok(()),
        }
    }

    /// Nonnegative estimate of the distance from `x` to the region; zero on the region.
    pub fn distance(&self, x: &PhasePoint) -> f64 {
        match self {
            RegionDef::FiberSegment { x: base, s_lo, s_hi } => {
                let r = x.momentum_norm();
                norm(&sub(&x.q, base)) + (s_lo - r).max(0.0) + (r - s_hi).max(0.0)
            }
            RegionDef::MomentumShell { s } => (x.momentum_norm() - s).abs(),
            RegionDef::Custom(c) => c.distance(x),
        }
    }

    pub fn contains(&self, x: &PhasePoint, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Whether two regions are known to be disjoint (`None` when undecidable in closed form).
    pub fn disjoint_from(&self, other: &RegionDef) -> Option<bool> {
        use RegionDef::*;
        match (self, other) {
            (FiberSegment { x, s_lo, s_hi }, FiberSegment { x: y, s_lo: lo, s_hi: hi }) => {
                Some(x != y || s_hi < lo || hi < s_lo)
            }
            (MomentumShell { s }, MomentumShell { s: t }) => Some(s != t),
            (FiberSegment { s_lo, s_hi, .. }, MomentumShell { s }) | (MomentumShell { s }, FiberSegment { s_lo, s_hi, .. }) => {
                Some(s < s_lo || s > s_hi)
            }
            _ => None,
        }
    }

    /// Sample points of the region at time `t` (the time matters only for energy levels).
    pub fn sample<H: Hamiltonian + ?Sized>(&self, h: &H, n: usize, t: f64, sampling: &SourceSampling) -> Vec<PhasePoint> {
        self.sample_grouped(h, n, t, sampling).into_iter().flatten().collect()
    }

    /// Samples grouped so that points in one group differ only in their momentum direction.
    pub fn sample_grouped<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        n: usize,
        t: f64,
        sampling: &SourceSampling,
    ) -> Vec<Vec<PhasePoint>> {
        let dirs = unit_directions(n, sampling.directions);
        match self {
            RegionDef::FiberSegment { x, s_lo, s_hi } => match sampling.energy {
                Some(e) => vec![dirs
                    .iter()
                    .filter_map(|u| {
                        radius_on_level(h, u, x, t, e, *s_lo, *s_hi).map(|r| PhasePoint::new(scale(u, r), x.clone()))
                    })
                    .collect()],
                None => linspace(*s_lo, *s_hi, sampling.radii)
                    .into_iter()
                    .map(|r| dirs.iter().map(|u| PhasePoint::new(scale(u, r), x.clone())).collect())
                    .collect(),
            },
            RegionDef::MomentumShell { s } => q_grid(n, sampling)
                .into_iter()
                .map(|q| dirs.iter().map(|u| PhasePoint::new(scale(u, *s), q.clone())).collect())
                .collect(),
            RegionDef::Custom(c) => vec![c.sample(sampling)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeparationError {
    #[error("region {0} produced no samples")]
    EmptySample(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    pub delta: f64,
    pub y0_samples: usize,
    pub y1_samples: usize,
    pub time_samples: usize,
}

/// `min_{Y1} H - max_{Y0} H` over samples, with `t` on `time_samples` points of one period.
pub fn delta_separation<H: Hamiltonian + ?Sized>(
    h: &H,
    y0: &RegionDef,
    y1: &RegionDef,
    n: usize,
    sampling: &SourceSampling,
    time_samples: usize,
) -> Result<Separation, SeparationError> {
    let times: Vec<f64> = if h.is_autonomous() {
        vec![0.0]
    } else {
        let k = time_samples.max(1);
        (0..k).map(|i| i as f64 / k as f64).collect()
    };
    let mut sup0 = f64::NEG_INFINITY;
    let mut inf1 = f64::INFINITY;
    let (mut c0, mut c1) = (0, 0);
    for &t in &times {
        for x in y0.sample(h, n, t, sampling) {
            sup0 = sup0.max(h.value(&x, t));
            c0 += 1;
        }
        for x in y1.sample(h, n, t, sampling) {
            inf1 = inf1.min(h.value(&x, t));
            c1 += 1;
        }
    }
    if c0 == 0 {
        return Err(SeparationError::EmptySample("Y0"));
    }
    if c1 == 0 {
        return Err(SeparationError::EmptySample("Y1"));
    }
    Ok(Separation {
        delta: inf1 - sup0,
        y0_samples: c0,
        y1_samples: c1,
        time_samples: times.len(),
    })
}
