//! Chord search by shooting from a sampled source region.

use lchpm_core::rational::{to_f64_round_up, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{integrate, rk4_step, Trajectory};
use crate::hamiltonian::Hamiltonian;
use crate::phase::{dot, normalized, scale, sub, PhasePoint};
use crate::regions::{radius_on_level, RegionDef, RegionError, SourceSampling};

/// Width of the time bracket at which event bisection stops.
pub const EVENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChordError {
    #[error("source and target regions intersect")]
    NotDisjoint,
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Region(#[from] RegionError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootingGrid {
    pub sampling: SourceSampling,
    /// Start times `k / t0_samples`, `k < t0_samples`, for non-autonomous `H`.
    #[serde(default = "one")]
    pub t0_samples: usize,
    pub step: f64,
    /// Compass iterations spent on each refined start.
    #[serde(default = "default_refine")]
    pub refine_iterations: usize,
    /// Best grid shots per group handed to the refinement.
    #[serde(default = "one")]
    pub refine_candidates: usize,
}

fn one() -> usize {
    1
}

fn default_refine() -> usize {
    80
}

impl Default for ShootingGrid {
    fn default() -> Self {
        ShootingGrid {
            sampling: SourceSampling::default(),
            t0_samples: 1,
            step: 1e-3,
            refine_iterations: default_refine(),
            refine_candidates: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordResult {
    pub found: bool,
    pub start: PhasePoint,
    pub t0: f64,
    /// Time-length of the chord (of the best approach when nothing was found).
    pub time_length: f64,
    pub end_residual: f64,
    pub trajectory: Trajectory,
    pub shots: usize,
    pub tolerance: f64,
    pub step: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Shot {
    /// Hit time-length when the residual was within tolerance.
    hit: Option<f64>,
    /// Residual and time-length of the closest approach.
    residual: f64,
    time: f64,
}

impl Shot {
    fn better_than(&self, other: &Shot) -> bool {
        match (self.hit, other.hit) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => self.residual < other.residual,
        }
    }
}

/// Signed event function: a sign change brackets an approach (or a crossing).
fn event<H: Hamiltonian + ?Sized>(h: &H, target: &RegionDef, x: &PhasePoint, t: f64) -> Option<f64> {
    match target {
        RegionDef::FiberSegment { x: base, .. } => {
            let (qdot, _) = h.gradient(x, t);
            Some(dot(&sub(&x.q, base), &qdot))
        }
        RegionDef::MomentumShell { s } => Some(x.momentum_norm() - s),
        RegionDef::Custom(_) => None,
    }
}

fn bisect_event<H: Hamiltonian + ?Sized>(
    h: &H,
    target: &RegionDef,
    x: &PhasePoint,
    t: f64,
    dt: f64,
    g0: f64,
) -> (f64, PhasePoint) {
    let (mut lo, mut hi) = (0.0, dt);
    while hi - lo > EVENT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let y = rk4_step(h, x, t, mid);
        let g = event(h, target, &y, t + mid).unwrap_or(0.0);
        if (g >= 0.0) == (g0 >= 0.0) && g != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (hi, rk4_step(h, x, t, hi))
}

/// Golden-section search for the distance minimum on `[0, 2 dt]` from `x` at time `t`.
fn golden_min<H: Hamiltonian + ?Sized>(h: &H, target: &RegionDef, x: &PhasePoint, t: f64, dt: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let dist = |tau: f64| {
        let mut y = x.clone();
        let mut done = 0.0;
        while tau - done > 1e-15 {
            let s = (tau - done).min(dt);
            y = rk4_step(h, &y, t + done, s);
            done += s;
        }
        target.distance(&y)
    };
    let (mut a, mut b) = (0.0, 2.0 * dt);
    while b - a > EVENT_TOLERANCE {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if dist(c) < dist(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let tau = 0.5 * (a + b);
    (tau, dist(tau))
}

fn shoot<H: Hamiltonian + ?Sized>(
    h: &H,
    target: &RegionDef,
    start: &PhasePoint,
    t0: f64,
    horizon: f64,
    step: f64,
    tol: f64,
) -> Shot {
    let mut best = Shot {
        hit: None,
        residual: target.distance(start),
        time: 0.0,
    };
    let record = |best: &mut Shot, time: f64, residual: f64| -> bool {
        if residual <= tol {
            best.hit = Some(time);
            best.residual = residual;
            best.time = time;
            return true;
        }
        if residual < best.residual {
            best.residual = residual;
            best.time = time;
        }
        false
    };

    let steps = (horizon / step).ceil() as usize;
    let mut x = start.clone();
    let mut t = t0;
    let mut g = event(h, target, &x, t);
    let mut prev: Option<(PhasePoint, f64, f64)> = None;
    let mut prev_dist = target.distance(&x);
    for k in 0..steps {
        let dt = step.min(t0 + horizon - t);
        if dt <= 0.0 {
            break;
        }
        let y = rk4_step(h, &x, t, dt);
        if !y.is_finite() {
            break;
        }
        match g {
            Some(g0) => {
                let g1 = event(h, target, &y, t + dt).unwrap_or(0.0);
                let fires = match target {
                    RegionDef::FiberSegment { .. } => g0 < 0.0 && g1 >= 0.0,
                    _ => (g0 < 0.0) != (g1 < 0.0) || g1 == 0.0,
                };
                if fires {
                    let (tau, z) = bisect_event(h, target, &x, t, dt, g0);
                    if record(&mut best, t + tau - t0, target.distance(&z)) {
                        return best;
                    }
                }
                g = Some(g1);
            }
            None => {
                let d = target.distance(&y);
                if let Some((px, pt, pd)) = &prev {
                    if *pd > prev_dist && d >= prev_dist {
                        let (tau, r) = golden_min(h, target, px, *pt, step);
                        if record(&mut best, pt + tau - t0, r) {
                            return best;
                        }
                    }
                }
                prev = Some((x.clone(), t, prev_dist));
                prev_dist = d;
            }
        }
        x = y;
        t = t0 + step * (k + 1) as f64;
    }
    if g.is_none() {
        record(&mut best, t - t0, prev_dist);
    }
    best
}

/// Compass search over the momentum direction of `start`, keeping the energy level if asked.
#[allow(clippy::too_many_arguments)]
fn refine<H: Hamiltonian + ?Sized>(
    h: &H,
    source: &RegionDef,
    target: &RegionDef,
    start: &PhasePoint,
    t0: f64,
    horizon: f64,
    grid: &ShootingGrid,
    tol: f64,
) -> (PhasePoint, Shot, usize) {
    let n = start.dim();
    let radius = start.momentum_norm();
    let relevel = |u: &[f64]| -> Option<PhasePoint> {
        let r = match (source, grid.sampling.energy) {
            (RegionDef::FiberSegment { s_lo, s_hi, .. }, Some(e)) => radius_on_level(h, u, &start.q, t0, e, *s_lo, *s_hi)?,
            _ => radius,
        };
        Some(PhasePoint::new(scale(u, r), start.q.clone()))
    };
    let mut u = normalized(&start.p);
    let mut point = start.clone();
    let mut shot = shoot(h, target, &point, t0, horizon, grid.step, tol);
    let mut shots = 1;
    let mut delta = 2.0 * std::f64::consts::PI / grid.sampling.directions.max(4) as f64;
    for _ in 0..grid.refine_iterations {
        if shot.hit.is_some() || delta < 1e-14 {
            break;
        }
        let mut improved = false;
        let candidates: Vec<Vec<f64>> = if n == 2 {
            [delta, -delta]
                .iter()
                .map(|a| vec![u[0] * a.cos() - u[1] * a.sin(), u[0] * a.sin() + u[1] * a.cos()])
                .collect()
        } else {
            (0..n)
                .flat_map(|i| {
                    [delta, -delta].map(|a| {
                        let mut v = u.clone();
                        v[i] += a;
                        normalized(&v)
                    })
                })
                .collect()
        };
        for v in candidates {
            let Some(p) = relevel(&v) else { continue };
            let s = shoot(h, target, &p, t0, horizon, grid.step, tol);
            shots += 1;
            if s.better_than(&shot) {
                shot = s;
                point = p;
                u = v;
                improved = true;
                break;
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    (point, shot, shots)
}

/// Shoot from grid samples of `source` and return the shortest chord reaching `target`.
///
/// `found = false` only means the search was exhausted at this resolution.
pub fn find_chord<H: Hamiltonian + ?Sized>(
    h: &H,
    source: &RegionDef,
    target: &RegionDef,
    horizon: f64,
    grid: &ShootingGrid,
    tol: f64,
) -> Result<ChordResult, ChordError> {
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(ChordError::BadHorizon(horizon));
    }
    if grid.step.is_nan() || grid.step <= 0.0 {
        return Err(ChordError::BadStep(grid.step));
    }
    if source.disjoint_from(target) == Some(false) {
        return Err(ChordError::NotDisjoint);
    }
    let n = match (source, target) {
        (RegionDef::FiberSegment { x, .. }, _) | (_, RegionDef::FiberSegment { x, .. }) => x.len(),
        _ => grid.sampling.q_center.as_ref().map_or(2, Vec::len),
    };
    source.validate(n)?;
    target.validate(n)?;

    let t0s: Vec<f64> = if h.is_autonomous() {
        vec![0.0]
    } else {
        let k = grid.t0_samples.max(1);
        (0..k).map(|i| i as f64 / k as f64).collect()
    };
    // (t0, group, start)
    let mut starts: Vec<(f64, usize, PhasePoint)> = Vec::new();
    let mut groups = 0;
    for &t0 in &t0s {
        for group in source.sample_grouped(h, n, t0, &grid.sampling) {
            starts.extend(group.into_iter().map(|x| (t0, groups, x)));
            groups += 1;
        }
    }
    let shots: Vec<Shot> = starts
        .par_iter()
        .map(|(t0, _, x)| shoot(h, target, x, *t0, horizon, grid.step, tol))
        .collect();

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    if grid.refine_iterations > 0 && !matches!(source, RegionDef::Custom(_)) {
        for g in 0..groups {
            let mut members: Vec<usize> = (0..starts.len()).filter(|&i| starts[i].1 == g).collect();
            members.sort_by(|&a, &b| {
                shots[a]
                    .residual
                    .total_cmp(&shots[b].residual)
                    .then(a.cmp(&b))
            });
            candidates.extend(members.into_iter().take(grid.refine_candidates).map(|i| (g, i)));
        }
    }
    let refined: Vec<(PhasePoint, Shot, usize)> = candidates
        .par_iter()
        .map(|&(_, i)| {
            let (t0, _, x) = &starts[i];
            refine(h, source, target, x, *t0, horizon, grid, tol)
        })
        .collect();

    // Deterministic merge: best shot, ties broken by position in the list.
    let mut pool: Vec<(PhasePoint, f64, Shot)> = starts
        .iter()
        .zip(&shots)
        .map(|((t0, _, x), s)| (x.clone(), *t0, *s))
        .collect();
    let mut total = pool.len();
    for ((_, i), (x, s, count)) in candidates.iter().zip(refined) {
        pool.push((x, starts[*i].0, s));
        total += count;
    }
    let Some(best) = pool
        .iter()
        .enumerate()
        .fold(None::<usize>, |acc, (i, item)| match acc {
            Some(j) if !item.2.better_than(&pool[j].2) => Some(j),
            _ => Some(i),
        })
    else {
        let start = PhasePoint::new(vec![f64::NAN; n], vec![f64::NAN; n]);
        return Ok(ChordResult {
            found: false,
            trajectory: Trajectory {
                times: vec![0.0],
                points: vec![start.clone()],
            },
            start,
            t0: 0.0,
            time_length: f64::NAN,
            end_residual: f64::INFINITY,
            shots: 0,
            tolerance: tol,
            step: grid.step,
            horizon,
        });
    };
    let (start, t0, shot) = pool[best].clone();
    let trajectory = integrate(h, &start, t0, t0 + shot.time.max(f64::MIN_POSITIVE), grid.step)
        .unwrap_or_else(|_| Trajectory {
            times: vec![t0],
            points: vec![start.clone()],
        });
    Ok(ChordResult {
        found: shot.hit.is_some(),
        end_residual: target.distance(trajectory.last()),
        start,
        t0,
        time_length: shot.time,
        trajectory,
        shots: total,
        tolerance: tol,
        step: grid.step,
        horizon,
    })
}

/// Re-shoots a found chord's start with step `step` and returns the new time-length.
pub fn recheck_chord<H: Hamiltonian + ?Sized>(h: &H, target: &RegionDef, result: &ChordResult, step: f64) -> Option<f64> {
    let horizon = (result.time_length * 1.5).min(result.horizon).max(result.time_length + 10.0 * step);
    shoot(h, target, &result.start, result.t0, horizon, step, 2.0 * result.tolerance).hit
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("no chord was found, nothing to compare with the bound")]
    ChordMissing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    pub measured: f64,
    /// The rational bound rounded up to the next double.
    pub bound: f64,
    pub slack: f64,
    pub allowed: f64,
}

/// Pass iff `T <= bound (1 + slack)`. The bound is rounded up, never down.
pub fn verify_bound(result: &ChordResult, bound: &Rational, slack: f64) -> Result<BoundCheck, VerifyError> {
    if !result.found {
        return Err(VerifyError::ChordMissing);
    }
    Ok(check_time(result.time_length, bound, slack))
}

pub fn check_time(measured: f64, bound: &Rational, slack: f64) -> BoundCheck {
    let b = to_f64_round_up(bound);
    let allowed = (b * (1.0 + slack)).next_up();
    BoundCheck {
        pass: measured <= allowed,
        measured,
        bound: b,
        slack,
        allowed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianDef;
    use lchpm_core::rational::rat;

    fn fiber(x: f64) -> RegionDef {
        RegionDef::FiberSegment {
            x: vec![x, 0.0],
            s_lo: 1.0,
            s_hi: 3.0,
        }
    }

    fn grid(directions: usize) -> ShootingGrid {
        ShootingGrid {
            sampling: SourceSampling {
                directions,
                radii: 5,
                ..SourceSampling::default()
            },
            ..ShootingGrid::default()
        }
    }

    #[test]
    fn free_chord_is_the_fast_straight_line() {
        let res = find_chord(&HamiltonianDef::Free, &fiber(0.0), &fiber(2.0), 3.0, &grid(16), 1e-6).unwrap();
        assert!(res.found);
        assert!((res.time_length - 2.0 / 3.0).abs() < 1e-6, "{}", res.time_length);
        assert!(res.end_residual <= 1e-6);
        assert!((res.start.momentum_norm() - 3.0).abs() < 1e-12);
        let fine = recheck_chord(&HamiltonianDef::Free, &fiber(2.0), &res, res.step / 2.0).unwrap();
        assert!((fine - res.time_length).abs() / res.time_length < 1e-4);
    }

    #[test]
    fn same_region_is_rejected() {
        let err = find_chord(&HamiltonianDef::Free, &fiber(0.0), &fiber(0.0), 1.0, &grid(8), 1e-6);
        assert_eq!(err.unwrap_err(), ChordError::NotDisjoint);
    }

    #[test]
    fn no_chord_between_shells_under_free_flow() {
        let g = ShootingGrid {
            sampling: SourceSampling {
                directions: 8,
                q_per_axis: 3,
                ..SourceSampling::default()
            },
            ..ShootingGrid::default()
        };
        let res = find_chord(
            &HamiltonianDef::Free,
            &RegionDef::MomentumShell { s: 1.0 },
            &RegionDef::MomentumShell { s: 3.0 },
            2.0,
            &g,
            1e-6,
        )
        .unwrap();
        assert!(!res.found);
        assert!(res.end_residual > 1.0);
    }

    #[test]
    fn bad_parameters() {
        let h = HamiltonianDef::Free;
        assert!(matches!(
            find_chord(&h, &fiber(0.0), &fiber(2.0), 0.0, &grid(8), 1e-6),
            Err(ChordError::BadHorizon(_))
        ));
        let bad = RegionDef::FiberSegment {
            x: vec![2.0, 0.0],
            s_lo: 3.0,
            s_hi: 1.0,
        };
        assert!(find_chord(&h, &fiber(0.0), &bad, 1.0, &grid(8), 1e-6).is_err());
    }

    fn with_time(t: f64) -> ChordResult {
        let x = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 0.0]);
        ChordResult {
            found: true,
            start: x.clone(),
            t0: 0.0,
            time_length: t,
            end_residual: 0.0,
            trajectory: Trajectory {
                times: vec![0.0],
                points: vec![x],
            },
            shots: 1,
            tolerance: 1e-6,
            step: 1e-3,
            horizon: 2.0,
        }
    }

    #[test]
    fn bound_verdicts() {
        let one = rat(1, 1);
        assert!(verify_bound(&with_time(2.0 / 3.0), &one, 0.0).unwrap().pass);
        assert!(!verify_bound(&with_time(1.01), &one, 0.0).unwrap().pass);
        assert!(verify_bound(&with_time(1.0005), &one, 1e-3).unwrap().pass);
        assert!(verify_bound(&with_time(1.0), &one, 0.0).unwrap().pass);
        let mut missing = with_time(1.0);
        missing.found = false;
        assert_eq!(verify_bound(&missing, &one, 0.0), Err(VerifyError::ChordMissing));
    }

    #[test]
    fn rounding_never_tightens() {
        let third = rat(1, 3);
        let check = check_time(1.0 / 3.0, &third, 0.0);
        assert!(check.pass);
        assert!(check.bound >= 1.0 / 3.0);
    }
}
