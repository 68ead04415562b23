use lchpm_dynamics::hamiltonian::{Bump, Hamiltonian, HamiltonianDef, Potential};
use lchpm_dynamics::regions::{RegionDef, SourceSampling};
use lchpm_dynamics::{find_chord, integrate, recheck_chord, PhasePoint, ShootingGrid};

fn fiber(x: &[f64]) -> RegionDef {
    RegionDef::FiberSegment {
        x: x.to_vec(),
        s_lo: 1.0,
        s_hi: 3.0,
    }
}

fn grid(directions: usize, energy: Option<f64>) -> ShootingGrid {
    ShootingGrid {
        sampling: SourceSampling {
            directions,
            energy,
            ..SourceSampling::default()
        },
        ..ShootingGrid::default()
    }
}

fn mechanical() -> HamiltonianDef {
    HamiltonianDef::mechanical(Potential::CosProduct { amplitude: 0.3 })
}

/// Largest `|H(x(t)) - H(x(0))| / (step^4 t)` measured over the starts below was 9.9e-3.
const K_MECHANICAL: f64 = 1.2e-2;

#[test]
fn rk4_energy_drift_is_fourth_order() {
    let h = mechanical();
    let starts = [
        PhasePoint::new(vec![1.84, 0.0], vec![0.0, 0.0]),
        PhasePoint::new(vec![2.1, 0.9], vec![0.3, -0.2]),
        PhasePoint::new(vec![-0.5, 1.0], vec![0.7, 0.4]),
    ];
    for x0 in &starts {
        let e0 = h.value(x0, 0.0);
        for step in [0.1, 0.05, 0.02, 0.01] {
            let tr = integrate(&h, x0, 0.0, 3.0, step).unwrap();
            for (t, x) in tr.times.iter().zip(&tr.points).skip(1) {
                let drift = (h.value(x, *t) - e0).abs();
                assert!(drift <= K_MECHANICAL * step.powi(4) * t, "step {step}, t {t}: drift {drift:e}");
            }
        }
    }
    // The free flow is integrated exactly.
    let x0 = PhasePoint::new(vec![3.0, -1.0], vec![0.0, 0.0]);
    let tr = integrate(&HamiltonianDef::Free, &x0, 0.0, 2.0, 0.01).unwrap();
    let e0 = HamiltonianDef::Free.value(&x0, 0.0);
    assert!(tr.points.iter().all(|x| (HamiltonianDef::Free.value(x, 0.0) - e0).abs() < 1e-12));
}

#[test]
fn free_chord_time_improves_with_grid_density() {
    let target = [2.0, 0.7];
    let exact = (2.0f64).hypot(0.7) / 3.0;
    let mut errors = Vec::new();
    for directions in [64, 256, 1024] {
        let g = ShootingGrid {
            refine_iterations: 0,
            ..grid(directions, None)
        };
        // Without refinement the resolution of a grid is about three angular spacings.
        let tol = 3.0 * std::f64::consts::TAU / directions as f64;
        let res = find_chord(&HamiltonianDef::Free, &fiber(&[0.0, 0.0]), &fiber(&target), 3.0, &g, tol).unwrap();
        assert!(res.found, "{directions} directions");
        errors.push((res.time_length - exact).abs());
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[2] < 1e-4, "{errors:?}");
    // With refinement the chord is exact up to the event tolerance.
    let res = find_chord(&HamiltonianDef::Free, &fiber(&[0.0, 0.0]), &fiber(&target), 3.0, &grid(64, None), 1e-8).unwrap();
    assert!(res.found && (res.time_length - exact).abs() < 1e-8, "{}", res.time_length);
}

#[test]
fn found_chords_survive_a_finer_step() {
    let cases: Vec<(HamiltonianDef, ShootingGrid)> = vec![
        (HamiltonianDef::Free, grid(32, None)),
        (mechanical(), grid(64, Some(2.0))),
        (
            HamiltonianDef::TimePeriodic {
                base: Box::new(HamiltonianDef::Free),
                epsilon: 0.035,
                g: Potential::Bumps {
                    bumps: vec![Bump {
                        center: vec![1.0, 0.0],
                        radius: 0.5,
                        weight: 1.0,
                    }],
                },
            },
            ShootingGrid {
                t0_samples: 4,
                ..grid(16, None)
            },
        ),
    ];
    for (h, g) in &cases {
        let res = find_chord(h, &fiber(&[0.0, 0.0]), &fiber(&[2.0, 0.0]), 3.0, g, 1e-6).unwrap();
        assert!(res.found, "{h:?}");
        let t = recheck_chord(h, &fiber(&[2.0, 0.0]), &res, res.step / 2.0).expect("lost under a finer step");
        assert!((t - res.time_length).abs() / res.time_length < 1e-4, "{h:?}: {t} vs {}", res.time_length);
    }
}

#[test]
fn chord_search_is_deterministic() {
    let run = || {
        find_chord(&mechanical(), &fiber(&[0.0, 0.0]), &fiber(&[2.0, 0.0]), 3.0, &grid(64, Some(2.0)), 1e-6).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.time_length.to_bits(), b.time_length.to_bits());
    assert_eq!(a.start, b.start);
}

#[test]
fn a_missed_target_is_reported_not_invented() {
    // Horizon too short to reach the other fiber at any sampled speed.
    let res = find_chord(&HamiltonianDef::Free, &fiber(&[0.0, 0.0]), &fiber(&[2.0, 0.0]), 0.5, &grid(16, None), 1e-6).unwrap();
    assert!(!res.found);
}
