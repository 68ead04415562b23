//! Hamiltonians on `R^2n x S^1` (period 1 in time) and the potentials they are built from.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::phase::{dot, norm, PhasePoint};

/// Step of the central differences used by the default gradient methods.
pub const FD_STEP: f64 = 1e-6;

pub trait Hamiltonian: Sync {
    fn value(&self, x: &PhasePoint, t: f64) -> f64;

    /// `(dH/dp, dH/dq)`. The default is a central difference with step [`FD_STEP`].
    fn gradient(&self, x: &PhasePoint, t: f64) -> (Vec<f64>, Vec<f64>) {
        let n = x.dim();
        let mut gp = vec![0.0; n];
        let mut gq = vec![0.0; n];
        let mut y = x.clone();
        for i in 0..n {
            let p0 = y.p[i];
            y.p[i] = p0 + FD_STEP;
            let hi = self.value(&y, t);
            y.p[i] = p0 - FD_STEP;
            let lo = self.value(&y, t);
            y.p[i] = p0;
            gp[i] = (hi - lo) / (2.0 * FD_STEP);

            let q0 = y.q[i];
            y.q[i] = q0 + FD_STEP;
            let hi = self.value(&y, t);
            y.q[i] = q0 - FD_STEP;
            let lo = self.value(&y, t);
            y.q[i] = q0;
            gq[i] = (hi - lo) / (2.0 * FD_STEP);
        }
        (gp, gq)
    }

    fn time_derivative(&self, x: &PhasePoint, t: f64) -> f64 {
        (self.value(x, t + FD_STEP) - self.value(x, t - FD_STEP)) / (2.0 * FD_STEP)
    }

    fn is_autonomous(&self) -> bool {
        true
    }

    /// An upper bound for `|dH/dt|` over all of phase space, when one is known in closed form.
    fn sup_time_derivative(&self) -> Option<f64> {
        self.is_autonomous().then_some(0.0)
    }
}

/// Smooth compactly supported bump `(1 - r^2/rho^2)^3` on `r < rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub weight: f64,
}

impl Bump {
    pub fn profile(r: f64, radius: f64) -> f64 {
        if r >= radius {
            0.0
        } else {
            let s = 1.0 - (r * r) / (radius * radius);
            s * s * s
        }
    }

    fn value(&self, q: &[f64]) -> f64 {
        let d: Vec<f64> = q.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.weight * Bump::profile(norm(&d), self.radius)
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        let d: Vec<f64> = q.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let r2 = dot(&d, &d);
        let rho2 = self.radius * self.radius;
        if r2 >= rho2 {
            return;
        }
        // d/dq (1 - r^2/rho^2)^3 = -6 (1 - r^2/rho^2)^2 (q - c) / rho^2
        let s = 1.0 - r2 / rho2;
        let c = -6.0 * s * s / rho2 * self.weight;
        out.iter_mut().zip(&d).for_each(|(o, di)| *o += c * di);
    }
}

/// Potentials `U(q)` with analytic gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Constant { value: f64 },
    /// `amplitude * prod_i cos(q_i)`
    CosProduct { amplitude: f64 },
    Bumps { bumps: Vec<Bump> },
}

impl Potential {
    pub fn value(&self, q: &[f64]) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::CosProduct { amplitude } => amplitude * q.iter().map(|x| x.cos()).product::<f64>(),
            Potential::Bumps { bumps } => bumps.iter().map(|b| b.value(q)).sum(),
        }
    }

    pub fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; q.len()];
        match self {
            Potential::Constant { .. } => {}
            Potential::CosProduct { amplitude } => {
                for (i, gi) in g.iter_mut().enumerate() {
                    let others: f64 = q
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, x)| x.cos())
                        .product();
                    *gi = -amplitude * q[i].sin() * others;
                }
            }
            Potential::Bumps { bumps } => bumps.iter().for_each(|b| b.gradient(q, &mut g)),
        }
        g
    }

    /// Upper bound for `|U|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Potential::Constant { value } => value.abs(),
            Potential::CosProduct { amplitude } => amplitude.abs(),
            Potential::Bumps { bumps } => bumps.iter().map(|b| b.weight.abs()).sum(),
        }
    }

    /// Upper bound for `sup U`.
    pub fn sup(&self) -> f64 {
        match self {
            Potential::Bumps { bumps } => bumps.iter().map(|b| b.weight.max(0.0)).sum(),
            other => other.sup_abs(),
        }
    }

    /// Lower bound for `inf U`.
    pub fn inf(&self) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::Bumps { bumps } => bumps.iter().map(|b| b.weight.min(0.0)).sum(),
            other => -other.sup_abs(),
        }
    }
}

/// Contact Hamiltonians `h(theta, q)` on the unit cotangent bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ContactHamiltonian {
    /// `h = u(q)`, independent of the direction.
    Position { u: Potential },
}

impl ContactHamiltonian {
    pub fn reeb() -> Self {
        ContactHamiltonian::Position {
            u: Potential::Constant { value: 1.0 },
        }
    }

    fn value(&self, _theta: &[f64], q: &[f64]) -> f64 {
        match self {
            ContactHamiltonian::Position { u } => u.value(q),
        }
    }

    fn gradient_theta(&self, theta: &[f64], _q: &[f64]) -> Vec<f64> {
        match self {
            ContactHamiltonian::Position { .. } => vec![0.0; theta.len()],
        }
    }

    fn gradient_q(&self, _theta: &[f64], q: &[f64]) -> Vec<f64> {
        match self {
            ContactHamiltonian::Position { u } => u.gradient(q),
        }
    }
}

/// The Hamiltonian families used by the bundled scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianDef {
    /// `|p|^2 / 2`
    Free,
    /// `|p|^2 / 2 + U(q)`
    Mechanical { potential: Potential },
    /// `|P| h(P/|P|, q)`, the 1-homogeneous lift of a contact Hamiltonian.
    HomogeneousContact { h: ContactHamiltonian },
    /// `base + epsilon sin(2 pi t) g(q)`
    TimePeriodic {
        base: Box<HamiltonianDef>,
        epsilon: f64,
        g: Potential,
    },
}

impl HamiltonianDef {
    pub fn mechanical(potential: Potential) -> Self {
        HamiltonianDef::Mechanical { potential }
    }
}

impl Hamiltonian for HamiltonianDef {
    fn value(&self, x: &PhasePoint, t: f64) -> f64 {
        match self {
            HamiltonianDef::Free => 0.5 * dot(&x.p, &x.p),
            HamiltonianDef::Mechanical { potential } => 0.5 * dot(&x.p, &x.p) + potential.value(&x.q),
            HamiltonianDef::HomogeneousContact { h } => {
                let r = norm(&x.p);
                let theta: Vec<f64> = x.p.iter().map(|v| v / r).collect();
                r * h.value(&theta, &x.q)
            }
            HamiltonianDef::TimePeriodic { base, epsilon, g } => {
                base.value(x, t) + epsilon * (2.0 * PI * t).sin() * g.value(&x.q)
            }
        }
    }

    fn gradient(&self, x: &PhasePoint, t: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            HamiltonianDef::Free => (x.p.clone(), vec![0.0; x.dim()]),
            HamiltonianDef::Mechanical { potential } => (x.p.clone(), potential.gradient(&x.q)),
            HamiltonianDef::HomogeneousContact { h } => {
                let r = norm(&x.p);
                let theta: Vec<f64> = x.p.iter().map(|v| v / r).collect();
                let hv = h.value(&theta, &x.q);
                let gt = h.gradient_theta(&theta, &x.q);
                // dH/dP = h theta + (I - theta theta^T) dh/dtheta
                let radial = dot(&theta, &gt);
                let gp = theta
                    .iter()
                    .zip(&gt)
                    .map(|(th, g)| hv * th + g - radial * th)
                    .collect();
                let gq = h.gradient_q(&theta, &x.q).iter().map(|v| r * v).collect();
                (gp, gq)
            }
            HamiltonianDef::TimePeriodic { base, epsilon, g } => {
                let (gp, mut gq) = base.gradient(x, t);
                let c = epsilon * (2.0 * PI * t).sin();
                gq.iter_mut().zip(g.gradient(&x.q)).for_each(|(a, b)| *a += c * b);
                (gp, gq)
            }
        }
    }

    fn time_derivative(&self, x: &PhasePoint, t: f64) -> f64 {
        match self {
            HamiltonianDef::TimePeriodic { base, epsilon, g } => {
                base.time_derivative(x, t) + 2.0 * PI * epsilon * (2.0 * PI * t).cos() * g.value(&x.q)
            }
            _ => 0.0,
        }
    }

    fn is_autonomous(&self) -> bool {
        match self {
            HamiltonianDef::TimePeriodic { base, epsilon, .. } => *epsilon == 0.0 && base.is_autonomous(),
            _ => true,
        }
    }

    fn sup_time_derivative(&self) -> Option<f64> {
        match self {
            HamiltonianDef::TimePeriodic { base, epsilon, g } => {
                Some(base.sup_time_derivative()? + 2.0 * PI * epsilon.abs() * g.sup_abs())
            }
            _ => Some(0.0),
        }
    }
}
