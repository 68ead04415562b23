//! Points of `R^2n` with coordinates `(p, q)` and small vector helpers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PhasePoint {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Self {
        assert_eq!(p.len(), q.len(), "p and q must have the same dimension");
        assert!(!p.is_empty(), "dimension must be at least 1");
        PhasePoint { p, q }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(&self.q).all(|x| x.is_finite())
    }

    pub fn momentum_norm(&self) -> f64 {
        norm(&self.p)
    }

    /// `self + h * (dp, dq)`.
    pub fn offset(&self, dp: &[f64], dq: &[f64], h: f64) -> PhasePoint {
        PhasePoint {
            p: self.p.iter().zip(dp).map(|(a, b)| a + h * b).collect(),
            q: self.q.iter().zip(dq).map(|(a, b)| a + h * b).collect(),
        }
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        let dp = sub(&self.p, &other.p);
        let dq = sub(&self.q, &other.q);
        (dot(&dp, &dp) + dot(&dq, &dq)).sqrt()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}
