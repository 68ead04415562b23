//! Closed-form bounds: the pb+ lower bound, chord time-length bounds and their
//! applicability conditions. Exact rational arithmetic throughout.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::persistence::Ratio;
use crate::rational::{format_rational, Action, Extended, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("need 0 < s- < s+, got s- = {s_minus}, s+ = {s_plus}")]
    DegenerateCobordism { s_minus: String, s_plus: String },
    #[error("separation {0} is not positive")]
    NotSeparating(String),
    #[error("parameter {name} = {value} is outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("l_min was computed at s = {got}, but the bound needs s = {expected}")]
    RatioMismatch { expected: String, got: String },
    #[error("no grid point s satisfies s > C / inf h = {0}")]
    EmptyGrid(String),
    #[error("need 0 < |a| < |A|, got |a| = {a}, |A| = {big_a}")]
    OrderingViolation { a: String, big_a: String },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: String },
}

/// An `l_min,s` value together with the `s` it was computed at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedLMin {
    pub value: Extended<Action>,
    pub ratio: Ratio,
}

impl TaggedLMin {
    pub fn new(value: Extended<Action>, ratio: Ratio) -> Self {
        TaggedLMin { value, ratio }
    }

    /// Tags `value` with the ratio `s_plus / s_minus`.
    pub fn at_window(value: Extended<Action>, s_minus: &Rational, s_plus: &Rational) -> Self {
        TaggedLMin::new(value, Extended::Finite(s_plus / s_minus))
    }

    fn check_window(&self, s_minus: &Rational, s_plus: &Rational) -> Result<(), BoundsError> {
        let expected = Extended::Finite(s_plus / s_minus);
        if self.ratio != expected {
            return Err(BoundsError::RatioMismatch {
                expected: expected.to_string(),
                got: self.ratio.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub formula_id: &'static str,
    pub value: Extended<Rational>,
    pub applicable: bool,
    pub violated_conditions: Vec<String>,
    /// Named intermediate quantities (for example `E`, `T`, `threshold`).
    pub extras: Vec<(String, Rational)>,
    /// Which branch produced the value, where there is a choice.
    pub branch: Option<String>,
}

impl BoundReport {
    fn new(formula_id: &'static str, value: Extended<Rational>, violated: Vec<String>) -> Self {
        BoundReport {
            formula_id,
            value,
            applicable: violated.is_empty(),
            violated_conditions: violated,
            extras: Vec::new(),
            branch: None,
        }
    }

    pub fn extra(&self, name: &str) -> Option<&Rational> {
        self.extras.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formula     {}", self.formula_id)?;
        writeln!(f, "value       {}", self.value)?;
        writeln!(f, "applicable  {}", if self.applicable { "yes" } else { "no" })?;
        for c in &self.violated_conditions {
            writeln!(f, "violated    {c}")?;
        }
        for (name, v) in &self.extras {
            writeln!(f, "{name:<11} {}", format_rational(v))?;
        }
        if let Some(b) = &self.branch {
            writeln!(f, "branch      {b}")?;
        }
        Ok(())
    }
}

fn check_cobordism(s_minus: &Rational, s_plus: &Rational) -> Result<(), BoundsError> {
    if !s_minus.is_positive() || s_minus >= s_plus {
        return Err(BoundsError::DegenerateCobordism {
            s_minus: format_rational(s_minus),
            s_plus: format_rational(s_plus),
        });
    }
    Ok(())
}

/// `inf_{Y1} H - sup_{Y0} H`.
pub fn delta_separation_value(inf_on_y1: &Rational, sup_on_y0: &Rational) -> Rational {
    inf_on_y1 - sup_on_y0
}

/// `pb+ >= 1 / ((s+ - s-) l)` with `l = l_min` at ratio `s+/s-`.
///
/// With `l = inf` the hypothesis fails and the reported value is the trivial bound 0.
pub fn pb_plus_lower_bound(l: &TaggedLMin, s_minus: &Rational, s_plus: &Rational) -> Result<BoundReport, BoundsError> {
    check_cobordism(s_minus, s_plus)?;
    l.check_window(s_minus, s_plus)?;
    Ok(match &l.value {
        Extended::Finite(lv) if !lv.is_zero() => BoundReport::new(
            "pb_plus_lower",
            Extended::Finite(((s_plus - s_minus) * lv.value()).recip()),
            vec![],
        ),
        _ => BoundReport::new(
            "pb_plus_lower",
            Extended::Finite(Rational::zero()),
            vec!["0 < l_min < inf".into()],
        ),
    })
}

/// Time-length bound `(s+ - s-) l / delta` for an autonomous separating Hamiltonian.
pub fn chord_bound_autonomous(
    l: &TaggedLMin,
    s_minus: &Rational,
    s_plus: &Rational,
    delta: &Rational,
) -> Result<BoundReport, BoundsError> {
    check_cobordism(s_minus, s_plus)?;
    l.check_window(s_minus, s_plus)?;
    if !delta.is_positive() {
        return Err(BoundsError::NotSeparating(format_rational(delta)));
    }
    Ok(match &l.value {
        Extended::Finite(lv) => BoundReport::new(
            "chord_autonomous",
            Extended::Finite((s_plus - s_minus) * lv.value() / delta),
            vec![],
        ),
        Extended::Infinite => BoundReport::new("chord_autonomous", Extended::Infinite, vec!["l_min < inf".into()]),
    })
}

/// Inputs of [`chord_bound_timedep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeDepInput {
    /// The stabilized invariant at ratio `s_plus / s_minus`.
    pub l_hat: TaggedLMin,
    pub s_minus: Rational,
    pub s_plus: Rational,
    pub delta: Rational,
    pub e: Rational,
    /// Supremum of `|dH/dt|` over `c_min - E <= H <= c_max + E`.
    pub sup_dhdt: Rational,
    pub c_min: Rational,
    pub c_max: Rational,
}

/// Time-dependent bound `T = (s+ - s-) l_hat / ((1 - 2e) delta)`, applicable when
/// `sup |dH/dt| < E / T` with `E = e delta`.
pub fn chord_bound_timedep(input: &TimeDepInput) -> Result<BoundReport, BoundsError> {
    let TimeDepInput {
        l_hat,
        s_minus,
        s_plus,
        delta,
        e,
        sup_dhdt,
        c_min,
        c_max,
    } = input;
    check_cobordism(s_minus, s_plus)?;
    l_hat.check_window(s_minus, s_plus)?;
    let half = Rational::new(1.into(), 2.into());
    if !e.is_positive() || e >= &half {
        return Err(BoundsError::ParameterOutOfRange {
            name: "e",
            value: format_rational(e),
            range: "(0, 1/2)",
        });
    }
    if sup_dhdt.is_negative() {
        return Err(BoundsError::ParameterOutOfRange {
            name: "sup|dH/dt|",
            value: format_rational(sup_dhdt),
            range: "[0, inf)",
        });
    }

    let mut violated = Vec::new();
    if !delta.is_positive() {
        violated.push("delta > 0".to_string());
    }
    let Extended::Finite(l) = &l_hat.value else {
        violated.push("l_hat < inf".to_string());
        return Ok(BoundReport::new("chord_timedep", Extended::Infinite, violated));
    };
    if !violated.is_empty() {
        return Ok(BoundReport::new("chord_timedep", Extended::Infinite, violated));
    }
    let big_e = e * delta;
    let t = (s_plus - s_minus) * l.value() / ((Rational::one() - e * Rational::from_integer(2.into())) * delta);
    let mut extras = vec![
        ("E".to_string(), big_e.clone()),
        ("T".to_string(), t.clone()),
        ("window_lo".to_string(), c_min - &big_e),
        ("window_hi".to_string(), c_max + &big_e),
    ];
    let threshold = if t.is_zero() { None } else { Some(&big_e / &t) };
    match &threshold {
        Some(th) => {
            if sup_dhdt >= th {
                violated.push(format!(
                    "sup|dH/dt| = {} < E/T = {}",
                    format_rational(sup_dhdt),
                    format_rational(th)
                ));
            }
            extras.push(("threshold".to_string(), th.clone()));
        }
        None => {}
    }
    let mut report = BoundReport::new("chord_timedep", Extended::Finite(t), violated);
    report.extras = extras;
    Ok(report)
}

/// Cooperative-Hamiltonian bound: the minimum over grid points `s > C / inf_h` of
/// `(s - 1) l_min,s / (s inf_h - C)`, and of `l_min,inf / inf_h` when that is finite.
pub fn cooperative_bound(
    l_min_fn: impl Fn(&Rational) -> Extended<Action>,
    grid: &[Rational],
    inf_h: &Rational,
    c_up: &Rational,
    l_min_inf: &Extended<Action>,
) -> Result<BoundReport, BoundsError> {
    if !inf_h.is_positive() {
        return Err(BoundsError::NonPositive {
            name: "inf h",
            value: format_rational(inf_h),
        });
    }
    if c_up <= inf_h {
        return Err(BoundsError::ParameterOutOfRange {
            name: "C",
            value: format_rational(c_up),
            range: "(inf h, inf)",
        });
    }
    let s_min = c_up / inf_h;
    let qualifying: Vec<&Rational> = grid.iter().filter(|s| *s > &s_min).collect();
    if qualifying.is_empty() {
        return Err(BoundsError::EmptyGrid(format_rational(&s_min)));
    }

    let mut best: Option<(Rational, String)> = None;
    let mut consider = |v: Rational, branch: String| {
        if best.as_ref().is_none_or(|(b, _)| &v < b) {
            best = Some((v, branch));
        }
    };
    for s in qualifying {
        if let Extended::Finite(l) = l_min_fn(s) {
            let v = (s - Rational::one()) * l.value() / (s * inf_h - c_up);
            consider(v, format!("grid s={}", format_rational(s)));
        }
    }
    let mu = l_min_inf.finite().map(|l| l.value() / inf_h);
    if let Some(mu) = &mu {
        consider(mu.clone(), "mu".to_string());
    }

    let mut report = match best {
        Some((v, branch)) => {
            let mut r = BoundReport::new("cooperative", Extended::Finite(v), vec![]);
            r.branch = Some(branch);
            r
        }
        None => BoundReport::new("cooperative", Extended::Infinite, vec!["some l_min,s < inf".into()]),
    };
    if let Some(mu) = mu {
        report.extras.push(("mu".to_string(), mu));
    }
    Ok(report)
}

/// Two-chord bound `|a| (|A| - |a|) / (|A| c - |a| C)`, applicable when `C / c < |A| / |a|`.
pub fn two_chords_bound(
    a_len: &Action,
    big_a_len: &Action,
    c_low: &Rational,
    c_up: &Rational,
) -> Result<BoundReport, BoundsError> {
    if a_len.is_zero() || a_len >= big_a_len {
        return Err(BoundsError::OrderingViolation {
            a: a_len.to_string(),
            big_a: big_a_len.to_string(),
        });
    }
    if !c_low.is_positive() {
        return Err(BoundsError::NonPositive {
            name: "c",
            value: format_rational(c_low),
        });
    }
    if c_up < c_low {
        return Err(BoundsError::ParameterOutOfRange {
            name: "C",
            value: format_rational(c_up),
            range: "[c, inf)",
        });
    }
    let (a, big) = (a_len.value(), big_a_len.value());
    let denom = big * c_low - a * c_up;
    if !denom.is_positive() {
        return Ok(BoundReport::new(
            "two_chords",
            Extended::Infinite,
            vec![format!(
                "C/c = {} < |A|/|a| = {}",
                format_rational(&(c_up / c_low)),
                format_rational(&(big / a))
            )],
        ));
    }
    Ok(BoundReport::new(
        "two_chords",
        Extended::Finite(a * (big - a) / denom),
        vec![],
    ))
}

/// `1 / (p delta)`: chord time-length from a pb+ lower bound `p`.
pub fn chord_time_vs_pb(p: &Rational, delta: &Rational) -> Result<Rational, BoundsError> {
    for (name, v) in [("p", p), ("delta", delta)] {
        if !v.is_positive() {
            return Err(BoundsError::NonPositive {
                name,
                value: format_rational(v),
            });
        }
    }
    Ok((p * delta).recip())
}
