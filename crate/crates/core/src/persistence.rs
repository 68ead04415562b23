//! Barcodes of persistence modules over `(0, +inf)`, their shifts and rank function,
//! and the barcode-derived invariants `l_min,s` and homological bondedness.
//!
//! Bars are left-open and right-closed, `(birth, death]`, matching a filtration by
//! strict sublevels `A_r = span{ monomials of action < r }`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Action, Extended, Rational, RationalError};
use crate::z2_linalg::{reduce, Z2Column, Z2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersistenceError {
    #[error("basis has {basis} entries but {boundaries} boundary columns were supplied")]
    LengthMismatch { basis: usize, boundaries: usize },
    #[error("basis is not sorted by action at position {0}")]
    NotSorted(usize),
    #[error("boundary of basis element {column} contains element {row} whose action is not strictly smaller")]
    ActionNotLowered { column: usize, row: usize },
    #[error("basis element {position} has action {action}, not below the truncation bound {r_max}")]
    BasisBeyondTruncation { position: usize, action: String, r_max: String },
    #[error("query parameter {t} exceeds the truncation bound {truncation}")]
    BeyondTruncation { t: String, truncation: String },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Z2(#[from] Z2Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarcodeParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: {source}")]
    Number { line: usize, source: RationalError },
}

/// Right end of a bar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Death {
    Finite(Action),
    Infinite,
    /// Alive at the truncation bound `r`; the true death (if any) is `>= r` and unknown.
    Censored(Action),
}

impl Death {
    fn sort_key(&self) -> (Option<&Action>, u8) {
        match self {
            Death::Finite(a) => (Some(a), 0),
            Death::Censored(a) => (Some(a), 1),
            Death::Infinite => (None, 2),
        }
    }

    /// Whether the bar is known to be alive at parameter `t`.
    fn alive_at(&self, t: &Action) -> bool {
        match self {
            Death::Finite(b) | Death::Censored(b) => t <= b,
            Death::Infinite => true,
        }
    }
}

impl Ord for Death {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, ka) = self.sort_key();
        let (b, kb) = other.sort_key();
        match (a, b) {
            (Some(x), Some(y)) => x.cmp(y).then(ka.cmp(&kb)),
            _ => ka.cmp(&kb),
        }
    }
}

impl PartialOrd for Death {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(a) => a.fmt(f),
            Death::Infinite => f.write_str("inf"),
            Death::Censored(a) => write!(f, "cens@{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bar {
    pub birth: Action,
    pub death: Death,
    pub multiplicity: u64,
}

impl Bar {
    pub fn new(birth: Action, death: Death, multiplicity: u64) -> Self {
        Bar {
            birth,
            death,
            multiplicity,
        }
    }

    pub fn finite(birth: Action, death: Action) -> Self {
        Bar::new(birth, Death::Finite(death), 1)
    }

    pub fn infinite(birth: Action) -> Self {
        Bar::new(birth, Death::Infinite, 1)
    }

    pub fn censored(birth: Action, at: Action) -> Self {
        Bar::new(birth, Death::Censored(at), 1)
    }

    /// Bars with a right end not above the left end carry no information.
    fn is_empty(&self) -> bool {
        self.multiplicity == 0
            || match &self.death {
                Death::Finite(b) | Death::Censored(b) => b <= &self.birth,
                Death::Infinite => false,
            }
    }
}

/// Multiset of bars in canonical form: equal `(birth, death)` merged, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Barcode {
    bars: Vec<Bar>,
    truncation: Option<Action>,
}

impl Barcode {
    pub fn new(bars: impl IntoIterator<Item = Bar>, truncation: Option<Action>) -> Self {
        let mut merged: BTreeMap<(Action, Death), u64> = BTreeMap::new();
        for bar in bars {
            if bar.is_empty() {
                continue;
            }
            *merged.entry((bar.birth, bar.death)).or_default() += bar.multiplicity;
        }
        let bars = merged
            .into_iter()
            .map(|((birth, death), multiplicity)| Bar {
                birth,
                death,
                multiplicity,
            })
            .collect();
        Barcode { bars, truncation }
    }

    pub fn empty() -> Self {
        Barcode::default()
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn truncation(&self) -> Option<&Action> {
        self.truncation.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.bars.iter().map(|b| b.multiplicity).sum()
    }

    pub fn has_censored(&self) -> bool {
        self.bars.iter().any(|b| matches!(b.death, Death::Censored(_)))
    }

    /// Equality of the bar multisets, ignoring the truncation tag.
    pub fn same_bars(&self, other: &Barcode) -> bool {
        self.bars == other.bars
    }

    /// Replaces every censored death by an infinite one. Only sound when the caller has
    /// certified that nothing alive at the truncation bound can die later.
    pub fn promote_censored(&self) -> Barcode {
        Barcode::new(
            self.bars.iter().map(|b| Bar {
                death: match &b.death {
                    Death::Censored(_) => Death::Infinite,
                    d => d.clone(),
                },
                ..b.clone()
            }),
            self.truncation.clone(),
        )
    }

    /// The barcode a computation truncated at `r` would have produced: bars born at or
    /// after `r` disappear, and finite or censored deaths at or beyond `r` become
    /// `Censored(r)`.
    pub fn clip(&self, r: &Action) -> Barcode {
        Barcode::new(
            self.bars.iter().filter(|b| &b.birth < r).map(|b| Bar {
                death: match &b.death {
                    Death::Finite(d) | Death::Censored(d) if d >= r => Death::Censored(r.clone()),
                    d => d.clone(),
                },
                ..b.clone()
            }),
            Some(r.clone()),
        )
    }

    /// Serializes as one `birth death multiplicity` record per line, preceded by a
    /// `# truncation r` comment when a truncation bound is attached.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.truncation {
            out.push_str(&format!("# truncation {t}\n"));
        }
        for bar in &self.bars {
            out.push_str(&format!("{} {} {}\n", bar.birth, bar.death, bar.multiplicity));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Barcode, BarcodeParseError> {
        let mut bars = Vec::new();
        let mut truncation = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if let Some(comment) = content.strip_prefix('#') {
                if let Some(rest) = comment.trim().strip_prefix("truncation ") {
                    truncation = Some(
                        rest.parse::<Action>()
                            .map_err(|source| BarcodeParseError::Number { line, source })?,
                    );
                }
                continue;
            }
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [birth, death, mult] = fields[..] else {
                return Err(BarcodeParseError::Line {
                    line,
                    message: format!("expected `birth death multiplicity`, got `{content}`"),
                });
            };
            let num = |s: &str| {
                s.parse::<Action>()
                    .map_err(|source| BarcodeParseError::Number { line, source })
            };
            let birth = num(birth)?;
            let death = match death {
                "inf" => Death::Infinite,
                d => match d.strip_prefix("cens@") {
                    Some(r) => Death::Censored(num(r)?),
                    None => Death::Finite(num(d)?),
                },
            };
            let multiplicity: u64 = mult.parse().map_err(|_| BarcodeParseError::Line {
                line,
                message: format!("bad multiplicity `{mult}`"),
            })?;
            if multiplicity == 0 || birth.is_zero() {
                return Err(BarcodeParseError::Line {
                    line,
                    message: "bars need a positive birth and multiplicity".into(),
                });
            }
            bars.push(Bar {
                birth,
                death,
                multiplicity,
            });
        }
        Ok(Barcode::new(bars, truncation))
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bars
            .iter()
            .map(|b| {
                let m = if b.multiplicity == 1 {
                    String::new()
                } else {
                    format!(" x{}", b.multiplicity)
                };
                format!("({}, {}]{m}", b.birth, b.death)
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Barcode of a filtered complex over GF(2).
///
/// `basis` is sorted non-decreasingly by action (ties already broken by the caller) and
/// `boundaries[j]` lists the basis positions appearing in the boundary of element `j`.
/// Every essential class is reported as censored at `r_max`.
pub fn barcode_from_filtered_complex<I>(
    basis: &[(I, Action)],
    boundaries: &[Z2Column],
    r_max: &Action,
) -> Result<Barcode, PersistenceError> {
    if basis.len() != boundaries.len() {
        return Err(PersistenceError::LengthMismatch {
            basis: basis.len(),
            boundaries: boundaries.len(),
        });
    }
    for (j, w) in basis.windows(2).enumerate() {
        if w[1].1 < w[0].1 {
            return Err(PersistenceError::NotSorted(j + 1));
        }
    }
    if let Some((position, (_, action))) = basis.iter().enumerate().find(|(_, (_, a))| a >= r_max)
    {
        return Err(PersistenceError::BasisBeyondTruncation {
            position,
            action: action.to_string(),
            r_max: r_max.to_string(),
        });
    }
    for (j, col) in boundaries.iter().enumerate() {
        for &row in col.entries() {
            if row >= basis.len() || basis[row].1 >= basis[j].1 {
                return Err(PersistenceError::ActionNotLowered { column: j, row });
            }
        }
    }

    let reduced = reduce(boundaries.to_vec())?;
    let mut bars = Vec::with_capacity(basis.len());
    for (&column, &row) in reduced.pairings() {
        bars.push(Bar::finite(basis[row].1.clone(), basis[column].1.clone()));
    }
    for &row in reduced.essentials() {
        bars.push(Bar::censored(basis[row].1.clone(), r_max.clone()));
    }
    Ok(Barcode::new(bars, Some(r_max.clone())))
}

/// Rank of the structure map `V_s -> V_t`: the number of bars `(a, b]` with `a < s`
/// and `b >= t`.
pub fn rank_between(b: &Barcode, s: &Action, t: &Action) -> Result<u64, PersistenceError> {
    if s.is_zero() || s > t {
        return Err(PersistenceError::InvalidQuery(format!(
            "need 0 < s <= t, got s={s}, t={t}"
        )));
    }
    if let Some(trunc) = b.truncation() {
        if t > trunc {
            return Err(PersistenceError::BeyondTruncation {
                t: t.to_string(),
                truncation: trunc.to_string(),
            });
        }
    }
    Ok(b
        .bars()
        .iter()
        .filter(|bar| &bar.birth < s && bar.death.alive_at(t))
        .map(|bar| bar.multiplicity)
        .sum())
}

/// Barcode of `V^{[x c]}`: every endpoint divided by `c`.
pub fn multiplicative_shift(b: &Barcode, c: &Rational) -> Barcode {
    assert!(c.is_positive(), "multiplicative shift needs c > 0");
    let inv = c.recip();
    let scale = |a: &Action| a.scale(&inv);
    Barcode::new(
        b.bars().iter().map(|bar| Bar {
            birth: scale(&bar.birth),
            death: match &bar.death {
                Death::Finite(d) => Death::Finite(scale(d)),
                Death::Censored(d) => Death::Censored(scale(d)),
                Death::Infinite => Death::Infinite,
            },
            multiplicity: bar.multiplicity,
        }),
        b.truncation().map(scale),
    )
}

/// Barcode of `V^{[+c]}`: every endpoint moved left by `c`. Bars that leave `(0, +inf)`
/// are dropped.
pub fn additive_shift(b: &Barcode, c: &Rational) -> Barcode {
    assert!(!c.is_negative(), "additive shift needs c >= 0");
    let shift = |a: &Action| a.checked_sub(c).filter(|v| !v.is_zero());
    let mut bars = Vec::new();
    for bar in b.bars() {
        let death = match &bar.death {
            Death::Finite(d) => shift(d).map(Death::Finite),
            Death::Censored(d) => shift(d).map(Death::Censored),
            Death::Infinite => Some(Death::Infinite),
        };
        let Some(death) = death else { continue };
        match shift(&bar.birth) {
            Some(birth) => bars.push(Bar {
                birth,
                death,
                multiplicity: bar.multiplicity,
            }),
            None => log::warn!(
                "additive shift by {}: dropping bar ({}, {}] whose birth leaves (0, inf)",
                format_rational(c),
                bar.birth,
                bar.death
            ),
        }
    }
    Barcode::new(bars, b.truncation().and_then(shift))
}

/// Multiplicative length threshold `s` in `(1, +inf]`.
pub type Ratio = Extended<Rational>;

/// Value of `l_min,s`. `uncertain` is set when a censored bar with a smaller birth
/// might qualify once its true death is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LMin {
    pub value: Extended<Action>,
    pub uncertain: bool,
}

impl fmt::Display for LMin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)?;
        if self.uncertain {
            f.write_str(" uncertain")?;
        }
        Ok(())
    }
}

/// Smallest left end among bars of multiplicative length strictly greater than `s`
/// (for `s = inf`: among infinite bars), or `+inf` if there is none.
pub fn l_min_s(b: &Barcode, s: &Ratio) -> Result<LMin, PersistenceError> {
    if let Extended::Finite(s) = s {
        if s <= &Rational::one() {
            return Err(PersistenceError::InvalidQuery(format!(
                "l_min,s needs s > 1, got {}",
                format_rational(s)
            )));
        }
    }
    // multiplicative length death/birth > s  <=>  death > s * birth
    let exceeds = |birth: &Action, end: &Action| match s {
        Extended::Finite(s) => end.value() > &(birth.value() * s),
        Extended::Infinite => false,
    };
    let mut certain: Option<&Action> = None;
    let mut possible: Option<&Action> = None;
    for bar in b.bars() {
        let (qualifies, maybe) = match &bar.death {
            Death::Infinite => (true, false),
            Death::Finite(d) => (exceeds(&bar.birth, d), false),
            Death::Censored(r) => {
                let sure = exceeds(&bar.birth, r);
                (sure, !sure)
            }
        };
        if qualifies && certain.is_none_or(|c| &bar.birth < c) {
            certain = Some(&bar.birth);
        }
        if maybe && possible.is_none_or(|c| &bar.birth < c) {
            possible = Some(&bar.birth);
        }
    }
    let uncertain = match (possible, certain) {
        (Some(p), Some(c)) => p < c,
        (Some(_), None) => true,
        _ => false,
    };
    Ok(LMin {
        value: certain.map_or(Extended::Infinite, |a| Extended::Finite(a.clone())),
        uncertain,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bondedness {
    Yes,
    No,
    /// No infinite bar, but censored bars remain whose fate is undetermined.
    Unknown,
}

impl fmt::Display for Bondedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bondedness::Yes => "yes",
            Bondedness::No => "no",
            Bondedness::Unknown => "unknown",
        })
    }
}

/// A pair is homologically bonded when its barcode has an infinite bar.
pub fn is_homologically_bonded(b: &Barcode) -> Bondedness {
    if b.bars().iter().any(|bar| bar.death == Death::Infinite) {
        Bondedness::Yes
    } else if b.has_censored() {
        Bondedness::Unknown
    } else {
        Bondedness::No
    }
}

/// Parses `s` for [`l_min_s`]: a rational or `inf`.
pub fn parse_ratio(s: &str) -> Result<Ratio, RationalError> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(Extended::Infinite),
        other => parse_rational(other).map(Extended::Finite),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn a(n: u64, d: u64) -> Action {
        Action::from_ratio(n, d)
    }

    fn two_chord_case2() -> Barcode {
        Barcode::new([Bar::finite(a(1, 1), a(3, 2))], None)
    }

    #[test]
    fn two_element_complex() {
        let basis = [("a", a(1, 1)), ("A", a(3, 2))];
        let bd = [Z2Column::new(), Z2Column::from_indices([0])];
        let b = barcode_from_filtered_complex(&basis, &bd, &a(4, 1)).unwrap();
        assert!(b.same_bars(&two_chord_case2()));
    }

    #[test]
    fn zero_differential_gives_censored_bars() {
        let basis = [("a", a(2, 1)), ("aba", a(6, 1)), ("ababa", a(10, 1))];
        let bd = vec![Z2Column::new(); 3];
        let b = barcode_from_filtered_complex(&basis, &bd, &a(11, 1)).unwrap();
        let expected = Barcode::new(
            [2, 6, 10].map(|l| Bar::censored(a(l, 1), a(11, 1))),
            Some(a(11, 1)),
        );
        assert_eq!(b, expected);
        assert_eq!(b.to_text(), "# truncation 11\n2 cens@11 1\n6 cens@11 1\n10 cens@11 1\n");
    }

    #[test]
    fn empty_complex() {
        let b = barcode_from_filtered_complex::<()>(&[], &[], &a(1, 1)).unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn complex_errors() {
        let basis = [("a", a(1, 1)), ("b", a(1, 1))];
        let bd = [Z2Column::new(), Z2Column::from_indices([0])];
        assert_eq!(
            barcode_from_filtered_complex(&basis, &bd, &a(4, 1)),
            Err(PersistenceError::ActionNotLowered { column: 1, row: 0 })
        );
        let unsorted = [("a", a(2, 1)), ("b", a(1, 1))];
        assert!(matches!(
            barcode_from_filtered_complex(&unsorted, &[Z2Column::new(), Z2Column::new()], &a(4, 1)),
            Err(PersistenceError::NotSorted(1))
        ));
        assert!(matches!(
            barcode_from_filtered_complex(&basis, &[Z2Column::new(), Z2Column::new()], &a(1, 1)),
            Err(PersistenceError::BasisBeyondTruncation { .. })
        ));
    }

    #[test]
    fn rank_between_examples() {
        let b = two_chord_case2();
        assert_eq!(rank_between(&b, &a(5, 4), &a(5, 4)).unwrap(), 1);
        assert_eq!(rank_between(&b, &a(5, 4), &a(2, 1)).unwrap(), 0);

        let two_fiber = Barcode::new([2, 6, 10].map(|l| Bar::infinite(a(l, 1))), None);
        assert_eq!(rank_between(&two_fiber, &a(7, 1), &a(9, 1)).unwrap(), 2);

        let truncated = Barcode::new([Bar::censored(a(1, 1), a(10, 1))], Some(a(10, 1)));
        assert_eq!(rank_between(&truncated, &a(2, 1), &a(10, 1)).unwrap(), 1);
        assert!(matches!(
            rank_between(&truncated, &a(2, 1), &a(11, 1)),
            Err(PersistenceError::BeyondTruncation { .. })
        ));
        assert!(rank_between(&b, &a(2, 1), &a(1, 1)).is_err());
    }

    #[test]
    fn shifts() {
        let inf2 = Barcode::new([Bar::infinite(a(2, 1))], None);
        assert_eq!(
            multiplicative_shift(&inf2, &int(2)),
            Barcode::new([Bar::infinite(a(1, 1))], None)
        );
        let b = two_chord_case2();
        assert_eq!(multiplicative_shift(&b, &int(1)), b);
        assert_eq!(
            multiplicative_shift(&b, &rat(1, 2)),
            Barcode::new([Bar::finite(a(2, 1), a(3, 1))], None)
        );

        let b35 = Barcode::new([Bar::finite(a(3, 1), a(5, 1))], None);
        assert_eq!(
            additive_shift(&b35, &int(1)),
            Barcode::new([Bar::finite(a(2, 1), a(4, 1))], None)
        );
        assert_eq!(additive_shift(&b35, &int(0)), b35);
        assert!(additive_shift(&b, &rat(3, 2)).is_empty());
    }

    #[test]
    fn l_min_examples() {
        let b = two_chord_case2();
        let lmin = |s: Ratio| l_min_s(&b, &s).unwrap();
        assert_eq!(lmin(Extended::Finite(rat(6, 5))).value, Extended::Finite(a(1, 1)));
        assert_eq!(lmin(Extended::Finite(rat(3, 2))).value, Extended::Infinite);
        assert_eq!(lmin(Extended::Infinite).value, Extended::Infinite);
        assert_eq!(
            l_min_s(&Barcode::empty(), &Extended::Finite(int(2))).unwrap(),
            LMin {
                value: Extended::Infinite,
                uncertain: false
            }
        );
        assert!(l_min_s(&b, &Extended::Finite(int(1))).is_err());
    }

    #[test]
    fn l_min_with_censoring() {
        let b = Barcode::new(
            [Bar::censored(a(1, 1), a(10, 1)), Bar::infinite(a(3, 1))],
            Some(a(10, 1)),
        );
        // censored bar already longer than 5x its birth: certain
        let r = l_min_s(&b, &Extended::Finite(int(5))).unwrap();
        assert_eq!((r.value, r.uncertain), (Extended::Finite(a(1, 1)), false));
        // at s = 20 the censored bar may or may not qualify
        let r = l_min_s(&b, &Extended::Finite(int(20))).unwrap();
        assert_eq!((r.value, r.uncertain), (Extended::Finite(a(3, 1)), true));
        let r = l_min_s(&b, &Extended::Infinite).unwrap();
        assert_eq!((r.value, r.uncertain), (Extended::Finite(a(3, 1)), true));
    }

    #[test]
    fn bondedness() {
        assert_eq!(
            is_homologically_bonded(&Barcode::new([Bar::infinite(a(1, 1))], None)),
            Bondedness::Yes
        );
        assert_eq!(is_homologically_bonded(&two_chord_case2()), Bondedness::No);
        assert_eq!(
            is_homologically_bonded(&Barcode::new([Bar::censored(a(1, 1), a(10, 1))], None)),
            Bondedness::Unknown
        );
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let b = Barcode::new(
            [
                Bar::infinite(a(6, 1)),
                Bar::finite(a(1, 1), a(1, 1)),
                Bar::infinite(a(2, 1)),
                Bar::infinite(a(6, 1)),
            ],
            None,
        );
        assert_eq!(b.bars().len(), 2);
        assert_eq!(b.bars()[1].multiplicity, 2);
        assert_eq!(b.to_string(), "{(2, inf], (6, inf] x2}");
    }

    #[test]
    fn text_round_trip_and_errors() {
        let b = Barcode::new(
            [
                Bar::finite(a(1, 1), a(3, 2)),
                Bar::new(a(2, 1), Death::Infinite, 3),
                Bar::censored(a(5, 2), a(7, 1)),
            ],
            Some(a(7, 1)),
        );
        assert_eq!(Barcode::from_text(&b.to_text()).unwrap(), b);
        assert!(Barcode::from_text("1 2").is_err());
        assert!(Barcode::from_text("1 x 1").is_err());
        assert!(Barcode::from_text("1 2 0").is_err());
    }

    #[test]
    fn clip_matches_truncation_semantics() {
        let full = Barcode::new(
            [
                Bar::finite(a(1, 1), a(3, 1)),
                Bar::finite(a(2, 1), a(5, 1)),
                Bar::censored(a(4, 1), a(9, 1)),
                Bar::infinite(a(6, 1)),
            ],
            Some(a(9, 1)),
        );
        let clipped = full.clip(&a(3, 1));
        let expected = Barcode::new(
            [Bar::censored(a(1, 1), a(3, 1)), Bar::censored(a(2, 1), a(3, 1))],
            Some(a(3, 1)),
        );
        assert_eq!(clipped, expected);
    }
}
