//! From a validated spec to the barcode of the 01-subspace filtered by action.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ce_dga::{validate, DgaError, DgaSpec, Endpoint, Polynomial, ValidationReport, Word};
use crate::persistence::{barcode_from_filtered_complex, multiplicative_shift, Barcode, PersistenceError};
use crate::rational::{Action, Rational};
use crate::z2_linalg::Z2Column;

/// Default cap on the number of basis words below the truncation bound.
pub const DEFAULT_BASIS_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LchError {
    #[error("spec is not valid:\n{0}")]
    ValidationFailed(ValidationReport),
    #[error("truncation bound must be positive")]
    NonPositiveBound,
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error("differential of {word} leaves the enumerated basis at {term}")]
    BasisNotClosed { word: String, term: String },
}

impl LchError {
    pub fn is_budget(&self) -> bool {
        matches!(self, LchError::Dga(DgaError::BudgetExceeded { .. }))
    }
}

/// The basis of 01-words below a bound, in canonical order, with boundary columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    pub basis: Vec<(Word, Action)>,
    pub boundaries: Vec<Z2Column>,
}

impl FilteredComplex {
    pub fn build(spec: &DgaSpec, r_max: &Action, cap: usize) -> Result<Self, LchError> {
        if r_max.is_zero() {
            return Err(LchError::NonPositiveBound);
        }
        let basis = spec.enumerate_words(0, 1, r_max, cap)?;
        let position: HashMap<&Word, usize> =
            basis.iter().enumerate().map(|(i, (w, _))| (w, i)).collect();
        let mut boundaries = Vec::with_capacity(basis.len());
        for (w, _) in &basis {
            let d = spec.apply_differential(&Polynomial::monomial(w.clone()));
            let rows = d
                .words()
                .map(|t| {
                    position.get(t).copied().ok_or_else(|| LchError::BasisNotClosed {
                        word: spec.display_word(w),
                        term: spec.display_word(t),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            boundaries.push(Z2Column::from_indices(rows));
        }
        Ok(FilteredComplex { basis, boundaries })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn barcode(&self, r_max: &Action) -> Result<Barcode, PersistenceError> {
        barcode_from_filtered_complex(&self.basis, &self.boundaries, r_max)
    }

    /// The same complex with basis elements of equal action randomly reordered.
    pub fn permute_ties<R: Rng + ?Sized>(&self, rng: &mut R) -> FilteredComplex {
        let n = self.basis.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut start = 0;
        while start < n {
            let end = (start..n)
                .find(|&k| self.basis[k].1 != self.basis[start].1)
                .unwrap_or(n);
            order[start..end].shuffle(rng);
            start = end;
        }
        // order[new] = old
        let mut new_pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_pos[old] = new;
        }
        FilteredComplex {
            basis: order.iter().map(|&old| self.basis[old].clone()).collect(),
            boundaries: order
                .iter()
                .map(|&old| {
                    Z2Column::from_indices(self.boundaries[old].entries().iter().map(|&r| new_pos[r]))
                })
                .collect(),
        }
    }
}

/// Why censored bars were (or were not) promoted to infinite ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    /// Every chord that can occur in a 01-word has zero differential.
    ZeroDifferential,
    /// There are finitely many 01-words and all of them lie below the truncation bound,
    /// so the truncated complex is the whole complex.
    CompleteBasis,
    None,
}

impl Certification {
    pub fn is_certified(self) -> bool {
        self != Certification::None
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certification::ZeroDifferential => "certified (zero differential on 01-chords)",
            Certification::CompleteBasis => "certified (all 01-words below the bound)",
            Certification::None => "not certified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LchResult {
    pub barcode: Barcode,
    pub basis_size: usize,
    pub certification: Certification,
    pub truncation: Action,
}

impl LchResult {
    pub fn certified_infinite(&self) -> bool {
        self.certification.is_certified()
    }
}

/// Barcode of the 01-subspace truncated at `r_max`, with the default basis cap.
pub fn lch_barcode(spec: &DgaSpec, r_max: &Action) -> Result<LchResult, LchError> {
    lch_barcode_with_cap(spec, r_max, DEFAULT_BASIS_CAP)
}

pub fn lch_barcode_with_cap(spec: &DgaSpec, r_max: &Action, cap: usize) -> Result<LchResult, LchError> {
    let report = validate(spec);
    if !report.is_valid() {
        return Err(LchError::ValidationFailed(report));
    }
    let complex = FilteredComplex::build(spec, r_max, cap)?;
    let raw = complex.barcode(r_max)?;
    let certification = if certify_infinite(spec) {
        Certification::ZeroDifferential
    } else if sup_01_action(spec).is_some_and(|sup| &sup < r_max) {
        Certification::CompleteBasis
    } else {
        Certification::None
    };
    let barcode = if certification.is_certified() {
        raw.promote_censored()
    } else {
        raw
    };
    Ok(LchResult {
        barcode,
        basis_size: complex.len(),
        certification,
        truncation: r_max.clone(),
    })
}

/// For each chord, whether it occurs in some composable word from part 0 to part 1.
pub fn chords_on_01_paths(spec: &DgaSpec) -> Vec<bool> {
    let chords = spec.chords();
    let nodes: HashSet<&Endpoint> = chords.iter().flat_map(|c| [&c.source, &c.target]).collect();

    // forward closure from part-0 endpoints, backward closure from part-1 endpoints
    fn closure<'a>(chords: &'a [crate::ce_dga::Chord], seeds: Vec<&'a Endpoint>, forward: bool) -> HashSet<&'a Endpoint> {
        let mut seen: HashSet<&Endpoint> = seeds.iter().copied().collect();
        let mut stack = seeds;
        while let Some(n) = stack.pop() {
            for c in chords {
                let (from, to) = if forward {
                    (&c.source, &c.target)
                } else {
                    (&c.target, &c.source)
                };
                if from == n && seen.insert(to) {
                    stack.push(to);
                }
            }
        }
        seen
    }
    let from_zero = closure(chords, nodes.iter().copied().filter(|e| e.part == 0).collect(), true);
    let to_one = closure(chords, nodes.iter().copied().filter(|e| e.part == 1).collect(), false);
    chords
        .iter()
        .map(|c| from_zero.contains(&c.source) && to_one.contains(&c.target))
        .collect()
}

/// True when every chord on a 01-path has zero differential. Then the differential
/// vanishes on the whole 01-subspace and every bar alive at any truncation is infinite.
pub fn certify_infinite(spec: &DgaSpec) -> bool {
    chords_on_01_paths(spec)
        .iter()
        .enumerate()
        .all(|(i, &on)| !on || spec.differential_of(i).is_zero())
}

/// Largest action of a 01-word, or `None` if there are infinitely many 01-words.
pub fn sup_01_action(spec: &DgaSpec) -> Option<Action> {
    let on = chords_on_01_paths(spec);
    let chords = spec.chords();
    let relevant: Vec<usize> = (0..chords.len()).filter(|&i| on[i]).collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    // longest[e] = largest action of a (possibly empty) relevant path from e to part 1
    fn visit<'a>(
        e: &'a Endpoint,
        spec: &'a DgaSpec,
        relevant: &[usize],
        marks: &mut HashMap<&'a Endpoint, Mark>,
        longest: &mut HashMap<&'a Endpoint, Action>,
    ) -> Option<()> {
        match marks.get(e) {
            Some(Mark::Active) => return None,
            Some(Mark::Done) => return Some(()),
            None => {}
        }
        marks.insert(e, Mark::Active);
        let mut best: Option<Action> = (e.part == 1).then(Action::zero);
        for &c in relevant {
            let chord = spec.chord(c);
            if &chord.source != e {
                continue;
            }
            visit(&chord.target, spec, relevant, marks, longest)?;
            if let Some(rest) = longest.get(&chord.target) {
                let total = &chord.action + rest;
                if best.as_ref().is_none_or(|b| &total > b) {
                    best = Some(total);
                }
            }
        }
        marks.insert(e, Mark::Done);
        if let Some(b) = best {
            longest.insert(e, b);
        }
        Some(())
    }

    let mut marks = HashMap::new();
    let mut longest = HashMap::new();
    let mut sup = Action::zero();
    for &c in &relevant {
        let chord = spec.chord(c);
        if chord.source.part != 0 {
            continue;
        }
        visit(&chord.source, spec, &relevant, &mut marks, &mut longest)?;
    }
    // every relevant chord lies on a cycle-free path; the sup starts at part 0
    for &c in &relevant {
        let chord = spec.chord(c);
        if chord.source.part == 0 {
            if let Some(v) = longest.get(&chord.source) {
                if v > &sup {
                    sup = v.clone();
                }
            }
        }
    }
    // a cycle elsewhere among relevant chords also makes the word set infinite
    for &c in &relevant {
        visit(&spec.chord(c).source, spec, &relevant, &mut marks, &mut longest)?;
    }
    Some(sup)
}

/// The result for the form `c * lambda`: every endpoint and the truncation multiplied by `c`.
pub fn rescale_form(res: &LchResult, c: &Rational) -> LchResult {
    assert!(c.is_positive(), "rescaling needs c > 0");
    LchResult {
        barcode: multiplicative_shift(&res.barcode, &c.recip()),
        basis_size: res.basis_size,
        certification: res.certification,
        truncation: res.truncation.scale(c),
    }
}
