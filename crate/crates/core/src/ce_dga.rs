//! Combinatorial Chekanov-Eliashberg algebras: chords with endpoints and actions, composable
//! words, Z2 polynomials, and a supplied differential extended by the Leibniz rule.
//!
//! Differentials are input data. [`validate`] checks everything that can be checked.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{parse_rational, Action, RationalError};

/// Which of the two Legendrians a chord end lies on.
pub type Part = u8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub part: Part,
    pub component: String,
}

impl Endpoint {
    pub fn new(part: Part, component: impl Into<String>) -> Self {
        Endpoint {
            part,
            component: component.into(),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.part, self.component)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chord {
    pub id: String,
    pub source: Endpoint,
    pub target: Endpoint,
    pub action: Action,
}

impl Chord {
    pub fn new(id: impl Into<String>, source: Endpoint, target: Endpoint, action: Action) -> Self {
        Chord {
            id: id.into(),
            source,
            target,
            action,
        }
    }
}

/// A sequence of chords, stored as indices into [`DgaSpec::chords`]. The empty word is the
/// unit of the algebra.
///
/// Chords are kept sorted by id, so the derived order on index sequences is the
/// lexicographic order on id sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }
}

/// Z2 linear combination of words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Polynomial {
    words: BTreeSet<Word>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn monomial(w: Word) -> Self {
        let mut p = Polynomial::zero();
        p.toggle(w);
        p
    }

    /// Adds `w` with coefficient 1: inserts it, or cancels an existing copy.
    pub fn toggle(&mut self, w: Word) {
        if !self.words.remove(&w) {
            self.words.insert(w);
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for w in &other.words {
            self.toggle(w.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }
}

impl FromIterator<Word> for Polynomial {
    fn from_iter<T: IntoIterator<Item = Word>>(iter: T) -> Self {
        let mut p = Polynomial::zero();
        for w in iter {
            p.toggle(w);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DgaError {
    #[error("duplicate chord id `{0}`")]
    DuplicateId(String),
    #[error("unknown chord `{0}`")]
    UnknownChord(String),
    #[error("chord `{chord}` has part {part}; parts are 0 or 1")]
    InvalidPart { chord: String, part: Part },
    #[error("chord `{chord}`: {source}")]
    BadAction { chord: String, source: RationalError },
    #[error("chord `{0}` has zero action; enumeration would not terminate")]
    ZeroAction(String),
    #[error("enumeration bound must be positive")]
    NonPositiveBound,
    #[error("more than {cap} words below the bound; raise the budget or lower the bound")]
    BudgetExceeded { cap: usize },
}

/// A finite chord set together with the differential of each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgaSpec {
    name: String,
    note: Option<String>,
    chords: Vec<Chord>,
    index: HashMap<String, usize>,
    differential: Vec<Polynomial>,
}

impl DgaSpec {
    /// Builds a spec; `differential` maps generator ids to lists of words (lists of ids).
    /// Absent generators have zero differential, repeated words cancel.
    pub fn new(
        name: impl Into<String>,
        chords: Vec<Chord>,
        differential: &BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Self, DgaError> {
        let mut chords = chords;
        chords.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(chords.len());
        for (i, c) in chords.iter().enumerate() {
            if c.source.part > 1 || c.target.part > 1 {
                return Err(DgaError::InvalidPart {
                    chord: c.id.clone(),
                    part: c.source.part.max(c.target.part),
                });
            }
            if index.insert(c.id.clone(), i).is_some() {
                return Err(DgaError::DuplicateId(c.id.clone()));
            }
        }
        let mut spec = DgaSpec {
            name: name.into(),
            note: None,
            differential: vec![Polynomial::zero(); chords.len()],
            chords,
            index,
        };
        for (g, words) in differential {
            let gi = spec.chord_index(g)?;
            let mut p = Polynomial::zero();
            for w in words {
                p.toggle(spec.word(w)?);
            }
            spec.differential[gi] = p;
        }
        Ok(spec)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn chord(&self, i: usize) -> &Chord {
        &self.chords[i]
    }

    pub fn chord_index(&self, id: &str) -> Result<usize, DgaError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| DgaError::UnknownChord(id.to_string()))
    }

    /// Resolves a sequence of ids into a word.
    pub fn word<S: AsRef<str>>(&self, ids: &[S]) -> Result<Word, DgaError> {
        ids.iter()
            .map(|id| self.chord_index(id.as_ref()))
            .collect::<Result<_, _>>()
            .map(Word)
    }

    /// Differential of generator `i`.
    pub fn differential_of(&self, i: usize) -> &Polynomial {
        &self.differential[i]
    }

    /// Same chords, new differential (indexed like [`DgaSpec::chords`]).
    pub fn with_differential(&self, differential: Vec<Polynomial>) -> DgaSpec {
        assert_eq!(differential.len(), self.chords.len());
        DgaSpec {
            differential,
            ..self.clone()
        }
    }

    pub fn has_zero_differential(&self) -> bool {
        self.differential.iter().all(Polynomial::is_zero)
    }

    pub fn display_word(&self, w: &Word) -> String {
        if w.is_unit() {
            return "1".into();
        }
        let ids: Vec<&str> = w.0.iter().map(|&i| self.chords[i].id.as_str()).collect();
        format!("[{}]", ids.join(","))
    }

    pub fn display_polynomial(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".into();
        }
        p.words()
            .map(|w| self.display_word(w))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Sum of the actions of the letters; the unit has action zero.
    pub fn word_action(&self, w: &Word) -> Action {
        w.0.iter().map(|&i| self.chords[i].action.clone()).sum()
    }

    pub fn is_composable(&self, w: &Word) -> bool {
        w.0.windows(2)
            .all(|p| self.chords[p[0]].target == self.chords[p[1]].source)
    }

    /// Source endpoint of the first letter and target endpoint of the last; `None` for the unit.
    pub fn word_endpoints(&self, w: &Word) -> Option<(&Endpoint, &Endpoint)> {
        let first = w.0.first()?;
        let last = w.0.last()?;
        Some((&self.chords[*first].source, &self.chords[*last].target))
    }

    /// Whether `w` is composable, starts on part `i` and ends on part `j`.
    pub fn is_ij_composable(&self, w: &Word, i: Part, j: Part) -> bool {
        self.is_composable(w)
            && self
                .word_endpoints(w)
                .is_some_and(|(s, t)| s.part == i && t.part == j)
    }

    /// Leibniz extension of the differential: `d(w1...wk) = sum_m w1...d(wm)...wk`, `d(1) = 0`.
    pub fn apply_differential(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for w in p.words() {
            for (m, &letter) in w.0.iter().enumerate() {
                for term in self.differential[letter].words() {
                    let mut v = Vec::with_capacity(w.len() + term.len());
                    v.extend_from_slice(&w.0[..m]);
                    v.extend_from_slice(&term.0);
                    v.extend_from_slice(&w.0[m + 1..]);
                    out.toggle(Word(v));
                }
            }
        }
        out
    }

    /// All `ij`-composable words of action strictly below `bound`, in the canonical order
    /// (action, length, lexicographic ids). Fails if more than `cap` words qualify.
    pub fn enumerate_words(
        &self,
        i: Part,
        j: Part,
        bound: &Action,
        cap: usize,
    ) -> Result<Vec<(Word, Action)>, DgaError> {
        if bound.is_zero() {
            return Err(DgaError::NonPositiveBound);
        }
        let mut out = Vec::new();
        let mut starts: Vec<usize> = (0..self.chords.len())
            .filter(|&c| self.chords[c].source.part == i && &self.chords[c].action < bound)
            .collect();
        if starts.is_empty() {
            return Ok(out);
        }
        if let Some(&z) = starts.iter().find(|&&c| self.chords[c].action.is_zero()) {
            return Err(DgaError::ZeroAction(self.chords[z].id.clone()));
        }
        starts.sort_by(|&a, &b| self.chords[a].action.cmp(&self.chords[b].action));

        // chords leaving each endpoint, cheapest first so the scan can stop early
        let mut successors: HashMap<&Endpoint, Vec<usize>> = HashMap::new();
        for (c, chord) in self.chords.iter().enumerate() {
            successors.entry(&chord.source).or_default().push(c);
        }
        for list in successors.values_mut() {
            list.sort_by(|&a, &b| self.chords[a].action.cmp(&self.chords[b].action));
            if let Some(&z) = list.iter().find(|&&c| self.chords[c].action.is_zero()) {
                return Err(DgaError::ZeroAction(self.chords[z].id.clone()));
            }
        }

        let mut stack: Vec<(Vec<usize>, Action)> = starts
            .into_iter()
            .map(|c| (vec![c], self.chords[c].action.clone()))
            .collect();
        while let Some((letters, action)) = stack.pop() {
            let tail = &self.chords[*letters.last().expect("nonempty")].target;
            if let Some(next) = successors.get(tail) {
                for &c in next {
                    let extended = &action + &self.chords[c].action;
                    if &extended >= bound {
                        break;
                    }
                    let mut v = letters.clone();
                    v.push(c);
                    stack.push((v, extended));
                }
            }
            if tail.part == j {
                if out.len() == cap {
                    return Err(DgaError::BudgetExceeded { cap });
                }
                out.push((Word(letters), action));
            }
        }
        out.sort_by(|(wa, aa), (wb, ab)| {
            aa.cmp(ab)
                .then(wa.len().cmp(&wb.len()))
                .then_with(|| wa.cmp(wb))
        });
        Ok(out)
    }

    /// A uniformly stepped random composable word of length `1..=max_len` starting on part
    /// `from`, or `None` if no chord starts there.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, from: Part, max_len: usize) -> Option<Word> {
        let starts: Vec<usize> = (0..self.chords.len())
            .filter(|&c| self.chords[c].source.part == from)
            .collect();
        if starts.is_empty() || max_len == 0 {
            return None;
        }
        let target_len = rng.random_range(1..=max_len);
        let mut letters = vec![starts[rng.random_range(0..starts.len())]];
        while letters.len() < target_len {
            let tail = &self.chords[*letters.last().expect("nonempty")].target;
            let next: Vec<usize> = (0..self.chords.len())
                .filter(|&c| &self.chords[c].source == tail)
                .collect();
            if next.is_empty() {
                break;
            }
            letters.push(next[rng.random_range(0..next.len())]);
        }
        Some(Word(letters))
    }
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonPositiveAction { chord: String },
    NonComposableWord { generator: String, word: String },
    EndpointMismatch { generator: String, word: String },
    ActionNotLowered { generator: String, word: String },
    DSquaredNonzero { generator: String, residual: String },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::NonPositiveAction { .. } => "NonPositiveAction",
            Violation::NonComposableWord { .. } => "NonComposableWord",
            Violation::EndpointMismatch { .. } => "EndpointMismatch",
            Violation::ActionNotLowered { .. } => "ActionNotLowered",
            Violation::DSquaredNonzero { .. } => "DSquaredNonzero",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.kind())?;
        match self {
            Violation::NonPositiveAction { chord } => write!(f, "chord `{chord}` has action 0"),
            Violation::NonComposableWord { generator, word } => {
                write!(f, "d({generator}) contains non-composable word {word}")
            }
            Violation::EndpointMismatch { generator, word } => {
                write!(f, "d({generator}) contains {word} with different endpoints")
            }
            Violation::ActionNotLowered { generator, word } => {
                write!(f, "d({generator}) contains {word} whose action is not smaller")
            }
            Violation::DSquaredNonzero {
                generator,
                residual,
            } => write!(f, "d(d({generator})) = {residual}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every structural violation of `spec`.
pub fn validate(spec: &DgaSpec) -> ValidationReport {
    let mut violations = Vec::new();
    for c in spec.chords() {
        if c.action.is_zero() {
            violations.push(Violation::NonPositiveAction { chord: c.id.clone() });
        }
    }
    for (gi, g) in spec.chords().iter().enumerate() {
        let d = spec.differential_of(gi);
        for w in d.words() {
            let generator = g.id.clone();
            let word = spec.display_word(w);
            if !spec.is_composable(w) {
                violations.push(Violation::NonComposableWord { generator, word });
                continue;
            }
            let same_ends = match spec.word_endpoints(w) {
                Some((s, t)) => s == &g.source && t == &g.target,
                None => g.source == g.target,
            };
            if !same_ends {
                violations.push(Violation::EndpointMismatch {
                    generator: generator.clone(),
                    word: word.clone(),
                });
            }
            if spec.word_action(w) >= g.action {
                violations.push(Violation::ActionNotLowered { generator, word });
            }
        }
        let dd = spec.apply_differential(d);
        if !dd.is_zero() {
            violations.push(Violation::DSquaredNonzero {
                generator: g.id.clone(),
                residual: spec.display_polynomial(&dd),
            });
        }
    }
    ValidationReport { violations }
}

/// On-disk form of a spec. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub chords: Vec<ChordRecord>,
    #[serde(default)]
    pub differential: BTreeMap<String, Vec<Vec<String>>>,
    /// Provenance of generated files; ignored by every computation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordRecord {
    pub id: String,
    pub from: (Part, String),
    pub to: (Part, String),
    pub action: String,
    /// Reserved; ignored by every computation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
}

impl SpecFile {
    pub fn into_spec(self) -> Result<DgaSpec, DgaError> {
        let chords = self
            .chords
            .into_iter()
            .map(|r| {
                let action = parse_rational(&r.action)
                    .and_then(Action::new)
                    .map_err(|source| DgaError::BadAction {
                        chord: r.id.clone(),
                        source,
                    })?;
                Ok(Chord::new(
                    r.id,
                    Endpoint::new(r.from.0, r.from.1),
                    Endpoint::new(r.to.0, r.to.1),
                    action,
                ))
            })
            .collect::<Result<Vec<_>, DgaError>>()?;
        let spec = DgaSpec::new(self.name, chords, &self.differential)?;
        Ok(match self.note {
            Some(n) => spec.with_note(n),
            None => spec,
        })
    }

    pub fn from_spec(spec: &DgaSpec) -> Self {
        let chords = spec
            .chords()
            .iter()
            .map(|c| ChordRecord {
                id: c.id.clone(),
                from: (c.source.part, c.source.component.clone()),
                to: (c.target.part, c.target.component.clone()),
                action: c.action.to_string(),
                degree: None,
            })
            .collect();
        let differential = spec
            .chords()
            .iter()
            .enumerate()
            .filter(|(i, _)| !spec.differential_of(*i).is_zero())
            .map(|(i, c)| {
                let words = spec
                    .differential_of(i)
                    .words()
                    .map(|w| w.0.iter().map(|&k| spec.chord(k).id.clone()).collect())
                    .collect();
                (c.id.clone(), words)
            })
            .collect();
        SpecFile {
            name: spec.name().to_string(),
            note: spec.note().map(str::to_string),
            chords,
            differential,
            manifest: None,
        }
    }
}

/// Parses the JSON spec format.
pub fn parse_spec_json(text: &str) -> Result<SpecFile, serde_json::Error> {
    serde_json::from_str(text)
}

/// Renders a spec as pretty JSON with a trailing newline; deterministic.
pub fn spec_to_json(spec: &DgaSpec) -> String {
    let mut s = serde_json::to_string_pretty(&SpecFile::from_spec(spec)).expect("spec serializes");
    s.push('\n');
    s
}
