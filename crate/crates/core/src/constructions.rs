//! Generators for the standard example pairs, the circle Morse model with its
//! sublevel-set oracle, and random valid specs for property testing.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use rand::seq::IndexedRandom;
use rand::Rng;
use thiserror::Error;

use crate::ce_dga::{Chord, DgaSpec, Endpoint, Polynomial, Word};
use crate::persistence::{Bar, Barcode};
use crate::rational::{format_rational, Action, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("need 0 < |a| < |A|, got |a| = {a}, |A| = {big_a}")]
    OrderingViolation { a: String, big_a: String },
    #[error("critical points must alternate min/max around the circle: {0}")]
    InvalidAlternation(String),
    #[error("inadmissible critical values: {0}")]
    NonAdmissibleValues(String),
    #[error("stabilization needs a zero differential; `{0}` has d != 0")]
    NonzeroDifferential(String),
}

/// The pair of cotangent fibers over two points at distance `l`: one 01-chord `a`, one
/// 10-chord `b`, both of action `l`, zero differential.
pub fn two_fiber_spec(l: &Action) -> DgaSpec {
    let x0 = Endpoint::new(0, "x0");
    let x1 = Endpoint::new(1, "x1");
    DgaSpec::new(
        "two_fiber",
        vec![
            Chord::new("a", x0.clone(), x1.clone(), l.clone()),
            Chord::new("b", x1, x0, l.clone()),
        ],
        &BTreeMap::new(),
    )
    .expect("fixed chord set")
    .with_note(format!("two cotangent fibers at distance {l}"))
}

/// Doubling of [`two_fiber_spec`]: chords `a_1, a_2` (01) and `b_1, b_2` (10) of action `l`.
pub fn stabilized_two_fiber_spec(l: &Action) -> DgaSpec {
    stabilize_zero_diff(&two_fiber_spec(l), &Action::zero()).expect("two-fiber differential vanishes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoChordCase {
    /// `d(A) = 0`
    DaZero,
    /// `d(A) = a`
    DaEqualsA,
}

impl fmt::Display for TwoChordCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoChordCase::DaZero => "dA_zero",
            TwoChordCase::DaEqualsA => "dA_equals_a",
        })
    }
}

impl std::str::FromStr for TwoChordCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "dA_zero" | "zero" => Ok(TwoChordCase::DaZero),
            "2" | "dA_equals_a" | "a" => Ok(TwoChordCase::DaEqualsA),
            other => Err(format!("unknown two-chord case `{other}` (use 1 or 2)")),
        }
    }
}

/// Two 01-chords `a`, `A` from `K` to `L0` with `|a| < |A|`.
pub fn two_chord_spec(a_len: &Action, big_a_len: &Action, case: TwoChordCase) -> Result<DgaSpec, ConstructionError> {
    if a_len.is_zero() || a_len >= big_a_len {
        return Err(ConstructionError::OrderingViolation {
            a: a_len.to_string(),
            big_a: big_a_len.to_string(),
        });
    }
    let k = Endpoint::new(0, "K");
    let l0 = Endpoint::new(1, "L0");
    let mut d = BTreeMap::new();
    if case == TwoChordCase::DaEqualsA {
        d.insert("A".to_string(), vec![vec!["a".to_string()]]);
    }
    Ok(DgaSpec::new(
        "two_chord",
        vec![
            Chord::new("a", k.clone(), l0.clone(), a_len.clone()),
            Chord::new("A", k, l0, big_a_len.clone()),
        ],
        &d,
    )
    .expect("fixed chord set")
    .with_note(format!("two chords, case {case}")))
}

/// Duplicates every chord with action offsets `0` and `delta` (ids `<id>_1`, `<id>_2`).
pub fn stabilize_zero_diff(spec: &DgaSpec, delta: &Action) -> Result<DgaSpec, ConstructionError> {
    if !spec.has_zero_differential() {
        return Err(ConstructionError::NonzeroDifferential(spec.name().to_string()));
    }
    let chords = spec
        .chords()
        .iter()
        .flat_map(|c| {
            [
                Chord::new(format!("{}_1", c.id), c.source.clone(), c.target.clone(), c.action.clone()),
                Chord::new(format!("{}_2", c.id), c.source.clone(), c.target.clone(), &c.action + delta),
            ]
        })
        .collect();
    let name = format!("stabilized_{}", spec.name());
    let out = DgaSpec::new(name, chords, &BTreeMap::new()).expect("ids stay distinct");
    Ok(out.with_note(format!("doubling of `{}` with offset {delta}", spec.name())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Min,
    Max,
}

/// A Morse function on the circle, as its cyclic sequence of critical points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleMorseData {
    points: Vec<(CriticalKind, Action)>,
}

impl CircleMorseData {
    pub fn new(points: Vec<(CriticalKind, Action)>) -> Result<Self, ConstructionError> {
        let n = points.len();
        if n < 2 || n % 2 != 0 {
            return Err(ConstructionError::InvalidAlternation(format!(
                "need an even number (>= 2) of critical points, got {n}"
            )));
        }
        for i in 0..n {
            if points[i].0 == points[(i + 1) % n].0 {
                return Err(ConstructionError::InvalidAlternation(format!(
                    "points {i} and {} have the same kind",
                    (i + 1) % n
                )));
            }
        }
        let mut values: Vec<&Action> = points.iter().map(|p| &p.1).collect();
        values.sort();
        if values[0].is_zero() {
            return Err(ConstructionError::NonAdmissibleValues("values must be positive".into()));
        }
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConstructionError::NonAdmissibleValues("values must be distinct".into()));
        }
        for i in 0..n {
            if points[i].0 == CriticalKind::Max {
                let prev = &points[(i + n - 1) % n].1;
                let next = &points[(i + 1) % n].1;
                if &points[i].1 <= prev || &points[i].1 <= next {
                    return Err(ConstructionError::NonAdmissibleValues(format!(
                        "max {i} does not exceed its neighbours"
                    )));
                }
            }
        }
        Ok(CircleMorseData { points })
    }

    pub fn points(&self) -> &[(CriticalKind, Action)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn neighbours(&self, i: usize) -> (usize, usize) {
        let n = self.points.len();
        ((i + n - 1) % n, (i + 1) % n)
    }

    /// A random instance with `2..=max_points` critical points and values in hundredths.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Self {
        assert!(max_points >= 2);
        let pairs = rng.random_range(1..=max_points / 2);
        loop {
            let mut used = std::collections::BTreeSet::new();
            let mut fresh = |rng: &mut R, lo: u64| loop {
                let v = rng.random_range(lo + 1..=lo + 300);
                if used.insert(v) {
                    return v;
                }
            };
            let mins: Vec<u64> = (0..pairs).map(|_| fresh(rng, 0)).collect();
            let maxes: Vec<u64> = (0..pairs)
                .map(|k| {
                    let hi = mins[k].max(mins[(k + 1) % pairs]);
                    fresh(rng, hi)
                })
                .collect();
            let points = (0..pairs)
                .flat_map(|k| {
                    [
                        (CriticalKind::Min, Action::from_ratio(mins[k], 100)),
                        (CriticalKind::Max, Action::from_ratio(maxes[k], 100)),
                    ]
                })
                .collect();
            if let Ok(d) = CircleMorseData::new(points) {
                return d;
            }
        }
    }
}

/// One 01-chord per critical point, action equal to the critical value; the
/// differential of a maximum is the sum of its two neighbouring minima.
pub fn morse_circle_spec(data: &CircleMorseData) -> DgaSpec {
    morse_circle_spec_shifted(data, &Rational::from_integer(0.into())).expect("unshifted data is admissible")
}

/// As [`morse_circle_spec`] with every action moved by `shift` (which may be negative as
/// long as all actions stay positive).
pub fn morse_circle_spec_shifted(data: &CircleMorseData, shift: &Rational) -> Result<DgaSpec, ConstructionError> {
    let n = data.len();
    let width = (n - 1).to_string().len();
    let id = |i: usize| format!("c{i:0width$}");
    let k = Endpoint::new(0, "K");
    let l = Endpoint::new(1, "L");
    let mut chords = Vec::with_capacity(n);
    for (i, (_, v)) in data.points().iter().enumerate() {
        let value = v.value() + shift;
        if !value.is_positive() {
            return Err(ConstructionError::NonAdmissibleValues(format!(
                "shift makes critical value {v} non-positive"
            )));
        }
        chords.push(Chord::new(id(i), k.clone(), l.clone(), Action::new(value).expect("positive")));
    }
    let mut d = BTreeMap::new();
    for (i, (kind, _)) in data.points().iter().enumerate() {
        if *kind == CriticalKind::Max {
            let (p, q) = data.neighbours(i);
            d.insert(id(i), vec![vec![id(p)], vec![id(q)]]);
        }
    }
    let spec = DgaSpec::new("morse_circle", chords, &d).expect("ids are distinct");
    Ok(spec.with_note(format!(
        "Morse function on the circle with {n} critical points, shift {}",
        format_rational(shift)
    )))
}

/// Sublevel-set persistence of the circle function, degree 0 and degree 1 together.
///
/// Minima start components; a maximum either merges two components (the younger one
/// dies there) or closes the loop (a degree-1 class is born there).
pub fn morse_sublevel_oracle(data: &CircleMorseData) -> Barcode {
    let n = data.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| data.points[i].1.cmp(&data.points[j].1));

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut bars = Vec::new();
    for &i in &order {
        let (kind, value) = &data.points[i];
        if *kind == CriticalKind::Min {
            continue;
        }
        let (p, q) = data.neighbours(i);
        let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
        if rp == rq {
            bars.push(Bar::infinite(value.clone()));
            continue;
        }
        // roots are the oldest minimum of their component
        let (elder, younger) = if data.points[rp].1 < data.points[rq].1 {
            (rp, rq)
        } else {
            (rq, rp)
        };
        bars.push(Bar::finite(data.points[younger].1.clone(), value.clone()));
        parent[younger] = elder;
    }
    let global_min = order[0];
    bars.push(Bar::infinite(data.points[global_min].1.clone()));
    Barcode::new(bars, None)
}

/// Shape of the specs produced by [`random_valid_spec`].
#[derive(Debug, Clone)]
pub struct RandomSpecParams {
    pub max_generators: usize,
    /// Actions are integers in `1..=max_action`; a small range forces ties.
    pub max_action: u64,
    /// Probability that a chord goes from part 1 back to part 0.
    pub back_chord_probability: f64,
    /// Number of random filtered automorphisms applied to the paired differential.
    pub twists: usize,
}

impl Default for RandomSpecParams {
    fn default() -> Self {
        RandomSpecParams {
            max_generators: 12,
            max_action: 6,
            back_chord_probability: 0.2,
            twists: 4,
        }
    }
}

/// A random spec that satisfies every structural requirement.
///
/// Chords are paired by a differential `d(y) = x` (equal endpoints, lower action), which
/// squares to zero, and the differential is then conjugated by automorphisms
/// `g -> g + w` with `w` a lower-action word with the endpoints of `g` not containing `g`.
/// Conjugation keeps `d^2 = 0`, endpoints and action lowering.
pub fn random_valid_spec<R: Rng + ?Sized>(rng: &mut R, params: &RandomSpecParams) -> DgaSpec {
    let n = rng.random_range(2..=params.max_generators.max(2));
    let parts0 = [Endpoint::new(0, "K0"), Endpoint::new(0, "K1")];
    let parts1 = [Endpoint::new(1, "L0")];
    let mut chords = Vec::with_capacity(n);
    for i in 0..n {
        let action = Action::from_integer(rng.random_range(1..=params.max_action));
        let k = parts0.choose(rng).expect("nonempty").clone();
        let l = parts1.choose(rng).expect("nonempty").clone();
        let (s, t) = match rng.random_range(0.0..1.0) {
            u if u < params.back_chord_probability => (l, k),
            u if u < params.back_chord_probability + 0.1 => (k.clone(), k),
            _ => (k, l),
        };
        chords.push(Chord::new(format!("g{i:02}"), s, t, action));
    }
    let base = DgaSpec::new("random", chords, &BTreeMap::new()).expect("distinct ids");

    // pair generators with equal endpoints and different actions
    let mut diff = vec![Polynomial::zero(); n];
    let mut used = vec![false; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|_| rng.random::<u32>());
    for &y in &idx {
        if used[y] {
            continue;
        }
        let partner = idx.iter().copied().find(|&x| {
            !used[x]
                && x != y
                && base.chord(x).source == base.chord(y).source
                && base.chord(x).target == base.chord(y).target
                && base.chord(x).action < base.chord(y).action
        });
        if let Some(x) = partner {
            if rng.random_bool(0.7) {
                used[x] = true;
                used[y] = true;
                diff[y] = Polynomial::monomial(Word(vec![x]));
            }
        }
    }
    let mut spec = base.with_differential(diff);

    for _ in 0..params.twists {
        let g = rng.random_range(0..n);
        let chord = spec.chord(g).clone();
        let Ok(candidates) = spec.enumerate_words(chord.source.part, chord.target.part, &chord.action, 500) else {
            continue;
        };
        let candidates: Vec<Word> = candidates
            .into_iter()
            .map(|(w, _)| w)
            .filter(|w| !w.letters().contains(&g) && w.len() <= 3)
            .filter(|w| spec.word_endpoints(w).is_some_and(|(s, t)| s == &chord.source && t == &chord.target))
            .collect();
        let Some(w) = candidates.choose(rng) else { continue };
        spec = twist(&spec, g, w);
    }
    spec.with_note("random valid spec")
}

/// Conjugates the differential by the involutive automorphism `g -> g + w`.
fn twist(spec: &DgaSpec, g: usize, w: &Word) -> DgaSpec {
    let phi = |p: &Polynomial| substitute(p, g, w);
    let diff = (0..spec.chords().len())
        .map(|h| {
            let mut image = Polynomial::monomial(Word(vec![h]));
            if h == g {
                image.toggle(w.clone());
            }
            phi(&spec.apply_differential(&image))
        })
        .collect();
    spec.with_differential(diff)
}

/// Applies `g -> g + w` letterwise to every word of `p`.
fn substitute(p: &Polynomial, g: usize, w: &Word) -> Polynomial {
    let mut out = Polynomial::zero();
    for word in p.words() {
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for &letter in word.letters() {
            if letter == g {
                let mut next = Vec::with_capacity(partial.len() * 2);
                for prefix in partial {
                    let mut keep = prefix.clone();
                    keep.push(g);
                    next.push(keep);
                    let mut swap = prefix;
                    swap.extend_from_slice(w.letters());
                    next.push(swap);
                }
                partial = next;
            } else {
                partial.iter_mut().for_each(|prefix| prefix.push(letter));
            }
        }
        for v in partial {
            out.toggle(Word(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ce_dga::validate;
    use crate::filtered_lch::{certify_infinite, lch_barcode};
    use crate::persistence::{l_min_s, Death};
    use crate::rational::{int, rat, Extended};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a(n: u64) -> Action {
        Action::from_integer(n)
    }

    fn h(n: u64, d: u64) -> Action {
        Action::from_ratio(n, d)
    }

    fn four_point() -> CircleMorseData {
        use CriticalKind::*;
        CircleMorseData::new(vec![(Min, h(1, 10)), (Max, h(9, 10)), (Min, h(3, 10)), (Max, h(3, 5))]).unwrap()
    }

    #[test]
    fn two_fiber_generator() {
        let s = two_fiber_spec(&a(2));
        assert_eq!(s.chords().len(), 2);
        assert!(validate(&s).is_valid());
        assert!(certify_infinite(&s));
        assert!(two_fiber_spec(&a(1)).chords().iter().all(|c| c.action == a(1)));
        let r = lch_barcode(&two_fiber_spec(&a(1)), &a(8)).unwrap();
        let ends: Vec<Action> = r.barcode.bars().iter().map(|b| b.birth.clone()).collect();
        assert_eq!(ends, vec![a(1), a(3), a(5), a(7)]);
    }

    #[test]
    fn stabilized_generator() {
        let s = stabilized_two_fiber_spec(&a(2));
        let ids: Vec<&str> = s.chords().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a_1", "a_2", "b_1", "b_2"]);
        assert_eq!(s.enumerate_words(0, 1, &a(7), 100).unwrap().len(), 10);
        let r = lch_barcode(&s, &a(7)).unwrap();
        let mults: Vec<u64> = r.barcode.bars().iter().map(|b| b.multiplicity).collect();
        assert_eq!(mults, vec![2, 8]);
        let three = stabilized_two_fiber_spec(&a(3));
        let w = three.enumerate_words(0, 1, &a(4), 100).unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|(_, x)| x == &a(3)));
    }

    #[test]
    fn two_chord_generator() {
        let big = h(3, 2);
        let case2 = two_chord_spec(&a(1), &big, TwoChordCase::DaEqualsA).unwrap();
        let b = lch_barcode(&case2, &a(4)).unwrap().barcode;
        assert!(b.same_bars(&Barcode::new([Bar::finite(a(1), big.clone())], None)));
        assert_eq!(
            l_min_s(&b, &Extended::Finite(rat(7, 5))).unwrap().value,
            Extended::Finite(a(1))
        );
        let case1 = two_chord_spec(&a(1), &big, TwoChordCase::DaZero).unwrap();
        let r = lch_barcode(&case1, &a(4)).unwrap();
        assert!(r.certified_infinite());
        assert!(r.barcode.bars().iter().all(|b| b.death == Death::Infinite));
        assert!(matches!(
            two_chord_spec(&big, &a(1), TwoChordCase::DaZero),
            Err(ConstructionError::OrderingViolation { .. })
        ));
    }

    #[test]
    fn two_chord_lmin_step() {
        for (an, ad, bn, bd) in [(1, 1, 3, 2), (2, 1, 5, 1), (1, 3, 1, 2)] {
            let (sa, sb) = (h(an, ad), h(bn, bd));
            let spec = two_chord_spec(&sa, &sb, TwoChordCase::DaEqualsA).unwrap();
            let b = lch_barcode(&spec, &(&sb + &a(1))).unwrap().barcode;
            let ratio = sb.value() / sa.value();
            for k in 1..20 {
                let s = int(1) + (&ratio - int(1)) * rat(k, 10);
                let expected = if s < ratio {
                    Extended::Finite(sa.clone())
                } else {
                    Extended::Infinite
                };
                assert_eq!(l_min_s(&b, &Extended::Finite(s)).unwrap().value, expected);
            }
        }
    }

    #[test]
    fn stabilization() {
        let tf = two_fiber_spec(&a(2));
        assert_eq!(
            stabilize_zero_diff(&tf, &Action::zero()).unwrap(),
            stabilized_two_fiber_spec(&a(2))
        );
        let off = stabilize_zero_diff(&tf, &h(1, 100)).unwrap();
        assert!(validate(&off).is_valid());
        let acts: Vec<Action> = off.chords().iter().map(|c| c.action.clone()).collect();
        assert_eq!(acts, vec![a(2), h(201, 100), a(2), h(201, 100)]);
        let case2 = two_chord_spec(&a(1), &h(3, 2), TwoChordCase::DaEqualsA).unwrap();
        assert!(matches!(
            stabilize_zero_diff(&case2, &Action::zero()),
            Err(ConstructionError::NonzeroDifferential(_))
        ));
    }

    #[test]
    fn morse_examples() {
        use CriticalKind::*;
        let two = CircleMorseData::new(vec![(Min, h(1, 5)), (Max, h(4, 5))]).unwrap();
        let spec = morse_circle_spec(&two);
        assert!(spec.differential_of(1).is_zero());
        let expected = Barcode::new([Bar::infinite(h(1, 5)), Bar::infinite(h(4, 5))], None);
        assert!(lch_barcode(&spec, &a(1)).unwrap().barcode.same_bars(&expected));
        assert_eq!(morse_sublevel_oracle(&two), expected);

        let expected4 = Barcode::new(
            [Bar::infinite(h(1, 10)), Bar::finite(h(3, 10), h(3, 5)), Bar::infinite(h(9, 10))],
            None,
        );
        assert_eq!(morse_sublevel_oracle(&four_point()), expected4);
        let r = lch_barcode(&morse_circle_spec(&four_point()), &a(1)).unwrap();
        assert!(r.certified_infinite());
        assert!(r.barcode.same_bars(&expected4));
    }

    #[test]
    fn morse_shift_translates_bars() {
        let data = four_point();
        let shifted = morse_circle_spec_shifted(&data, &rat(1, 2)).unwrap();
        let b = lch_barcode(&shifted, &a(2)).unwrap().barcode;
        let expected = Barcode::new(
            [Bar::infinite(h(3, 5)), Bar::finite(h(4, 5), h(11, 10)), Bar::infinite(h(7, 5))],
            None,
        );
        assert!(b.same_bars(&expected));
        assert!(morse_circle_spec_shifted(&data, &rat(-1, 5)).is_err());
    }

    #[test]
    fn morse_data_validation() {
        use CriticalKind::*;
        assert!(matches!(
            CircleMorseData::new(vec![(Min, a(1)), (Min, a(2))]),
            Err(ConstructionError::InvalidAlternation(_))
        ));
        assert!(matches!(
            CircleMorseData::new(vec![(Min, a(1))]),
            Err(ConstructionError::InvalidAlternation(_))
        ));
        assert!(matches!(
            CircleMorseData::new(vec![(Min, a(2)), (Max, a(1))]),
            Err(ConstructionError::NonAdmissibleValues(_))
        ));
        assert!(matches!(
            CircleMorseData::new(vec![(Min, a(1)), (Max, a(3)), (Min, a(1)), (Max, a(4))]),
            Err(ConstructionError::NonAdmissibleValues(_))
        ));
    }

    #[test]
    fn oracle_has_one_loop_bar_at_global_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let d = CircleMorseData::random(&mut rng, 10);
            let b = morse_sublevel_oracle(&d);
            let top = d.points().iter().map(|p| p.1.clone()).max().unwrap();
            let infinite: Vec<&Bar> = b.bars().iter().filter(|x| x.death == Death::Infinite).collect();
            assert_eq!(infinite.len(), 2);
            assert_eq!(infinite[1].birth, top);
            assert_eq!(b.total_multiplicity() as usize, d.len() / 2 + 1);
        }
    }

    #[test]
    fn random_specs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut nonzero = 0;
        for _ in 0..100 {
            let s = random_valid_spec(&mut rng, &RandomSpecParams::default());
            let report = validate(&s);
            assert!(report.is_valid(), "{report}");
            if !s.has_zero_differential() {
                nonzero += 1;
            }
        }
        assert!(nonzero > 50, "only {nonzero} specs with nonzero differential");
    }

    #[test]
    fn substitution_expands_every_occurrence() {
        let p = Polynomial::monomial(Word(vec![0, 1, 0]));
        let out = substitute(&p, 0, &Word(vec![2]));
        assert_eq!(out.len(), 4);
    }
}
