use lchpm_core::bounds::{chord_bound_autonomous, chord_time_vs_pb, pb_plus_lower_bound, TaggedLMin};
use lchpm_core::ce_dga::{validate, Polynomial};
use lchpm_core::constructions::{
    morse_circle_spec, morse_sublevel_oracle, random_valid_spec, stabilized_two_fiber_spec, two_fiber_spec,
    CircleMorseData, RandomSpecParams,
};
use lchpm_core::filtered_lch::{lch_barcode, FilteredComplex};
use lchpm_core::oracle::{dense_barcode, inclusion_rank};
use lchpm_core::persistence::{
    additive_shift, l_min_s, multiplicative_shift, rank_between, Bar, Barcode, Death,
};
use lchpm_core::rational::{rat, Action, Extended, Rational};
use lchpm_core::DgaSpec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn action(n: u64) -> Action {
    Action::from_integer(n)
}

/// Largest truncation (up to 4x the top chord action) whose basis stays within `max_basis`.
fn complex_for(spec: &DgaSpec, max_basis: usize) -> Option<(FilteredComplex, Action)> {
    let top = spec.chords().iter().map(|c| c.action.clone()).max()?;
    let mut best = None;
    for k in 1..=4u64 {
        let r = &top.scale(&Rational::from_integer(k.into())) + &action(1);
        match FilteredComplex::build(spec, &r, max_basis) {
            Ok(c) => best = Some((c, r)),
            Err(_) => break,
        }
    }
    best
}

fn midpoints(actions: &[Action], r_max: &Action) -> Vec<Action> {
    let mut v: Vec<Action> = actions.to_vec();
    v.push(Action::zero());
    v.push(r_max.clone());
    v.sort();
    v.dedup();
    v.windows(2)
        .map(|w| Action::new((w[0].value() + w[1].value()) / Rational::from_integer(2.into())).unwrap())
        .collect()
}

#[test]
fn rank_function_matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for _ in 0..60 {
        let spec = random_valid_spec(&mut rng, &RandomSpecParams::default());
        let Some((complex, r_max)) = complex_for(&spec, 150) else { continue };
        let barcode = complex.barcode(&r_max).unwrap();
        let actions: Vec<Action> = complex.basis.iter().map(|(_, a)| a.clone()).collect();
        let mids = midpoints(&actions, &r_max);
        for (i, s) in mids.iter().enumerate() {
            for t in &mids[i..] {
                assert_eq!(
                    rank_between(&barcode, s, t).unwrap() as usize,
                    inclusion_rank(&actions, &complex.boundaries, s, t),
                    "spec {:?} s={s} t={t}",
                    lchpm_core::ce_dga::spec_to_json(&spec)
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn barcode_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let params = RandomSpecParams {
        max_generators: 5,
        ..RandomSpecParams::default()
    };
    for _ in 0..60 {
        let spec = random_valid_spec(&mut rng, &params);
        let Some((complex, r_max)) = complex_for(&spec, 200) else { continue };
        let actions: Vec<Action> = complex.basis.iter().map(|(_, a)| a.clone()).collect();
        assert_eq!(
            complex.barcode(&r_max).unwrap(),
            dense_barcode(&actions, &complex.boundaries, &r_max)
        );
    }
}

#[test]
fn tie_break_does_not_change_barcode() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let params = RandomSpecParams {
        max_action: 3,
        ..RandomSpecParams::default()
    };
    for _ in 0..40 {
        let spec = random_valid_spec(&mut rng, &params);
        let Some((complex, r_max)) = complex_for(&spec, 200) else { continue };
        let reference = complex.barcode(&r_max).unwrap();
        for _ in 0..5 {
            let permuted = complex.permute_ties(&mut rng);
            assert_eq!(permuted.barcode(&r_max).unwrap(), reference);
        }
    }
}

#[test]
fn differential_laws_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut specs = vec![two_fiber_spec(&action(2)), stabilized_two_fiber_spec(&action(2))];
    for _ in 0..30 {
        specs.push(random_valid_spec(&mut rng, &RandomSpecParams::default()));
    }
    for spec in &specs {
        assert!(validate(spec).is_valid());
        for _ in 0..100 {
            let Some(w) = spec.random_word(&mut rng, 0, 7) else { break };
            let p = Polynomial::monomial(w.clone());
            let d = spec.apply_differential(&p);
            assert!(spec.apply_differential(&d).is_zero());
            let ends = spec.word_endpoints(&w).unwrap();
            for out in d.words() {
                assert!(spec.is_composable(out));
                assert!(spec.word_action(out) < spec.word_action(&w));
                assert_eq!(spec.word_endpoints(out), Some(ends));
            }
        }
    }
}

#[test]
fn morse_spec_matches_sublevel_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let data = CircleMorseData::random(&mut rng, 10);
        let spec = morse_circle_spec(&data);
        let res = lch_barcode(&spec, &action(10)).unwrap();
        assert!(res.certified_infinite());
        assert!(res.barcode.same_bars(&morse_sublevel_oracle(&data)));
    }
}

#[test]
fn two_fiber_families_in_closed_form() {
    for l in [1u64, 2, 3] {
        for r in [5u64, 9, 14] {
            let r = action(r * l);
            let res = lch_barcode(&two_fiber_spec(&action(l)), &r).unwrap();
            let expected: Vec<Bar> = (1..)
                .map(|k: u64| action((2 * k - 1) * l))
                .take_while(|b| b < &r)
                .map(Bar::infinite)
                .collect();
            assert!(res.barcode.same_bars(&Barcode::new(expected, None)));

            let res = lch_barcode(&stabilized_two_fiber_spec(&action(l)), &r).unwrap();
            for (k, bar) in res.barcode.bars().iter().enumerate() {
                assert_eq!(bar.birth, action((2 * k as u64 + 1) * l));
                assert_eq!(bar.multiplicity, 1 << (2 * k + 1));
                assert_eq!(bar.death, Death::Infinite);
            }
        }
    }
}

#[test]
fn bound_chain_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    use rand::Rng;
    for _ in 0..1000 {
        let r = |rng: &mut ChaCha8Rng| rat(rng.random_range(1..500), rng.random_range(1..60));
        let (l, sm, gap, delta) = (r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
        let sp = &sm + &gap;
        let tagged = TaggedLMin::at_window(Extended::Finite(Action::new(l).unwrap()), &sm, &sp);
        let direct = chord_bound_autonomous(&tagged, &sm, &sp, &delta).unwrap().value;
        let pb = pb_plus_lower_bound(&tagged, &sm, &sp).unwrap().value;
        let via_pb = chord_time_vs_pb(pb.finite().unwrap(), &delta).unwrap();
        assert_eq!(direct, Extended::Finite(via_pb));
    }
}

fn arb_barcode() -> impl Strategy<Value = Barcode> {
    proptest::collection::vec((1u64..40, 1u64..8, 0u8..3, 1u64..4), 0..8).prop_map(|raw| {
        Barcode::new(
            raw.into_iter().map(|(b, len, kind, m)| {
                let birth = Action::from_ratio(b, 4);
                let end = Action::from_ratio(b + len, 4);
                let death = match kind {
                    0 => Death::Finite(end),
                    1 => Death::Infinite,
                    _ => Death::Censored(end),
                };
                Bar::new(birth, death, m)
            }),
            None,
        )
    })
}

fn arb_positive() -> impl Strategy<Value = Rational> {
    (1i64..20, 1i64..20).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn multiplicative_shifts_compose(b in arb_barcode(), c1 in arb_positive(), c2 in arb_positive()) {
        let once = multiplicative_shift(&b, &(&c1 * &c2));
        let twice = multiplicative_shift(&multiplicative_shift(&b, &c1), &c2);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn additive_shifts_compose(b in arb_barcode(), c1 in 0i64..20, c2 in 0i64..20) {
        let (c1, c2) = (rat(c1, 8), rat(c2, 8));
        let once = additive_shift(&b, &(&c1 + &c2));
        let twice = additive_shift(&additive_shift(&b, &c1), &c2);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn l_min_is_monotone(b in arb_barcode(), s1 in 1i64..40, s2 in 1i64..40) {
        let (lo, hi) = (s1.min(s2), s1.max(s2));
        let s = |k: i64| Extended::Finite(rat(10 + k, 10));
        let v_lo = l_min_s(&b, &s(lo)).unwrap().value;
        let v_hi = l_min_s(&b, &s(hi)).unwrap().value;
        let v_inf = l_min_s(&b, &Extended::Infinite).unwrap().value;
        prop_assert!(v_lo <= v_hi);
        prop_assert!(v_hi <= v_inf);
    }

    #[test]
    fn barcode_text_round_trips(b in arb_barcode()) {
        prop_assert_eq!(Barcode::from_text(&b.to_text()).unwrap(), b);
    }
}
