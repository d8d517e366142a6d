mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use tgl_core::{CriteriaSpec, GenOptions, Generator, PreferenceMode, Rational};

const CASES: u64 = 250;
const TREE_CAP: usize = 2000;

fn cases() -> impl Iterator<Item = (u64, RandomCase)> {
    (0..).map_while(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Some((seed, random_case(&mut rng)))
    })
}

#[test]
fn engine_matches_naive_enumeration() {
    let reg = test_registry();
    let mut checked = 0;
    let mut nonempty = 0;
    for (seed, case) in cases() {
        if checked == CASES {
            break;
        }
        if oracle_tree_count(&case.grammar, &reg, &case.input) > TREE_CAP {
            continue;
        }
        let want = oracle_solutions(&case.grammar, &reg, &case.input);
        let got = engine_solutions(&case.grammar, &reg, &case.input, GenOptions::default());
        assert_eq!(sorted(&got), sorted(&want), "seed {seed}\n{}", case.text);
        checked += 1;
        nonempty += usize::from(!want.is_empty());
    }
    assert!(nonempty > CASES as usize / 3, "only {nonempty} productive grammars");
}

#[test]
fn memo_does_not_change_solutions() {
    let reg = test_registry();
    for (seed, case) in cases().take(150) {
        if oracle_tree_count(&case.grammar, &reg, &case.input) > TREE_CAP {
            continue;
        }
        let on = engine_solutions(&case.grammar, &reg, &case.input, GenOptions::default());
        let off = engine_solutions(
            &case.grammar,
            &reg,
            &case.input,
            GenOptions {
                memo: false,
                ..Default::default()
            },
        );
        assert_eq!(sorted(&on), sorted(&off), "seed {seed}\n{}", case.text);
    }
}

#[test]
fn criteria_reorder_without_changing_the_set() {
    let reg = test_registry();
    for (seed, case) in cases().take(150) {
        if oracle_tree_count(&case.grammar, &reg, &case.input) > TREE_CAP {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let names: Vec<String> = case.grammar.rules.iter().map(|r| r.name.clone()).collect();
        let picks: Vec<(String, Rational)> = names
            .choose_multiple(&mut rng, 3)
            .map(|n| (n.clone(), Rational::from_integer(rng.gen_range(1..5))))
            .collect();
        let plain = engine_solutions(&case.grammar, &reg, &case.input, GenOptions::default());
        for mode in [PreferenceMode::FirstSolutionBias, PreferenceMode::WeightRanked] {
            let spec = CriteriaSpec::from_weights(picks.iter().map(|(n, w)| (n.as_str(), *w))).unwrap().with_mode(mode);
            let got: Vec<_> = Generator::<Rational>::new(&case.grammar, &reg, case.input.clone(), GenOptions::default())
                .with_criteria(Some(&spec))
                .map(|s| {
                    let s = s.unwrap();
                    (s.rules, s.text)
                })
                .collect();
            assert_eq!(sorted(&got), sorted(&plain), "seed {seed} {mode:?}\n{}", case.text);
        }
    }
}

#[test]
fn exhaustion_restores_all_state() {
    let reg = test_registry();
    for (seed, case) in cases().take(100) {
        if oracle_tree_count(&case.grammar, &reg, &case.input) > TREE_CAP {
            continue;
        }
        let mut gen = Generator::<Rational>::new(&case.grammar, &reg, case.input.clone(), GenOptions::default());
        while gen.next_solution().unwrap().is_some() {}
        assert_eq!(gen.trail_len(), 0, "seed {seed}");
        assert!(gen.features().is_empty(), "seed {seed}");
        assert!(gen.memory().is_empty(), "seed {seed}");
        assert!(gen.table().is_empty(), "seed {seed}");
    }
}
