use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srgen_core::assertions::{select_unique_killers, Assertion, DEFAULT_TOLERANCE};
use srgen_core::chromosome::{crossover, mutate, repair, validate, Factory, FactoryConfig, Representation, Statement, TestCase};
use srgen_core::runtime::{ObsKind, ObsRef, Observed};
use srgen_core::search::{run_search, SearchConfig};
use srgen_core::subject::{parse_subject, print_subject, GoalIndex, SubjectUnit, CONSTRUCTOR};

const CORPUS: [&str; 6] = [
    include_str!("../../../corpus/arith.sub"),
    include_str!("../../../corpus/bank_account.sub"),
    include_str!("../../../corpus/bounded_counter.sub"),
    include_str!("../../../corpus/inventory.sub"),
    include_str!("../../../corpus/thermostat.sub"),
    include_str!("../../../corpus/triangle.sub"),
];

const CFG: FactoryConfig = FactoryConfig { max_len: 40, init_len: 8 };

fn units() -> Vec<SubjectUnit> {
    CORPUS.iter().map(|s| parse_subject(s).unwrap()).collect()
}

fn ends_in_focal(t: &TestCase, method: &str) -> bool {
    match t.statements.last() {
        Some(Statement::Method { method: m, .. }) => m == method,
        Some(Statement::Constructor { .. }) => method == CONSTRUCTOR,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operators_keep_tests_well_formed(subject in 0..CORPUS.len(), seed: u64, focal: bool) {
        let unit = parse_subject(CORPUS[subject]).unwrap();
        let goals = GoalIndex::new(&unit);
        let f = Factory::new(&unit, CFG).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let repr = if focal { Representation::Focal } else { Representation::Baseline };
        let g1 = goals.goal(seed as usize % goals.len());
        let g2 = goals.goal((seed as usize / 7) % goals.len());
        let mut a = f.random_test(repr, g1, &mut rng);
        let mut b = f.random_test(repr, g2, &mut rng);
        let (fa, fb) = (a.focal_method.clone(), b.focal_method.clone());
        for _ in 0..10 {
            mutate(&f, &mut a, &mut rng);
            prop_assert!(validate(&unit, &a, CFG.max_len).is_empty(), "{:?}", validate(&unit, &a, CFG.max_len));
            let (c, d) = crossover(&f, &a, &b, &mut rng);
            prop_assert!(validate(&unit, &c, CFG.max_len).is_empty());
            prop_assert!(validate(&unit, &d, CFG.max_len).is_empty());
            prop_assert_eq!(&c.focal_method, &fa);
            prop_assert_eq!(&d.focal_method, &fb);
            b = d;
        }
        prop_assert_eq!(&a.focal_method, &fa);
        if let Some(m) = &fa {
            prop_assert!(ends_in_focal(&a, m));
        }
    }

    #[test]
    fn repair_leaves_clean_tests_alone(subject in 0..CORPUS.len(), seed: u64) {
        let unit = parse_subject(CORPUS[subject]).unwrap();
        let goals = GoalIndex::new(&unit);
        let f = Factory::new(&unit, CFG).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for repr in Representation::ALL {
            let t = f.random_test(repr, goals.goal(seed as usize % goals.len()), &mut rng);
            let mut u = t.clone();
            repair(&f, &mut u, &mut rng);
            prop_assert_eq!(u, t);
        }
    }

    #[test]
    fn greedy_cover_is_irredundant(sets in prop::collection::vec(prop::collection::btree_set(0usize..12, 0..5), 0..10)) {
        let cands: Vec<Assertion> = sets
            .iter()
            .enumerate()
            .map(|(id, k)| Assertion {
                id,
                at: ObsRef { kind: ObsKind::StatementReturn, stmt: id, receiver: None, inspector: None },
                expected: Observed::Normal,
                tolerance: DEFAULT_TOLERANCE,
                killed: k.clone(),
                fallback: false,
            })
            .collect();
        let kept = select_unique_killers(&cands, None);
        let all: BTreeSet<usize> = sets.iter().flatten().copied().collect();
        let mut covered = BTreeSet::new();
        for &i in &kept {
            // every pick adds a mutant nothing earlier killed
            prop_assert!(!sets[i].is_subset(&covered));
            covered.extend(sets[i].iter().copied());
        }
        prop_assert_eq!(covered, all);
    }
}

#[test]
fn corpus_prints_and_reparses() {
    for u in units() {
        assert_eq!(parse_subject(&print_subject(&u)).unwrap(), u);
    }
}

#[test]
fn one_entry_and_two_outcomes_per_conditional() {
    for u in units() {
        assert_eq!(GoalIndex::new(&u).len(), u.callable_count() + 2 * u.conditional_count());
    }
}

#[test]
fn search_is_deterministic() {
    for u in units() {
        let goals = GoalIndex::new(&u);
        for repr in Representation::ALL {
            let cfg = SearchConfig { seed: 3, representation: repr, max_evaluations: 3_000, ..SearchConfig::default() };
            let (a, sa) = run_search(&u, &goals, &cfg).unwrap();
            let (b, sb) = run_search(&u, &goals, &cfg).unwrap();
            assert_eq!(a.tests(), b.tests());
            assert_eq!(sa, sb);
        }
    }
}
