mod support;

use proptest::prelude::*;
use support::props;
use support::{CONTRACTS, SPECS};

fn commands(name: &str) -> Vec<String> {
    support::contract(name)
        .features
        .iter()
        .filter(|f| f.is_command())
        .map(|f| f.name.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counterexamples_replay(spec in 0..SPECS.len(), name in 0..CONTRACTS.len(), k in 1usize..=3, len in 0usize..=3) {
        let r = props::replays(SPECS[spec], CONTRACTS[name], k, len);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn refutations_survive_larger_bounds(name in 0..CONTRACTS.len(), k in 1usize..=2, len in 0usize..=2) {
        let r = props::replays_at_larger_bounds("stack.adt", CONTRACTS[name], k, len);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn strengthening_never_invalidates(name in 0..CONTRACTS.len(), feature in any::<prop::sample::Index>(), clause in any::<prop::sample::Index>(), len in 1usize..=2) {
        let class = support::contract(CONTRACTS[name]);
        let feature = feature.get(&commands(CONTRACTS[name])).clone();
        let pool = props::strengthening_pool(&class, &feature);
        let clause = clause.get(&pool).clone();
        let r = props::strengthening_is_safe("stack.adt", CONTRACTS[name], &feature, &clause, 2, len);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}

#[test]
fn conjoining_true_changes_nothing() {
    for name in CONTRACTS {
        for feature in commands(name) {
            let class = support::contract(name);
            let before = ccheck::checker::check_completeness(
                &support::adt("stack.adt"),
                &class,
                props::options(2, 2),
            )
            .unwrap();
            let after = props::strengthened(&class, &feature, &ccheck::contract::Expr::Bool(true));
            let after = ccheck::checker::check_completeness(
                &support::adt("stack.adt"),
                &after,
                props::options(2, 2),
            )
            .unwrap();
            let statuses = |r: &ccheck::checker::CompletenessReport| {
                r.verdicts().map(|v| v.status).collect::<Vec<_>>()
            };
            assert_eq!(statuses(&before), statuses(&after), "{name} {feature}");
        }
    }
}

#[test]
fn default_equality_is_an_equivalence() {
    for name in CONTRACTS {
        props::default_equality_laws(name, 2, 2).unwrap();
    }
}

#[test]
fn corpus_round_trips() {
    props::round_trips().unwrap();
}
