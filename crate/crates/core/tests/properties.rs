mod support;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use support::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ordinal_laws(a in small_ordinal(), b in small_ordinal(), c in small_ordinal()) {
        check_ordinal_laws(&a, &b, &c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn blue_three_matches_sampling(seed in coloring_seed(&SHAPES, 0.3)) {
        check_blue3(&build_coloring(&seed)).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn skeletons_are_homogeneous(seed in coloring_seed(&["w^2*2 + 1"], 0.5)) {
        check_skeleton(&build_coloring(&seed)).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn solver_matches_truth_table((nvars, cnf) in cnf_system()) {
        check_solver(nvars, &cnf).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn f_sets_match_brute_force() {
    for r in 0..=5 {
        for m in 0..=2 {
            check_f_set(r, m).unwrap();
        }
    }
}

#[test]
fn g3_tables_satisfy_the_catalogue() {
    check_g3_bridge().unwrap();
}
