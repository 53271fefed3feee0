use proptest::prelude::*;

use symsched_core::lab::{check_kill_consistency, check_machine_symmetry, pe_hard, HardPe, PartialSchedule};
use symsched_core::lift::Moments;
use symsched_core::rational::zero;
use symsched_core::VarSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn moments_are_machine_symmetric(seed in any::<u64>(), k in prop::sample::select(vec![3usize, 5, 7])) {
        prop_assert!(check_machine_symmetry(k, 10, 50, seed).is_empty());
    }

    #[test]
    fn killing_non_partial_monomials_keeps_moments(seed in any::<u64>()) {
        prop_assert_eq!(check_kill_consistency(5, 40, seed), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Two configurations on one machine is not a partial schedule.
    #[test]
    fn non_partial_monomials_vanish(machine in 0usize..9, a in 0usize..6, b in 0usize..6, other in 0usize..9, c in 0usize..6) {
        prop_assume!(a != b);
        let pe = HardPe::new(3);
        let g = pe.ground;
        let s = VarSet::from_iter([g.var(machine, a), g.var(machine, b), g.var(other, c)]);
        prop_assert_eq!(pe.moment(&s), zero());
    }

    #[test]
    fn moments_vanish_past_the_window(k in prop::sample::select(vec![3usize, 5, 7]), size in 0usize..=4, config in 0usize..6) {
        let s = PartialSchedule::from_pairs((0..size).map(|i| (i, config))).unwrap();
        let v = pe_hard(&s, k);
        prop_assert_eq!(v == zero(), 2 * size > k);
    }
}
