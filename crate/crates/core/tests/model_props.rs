use proptest::prelude::*;
use std::collections::BTreeSet;

use symsched_core::model::{classify_with, enumerate_configurations, Epsilon, Instance};
use symsched_core::rational::{frac, int, lower_factorial};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classes_tile_the_long_range(
        sizes in prop::collection::vec(1u64..60, 1..12),
        t in 1u64..60,
        inverse in 2u64..5,
    ) {
        let inst = Instance::from_sizes(2, &sizes);
        let eps = Epsilon::from_inverse(inverse).unwrap();
        let cls = classify_with(&inst, t, eps);
        // Each job is in exactly one bucket.
        let mut seen = vec![0u32; sizes.len()];
        for &j in cls.short.iter().chain(cls.classes.iter().flatten()) {
            seen[j] += 1;
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        // Consecutive class ranges share their endpoints; the first starts
        // at eps T and the last ends at T.
        let s = cls.num_classes();
        prop_assert_eq!(cls.rounded_size(1), cls.long_threshold());
        prop_assert_eq!(cls.class_upper(s), int(t as i64));
        for q in 1..s {
            prop_assert_eq!(cls.class_upper(q), cls.rounded_size(q + 1));
        }
        for (j, job) in inst.jobs.iter().enumerate() {
            let p = int(job.size as i64);
            match cls.class_of[j] {
                None => prop_assert!(p < cls.long_threshold()),
                Some(q) if job.size >= t => prop_assert_eq!(q, s),
                Some(q) => {
                    prop_assert!(cls.rounded_size(q) <= p);
                    prop_assert!(p < cls.class_upper(q));
                }
            }
        }
    }

    #[test]
    fn configurations_are_closed_downward(
        sizes in prop::collection::vec(1u64..12, 1..5),
        t in 0u64..25,
    ) {
        let configs = enumerate_configurations(&sizes, t, 100_000).unwrap();
        let set: BTreeSet<_> = configs.iter().cloned().collect();
        prop_assert_eq!(set.len(), configs.len());
        for c in &configs {
            prop_assert!(c.load() <= t);
            for smaller in c.one_smaller() {
                prop_assert!(set.contains(&smaller), "{} missing below {}", smaller, c);
            }
        }
    }

    #[test]
    fn lower_factorial_splits(num in -40i64..40, den in 1i64..6, b in 0u32..=20, c in 0u32..=20) {
        let a = frac(num, den);
        let lhs = lower_factorial(&a, b + c);
        let rhs = lower_factorial(&a, b) * lower_factorial(&(a.clone() - int(b as i64)), c);
        prop_assert_eq!(lhs, rhs);
    }
}
