use proptest::prelude::*;

use symsched_core::model::{Epsilon, Instance};
use symsched_core::rational::int;
use symsched_core::rounding::{brute_force_opt, greedy_short, ptas_round, ptas_round_order};

fn micro() -> impl Strategy<Value = Instance> {
    (2usize..=2, prop::collection::vec(1u64..=9, 2..=5)).prop_map(|(m, sizes)| Instance::from_sizes(m, &sizes))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rounded_schedules_meet_the_bound(inst in micro(), slack in 0u64..=3) {
        let (opt, _) = brute_force_opt(&inst, 1_000_000).unwrap();
        let t = opt + slack;
        let eps = Epsilon::from_inverse(2).unwrap();
        let degree = inst.machines * inst.num_jobs();
        let rep = ptas_round(&inst, t, eps, degree).unwrap();
        prop_assert_eq!(rep.schedule.assignment.len(), inst.num_jobs());
        prop_assert!(rep.schedule.assignment.iter().all(|&i| i < inst.machines));
        prop_assert!(int(rep.schedule.makespan as i64) <= int(t as i64) * (int(1) + eps.value()));
        prop_assert!(rep.all_checks_hold(), "{:?}", rep.checks);
    }

    #[test]
    fn ordered_rounding_keeps_the_order_rows(inst in micro()) {
        let (opt, _) = brute_force_opt(&inst, 1_000_000).unwrap();
        let t = (3 * opt).div_ceil(2);
        let degree = inst.machines * inst.num_jobs();
        let rep = ptas_round_order(&inst, t, Epsilon::from_inverse(2).unwrap(), degree).unwrap();
        prop_assert!(rep.checks.iter().any(|c| c.name == "order rows" && c.holds));
        prop_assert!(rep.all_checks_hold(), "{:?}", rep.checks);
    }

    #[test]
    fn greedy_short_respects_the_dichotomy(
        machines in 1usize..=4,
        sizes in prop::collection::vec(1u64..=20, 1..=10),
        placed in prop::collection::vec(prop::option::of(0usize..4), 10),
    ) {
        let inst = Instance::from_sizes(machines, &sizes);
        let partial: Vec<Option<usize>> = (0..sizes.len()).map(|j| placed[j].map(|i| i % machines)).collect();
        let shorts: Vec<usize> = (0..sizes.len()).filter(|&j| partial[j].is_none()).collect();
        let long_only: u64 = {
            let mut loads = vec![0u64; machines];
            for (j, p) in partial.iter().enumerate() {
                if let Some(i) = p {
                    loads[*i] += sizes[j];
                }
            }
            loads.into_iter().max().unwrap_or(0)
        };
        let after = greedy_short(&partial, &shorts, &inst);
        let max_short = shorts.iter().map(|&j| sizes[j]).max().unwrap_or(0);
        let average = int(inst.total_size() as i64) / int(machines as i64);
        let bound = std::cmp::max(int(long_only as i64), average + int(max_short as i64));
        prop_assert!(int(after.makespan as i64) <= bound);
        prop_assert_eq!(after.loads.iter().sum::<u64>(), inst.total_size());
    }
}
