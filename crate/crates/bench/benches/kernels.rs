use criterion::{black_box, criterion_group, criterion_main, Criterion};

use symsched_bench::{half_sum, micro_instance};
use symsched_core::exact_lp::feasible;
use symsched_core::formulations::build_assign;
use symsched_core::lab::{moment_block, pe_hard, HookTableau, PartialSchedule};
use symsched_core::lift::{build_sa_lift, solve_lift, solve_lift_lp, DEFAULT_LIFT_CAP};
use symsched_core::model::Epsilon;
use symsched_core::rounding::ptas_round;

fn lp_and_lift(c: &mut Criterion) {
    let inst = micro_instance();
    let assign = build_assign(&inst, 9).lp;
    c.bench_function("simplex/assign-micro", |b| b.iter(|| feasible(black_box(&assign)).unwrap()));

    let sum = half_sum(6);
    c.bench_function("lift/build-degree-3", |b| b.iter(|| build_sa_lift(black_box(&sum), 3, DEFAULT_LIFT_CAP).unwrap()));
    let sum = half_sum(4);
    c.bench_function("lift/solve-lp-degree-2", |b| b.iter(|| solve_lift_lp(black_box(&sum), 2, DEFAULT_LIFT_CAP).unwrap()));
    c.bench_function("lift/enumerate-full-degree", |b| {
        b.iter(|| solve_lift(black_box(&assign), assign.num_vars(), DEFAULT_LIFT_CAP).unwrap())
    });
}

fn rounding(c: &mut Criterion) {
    let inst = micro_instance();
    let eps = Epsilon::from_inverse(2).unwrap();
    c.bench_function("round/micro-full-degree", |b| b.iter(|| ptas_round(black_box(&inst), 9, eps, 10).unwrap()));
}

fn lower_bound(c: &mut Criterion) {
    let s = PartialSchedule::from_pairs([(0, 0), (1, 0), (2, 3)]).unwrap();
    c.bench_function("pe/closed-form-k7", |b| b.iter(|| pe_hard(black_box(&s), 7)));
    let hook = HookTableau::new(20, 21).unwrap();
    let mut group = c.benchmark_group("blocks");
    group.sample_size(10);
    group.bench_function("moment-block-k7-tail1", |b| b.iter(|| moment_block(black_box(&hook), 1, 7).unwrap()));
    group.finish();
}

criterion_group!(benches, lp_and_lift, rounding, lower_bound);
criterion_main!(benches);
