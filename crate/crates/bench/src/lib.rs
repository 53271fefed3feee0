//! Fixed inputs shared by the benchmarks.

use symsched_core::model::Instance;
use symsched_core::rational::{frac, one, zero};
use symsched_core::{Relation, RationalLP};

/// Two machines, five jobs: small enough that the full-degree lift is
/// enumerated but large enough to exercise every rounding stage.
pub fn micro_instance() -> Instance {
    Instance::from_sizes(2, &[5, 4, 3, 3, 2])
}

/// `x_1 + ... + x_n = 3/2` over `[0, 1]` boxes.
pub fn half_sum(n: usize) -> RationalLP {
    let mut lp = RationalLP::new("half-sum");
    for k in 0..n {
        lp.add_var(format!("x{k}"), Some(zero()), Some(one()));
    }
    lp.add_row("sum", (0..n).map(|k| (k, one())).collect(), Relation::Eq, frac(3, 2));
    lp
}
