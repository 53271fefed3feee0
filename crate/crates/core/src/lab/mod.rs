//! The Petersen-graph hard instance and the exact checks around its
//! pseudoexpectation.

pub mod blocks;
pub mod instance;
pub mod pe;
pub mod schedule;

pub use blocks::{
    check_block_psd, check_hook_span, moment_block, spanning_set, verify_hard_sos, BlockCheck, Descriptor,
    HookTableau, MomentBlock, SosBlockReport,
};
pub use instance::{
    gen_hard_instance, gen_hard_instance_with, petersen_edges, petersen_perfect_matchings,
    exact_fill_search, restricted_integral_search, HardInstance, RestrictedSearch, HARD_MAKESPAN,
};
pub use pe::{
    check_conditioning, check_conditioning_with, check_pseudoindependence, chu_vandermonde_check,
    chu_vandermonde_points, chu_vandermonde_sweep, check_machine_symmetry, pe_b, pe_hard, pe_hard_cond,
    pseudoindependence_sweep, ConditioningReport, HardPe, IndependenceReport, SweepBounds,
};
pub use schedule::{b_poly, extensions, PartialSchedule, Profile};

use crate::formulations::{build_clp_over, Formulation};
use crate::lift::{pe_eval, verify_sa_pe, Moments, SaReport};
use crate::rational::{frac, Rational};
use crate::ring::{kill_non_partial, RingError, SquareFreePoly, VarSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("no valid size vector found within {budget} draws")]
    SearchFailed { budget: u64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("matrix with {size} rows exceeds the limit of {limit}")]
    MatrixTooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The configuration program of the hard instance over its six matching
/// configurations at makespan 1023. Every other configuration carries
/// moment zero, so its variables drop out of each lifted row.
pub fn hard_clp(hard: &HardInstance) -> Formulation {
    build_clp_over(&hard.instance, hard.t, hard.matching_configurations.clone())
}

/// Checks the hard pseudoexpectation against the degree-`level` lift of
/// [`hard_clp`].
pub fn verify_hard_sa(k: usize, level: usize) -> Result<SaReport, LabError> {
    if level > k / 2 {
        return Err(LabError::BadParameter(format!("level {level} exceeds k/2 for k = {k}")));
    }
    let hard = gen_hard_instance(k)?;
    Ok(verify_hard_sa_with(&HardPe::new(k), &hard, level))
}

/// As [`verify_hard_sa`] for an arbitrary moment map on the same variables.
pub fn verify_hard_sa_with<M: Moments + Sync + ?Sized>(pe: &M, hard: &HardInstance, level: usize) -> SaReport {
    verify_sa_pe(pe, &hard_clp(hard).lp, level)
}

/// The hard pseudoexpectation with one moment shifted, for negative tests.
#[derive(Debug, Clone)]
pub struct ShiftedPe {
    pub base: HardPe,
    pub at: VarSet,
    pub shift: Rational,
}

impl Moments for ShiftedPe {
    fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    fn degree(&self) -> usize {
        self.base.degree()
    }

    fn moment(&self, s: &VarSet) -> Rational {
        let v = self.base.moment(s);
        if *s == self.at {
            v + &self.shift
        } else {
            v
        }
    }
}

/// Compares `E(f)` with `E(kill_non_partial(f))` on random polynomials
/// mixing partial and non-partial monomials. Returns the number of
/// disagreements.
pub fn check_kill_consistency(k: usize, samples: usize, seed: u64) -> usize {
    let pe = HardPe::new(k);
    let ground = pe.ground;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let mut f = SquareFreePoly::zero();
        for _ in 0..rng.gen_range(1..=6) {
            let size = rng.gen_range(0..=pe.degree());
            let vars = (0..size).map(|_| rng.gen_range(0..ground.size() as u32));
            f.add_term(VarSet::from_iter(vars), frac(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
        }
        let lhs = pe_eval(&pe, &f).expect("degree respected");
        let rhs = pe_eval(&pe, &kill_non_partial(&f, &ground)).expect("degree respected");
        if lhs != rhs {
            bad += 1;
        }
    }
    bad
}
