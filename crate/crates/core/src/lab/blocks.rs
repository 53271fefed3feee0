//! Hook-shaped tableaux, the spanning sets of their row subspaces and the
//! symmetry-reduced moment blocks of the hard pseudoexpectation.

use super::pe::{pe_b, pe_hard, HardPe, MATCHING_CONFIGS};
use super::schedule::{spanning_poly, PartialSchedule, Profile};
use super::LabError;
use crate::lift::pe_eval;
use crate::linalg;
use crate::psd::{psd_check, PsdOutcome};
use crate::rational::{frac, Rational};
use crate::ring::{equal_mod_sched, kill_non_partial, symmetrize_over, GroundSet, SquareFreePoly, VarSet};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest number of spanning descriptors per block.
pub const BLOCK_DESCRIPTOR_LIMIT: usize = 2_000;

/// A two-row hook shape `(first_row, 1, ..., 1)` on `machines` boxes, in
/// its canonical filling: the tail holds the lowest-index machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HookTableau {
    pub first_row: usize,
    pub machines: usize,
}

impl HookTableau {
    pub fn new(first_row: usize, machines: usize) -> Result<Self, LabError> {
        if first_row == 0 || first_row > machines {
            return Err(LabError::BadParameter(format!(
                "first row {first_row} must lie in 1..={machines}"
            )));
        }
        Ok(HookTableau { first_row, machines })
    }

    pub fn tail(&self) -> Vec<usize> {
        (0..self.machines - self.first_row).collect()
    }

    pub fn row(&self) -> Vec<usize> {
        (self.machines - self.first_row..self.machines).collect()
    }

    pub fn tail_len(&self) -> usize {
        self.machines - self.first_row
    }

    /// Whether the shape belongs to the level-`level` family.
    pub fn within_level(&self, level: usize) -> bool {
        self.tail_len() <= level
    }

    /// Every hook with tail length at most `level`.
    pub fn family(machines: usize, level: usize) -> Vec<HookTableau> {
        (0..=level.min(machines - 1))
            .map(|tail| HookTableau { first_row: machines - tail, machines })
            .collect()
    }
}

/// A spanning element `y_T B_{T,gamma}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub schedule: PartialSchedule,
    pub profile: Profile,
}

/// All schedules of the tail combined with every profile of norm at most
/// `level`.
pub fn spanning_set(hook: &HookTableau, level: usize, configs: usize) -> Vec<Descriptor> {
    let tail = hook.tail();
    let mut schedules = vec![PartialSchedule::empty()];
    for &machine in &tail {
        schedules = schedules
            .iter()
            .flat_map(|s| {
                (0..configs).map(move |c| {
                    let mut pairs = s.pairs().to_vec();
                    pairs.push((machine, c));
                    PartialSchedule::from_pairs(pairs).expect("tail machines are distinct")
                })
            })
            .collect();
    }
    let profiles = Profile::all_up_to(configs, level);
    schedules
        .into_iter()
        .flat_map(|s| profiles.iter().map(move |p| Descriptor { schedule: s.clone(), profile: p.clone() }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct MomentBlock {
    pub hook: HookTableau,
    pub level: usize,
    pub k: usize,
    pub descriptors: Vec<Descriptor>,
    /// Entries from the factorised formula.
    pub matrix: Vec<Vec<Rational>>,
    /// Entries where the brute-force expansion disagreed with the formula.
    pub mismatches: Vec<(usize, usize)>,
}

/// The block of the hard moment matrix indexed by the spanning set of
/// `hook`. Every entry is expanded by brute force and compared with the
/// factorised value `E(y_T) E_T(B_gamma) E_T(B_mu)` (zero when the
/// schedules differ).
pub fn moment_block(hook: &HookTableau, level: usize, k: usize) -> Result<MomentBlock, LabError> {
    let descriptors = spanning_set(hook, level, MATCHING_CONFIGS);
    if descriptors.len() > BLOCK_DESCRIPTOR_LIMIT {
        return Err(LabError::MatrixTooLarge { size: descriptors.len(), limit: BLOCK_DESCRIPTOR_LIMIT });
    }
    let pe = HardPe::new(k);
    let ground = pe.ground;
    let polys: Vec<SquareFreePoly> =
        descriptors.iter().map(|d| spanning_poly(&d.schedule, &d.profile, &ground)).collect();
    let factors: Vec<Rational> = descriptors.iter().map(|d| pe_b(&d.schedule, &d.profile, k)).collect();
    let n = descriptors.len();
    let rows: Vec<(Vec<Rational>, Vec<(usize, usize)>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n);
            let mut bad = Vec::new();
            for j in 0..n {
                let (a, b) = (&descriptors[i], &descriptors[j]);
                let formula = if a.schedule == b.schedule {
                    pe_hard(&a.schedule, k) * &factors[i] * &factors[j]
                } else {
                    Rational::zero()
                };
                let product = polys[i].mul_filtered(&polys[j], |s| ground.is_partial_schedule(s));
                let brute = pe_eval(&pe, &product).expect("product stays inside the degree");
                if brute != formula {
                    bad.push((i, j));
                }
                row.push(formula);
            }
            (row, bad)
        })
        .collect();
    let mut matrix = Vec::with_capacity(n);
    let mut mismatches = Vec::new();
    for (row, bad) in rows {
        matrix.push(row);
        mismatches.extend(bad);
    }
    Ok(MomentBlock { hook: *hook, level, k, descriptors, matrix, mismatches })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCheck {
    pub psd: PsdOutcome,
    pub identity_checks: usize,
    pub identity_failures: usize,
}

impl BlockCheck {
    pub fn passed(&self) -> bool {
        self.psd.is_psd() && self.identity_failures == 0
    }
}

/// Exact PSD test plus `samples` random checks of
/// `<M, theta theta^T> = sum_T E(y_T) (sum_gamma E_T(B_gamma) theta_{T,gamma})^2`.
pub fn check_block_psd(block: &MomentBlock, samples: usize, seed: u64) -> BlockCheck {
    let psd = psd_check(&block.matrix);
    let n = block.descriptors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..samples {
        let theta: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(-20..=20), rng.gen_range(1..=9))).collect();
        let mut quadratic = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                if !block.matrix[i][j].is_zero() {
                    quadratic += &block.matrix[i][j] * &theta[i] * &theta[j];
                }
            }
        }
        let mut squares = Rational::zero();
        let mut start = 0;
        while start < n {
            let t = &block.descriptors[start].schedule;
            let mut end = start;
            let mut inner = Rational::zero();
            while end < n && &block.descriptors[end].schedule == t {
                inner += pe_b(t, &block.descriptors[end].profile, block.k) * &theta[end];
                end += 1;
            }
            squares += pe_hard(t, block.k) * &inner * &inner;
            start = end;
        }
        if quadratic != squares {
            failures += 1;
        }
    }
    BlockCheck { psd, identity_checks: samples, identity_failures: failures }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SosBlockReport {
    pub k: usize,
    pub level: usize,
    /// `(first row, descriptors, check)` per hook.
    pub blocks: Vec<(usize, usize, BlockCheck)>,
    pub mismatches: usize,
}

impl SosBlockReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.blocks.iter().all(|b| b.2.passed())
    }
}

/// Builds and checks the moment block of every hook in the level family.
pub fn verify_hard_sos(k: usize, level: usize, samples: usize, seed: u64) -> Result<SosBlockReport, LabError> {
    if 2 * (level + level + level) > k {
        return Err(LabError::BadParameter(format!("level {level} needs 6 * level <= k, got k = {k}")));
    }
    let mut report = SosBlockReport { k, level, blocks: Vec::new(), mismatches: 0 };
    for (idx, hook) in HookTableau::family(3 * k, level).iter().enumerate() {
        let block = moment_block(hook, level, k)?;
        report.mismatches += block.mismatches.len();
        let check = check_block_psd(&block, samples, seed.wrapping_add(idx as u64));
        report.blocks.push((hook.first_row, block.descriptors.len(), check));
    }
    Ok(report)
}

/// Outcome of expressing one symmetrised monomial in the spanning set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanCase {
    pub first_row: usize,
    pub monomial: PartialSchedule,
    pub coefficients: Option<Vec<Rational>>,
    pub confirmed: bool,
}

/// For a small ground set, averages every monomial `y_S` with `|S| = level`
/// over the row group of every hook in the family and solves for its
/// coefficients in the spanning set. Solutions come from point evaluations
/// and are confirmed by [`equal_mod_sched`].
pub fn check_hook_span(machines: usize, configs: usize, level: usize) -> Result<Vec<SpanCase>, LabError> {
    let ground = GroundSet::new(machines, configs);
    let points = (configs as u128).pow(machines as u32);
    if points > 100_000 {
        return Err(LabError::BadParameter(format!("{points} evaluation points is too many")));
    }
    let assignments: Vec<Vec<usize>> = (0..points as usize)
        .map(|mut code| {
            (0..machines)
                .map(|_| {
                    let c = code % configs;
                    code /= configs;
                    c
                })
                .collect()
        })
        .collect();
    let eval = |p: &SquareFreePoly, a: &[usize]| p.eval_at(|v| a[ground.machine_of(v)] == ground.item_of(v));
    let monomials: Vec<PartialSchedule> = super::pe::partial_schedules_up_to(machines, configs, level)
        .into_iter()
        .filter(|s| s.len() == level)
        .collect();
    let mut out = Vec::new();
    for hook in HookTableau::family(machines, level) {
        let row = hook.row();
        let spanning: Vec<SquareFreePoly> = spanning_set(&hook, level, configs)
            .iter()
            .map(|d| spanning_poly(&d.schedule, &d.profile, &ground))
            .collect();
        let matrix: Vec<Vec<Rational>> =
            assignments.iter().map(|a| spanning.iter().map(|p| eval(p, a)).collect()).collect();
        for s in &monomials {
            let target = symmetrize_over(&SquareFreePoly::monomial(s.to_varset(&ground)), &ground, &row);
            let rhs: Vec<Rational> = assignments.iter().map(|a| eval(&target, a)).collect();
            let coefficients = linalg::solve(&matrix, &rhs);
            let confirmed = match &coefficients {
                Some(x) => {
                    let mut combo = SquareFreePoly::zero();
                    for (p, c) in spanning.iter().zip(x) {
                        if !c.is_zero() {
                            combo = combo.add(&p.scale(c));
                        }
                    }
                    equal_mod_sched(&kill_non_partial(&combo, &ground), &target, &ground)?
                }
                None => false,
            };
            out.push(SpanCase { first_row: hook.first_row, monomial: s.clone(), coefficients, confirmed });
        }
    }
    Ok(out)
}

/// The varset of a partial schedule on the hard ground set.
pub fn hard_varset(s: &PartialSchedule, k: usize) -> VarSet {
    s.to_varset(&HardPe::new(k).ground)
}
