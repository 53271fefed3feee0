//! The closed-form pseudoexpectation on matching configurations, its
//! conditional version and exhaustive checks of their algebra.

use super::schedule::{extensions, PartialSchedule, Profile};
use crate::lift::Moments;
use crate::rational::{binomial, big, factorial, frac, int, lower_factorial, Rational};
use crate::ring::{GroundSet, VarSet};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of matching configurations of the hard instance.
pub const MATCHING_CONFIGS: usize = 6;

fn half(k: usize) -> Rational {
    frac(k as i64, 2)
}

/// `prod_C (k/2 - base_C)_{need_C} / (total)_{size}` with every factor
/// doubled so that the products stay integral.
fn closed_form(k: usize, base: &[u32], need: &[u32], total: usize, size: usize) -> Rational {
    let mut num = BigInt::one();
    for (c, &n) in need.iter().enumerate() {
        let start = k as i64 - 2 * i64::from(base.get(c).copied().unwrap_or(0));
        for i in 0..i64::from(n) {
            num *= start - 2 * i;
        }
    }
    let mut den = BigInt::one() << size;
    for i in 0..size {
        den *= total as i64 - i as i64;
    }
    debug_assert!(size <= total, "more pairs than free machines");
    Rational::new(num, den)
}

fn max_config(s: &PartialSchedule) -> usize {
    s.pairs().iter().map(|p| p.1 + 1).max().unwrap_or(0)
}

/// `E(y_S) = prod_C (k/2)_{delta_S(C)} / (3k)_{|S|}` for `|S| <= k/2`,
/// zero beyond.
pub fn pe_hard(s: &PartialSchedule, k: usize) -> Rational {
    if 2 * s.len() > k {
        return Rational::zero();
    }
    closed_form(k, &[], &s.degrees(max_config(s)), 3 * k, s.len())
}

/// `E_T(y_S) = prod_C (k/2 - delta_T(C))_{delta_S(C)} / (3k - |T|)_{|S|}`
/// for `S` avoiding the machines of `T`, zero otherwise. No size cutoff
/// is applied.
pub fn pe_hard_cond(t: &PartialSchedule, s: &PartialSchedule, k: usize) -> Rational {
    if !s.machine_disjoint(t) {
        return Rational::zero();
    }
    let configs = max_config(s).max(max_config(t));
    closed_form(k, &t.degrees(configs), &s.degrees(configs), 3 * k - t.len(), s.len())
}

/// `E_T(B_{T,gamma}) = prod_C (k/2 - delta_T(C))_{gamma(C)} / gamma(C)!`.
pub fn pe_b(t: &PartialSchedule, gamma: &Profile, k: usize) -> Rational {
    let dt = t.degrees(gamma.0.len().max(max_config(t)));
    gamma
        .0
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0)
        .map(|(c, &g)| lower_factorial(&(half(k) - int(i64::from(dt[c]))), g) / big(factorial(g)))
        .fold(Rational::one(), |acc, v| acc * v)
}

/// `E_T(B_{T,gamma})` by summing over the extension set.
pub fn pe_b_by_sum(t: &PartialSchedule, gamma: &Profile, k: usize) -> Rational {
    extensions(t, gamma, 3 * k).iter().map(|a| pe_hard_cond(t, a, k)).sum()
}

/// The hard pseudoexpectation over the variables `y_{i,C}` of the
/// configuration program restricted to matching configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HardPe {
    pub k: usize,
    pub ground: GroundSet,
}

impl HardPe {
    pub fn new(k: usize) -> Self {
        HardPe { k, ground: GroundSet::new(3 * k, MATCHING_CONFIGS) }
    }
}

impl Moments for HardPe {
    fn num_vars(&self) -> usize {
        self.ground.size()
    }

    fn degree(&self) -> usize {
        self.k / 2
    }

    fn moment(&self, s: &VarSet) -> Rational {
        match PartialSchedule::from_varset(s, &self.ground) {
            Some(p) if p.len() == s.len() => pe_hard(&p, self.k),
            _ => Rational::zero(),
        }
    }
}

/// All partial schedules on `machines` machines and `configs`
/// configurations with at most `max` pairs, by size.
pub fn partial_schedules_up_to(machines: usize, configs: usize, max: usize) -> Vec<PartialSchedule> {
    let mut out = vec![PartialSchedule::empty()];
    let mut frontier = vec![PartialSchedule::empty()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.pairs().last().map_or(0, |p| p.0 + 1);
            for i in start..machines {
                for c in 0..configs {
                    let mut pairs = s.pairs().to_vec();
                    pairs.push((i, c));
                    next.push(PartialSchedule::from_pairs(pairs).expect("fresh machine"));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConditioningReport {
    pub product_checks: usize,
    pub chain_checks: usize,
    pub extension_checks: usize,
    pub violations: Vec<String>,
}

impl ConditioningReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Which triples a conditioning sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepBounds {
    /// Largest size of each of `T`, `R`, `S`.
    pub max_each: usize,
    /// Largest `|T| + |R| + |S|`.
    pub max_total: usize,
    /// Check a seeded random subset of this many `(T, R)` pairs instead of
    /// all of them.
    pub sample: Option<(usize, u64)>,
}

/// The conditioning identities:
///
/// * `E(y_T y_S) = E_T(y_S) E(y_T)` inside the degree window,
/// * `E_T(y_R y_S) = E_T(y_R) E_{T u R}(y_S)`,
/// * `E_T(B_{T,gamma})` equals its closed form when `|T| + |gamma| <= k/2`.
///
/// `formula` stands in for `pe_hard_cond` so that mutated formulas can be
/// shown to fail.
pub fn check_conditioning_with(
    k: usize,
    bounds: SweepBounds,
    formula: &(dyn Fn(&PartialSchedule, &PartialSchedule, usize) -> Rational + Sync),
) -> ConditioningReport {
    let sets = partial_schedules_up_to(3 * k, MATCHING_CONFIGS, bounds.max_each.min(bounds.max_total));
    // `sets` is ordered by size, so the schedules with at most `n` pairs
    // form a prefix.
    let prefix = |n: usize| sets.partition_point(|s| s.len() <= n);
    let mut pairs: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|a| (0..prefix(bounds.max_total - sets[a].len())).map(move |b| (a, b)))
        .filter(|&(a, b)| sets[a].pair_disjoint(&sets[b]))
        .collect();
    if let Some((count, seed)) = bounds.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(count);
        pairs.sort_unstable();
    }
    let window = |n: usize| 2 * n <= k;
    let parts: Vec<ConditioningReport> = pairs
        .par_iter()
        .map(|&(ti, ri)| {
            let (t, r) = (&sets[ti], &sets[ri]);
            let mut rep = ConditioningReport::default();
            // Product rule, with R in the role of S.
            if let Some(u) = t.union(r) {
                if window(u.len()) {
                    rep.product_checks += 1;
                    let lhs = pe_hard(&u, k);
                    let rhs = formula(t, r, k) * pe_hard(t, k);
                    if lhs != rhs {
                        rep.violations.push(format!("product rule T={t} S={r}: {lhs} != {rhs}"));
                    }
                }
            }
            for s in &sets[..prefix(bounds.max_total - t.len() - r.len())] {
                if !s.pair_disjoint(r) || !s.pair_disjoint(t) {
                    continue;
                }
                rep.chain_checks += 1;
                let lhs = r.union(s).map_or_else(Rational::zero, |rs| formula(t, &rs, k));
                let first = formula(t, r, k);
                let rhs = if first.is_zero() {
                    Rational::zero()
                } else {
                    first * t.union(r).map_or_else(Rational::zero, |tr| formula(&tr, s, k))
                };
                if lhs != rhs {
                    rep.violations.push(format!("chain rule T={t} R={r} S={s}: {lhs} != {rhs}"));
                }
            }
            rep
        })
        .collect();
    let mut report = ConditioningReport::default();
    for p in parts {
        report.product_checks += p.product_checks;
        report.chain_checks += p.chain_checks;
        report.violations.extend(p.violations);
    }
    // Extension sums, for every T in range and every admissible profile.
    for t in sets.iter().filter(|t| t.len() <= bounds.max_each) {
        let room = (k / 2).saturating_sub(t.len()).min(bounds.max_total.saturating_sub(t.len()));
        for gamma in Profile::all_up_to(MATCHING_CONFIGS, room) {
            report.extension_checks += 1;
            let sum: Rational = extensions(t, &gamma, 3 * k).iter().map(|a| formula(t, a, k)).sum();
            let closed = pe_b(t, &gamma, k);
            if sum != closed {
                report.violations.push(format!("extension sum T={t} gamma={:?}: {sum} != {closed}", gamma.0));
            }
        }
    }
    report
}

pub fn check_conditioning(k: usize, bounds: SweepBounds) -> ConditioningReport {
    check_conditioning_with(k, bounds, &pe_hard_cond)
}

/// Which special case of pseudoindependence a triple falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndependenceCase {
    /// One of the profiles is zero.
    Trivial,
    /// The two profiles have disjoint supports.
    DisjointSupport,
    /// Both profiles live on one configuration.
    SingleConfiguration,
    General,
}

pub fn independence_case(gamma: &Profile, mu: &Profile) -> IndependenceCase {
    if gamma.is_zero() || mu.is_zero() {
        return IndependenceCase::Trivial;
    }
    let (sg, sm) = (gamma.support(), mu.support());
    if sg.iter().all(|c| !sm.contains(c)) {
        IndependenceCase::DisjointSupport
    } else if sg.len() == 1 && sg == sm {
        IndependenceCase::SingleConfiguration
    } else {
        IndependenceCase::General
    }
}

/// Expands both sides of `E_T(B_{T,gamma} B_{T,mu}) = E_T(B_{T,gamma}) E_T(B_{T,mu})`
/// over the extension sets and compares them. The single factors are
/// also compared with their closed form.
pub fn check_pseudoindependence(k: usize, t: &PartialSchedule, gamma: &Profile, mu: &Profile) -> bool {
    let machines = 3 * k;
    let fg = extensions(t, gamma, machines);
    let fm = extensions(t, mu, machines);
    let mut lhs = Rational::zero();
    for a in &fg {
        for b in &fm {
            if let Some(u) = a.union(b) {
                lhs += pe_hard_cond(t, &u, k);
            }
        }
    }
    let sg: Rational = fg.iter().map(|a| pe_hard_cond(t, a, k)).sum();
    let sm: Rational = fm.iter().map(|b| pe_hard_cond(t, b, k)).sum();
    lhs == &sg * &sm && sg == pe_b(t, gamma, k) && sm == pe_b(t, mu, k)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndependenceReport {
    pub checked: usize,
    pub trivial: usize,
    pub disjoint_support: usize,
    pub single_configuration: usize,
    pub general: usize,
    pub violations: Vec<String>,
}

/// Every `(T, gamma, mu)` with `|T| + |gamma| + |mu| <= max_total`. The
/// sweep does not stop at `k/2`: the identity keeps holding past it on
/// every size tried so far.
pub fn pseudoindependence_sweep(k: usize, max_total: usize) -> IndependenceReport {
    let total = max_total;
    let sets = partial_schedules_up_to(3 * k, MATCHING_CONFIGS, total);
    let profiles = Profile::all_up_to(MATCHING_CONFIGS, total);
    let parts: Vec<IndependenceReport> = sets
        .par_iter()
        .map(|t| {
            let mut rep = IndependenceReport::default();
            for gamma in profiles.iter().filter(|g| t.len() + g.norm() <= total) {
                for mu in profiles.iter().filter(|m| t.len() + gamma.norm() + m.norm() <= total) {
                    rep.checked += 1;
                    match independence_case(gamma, mu) {
                        IndependenceCase::Trivial => rep.trivial += 1,
                        IndependenceCase::DisjointSupport => rep.disjoint_support += 1,
                        IndependenceCase::SingleConfiguration => rep.single_configuration += 1,
                        IndependenceCase::General => rep.general += 1,
                    }
                    if !check_pseudoindependence(k, t, gamma, mu) {
                        rep.violations.push(format!("T={t} gamma={:?} mu={:?}", gamma.0, mu.0));
                    }
                }
            }
            rep
        })
        .collect();
    let mut report = IndependenceReport::default();
    for p in parts {
        report.checked += p.checked;
        report.trivial += p.trivial;
        report.disjoint_support += p.disjoint_support;
        report.single_configuration += p.single_configuration;
        report.general += p.general;
        report.violations.extend(p.violations);
    }
    report
}

/// `sum_{w=0}^{a} binom(b, a - w) (x - b)_w / w! = (x)_a / a!`.
pub fn chu_vandermonde_check(a: u32, b: u32, x: &Rational) -> bool {
    let lhs: Rational = (0..=a)
        .map(|w| {
            big(binomial(u64::from(b), u64::from(a - w))) * lower_factorial(&(x - int(i64::from(b))), w)
                / big(factorial(w))
        })
        .sum();
    lhs == lower_factorial(x, a) / big(factorial(a))
}

/// Failing `(a, b, x)` over `a <= b <= max` and the given points.
pub fn chu_vandermonde_sweep(max: u32, xs: &[Rational]) -> Vec<(u32, u32, Rational)> {
    let mut bad = Vec::new();
    for b in 0..=max {
        for a in 0..=b {
            for x in xs {
                if !chu_vandermonde_check(a, b, x) {
                    bad.push((a, b, x.clone()));
                }
            }
        }
    }
    bad
}

/// The sweep points `-2, ..., 7` and `3/2`.
pub fn chu_vandermonde_points() -> Vec<Rational> {
    let mut xs: Vec<Rational> = (-2..=7).map(int).collect();
    xs.push(frac(3, 2));
    xs
}

/// Compares `E(y_S)` with `E(y_{sigma S})` for random partial schedules and
/// machine permutations. Returns the failing pairs.
pub fn check_machine_symmetry(k: usize, schedules: usize, perms: usize, seed: u64) -> Vec<(PartialSchedule, Vec<usize>)> {
    let m = 3 * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for _ in 0..schedules {
        let size = rng.gen_range(0..=k / 2);
        let mut machines: Vec<usize> = (0..m).collect();
        machines.shuffle(&mut rng);
        let s = PartialSchedule::from_pairs(machines[..size].iter().map(|&i| (i, rng.gen_range(0..MATCHING_CONFIGS))))
            .expect("distinct machines");
        let base = pe_hard(&s, k);
        for _ in 0..perms {
            let mut sigma: Vec<usize> = (0..m).collect();
            sigma.shuffle(&mut rng);
            if pe_hard(&s.permuted(&sigma), k) != base {
                bad.push((s.clone(), sigma));
            }
        }
    }
    bad
}
