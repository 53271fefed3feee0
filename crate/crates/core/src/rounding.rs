//! Rounding a lifted solution to an integral schedule, the brute-force
//! optimum and the integrality-gap search.
//!
//! The rounding pipeline is
//!
//! 1. solve the lift of the symmetry-breaking (or job-order) program,
//! 2. pin the per-class job counts of every machine by conditioning, class
//!    by class, inside groups of machines that agree on all earlier classes,
//! 3. hand out long jobs according to the pinned counts,
//! 4. list-schedule the short jobs.
//!
//! A machine counts as pinned for a class once every job of the class has
//! singleton moment 0 or 1 on it. Conditioning on further events keeps such
//! values, so the pinned count survives the rest of the procedure.

use crate::formulations::{
    assignment_point, build_assign, build_assign_sym, build_clp, build_order, check_lex_sorted,
    respects_job_order, Formulation, FormulationKind,
};
use crate::lift::{condition, solve_lift, LiftError, LiftSolution, Moments, Pseudoexpectation, DEFAULT_LIFT_CAP};
use crate::model::{classify_with, Epsilon, Instance, JobClassification, ModelError, DEFAULT_CONFIGURATION_CAP};
use crate::rational::{frac, int, Rational};
use crate::ring::{GroundSet, VarSet};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::ops::Range;
use thiserror::Error;

/// Node budget of [`brute_force_opt`] when the caller has no opinion.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u64 = 50_000_000;

/// Random conditionings used to spot-check that pinned counts persist.
pub const PERSISTENCE_SAMPLES: usize = 10;

#[derive(Debug, Error)]
pub enum RoundError {
    #[error("the degree-{degree} lift is infeasible at T = {t}")]
    LiftInfeasible { t: u64, degree: usize },
    #[error("degree exhausted while pinning class {class} on machine {machine}; {pinned} machine-class pairs were pinned")]
    DegreeExhausted { class: usize, machine: usize, pinned: usize },
    #[error("class {class} has pinned counts summing to {total}, expected {expected}")]
    InconsistentCounts { class: usize, total: u64, expected: usize },
    #[error("machine {machine} is not pinned for class {class}")]
    NotPinned { machine: usize, class: usize },
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A complete assignment of jobs to machines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// `assignment[j]` is the machine of job `j`.
    pub assignment: Vec<usize>,
    pub loads: Vec<u64>,
    pub makespan: u64,
}

impl Schedule {
    pub fn new(instance: &Instance, assignment: Vec<usize>) -> Self {
        let mut loads = vec![0u64; instance.machines];
        for (j, &i) in assignment.iter().enumerate() {
            loads[i] += instance.jobs[j].size;
        }
        let makespan = loads.iter().copied().max().unwrap_or(0);
        Schedule { assignment, loads, makespan }
    }

    /// One line per machine: `machine 1 load 12: a b`.
    pub fn render(&self, instance: &Instance) -> String {
        let mut out = String::new();
        for (i, load) in self.loads.iter().enumerate() {
            let jobs: Vec<&str> = instance
                .indices_by_id()
                .into_iter()
                .filter(|&j| self.assignment[j] == i)
                .map(|j| instance.jobs[j].id.as_str())
                .collect();
            let _ = writeln!(out, "machine {} load {}: {}", i + 1, load, jobs.join(" "));
        }
        let _ = writeln!(out, "makespan {}", self.makespan);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stability {
    Stable(u32),
    Unstable,
}

/// Per machine and class: the class mass and whether it is pinned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityState {
    /// `masses[i][q - 1] = sum_{j in J_q} E(x_ij)`.
    pub masses: Vec<Vec<Rational>>,
    pub status: Vec<Vec<Stability>>,
}

impl StabilityState {
    pub fn all_stable(&self) -> bool {
        self.status.iter().flatten().all(|s| matches!(s, Stability::Stable(_)))
    }

    pub fn stable_through(&self, classes: usize) -> bool {
        self.status.iter().all(|row| row[..classes].iter().all(|s| matches!(s, Stability::Stable(_))))
    }

    /// The pinned counts, if every pair is pinned.
    pub fn counts(&self) -> Option<Vec<Vec<u32>>> {
        self.status
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| match s {
                        Stability::Stable(a) => Some(*a),
                        Stability::Unstable => None,
                    })
                    .collect()
            })
            .collect()
    }

    /// Maximal runs of consecutive machines sharing their counts on the
    /// first `classes` classes, together with a flag telling whether equal
    /// signatures only ever occur inside one run.
    pub fn groups(&self, classes: usize) -> (Vec<Range<usize>>, bool) {
        let sig = |i: usize| &self.status[i][..classes];
        let m = self.status.len();
        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..=m {
            if i == m || sig(i) != sig(start) {
                runs.push(start..i);
                start = i;
            }
        }
        let consecutive = runs
            .iter()
            .enumerate()
            .all(|(a, ra)| runs[a + 1..].iter().all(|rb| sig(ra.start) != sig(rb.start)));
        (runs, consecutive)
    }
}

fn singleton(pe: &Pseudoexpectation, ground: &GroundSet, machine: usize, job: usize) -> Rational {
    pe.moment(&VarSet::singleton(ground.var(machine, job)))
}

fn is_pinned(pe: &Pseudoexpectation, ground: &GroundSet, machine: usize, jobs: &[usize]) -> bool {
    jobs.iter().all(|&j| {
        let v = singleton(pe, ground, machine, j);
        v.is_zero() || v.is_one()
    })
}

pub fn stability_scan(pe: &Pseudoexpectation, cls: &JobClassification, ground: &GroundSet) -> StabilityState {
    let mut masses = Vec::with_capacity(ground.machines);
    let mut status = Vec::with_capacity(ground.machines);
    for i in 0..ground.machines {
        let mut mrow = Vec::new();
        let mut srow = Vec::new();
        for jobs in &cls.classes {
            let mass: Rational = jobs.iter().map(|&j| singleton(pe, ground, i, j)).sum();
            let pinned = is_pinned(pe, ground, i, jobs);
            srow.push(match (pinned, crate::rational::to_u64(&mass)) {
                (true, Some(a)) => Stability::Stable(a as u32),
                _ => Stability::Unstable,
            });
            mrow.push(mass);
        }
        masses.push(mrow);
        status.push(srow);
    }
    StabilityState { masses, status }
}

/// One conditioning step: machine and job, both 0-based.
pub type ConditioningStep = (usize, usize);

/// Conditions on fractional pairs `(machine, job)` of one class, smallest
/// job id first, until the machine is pinned. Every step keeps enough
/// degree left to read singletons afterwards.
fn pin_machine(
    mut pe: Pseudoexpectation,
    ground: &GroundSet,
    machine: usize,
    class: usize,
    jobs: &[usize],
    trace: &mut Vec<ConditioningStep>,
    pinned_so_far: usize,
) -> Result<Pseudoexpectation, RoundError> {
    loop {
        let next = jobs.iter().copied().find(|&j| {
            let v = singleton(&pe, ground, machine, j);
            !v.is_zero() && !v.is_one()
        });
        let Some(job) = next else {
            return Ok(pe);
        };
        if pe.degree() < 2 {
            return Err(RoundError::DegreeExhausted { class, machine, pinned: pinned_so_far });
        }
        pe = condition(&pe, &VarSet::singleton(ground.var(machine, job)))?;
        trace.push((machine, job));
    }
}

/// Pins class `class` (1-based) on every machine of `range`: the last
/// machine first, then the first one, then any machine in between that the
/// ordering rows did not already pin.
pub fn stabilize(
    pe: Pseudoexpectation,
    range: Range<usize>,
    class: usize,
    cls: &JobClassification,
    ground: &GroundSet,
    trace: &mut Vec<ConditioningStep>,
) -> Result<Pseudoexpectation, RoundError> {
    let jobs = &cls.classes[class - 1];
    let mut order = Vec::new();
    if let Some(last) = range.clone().last() {
        order.push(last);
        if range.start != last {
            order.push(range.start);
        }
        order.extend(range.start + 1..last);
    }
    let mut pe = pe;
    for (done, machine) in order.into_iter().enumerate() {
        pe = pin_machine(pe, ground, machine, class, jobs, trace, done)?;
    }
    Ok(pe)
}

/// Result of pinning every class.
#[derive(Debug, Clone)]
pub struct StagedPe {
    pub pe: Pseudoexpectation,
    pub state: StabilityState,
    pub trace: Vec<ConditioningStep>,
    /// Number of machine groups entering each stage.
    pub groups_per_stage: Vec<usize>,
    /// Whether equal signatures formed consecutive runs after every stage.
    pub consecutive: bool,
}

/// Runs the class-by-class stabilisation from a solved lift.
pub fn stabilize_all(
    pe: Pseudoexpectation,
    cls: &JobClassification,
    ground: &GroundSet,
) -> Result<StagedPe, RoundError> {
    let mut pe = pe;
    let mut trace = Vec::new();
    let mut groups = vec![0..ground.machines];
    let mut groups_per_stage = Vec::new();
    let mut consecutive = true;
    for class in 1..=cls.num_classes() {
        groups_per_stage.push(groups.len());
        for g in &groups {
            pe = stabilize(pe, g.clone(), class, cls, ground, &mut trace)?;
        }
        let state = stability_scan(&pe, cls, ground);
        let (runs, ok) = state.groups(class);
        consecutive &= ok;
        groups = runs;
    }
    let state = stability_scan(&pe, cls, ground);
    Ok(StagedPe { pe, state, trace, groups_per_stage, consecutive })
}

/// Conditions the stabilised pe on random positive-mass pairs and reports
/// how many of these conditionings changed a pinned count.
pub fn persistence_check(
    staged: &StagedPe,
    cls: &JobClassification,
    ground: &GroundSet,
    samples: usize,
    seed: u64,
) -> (usize, usize) {
    if staged.pe.degree() < 2 {
        return (0, 0);
    }
    let mut candidates: Vec<(usize, usize)> = (0..ground.machines)
        .flat_map(|i| (0..ground.items).map(move |j| (i, j)))
        .filter(|&(i, j)| !singleton(&staged.pe, ground, i, j).is_zero())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    let before = staged.state.counts();
    let mut checked = 0;
    let mut changed = 0;
    for &(i, j) in candidates.iter().take(samples) {
        let Ok(next) = condition(&staged.pe, &VarSet::singleton(ground.var(i, j))) else { continue };
        checked += 1;
        if stability_scan(&next, cls, ground).counts() != before {
            changed += 1;
        }
    }
    (checked, changed)
}

/// Gives machine `i` exactly `counts[i][q - 1]` jobs of class `q`, handing
/// out each class in ascending id order from the first machine on.
pub fn round_long(counts: &[Vec<u32>], cls: &JobClassification, num_jobs: usize) -> Result<Vec<Option<usize>>, RoundError> {
    let mut out = vec![None; num_jobs];
    for (q0, jobs) in cls.classes.iter().enumerate() {
        let total: u64 = counts.iter().map(|row| u64::from(row[q0])).sum();
        if total != jobs.len() as u64 {
            return Err(RoundError::InconsistentCounts { class: q0 + 1, total, expected: jobs.len() });
        }
        let mut next = 0;
        for (i, row) in counts.iter().enumerate() {
            for &j in &jobs[next..next + row[q0] as usize] {
                out[j] = Some(i);
            }
            next += row[q0] as usize;
        }
    }
    Ok(out)
}

/// List scheduling: each short job, in the given order, goes to the
/// machine of least current load (smallest index on ties).
pub fn greedy_short(partial: &[Option<usize>], shorts: &[usize], instance: &Instance) -> Schedule {
    let mut loads = vec![0u64; instance.machines];
    for (j, slot) in partial.iter().enumerate() {
        if let Some(i) = slot {
            loads[*i] += instance.jobs[j].size;
        }
    }
    let mut assignment: Vec<Option<usize>> = partial.to_vec();
    for &j in shorts {
        let i = (0..loads.len()).min_by_key(|&i| (loads[i], i)).expect("at least one machine");
        loads[i] += instance.jobs[j].size;
        assignment[j] = Some(i);
    }
    let assignment = assignment.into_iter().map(|a| a.expect("every job placed")).collect();
    Schedule::new(instance, assignment)
}

/// One asserted inequality of the rounding analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RoundReport {
    pub schedule: Schedule,
    pub t: u64,
    pub epsilon: Epsilon,
    pub degree: usize,
    pub degree_left: usize,
    pub counts: Vec<Vec<u32>>,
    pub trace: Vec<ConditioningStep>,
    pub groups_per_stage: Vec<usize>,
    pub consecutive_groups: bool,
    pub persistence: (usize, usize),
    pub checks: Vec<ChainCheck>,
}

impl RoundReport {
    pub fn all_checks_hold(&self) -> bool {
        self.consecutive_groups && self.persistence.1 == 0 && self.checks.iter().all(|c| c.holds)
    }

    pub fn render(&self, instance: &Instance) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "T {} epsilon 1/{} degree {} left {}", self.t, self.epsilon.inverse(), self.degree, self.degree_left);
        out.push_str(&self.schedule.render(instance));
        for (i, row) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "counts machine {}: {:?}", i + 1, row);
        }
        let steps: Vec<String> = self
            .trace
            .iter()
            .map(|&(i, j)| format!("x[{},{}]", i + 1, instance.jobs[j].id))
            .collect();
        let _ = writeln!(out, "conditioned on: {}", steps.join(" "));
        let _ = writeln!(out, "groups per stage: {:?}", self.groups_per_stage);
        let _ = writeln!(out, "persistence: {} checked, {} changed", self.persistence.0, self.persistence.1);
        for c in &self.checks {
            let _ = writeln!(out, "check {}: {} ({})", c.name, if c.holds { "ok" } else { "FAILED" }, c.detail);
        }
        out
    }
}

fn check(name: &str, holds: bool, detail: String) -> ChainCheck {
    ChainCheck { name: name.to_string(), holds, detail }
}

/// The inequalities linking pinned counts to the final makespan.
fn chain_checks(
    instance: &Instance,
    cls: &JobClassification,
    counts: &[Vec<u32>],
    partial: &[Option<usize>],
    schedule: &Schedule,
) -> Vec<ChainCheck> {
    let t = int(cls.t as i64);
    let relaxed = cls.relaxed_makespan();
    let one_plus = Rational::one() + cls.epsilon.value();
    let m = instance.machines;
    let mut long_loads = vec![0u64; m];
    for (j, slot) in partial.iter().enumerate() {
        if let Some(i) = slot {
            long_loads[*i] += instance.jobs[j].size;
        }
    }
    let rounded: Vec<Rational> = counts
        .iter()
        .map(|row| row.iter().enumerate().map(|(q0, &c)| cls.rounded_size(q0 + 1) * int(i64::from(c))).sum())
        .collect();
    let mut checks = Vec::new();
    let counts_ok = cls.classes.iter().enumerate().all(|(q0, jobs)| {
        counts.iter().map(|row| row[q0] as usize).sum::<usize>() == jobs.len()
    });
    checks.push(check("class counts", counts_ok, format!("{:?}", cls.class_counts())));
    let worst_rounded = rounded.iter().max().cloned().unwrap_or_else(Rational::zero);
    checks.push(check("rounded long load <= T", worst_rounded <= t, format!("max {worst_rounded}")));
    let sizes_ok = rounded.iter().zip(&long_loads).all(|(r, &l)| int(l as i64) <= r * &one_plus);
    checks.push(check("long load <= (1+eps) rounded load", sizes_ok, format!("{long_loads:?}")));
    let long_max = long_loads.iter().copied().max().unwrap_or(0);
    checks.push(check("long makespan <= (1+eps)T", int(long_max as i64) <= relaxed, format!("{long_max}")));
    let total = instance.total_size();
    checks.push(check("total size <= mT", total <= m as u64 * cls.t, format!("{total}")));
    let max_short = cls.short.iter().map(|&j| instance.jobs[j].size).max().unwrap_or(0);
    let average = frac(total as i64, m as i64);
    let bound = std::cmp::max(int(long_max as i64), average + int(max_short as i64));
    checks.push(check(
        "greedy makespan <= max(long makespan, average + max short)",
        int(schedule.makespan as i64) <= bound,
        format!("{} vs {bound}", schedule.makespan),
    ));
    checks.push(check(
        "makespan <= (1+eps)T",
        int(schedule.makespan as i64) <= relaxed,
        format!("{} vs {relaxed}", schedule.makespan),
    ));
    checks
}

/// Which rounding variant to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    Symmetric,
    Ordered,
}

/// Rounds the degree-`degree` lift of the symmetry-breaking program.
pub fn ptas_round(instance: &Instance, t: u64, eps: Epsilon, degree: usize) -> Result<RoundReport, RoundError> {
    round_with(instance, t, eps, degree, RoundMode::Symmetric, 0)
}

/// Rounds the lift of the job-order program. Jobs of a class are handed out
/// by id along the machines, so the output satisfies every order row.
pub fn ptas_round_order(instance: &Instance, t: u64, eps: Epsilon, degree: usize) -> Result<RoundReport, RoundError> {
    round_with(instance, t, eps, degree, RoundMode::Ordered, 0)
}

pub fn round_with(
    instance: &Instance,
    t: u64,
    eps: Epsilon,
    degree: usize,
    mode: RoundMode,
    seed: u64,
) -> Result<RoundReport, RoundError> {
    instance.validate()?;
    let form = match mode {
        RoundMode::Symmetric => build_assign_sym(instance, t, eps),
        RoundMode::Ordered => build_order(instance, t, eps),
    };
    let cls = form.classification.clone().unwrap_or_else(|| classify_with(instance, t, eps));
    let ground = form.ground;
    let pe = match solve_lift(&form.lp, degree, DEFAULT_LIFT_CAP)? {
        LiftSolution::Feasible(pe) => pe,
        LiftSolution::Infeasible(_) => return Err(RoundError::LiftInfeasible { t, degree }),
    };
    let staged = stabilize_all(pe, &cls, &ground)?;
    let counts = staged.state.counts().ok_or_else(|| {
        let (machine, class) = staged
            .state
            .status
            .iter()
            .enumerate()
            .find_map(|(i, row)| row.iter().position(|s| *s == Stability::Unstable).map(|q| (i, q + 1)))
            .unwrap_or((0, 0));
        RoundError::NotPinned { machine, class }
    })?;
    let persistence = persistence_check(&staged, &cls, &ground, PERSISTENCE_SAMPLES, seed);
    let partial = round_long(&counts, &cls, instance.num_jobs())?;
    let schedule = greedy_short(&partial, &cls.short, instance);
    let mut checks = chain_checks(instance, &cls, &counts, &partial, &schedule);
    if mode == RoundMode::Ordered {
        let point = assignment_point(&schedule.assignment, &ground);
        let bad: Vec<&str> = form
            .lp
            .rows
            .iter()
            .filter(|r| r.name.starts_with("order[") && !r.holds_at(&point))
            .map(|r| r.name.as_str())
            .collect();
        checks.push(check("order rows", bad.is_empty(), bad.join(" ")));
        checks.push(check("job order", respects_job_order(&schedule.assignment, &cls), String::new()));
    }
    checks.push(check(
        "lex sorted",
        check_lex_sorted(&schedule.assignment, instance.machines, &cls),
        String::new(),
    ));
    Ok(RoundReport {
        schedule,
        t,
        epsilon: eps,
        degree,
        degree_left: staged.pe.degree(),
        counts,
        trace: staged.trace,
        groups_per_stage: staged.groups_per_stage,
        consecutive_groups: staged.consecutive,
        persistence,
        checks,
    })
}

/// Exact optimum by depth-first search over machines, largest job first.
/// Machines with equal load are interchangeable at each step, and branches
/// that cannot beat the incumbent are cut.
pub fn brute_force_opt(instance: &Instance, budget: u64) -> Result<(u64, Schedule), RoundError> {
    instance.validate()?;
    let m = instance.machines;
    let mut order: Vec<usize> = (0..instance.num_jobs()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(instance.jobs[j].size), j));
    let total = instance.total_size();
    let lower = instance.max_size().max(total.div_ceil(m as u64));
    // Longest-processing-time start gives the first incumbent.
    let mut loads = vec![0u64; m];
    let mut best_assignment = vec![0usize; instance.num_jobs()];
    for &j in &order {
        let i = (0..m).min_by_key(|&i| (loads[i], i)).expect("machines");
        loads[i] += instance.jobs[j].size;
        best_assignment[j] = i;
    }
    let mut search = Search {
        instance,
        order: &order,
        best: loads.iter().copied().max().unwrap_or(0),
        best_assignment,
        lower,
        nodes: 0,
        budget,
    };
    let mut loads = vec![0u64; m];
    let mut current = vec![0usize; instance.num_jobs()];
    if search.best > lower {
        search.dfs(0, &mut loads, &mut current)?;
    }
    let schedule = Schedule::new(instance, search.best_assignment);
    Ok((search.best, schedule))
}

struct Search<'a> {
    instance: &'a Instance,
    order: &'a [usize],
    best: u64,
    best_assignment: Vec<usize>,
    lower: u64,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn dfs(&mut self, pos: usize, loads: &mut [u64], current: &mut [usize]) -> Result<(), RoundError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(RoundError::BudgetExceeded { budget: self.budget });
        }
        if pos == self.order.len() {
            let makespan = loads.iter().copied().max().unwrap_or(0);
            if makespan < self.best {
                self.best = makespan;
                self.best_assignment = current.to_vec();
            }
            return Ok(());
        }
        let j = self.order[pos];
        let p = self.instance.jobs[j].size;
        for i in 0..loads.len() {
            if loads[..i].contains(&loads[i]) || loads[i] + p >= self.best {
                continue;
            }
            loads[i] += p;
            current[j] = i;
            self.dfs(pos + 1, loads, current)?;
            loads[i] -= p;
            if self.best == self.lower {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Where the optimum of a gap experiment comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptOracle {
    BruteForce { budget: u64 },
    Known(u64),
    /// Only a lower bound is known, for instance from a restricted search.
    AtLeast(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptValue {
    Exact(u64),
    AtLeast(u64),
}

impl OptValue {
    pub fn value(&self) -> u64 {
        match self {
            OptValue::Exact(v) | OptValue::AtLeast(v) => *v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub kind: FormulationKind,
    pub degree: usize,
    /// Smallest integer `T` whose lift is feasible.
    pub t_star: u64,
    pub opt: OptValue,
    /// `OPT / T*`; a lower bound when `opt` is.
    pub ratio: Rational,
    /// Every `(T, feasible)` probe in order.
    pub probes: Vec<(u64, bool)>,
}

impl GapReport {
    pub fn render(&self) -> String {
        let (rel, opt) = match self.opt {
            OptValue::Exact(v) => ("=", v),
            OptValue::AtLeast(v) => (">=", v),
        };
        let mut out = format!(
            "formulation {} degree {}\nT* {}\nOPT {rel} {opt}\nratio {rel} {}\n",
            self.kind.name(),
            self.degree,
            self.t_star,
            self.ratio
        );
        for (t, ok) in &self.probes {
            let _ = writeln!(out, "probe T={t} {}", if *ok { "feasible" } else { "infeasible" });
        }
        out
    }
}

/// Builds the chosen formulation at makespan `t`.
pub fn build_formulation(instance: &Instance, kind: FormulationKind, t: u64, eps: Epsilon) -> Result<Formulation, ModelError> {
    Ok(match kind {
        FormulationKind::Assign => build_assign(instance, t),
        FormulationKind::Configuration => build_clp(instance, t, DEFAULT_CONFIGURATION_CAP)?,
        FormulationKind::AssignSym => build_assign_sym(instance, t, eps),
        FormulationKind::Order => build_order(instance, t, eps),
    })
}

/// Whether the degree-`degree` lift of `kind` at `t` is feasible.
pub fn lift_feasible(instance: &Instance, kind: FormulationKind, t: u64, eps: Epsilon, degree: usize) -> Result<bool, RoundError> {
    let form = build_formulation(instance, kind, t, eps)?;
    Ok(solve_lift(&form.lp, degree, DEFAULT_LIFT_CAP)?.is_feasible())
}

/// Smallest lift-feasible integer `T` in `[max(max p, ceil(sum p / m)), sum p]`,
/// found by trying the lower end first and then bisecting. Bisection
/// assumes feasibility is monotone in `T`, which holds for the assignment
/// and configuration programs. The symmetry-breaking programs reclassify
/// jobs with `T`, so there `T*` is the bisection's answer rather than a
/// certified minimum.
pub fn gap_search(
    instance: &Instance,
    eps: Epsilon,
    degree: usize,
    kind: FormulationKind,
    oracle: OptOracle,
) -> Result<GapReport, RoundError> {
    instance.validate()?;
    let total = instance.total_size();
    let lo = instance.max_size().max(total.div_ceil(instance.machines as u64));
    let mut probes = Vec::new();
    let mut probe = |t: u64| -> Result<bool, RoundError> {
        let ok = lift_feasible(instance, kind, t, eps, degree)?;
        probes.push((t, ok));
        Ok(ok)
    };
    let t_star = if probe(lo)? {
        lo
    } else {
        // Invariant: lo infeasible, hi feasible (every job on one machine
        // fits at T = sum p).
        let (mut bad, mut good) = (lo, total);
        while good - bad > 1 {
            let mid = bad + (good - bad) / 2;
            if probe(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let opt = match oracle {
        OptOracle::BruteForce { budget } => OptValue::Exact(brute_force_opt(instance, budget)?.0),
        OptOracle::Known(v) => OptValue::Exact(v),
        OptOracle::AtLeast(v) => OptValue::AtLeast(v),
    };
    let ratio = frac(opt.value() as i64, t_star as i64);
    Ok(GapReport { kind, degree, t_star, opt, ratio, probes })
}
