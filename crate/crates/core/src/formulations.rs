//! Linear programs over exact rationals and the scheduling formulations.
//!
//! Variables of the assignment-style programs are laid out by
//! [`GroundSet`]: `x[i, j]` has index `i * n + j` for machine `i` and job
//! index `j`. The configuration program uses `y[i, c]` with index
//! `i * |C| + c`.

use crate::model::{
    classify_with, enumerate_configurations, Configuration, Epsilon, Instance, JobClassification,
    ModelError,
};
use crate::rational::{big, frac, int, one, Rational};
use crate::ring::GroundSet;
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use std::cmp::Ordering;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// Sparse row `sum coeffs[k].1 * x[coeffs[k].0]  REL  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn lhs_at(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(v, c)| c * &point[*v]).sum()
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        self.relation.holds(&self.lhs_at(point), &self.rhs)
    }
}

/// A rational linear program: named variables with optional bounds and
/// sparse rows. Variables without an explicit lower bound are free below.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalLP {
    pub label: String,
    pub var_names: Vec<String>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Row>,
}

impl RationalLP {
    pub fn new(label: impl Into<String>) -> Self {
        RationalLP { label: label.into(), ..Self::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lo: Option<Rational>, hi: Option<Rational>) -> usize {
        self.var_names.push(name.into());
        self.lower.push(lo);
        self.upper.push(hi);
        self.var_names.len() - 1
    }

    /// Adds a row, merging repeated variables and dropping zero coefficients.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) {
        let mut merged: std::collections::BTreeMap<usize, Rational> = Default::default();
        for (v, c) in coeffs {
            *merged.entry(v).or_insert_with(Rational::zero) += c;
        }
        let coeffs = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.rows.push(Row { name: name.into(), coeffs, relation, rhs });
    }

    /// Names of rows and bounds violated by `point`.
    pub fn violations(&self, point: &[Rational]) -> Vec<String> {
        let mut out = Vec::new();
        if point.len() != self.num_vars() {
            out.push(format!("point has {} entries, expected {}", point.len(), self.num_vars()));
            return out;
        }
        for (k, v) in point.iter().enumerate() {
            if self.lower[k].as_ref().is_some_and(|l| v < l) || self.upper[k].as_ref().is_some_and(|u| v > u) {
                out.push(format!("bound of {}", self.var_names[k]));
            }
        }
        for row in &self.rows {
            if !row.holds_at(point) {
                out.push(row.name.clone());
            }
        }
        out
    }

    pub fn is_satisfied(&self, point: &[Rational]) -> bool {
        self.violations(point).is_empty()
    }

    /// Plain-text dump: a header line, one line per variable, one per row.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lp {} vars={} rows={}", self.label, self.num_vars(), self.rows.len());
        for k in 0..self.num_vars() {
            let lo = self.lower[k].as_ref().map_or("-inf".to_string(), ToString::to_string);
            let hi = self.upper[k].as_ref().map_or("+inf".to_string(), ToString::to_string);
            let _ = writeln!(out, "var {} in [{lo}, {hi}]", self.var_names[k]);
        }
        for row in &self.rows {
            let terms: Vec<String> =
                row.coeffs.iter().map(|(v, c)| format!("{c} {}", self.var_names[*v])).collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            let _ = writeln!(out, "row {}: {lhs} {} {}", row.name, row.relation.symbol(), row.rhs);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulationKind {
    Assign,
    Configuration,
    AssignSym,
    Order,
}

impl FormulationKind {
    pub fn name(self) -> &'static str {
        match self {
            FormulationKind::Assign => "assign",
            FormulationKind::Configuration => "clp",
            FormulationKind::AssignSym => "assign-sym",
            FormulationKind::Order => "order",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "assign" => Some(FormulationKind::Assign),
            "clp" => Some(FormulationKind::Configuration),
            "assign-sym" => Some(FormulationKind::AssignSym),
            "order" => Some(FormulationKind::Order),
            _ => None,
        }
    }
}

/// A built program together with the data needed to interpret its
/// variables.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub kind: FormulationKind,
    pub lp: RationalLP,
    pub ground: GroundSet,
    pub t: u64,
    pub classification: Option<JobClassification>,
    pub configurations: Option<Vec<Configuration>>,
    pub weights: Option<LexWeights>,
}

fn binary_vars(lp: &mut RationalLP, ground: &GroundSet, name: impl Fn(usize, usize) -> String) {
    for i in 0..ground.machines {
        for c in 0..ground.items {
            lp.add_var(name(i, c), Some(Rational::zero()), Some(one()));
        }
    }
}

/// `sum_i x_ij = 1` for every job and `sum_j p_j x_ij <= t` for every machine.
pub fn build_assign(instance: &Instance, t: u64) -> Formulation {
    let m = instance.machines;
    let n = instance.num_jobs();
    let ground = GroundSet::new(m, n);
    let mut lp = RationalLP::new("assign");
    binary_vars(&mut lp, &ground, |i, j| format!("x[{},{}]", i + 1, instance.jobs[j].id));
    for (j, job) in instance.jobs.iter().enumerate() {
        let coeffs = (0..m).map(|i| (ground.var(i, j) as usize, one())).collect();
        lp.add_row(format!("job[{}]", job.id), coeffs, Relation::Eq, one());
    }
    for i in 0..m {
        let coeffs = instance
            .jobs
            .iter()
            .enumerate()
            .map(|(j, job)| (ground.var(i, j) as usize, int(job.size as i64)))
            .collect();
        lp.add_row(format!("load[{}]", i + 1), coeffs, Relation::Le, int(t as i64));
    }
    Formulation {
        kind: FormulationKind::Assign,
        lp,
        ground,
        t,
        classification: None,
        configurations: None,
        weights: None,
    }
}

/// Configuration program over every configuration of load at most `t`.
pub fn build_clp(instance: &Instance, t: u64, cap: usize) -> Result<Formulation, ModelError> {
    let configs = enumerate_configurations(&instance.distinct_sizes(), t, cap)?;
    Ok(build_clp_over(instance, t, configs))
}

/// Configuration program restricted to the given configurations:
/// `sum_C y_iC = 1` per machine and `sum_i sum_C m(p, C) y_iC = n_p` per size.
pub fn build_clp_over(instance: &Instance, t: u64, configs: Vec<Configuration>) -> Formulation {
    let m = instance.machines;
    let ground = GroundSet::new(m, configs.len());
    let mut lp = RationalLP::new("clp");
    binary_vars(&mut lp, &ground, |i, c| format!("y[{},{}]", i + 1, configs[c]));
    for i in 0..m {
        let coeffs = (0..configs.len()).map(|c| (ground.var(i, c) as usize, one())).collect();
        lp.add_row(format!("machine[{}]", i + 1), coeffs, Relation::Eq, one());
    }
    for (size, count) in instance.size_counts() {
        let mut coeffs = Vec::new();
        for (c, conf) in configs.iter().enumerate() {
            let mult = conf.multiplicity(size);
            if mult > 0 {
                for i in 0..m {
                    coeffs.push((ground.var(i, c) as usize, int(i64::from(mult))));
                }
            }
        }
        lp.add_row(format!("count[{size}]"), coeffs, Relation::Eq, int(i64::from(count)));
    }
    Formulation {
        kind: FormulationKind::Configuration,
        lp,
        ground,
        t,
        classification: None,
        configurations: Some(configs),
        weights: None,
    }
}

/// Weights `B^(s-q)` of the symmetry-breaking rows, with
/// `B = 1 + 2 s max_q |J_q|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexWeights {
    pub base: BigInt,
    pub classes: usize,
}

impl LexWeights {
    pub fn for_classification(classification: &JobClassification) -> Self {
        let s = classification.num_classes();
        LexWeights { base: BigInt::from(1 + 2 * s * classification.max_class_size()), classes: s }
    }

    pub fn with_base(base: impl Into<BigInt>, classes: usize) -> Self {
        LexWeights { base: base.into(), classes }
    }

    /// Weight of class `q` (1-based).
    pub fn weight(&self, q: usize) -> BigInt {
        Pow::pow(&self.base, (self.classes - q) as u32)
    }

    pub fn weights(&self) -> Vec<BigInt> {
        (1..=self.classes).map(|q| self.weight(q)).collect()
    }
}

/// Assignment program plus, for consecutive machines `i, i+1`,
/// `sum_q B^(s-q) sum_{j in J_q} (x_ij - x_{i+1,j}) >= 0`.
pub fn build_assign_sym(instance: &Instance, t: u64, eps: Epsilon) -> Formulation {
    let mut f = build_assign(instance, t);
    let cls = classify_with(instance, t, eps);
    let weights = LexWeights::for_classification(&cls);
    let g = f.ground;
    for i in 0..g.machines.saturating_sub(1) {
        let mut coeffs = Vec::new();
        for (q0, jobs) in cls.classes.iter().enumerate() {
            let w = big(weights.weight(q0 + 1));
            for &j in jobs {
                coeffs.push((g.var(i, j) as usize, w.clone()));
                coeffs.push((g.var(i + 1, j) as usize, -w.clone()));
            }
        }
        f.lp.add_row(format!("sym[{},{}]", i + 1, i + 2), coeffs, Relation::Ge, Rational::zero());
    }
    f.kind = FormulationKind::AssignSym;
    f.lp.label = "assign-sym".into();
    f.classification = Some(cls);
    f.weights = Some(weights);
    f
}

/// Symmetry-breaking program plus the job-order rows: for consecutive jobs
/// `a < b` (by id) of one class and every machine prefix `1..h`,
/// `sum_{i<=h} x_ia >= sum_{i<=h} x_ib`.
pub fn build_order(instance: &Instance, t: u64, eps: Epsilon) -> Formulation {
    let mut f = build_assign_sym(instance, t, eps);
    let g = f.ground;
    let cls = f.classification.clone().expect("classification present");
    for (q0, jobs) in cls.classes.iter().enumerate() {
        for pair in jobs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for h in 0..g.machines {
                let mut coeffs = Vec::new();
                for i in 0..=h {
                    coeffs.push((g.var(i, a) as usize, one()));
                    coeffs.push((g.var(i, b) as usize, -one()));
                }
                f.lp.add_row(
                    format!(
                        "order[{},{}<{},{}]",
                        q0 + 1,
                        instance.jobs[a].id,
                        instance.jobs[b].id,
                        h + 1
                    ),
                    coeffs,
                    Relation::Ge,
                    Rational::zero(),
                );
            }
        }
    }
    f.kind = FormulationKind::Order;
    f.lp.label = "order".into();
    f
}

/// Per-class job counts of one machine, class 1 first.
pub type ClassProfile = Vec<u32>;

/// Lexicographic comparison deciding at the first class where the counts
/// differ.
pub fn lex_compare(a: &ClassProfile, b: &ClassProfile) -> Ordering {
    a.cmp(b)
}

/// `L_B(C) = sum_q B^(s-q) m(q, C)`.
pub fn lex_value(profile: &ClassProfile, weights: &LexWeights) -> BigInt {
    assert_eq!(profile.len(), weights.classes, "profile length differs from class count");
    profile.iter().enumerate().map(|(q0, &c)| weights.weight(q0 + 1) * BigInt::from(c)).sum()
}

/// Integral assignment: `assignment[j]` is the machine of job `j`.
pub type Assignment = Vec<usize>;

pub fn conf_of_machine(assignment: &[usize], machine: usize, cls: &JobClassification) -> ClassProfile {
    cls.classes
        .iter()
        .map(|jobs| jobs.iter().filter(|&&j| assignment[j] == machine).count() as u32)
        .collect()
}

/// True when machine profiles are non-increasing in lexicographic order.
pub fn check_lex_sorted(assignment: &[usize], machines: usize, cls: &JobClassification) -> bool {
    let confs: Vec<ClassProfile> = (0..machines).map(|i| conf_of_machine(assignment, i, cls)).collect();
    confs.windows(2).all(|w| lex_compare(&w[0], &w[1]) != Ordering::Less)
}

/// Relabels machines so that profiles are lexicographically non-increasing.
/// Ties keep the original machine order.
pub fn lex_sort_solution(assignment: &[usize], machines: usize, cls: &JobClassification) -> Assignment {
    let mut order: Vec<usize> = (0..machines).collect();
    let confs: Vec<ClassProfile> = (0..machines).map(|i| conf_of_machine(assignment, i, cls)).collect();
    order.sort_by(|&a, &b| lex_compare(&confs[b], &confs[a]).then(a.cmp(&b)));
    let mut new_label = vec![0; machines];
    for (pos, &old) in order.iter().enumerate() {
        new_label[old] = pos;
    }
    assignment.iter().map(|&i| new_label[i]).collect()
}

/// Keeps every machine's per-class counts but hands out the jobs of each
/// class in id order: machine `i` receives jobs `c_{i-1}+1 ..= c_i` of the
/// class, where `c_i` is the prefix sum of the counts. Short jobs stay put.
pub fn order_prefix_reassign(assignment: &[usize], machines: usize, cls: &JobClassification) -> Assignment {
    let mut out = assignment.to_vec();
    for jobs in &cls.classes {
        let mut counts = vec![0usize; machines];
        for &j in jobs {
            counts[assignment[j]] += 1;
        }
        let mut next = 0;
        for (i, &c) in counts.iter().enumerate() {
            for &j in &jobs[next..next + c] {
                out[j] = i;
            }
            next += c;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulationError {
    #[error("point is not an integral assignment: {0}")]
    NonIntegralPoint(String),
    #[error("input point is infeasible: {0}")]
    InfeasibleInput(String),
}

/// Reads an integral point of an assignment-style program back into an
/// assignment.
pub fn assignment_from_point(x: &[Rational], ground: &GroundSet) -> Result<Assignment, FormulationError> {
    if x.len() != ground.size() {
        return Err(FormulationError::NonIntegralPoint(format!("length {}", x.len())));
    }
    (0..ground.items)
        .map(|j| {
            let mut machine = None;
            for i in 0..ground.machines {
                let v = &x[ground.var(i, j) as usize];
                if v.is_zero() {
                    continue;
                }
                if !v.is_one() || machine.is_some() {
                    return Err(FormulationError::NonIntegralPoint(format!("item {j}")));
                }
                machine = Some(i);
            }
            machine.ok_or_else(|| FormulationError::NonIntegralPoint(format!("item {j} unassigned")))
        })
        .collect()
}

/// 0/1 point of an assignment-style formulation.
pub fn assignment_point(assignment: &[usize], ground: &GroundSet) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); ground.size()];
    for (j, &i) in assignment.iter().enumerate() {
        x[ground.var(i, j) as usize] = one();
    }
    x
}

/// Maps a configuration-program point to the assignment program:
/// `x'_ij = (1 / n_{p_j}) sum_C m(C, p_j) y_iC`.
pub fn project_clp_to_assign(clp: &Formulation, y: &[Rational], instance: &Instance) -> Result<Vec<Rational>, FormulationError> {
    let bad = clp.lp.violations(y);
    if !bad.is_empty() {
        return Err(FormulationError::InfeasibleInput(bad.join(", ")));
    }
    let configs = clp.configurations.as_deref().unwrap_or(&[]);
    Ok(project_point(y, instance, configs))
}

/// The projection formula without the feasibility check on `y`.
pub fn project_point(y: &[Rational], instance: &Instance, configs: &[Configuration]) -> Vec<Rational> {
    let m = instance.machines;
    let n = instance.num_jobs();
    let cg = GroundSet::new(m, configs.len());
    let ag = GroundSet::new(m, n);
    let counts = instance.size_counts();
    let mut x = vec![Rational::zero(); ag.size()];
    for i in 0..m {
        for (j, job) in instance.jobs.iter().enumerate() {
            let mut acc = Rational::zero();
            for (c, conf) in configs.iter().enumerate() {
                let mult = conf.multiplicity(job.size);
                if mult > 0 {
                    acc += &y[cg.var(i, c) as usize] * int(i64::from(mult));
                }
            }
            x[ag.var(i, j) as usize] = acc * frac(1, i64::from(counts[&job.size]));
        }
    }
    x
}

/// Checks that every consecutive pair of jobs in a class respects the
/// machine order (`machine(a) <= machine(b)` for `a` before `b`).
pub fn respects_job_order(assignment: &[usize], cls: &JobClassification) -> bool {
    cls.classes.iter().all(|jobs| jobs.windows(2).all(|w| assignment[w[0]] <= assignment[w[1]]))
}
