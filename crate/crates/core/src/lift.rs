//! Sherali-Adams lifts of 0/1 programs and the pseudoexpectations they
//! produce.
//!
//! For a base program over variables `E` and a degree `d`, the lift has one
//! variable `w_S` per subset `S` with `1 <= |S| <= d`; `w_{}` is the
//! constant 1. For disjoint `S, R` the multiplier
//! `phi_{S,R} = prod_{S} x * prod_{R} (1 - x)` is applied to every base row
//! `g` whenever the product still has degree at most `d`, and every
//! monomial `x_U` of the square-free expansion is replaced by `w_U`.
//!
//! Only rows that are not the sum of two other lifted rows are emitted:
//! `phi_{S,R} = phi_{S+e,R} + phi_{S,R+e}` makes the rows for a multiplier
//! support `U` redundant whenever `U + e` is still admissible. The
//! verifier, by contrast, checks every admissible pair so that its report
//! names every failing multiplier.

use crate::exact_lp::{self, FarkasCertificate, LpError, LpOutcome};
use crate::formulations::{RationalLP, Relation};
use crate::psd::{psd_check, PsdOutcome};
use crate::rational::{one, parse_rational, Rational};
use crate::ring::{subsets_up_to, SquareFreePoly, VarSet};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

/// Largest monomial basis for which full moment matrices are built.
pub const MOMENT_MATRIX_LIMIT: usize = 5000;
/// Largest ground set solved through its 0/1 points instead of the LP.
pub const ATOM_LIMIT: usize = 20;
pub const DEFAULT_LIFT_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("lift would have {count} variables or rows, above the cap of {cap}")]
    LiftExplosion { count: usize, cap: usize },
    #[error("polynomial has degree {want}, pseudoexpectation only {have}")]
    DegreeExceeded { have: usize, want: usize },
    #[error("conditioning on a set of size {want} with only {have} degrees left")]
    DegreeExhausted { have: usize, want: usize },
    #[error("conditioning event {0} has zero mass")]
    ZeroMass(VarSet),
    #[error("point violates the lift: {0}")]
    InfeasiblePoint(String),
    #[error("moment matrix would have {size} rows, above the limit of {limit}")]
    MatrixTooLarge { size: usize, limit: usize },
    #[error("value of the empty set is {0}, expected 1")]
    NotNormalized(Rational),
    #[error("cannot parse pseudoexpectation: {0}")]
    Parse(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Read access to the moments `E(x_S)` of a linear functional on the
/// square-free ring.
pub trait Moments {
    fn num_vars(&self) -> usize;
    /// Largest monomial degree on which the functional is defined.
    fn degree(&self) -> usize;
    /// `E(x_S)`; only meaningful for `|S| <= degree()`.
    fn moment(&self, s: &VarSet) -> Rational;
}

/// A pseudoexpectation stored as a sparse subset map (absent subsets have
/// value zero), possibly viewed through a conditioning event.
///
/// Conditioning does not copy the map: `E_A(x_I) = E(x_{I u A}) / E(x_A)`
/// is evaluated on demand against the shared base.
#[derive(Debug, Clone)]
pub struct Pseudoexpectation {
    num_vars: usize,
    degree: usize,
    base: Arc<HashMap<VarSet, Rational>>,
    given: VarSet,
    mass: Rational,
}

impl PartialEq for Pseudoexpectation {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.degree == other.degree && self.entries() == other.entries()
    }
}

impl Moments for Pseudoexpectation {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn moment(&self, s: &VarSet) -> Rational {
        let key = if self.given.is_empty() { s.clone() } else { s.union(&self.given) };
        match self.base.get(&key) {
            Some(v) if self.mass.is_one() => v.clone(),
            Some(v) => v / &self.mass,
            None => Rational::zero(),
        }
    }
}

impl Pseudoexpectation {
    /// Wraps a subset map; the empty set must carry value 1. Zero values
    /// are dropped.
    pub fn new(num_vars: usize, degree: usize, values: HashMap<VarSet, Rational>) -> Result<Self, LiftError> {
        let unit = values.get(&VarSet::empty()).cloned().unwrap_or_else(Rational::zero);
        if !unit.is_one() {
            return Err(LiftError::NotNormalized(unit));
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(Pseudoexpectation {
            num_vars,
            degree,
            base: Arc::new(values),
            given: VarSet::empty(),
            mass: one(),
        })
    }

    /// Copies any moment source into an explicit map over all subsets up to
    /// its degree.
    pub fn from_moments<M: Moments + ?Sized>(m: &M) -> Self {
        let values = subsets_up_to(m.num_vars(), m.degree())
            .into_iter()
            .filter_map(|s| {
                let v = m.moment(&s);
                (!v.is_zero()).then_some((s, v))
            })
            .collect();
        Pseudoexpectation::new(m.num_vars(), m.degree(), values).expect("moment of the empty set is 1")
    }

    /// Point mass on a 0/1 vector.
    pub fn integral(num_vars: usize, degree: usize, ones: &VarSet) -> Self {
        let values = ones.subsets().filter(|s| s.len() <= degree).map(|s| (s, one())).collect();
        Pseudoexpectation::new(num_vars, degree, values).expect("empty subset present")
    }

    /// The conditioning event accumulated so far.
    pub fn given(&self) -> &VarSet {
        &self.given
    }

    /// Same moments with a smaller degree.
    pub fn truncate(&self, degree: usize) -> Self {
        let mut out = self.materialize();
        out.degree = degree.min(self.degree);
        out
    }

    /// Nonzero moments on subsets of size at most the degree, in canonical
    /// order.
    pub fn entries(&self) -> Vec<(VarSet, Rational)> {
        let mut out: Vec<(VarSet, Rational)> = if self.given.is_empty() {
            self.base
                .iter()
                .filter(|(s, _)| s.len() <= self.degree)
                .map(|(s, v)| (s.clone(), v.clone()))
                .collect()
        } else {
            let mut map = BTreeMap::new();
            for key in self.base.keys() {
                if !self.given.is_subset(key) {
                    continue;
                }
                let rest = key.minus(&self.given);
                for extra in self.given.subsets() {
                    let s = rest.union(&extra);
                    if s.len() <= self.degree {
                        map.entry(s.clone()).or_insert_with(|| self.moment(&s));
                    }
                }
            }
            map.into_iter().collect()
        };
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Detaches a conditioned view into its own map.
    pub fn materialize(&self) -> Self {
        let mut out = Pseudoexpectation::new(self.num_vars, self.degree, self.entries().into_iter().collect())
            .expect("conditioned pseudoexpectations are normalized");
        out.degree = self.degree;
        out
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# pseudoexpectation degree={} vars={}", self.degree, self.num_vars);
        for (s, v) in self.entries() {
            let _ = writeln!(out, "{s} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LiftError> {
        let bad = |msg: String| LiftError::Parse(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let mut degree = None;
        let mut vars = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = field.strip_prefix("degree=") {
                degree = v.parse().ok();
            } else if let Some(v) = field.strip_prefix("vars=") {
                vars = v.parse().ok();
            }
        }
        let (Some(degree), Some(num_vars)) = (degree, vars) else {
            return Err(bad(format!("bad header {header:?}")));
        };
        let mut values = HashMap::new();
        for line in lines {
            let (set, value) = line
                .trim()
                .rsplit_once(' ')
                .ok_or_else(|| bad(format!("bad line {line:?}")))?;
            let inner = set
                .trim()
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| bad(format!("bad subset {set:?}")))?;
            let items: Result<Vec<u32>, _> =
                inner.split(',').filter(|t| !t.is_empty()).map(|t| t.trim().parse::<u32>()).collect();
            let items = items.map_err(|e| bad(e.to_string()))?;
            if items.iter().any(|&v| v as usize >= num_vars) {
                return Err(bad(format!("subset {set} outside the ground set")));
            }
            let value = parse_rational(value).map_err(|e| bad(e.to_string()))?;
            values.insert(VarSet::from_iter(items), value);
        }
        Pseudoexpectation::new(num_vars, degree, values)
    }
}

/// Linear extension of the moments to a polynomial.
pub fn pe_eval<M: Moments + ?Sized>(pe: &M, poly: &SquareFreePoly) -> Result<Rational, LiftError> {
    let d = poly.degree();
    if !poly.is_zero() && d > pe.degree() {
        return Err(LiftError::DegreeExceeded { have: pe.degree(), want: d });
    }
    Ok(poly.terms().map(|(s, c)| c * pe.moment(s)).sum())
}

/// `E_A(p) = E(p x_A) / E(x_A)`, spending `|A|` degrees.
pub fn condition(pe: &Pseudoexpectation, event: &VarSet) -> Result<Pseudoexpectation, LiftError> {
    if event.len() > pe.degree {
        return Err(LiftError::DegreeExhausted { have: pe.degree, want: event.len() });
    }
    if event.is_empty() {
        return Ok(pe.clone());
    }
    let mass = pe.moment(event);
    if mass.is_zero() {
        return Err(LiftError::ZeroMass(event.clone()));
    }
    let given = pe.given.union(event);
    let mass = pe.base.get(&given).cloned().unwrap_or_else(Rational::zero);
    Ok(Pseudoexpectation {
        num_vars: pe.num_vars,
        degree: pe.degree - event.len(),
        base: Arc::clone(&pe.base),
        given,
        mass,
    })
}

// ---------------------------------------------------------------------------
// Lifted rows

/// One base row as a polynomial relation `sum a_e x_e  REL  b`.
#[derive(Debug, Clone)]
struct BaseRow {
    coeffs: Vec<(u32, Rational)>,
    rhs: Rational,
    relation: Relation,
    support: VarSet,
}

fn base_rows(base: &RationalLP) -> Vec<BaseRow> {
    base.rows
        .iter()
        .map(|r| {
            let coeffs: Vec<(u32, Rational)> = r.coeffs.iter().map(|(v, c)| (*v as u32, c.clone())).collect();
            let support = VarSet::from_iter(coeffs.iter().map(|(v, _)| *v));
            BaseRow { coeffs, rhs: r.rhs.clone(), relation: r.relation, support }
        })
        .collect()
}

/// `deg(phi_{S,R} g) <= d` for a multiplier support `u`.
fn admissible(u: &VarSet, support: &VarSet, degree: usize) -> bool {
    u.len() + usize::from(!support.is_subset(u)) <= degree
}

/// Whether some `u + e` is admissible, which makes the rows of `u`
/// redundant.
fn extendable(u: &VarSet, support: &VarSet, degree: usize, n: usize) -> bool {
    if u.len() >= n || u.len() + 1 > degree {
        return false;
    }
    let outside = support.minus(u).len();
    u.len() + 1 + usize::from(outside > 1) <= degree
}

/// Coefficients of `phi_{S,R} * (sum a_e x_e - b)` by monomial.
fn lifted_terms(row: &BaseRow, s: &VarSet, r: &VarSet) -> BTreeMap<VarSet, Rational> {
    let mut terms: BTreeMap<VarSet, Rational> = BTreeMap::new();
    for rr in r.subsets() {
        let sign = if rr.len() % 2 == 0 { one() } else { -one() };
        let stem = s.union(&rr);
        for (e, a) in &row.coeffs {
            *terms.entry(stem.with(*e)).or_insert_with(Rational::zero) += &sign * a;
        }
        *terms.entry(stem).or_insert_with(Rational::zero) -= &sign * &row.rhs;
    }
    terms.retain(|_, c| !c.is_zero());
    terms
}

/// `E(phi_{S,R} (sum a_e x_e - b))`.
fn lifted_value<M: Moments + ?Sized>(pe: &M, row: &BaseRow, s: &VarSet, r: &VarSet) -> Rational {
    let mut acc = Rational::zero();
    for rr in r.subsets() {
        let stem = s.union(&rr);
        let mut part: Rational = row.coeffs.iter().map(|(e, a)| a * pe.moment(&stem.with(*e))).sum();
        part -= &row.rhs * pe.moment(&stem);
        if rr.len() % 2 == 0 {
            acc += part;
        } else {
            acc -= part;
        }
    }
    acc
}

/// `E(phi_{S,R})`.
fn box_value<M: Moments + ?Sized>(pe: &M, s: &VarSet, r: &VarSet) -> Rational {
    r.subsets()
        .map(|rr| {
            let v = pe.moment(&s.union(&rr));
            if rr.len() % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .sum()
}

/// Which base row (or the box) and multiplier produced a lifted row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowOrigin {
    /// Index of the base row; `None` for a box row `phi_{S,R} >= 0`.
    pub base_row: Option<usize>,
    pub s: VarSet,
    pub r: VarSet,
}

#[derive(Debug, Clone)]
pub struct LiftedLP {
    pub base: RationalLP,
    pub degree: usize,
    /// Subset behind each lift variable, in canonical order.
    pub subsets: Vec<VarSet>,
    pub lp: RationalLP,
    pub origins: Vec<RowOrigin>,
    index: HashMap<VarSet, usize>,
}

impl LiftedLP {
    pub fn to_rational_lp(&self) -> &RationalLP {
        &self.lp
    }

    pub fn var_of(&self, s: &VarSet) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Lift point of a pseudoexpectation, defined on every lift variable.
    pub fn point_of<M: Moments + ?Sized>(&self, pe: &M) -> Vec<Rational> {
        self.subsets.iter().map(|s| pe.moment(s)).collect()
    }
}

fn lift_var_name(s: &VarSet) -> String {
    format!("w{s}")
}

/// Builds the degree-`degree` lift of a program over binary variables.
pub fn build_sa_lift(base: &RationalLP, degree: usize, cap: usize) -> Result<LiftedLP, LiftError> {
    let n = base.num_vars();
    let all = subsets_up_to(n, degree);
    if all.len() - 1 > cap {
        return Err(LiftError::LiftExplosion { count: all.len() - 1, cap });
    }
    let subsets: Vec<VarSet> = all[1..].to_vec();
    let index: HashMap<VarSet, usize> = subsets.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
    let mut lp = RationalLP::new(format!("{}^{}", base.label, degree));
    for s in &subsets {
        lp.add_var(lift_var_name(s), Some(Rational::zero()), Some(one()));
    }
    let mut origins = Vec::new();
    let mut push = |lp: &mut RationalLP,
                    name: String,
                    terms: BTreeMap<VarSet, Rational>,
                    relation: Relation,
                    origin: RowOrigin|
     -> Result<(), LiftError> {
        if lp.rows.len() >= cap {
            return Err(LiftError::LiftExplosion { count: lp.rows.len() + 1, cap });
        }
        let mut rhs = Rational::zero();
        let mut coeffs = Vec::with_capacity(terms.len());
        for (t, c) in terms {
            if t.is_empty() {
                rhs -= c;
            } else {
                coeffs.push((index[&t], c));
            }
        }
        lp.add_row(name, coeffs, relation, rhs);
        origins.push(origin);
        Ok(())
    };

    let rows = base_rows(base);
    for (k, row) in rows.iter().enumerate() {
        for u in &all {
            if !admissible(u, &row.support, degree) || extendable(u, &row.support, degree, n) {
                continue;
            }
            for s in u.subsets() {
                let r = u.minus(&s);
                let name = format!("{}*phi[{s}|{r}]", base.rows[k].name);
                let terms = lifted_terms(row, &s, &r);
                push(&mut lp, name, terms, row.relation, RowOrigin { base_row: Some(k), s, r })?;
            }
        }
    }
    // Box rows on the largest supports; at degree 1 they are the bounds.
    let top = degree.min(n);
    if top >= 2 {
        for u in all.iter().filter(|u| u.len() == top) {
            for s in u.subsets() {
                let r = u.minus(&s);
                let mut terms = BTreeMap::new();
                for rr in r.subsets() {
                    let c = if rr.len() % 2 == 0 { one() } else { -one() };
                    terms.insert(s.union(&rr), c);
                }
                push(&mut lp, format!("box[{s}|{r}]"), terms, Relation::Ge, RowOrigin { base_row: None, s, r })?;
            }
        }
    }
    Ok(LiftedLP { base: base.clone(), degree, subsets, lp, origins, index })
}

/// Reads a feasible lift point as a pseudoexpectation.
pub fn pe_from_solution(lift: &LiftedLP, point: &[Rational]) -> Result<Pseudoexpectation, LiftError> {
    let bad = lift.lp.violations(point);
    if !bad.is_empty() {
        return Err(LiftError::InfeasiblePoint(bad.join(", ")));
    }
    let mut values: HashMap<VarSet, Rational> =
        lift.subsets.iter().cloned().zip(point.iter().cloned()).collect();
    values.insert(VarSet::empty(), one());
    Pseudoexpectation::new(lift.base.num_vars(), lift.degree, values)
}

// ---------------------------------------------------------------------------
// Solving

#[derive(Debug, Clone, PartialEq)]
pub enum LiftInfeasibility {
    /// Multipliers over the rows of the explicitly built lift.
    Farkas(FarkasCertificate),
    /// Every 0/1 point violates a base row, recorded as `(ones, row)`.
    /// At full degree the lifted rows `phi_{A, E - A} g` force every atom
    /// mass to zero while the atom masses sum to `w_{} = 1`.
    NoIntegralPoint(Vec<(VarSet, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftSolution {
    Feasible(Pseudoexpectation),
    Infeasible(LiftInfeasibility),
}

impl LiftSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LiftSolution::Feasible(_))
    }

    pub fn pe(&self) -> Option<&Pseudoexpectation> {
        match self {
            LiftSolution::Feasible(pe) => Some(pe),
            LiftSolution::Infeasible(_) => None,
        }
    }
}

/// True when the full-degree shortcut through 0/1 points applies.
pub fn exact_regime(num_vars: usize, degree: usize) -> bool {
    degree >= num_vars && num_vars <= ATOM_LIMIT
}

fn atom_satisfies(row: &BaseRow, mask: u64) -> bool {
    let lhs: Rational = row.coeffs.iter().filter(|(e, _)| mask >> e & 1 == 1).map(|(_, a)| a.clone()).sum();
    row.relation.holds(&lhs, &row.rhs)
}

fn mask_set(mask: u64, n: usize) -> VarSet {
    VarSet::from_iter((0..n as u32).filter(|b| mask >> b & 1 == 1))
}

/// Bounds of the base program restricted to a 0/1 point.
fn atom_in_bounds(base: &RationalLP, mask: u64) -> bool {
    (0..base.num_vars()).all(|e| {
        let v = if mask >> e & 1 == 1 { one() } else { Rational::zero() };
        base.lower[e].as_ref().is_none_or(|l| &v >= l) && base.upper[e].as_ref().is_none_or(|u| &v <= u)
    })
}

/// Full-degree solve: the uniform distribution over feasible 0/1 points.
fn solve_by_atoms(base: &RationalLP, degree: usize) -> LiftSolution {
    let n = base.num_vars();
    let rows = base_rows(base);
    let size = 1usize << n;
    let mut count = vec![0u64; size];
    let mut witnesses = Vec::new();
    for mask in 0..size as u64 {
        let violated = if atom_in_bounds(base, mask) {
            rows.iter().position(|r| !atom_satisfies(r, mask))
        } else {
            Some(usize::MAX)
        };
        match violated {
            None => count[mask as usize] = 1,
            Some(k) => {
                if witnesses.len() < size {
                    witnesses.push((mask_set(mask, n), k));
                }
            }
        }
    }
    let total = count.iter().sum::<u64>();
    if total == 0 {
        return LiftSolution::Infeasible(LiftInfeasibility::NoIntegralPoint(witnesses));
    }
    // Superset sums: count[S] becomes the number of feasible atoms above S.
    for b in 0..n {
        for mask in 0..size {
            if mask >> b & 1 == 0 {
                count[mask] += count[mask | 1 << b];
            }
        }
    }
    let total = Rational::from_integer(total.into());
    let values = (0..size)
        .filter(|&mask| count[mask] > 0)
        .map(|mask| (mask_set(mask as u64, n), Rational::from_integer(count[mask].into()) / &total))
        .collect();
    LiftSolution::Feasible(Pseudoexpectation::new(n, degree, values).expect("normalized"))
}

/// Decides the degree-`degree` lift. At full degree over at most
/// [`ATOM_LIMIT`] variables the lift is the convex hull of the feasible 0/1
/// points and is decided through them; otherwise the lift is built and
/// solved exactly.
pub fn solve_lift(base: &RationalLP, degree: usize, cap: usize) -> Result<LiftSolution, LiftError> {
    if exact_regime(base.num_vars(), degree) {
        return Ok(solve_by_atoms(base, degree));
    }
    solve_lift_lp(base, degree, cap)
}

/// Builds the lift and solves it with the exact simplex, whatever the
/// degree.
pub fn solve_lift_lp(base: &RationalLP, degree: usize, cap: usize) -> Result<LiftSolution, LiftError> {
    let lift = build_sa_lift(base, degree, cap)?;
    Ok(match exact_lp::feasible(&lift.lp)? {
        LpOutcome::Feasible(point) => LiftSolution::Feasible(pe_from_solution(&lift, &point)?),
        LpOutcome::Infeasible(cert) => LiftSolution::Infeasible(LiftInfeasibility::Farkas(cert)),
    })
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaViolation {
    /// Base row index; `None` for a box row or the normalization.
    pub base_row: Option<usize>,
    pub row_name: String,
    pub s: VarSet,
    pub r: VarSet,
    pub value: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SaReport {
    pub rows_checked: usize,
    pub violations: Vec<SaViolation>,
}

impl SaReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

fn holds(relation: Relation, value: &Rational) -> bool {
    match relation {
        Relation::Le => !value.is_positive(),
        Relation::Ge => !value.is_negative(),
        Relation::Eq => value.is_zero(),
    }
}

/// Checks every lifted row of every admissible multiplier pair against the
/// moments of `pe`.
pub fn verify_sa_pe<M: Moments + Sync + ?Sized>(pe: &M, base: &RationalLP, degree: usize) -> SaReport {
    let n = base.num_vars();
    let mut report = SaReport::default();
    let unit = pe.moment(&VarSet::empty());
    report.rows_checked += 1;
    if !unit.is_one() {
        report.violations.push(SaViolation {
            base_row: None,
            row_name: "normalization".into(),
            s: VarSet::empty(),
            r: VarSet::empty(),
            value: unit,
        });
    }
    if exact_regime(n, degree) {
        verify_by_atoms(pe, base, &mut report);
        return report;
    }
    let rows = base_rows(base);
    let all = subsets_up_to(n, degree);
    let per_row: Vec<(usize, Vec<SaViolation>)> = rows
        .par_iter()
        .enumerate()
        .map(|(k, row)| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for u in all.iter().filter(|u| admissible(u, &row.support, degree)) {
                for s in u.subsets() {
                    let r = u.minus(&s);
                    checked += 1;
                    let value = lifted_value(pe, row, &s, &r);
                    if !holds(row.relation, &value) {
                        bad.push(SaViolation {
                            base_row: Some(k),
                            row_name: base.rows[k].name.clone(),
                            s,
                            r,
                            value,
                        });
                    }
                }
            }
            (checked, bad)
        })
        .collect();
    let boxes: Vec<(usize, Vec<SaViolation>)> = all
        .par_iter()
        .filter(|u| !u.is_empty())
        .map(|u| {
            let mut bad = Vec::new();
            let mut checked = 0;
            for s in u.subsets() {
                let r = u.minus(&s);
                checked += 1;
                let value = box_value(pe, &s, &r);
                if value.is_negative() {
                    bad.push(SaViolation { base_row: None, row_name: "box".into(), s, r, value });
                }
            }
            (checked, bad)
        })
        .collect();
    for (checked, bad) in per_row.into_iter().chain(boxes) {
        report.rows_checked += checked;
        report.violations.extend(bad);
    }
    report
}

/// Full-degree check through atom masses
/// `p_A = sum_{T >= A} (-1)^{|T - A|} E(x_T)`: every lifted row is a sum of
/// rows `p_A g(1_A) REL 0` and `p_A >= 0`, each of which is itself a
/// lifted row.
fn verify_by_atoms<M: Moments + ?Sized>(pe: &M, base: &RationalLP, report: &mut SaReport) {
    let n = base.num_vars();
    let size = 1usize << n;
    let mut mass: Vec<Rational> = (0..size as u64).map(|mask| pe.moment(&mask_set(mask, n))).collect();
    for b in 0..n {
        for mask in 0..size {
            if mask >> b & 1 == 0 {
                let above = mass[mask | 1 << b].clone();
                mass[mask] -= above;
            }
        }
    }
    let rows = base_rows(base);
    let full = (size - 1) as u64;
    for (mask, p) in mass.iter().enumerate() {
        let mask = mask as u64;
        let s = mask_set(mask, n);
        let r = mask_set(full & !mask, n);
        report.rows_checked += 1 + rows.len();
        if p.is_negative() {
            report.violations.push(SaViolation {
                base_row: None,
                row_name: "box".into(),
                s: s.clone(),
                r: r.clone(),
                value: p.clone(),
            });
        }
        if p.is_zero() {
            continue;
        }
        if !atom_in_bounds(base, mask) {
            report.violations.push(SaViolation {
                base_row: None,
                row_name: "bounds".into(),
                s: s.clone(),
                r: r.clone(),
                value: p.clone(),
            });
        }
        for (k, row) in rows.iter().enumerate() {
            let lhs: Rational =
                row.coeffs.iter().filter(|(e, _)| mask >> e & 1 == 1).map(|(_, a)| a.clone()).sum();
            let value = p * (lhs - &row.rhs);
            if !holds(row.relation, &value) {
                report.violations.push(SaViolation {
                    base_row: Some(k),
                    row_name: base.rows[k].name.clone(),
                    s: s.clone(),
                    r: r.clone(),
                    value,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SosReport {
    pub moment_matrix: PsdOutcome,
    /// Localizing matrix outcome per inequality row of the base.
    pub localizing: Vec<(usize, PsdOutcome)>,
    /// `(row, S, E(x_S h))` for equality rows with a nonzero value.
    pub equality_violations: Vec<(usize, VarSet, Rational)>,
    pub normalized: bool,
}

impl SosReport {
    pub fn is_valid(&self) -> bool {
        self.normalized
            && self.moment_matrix.is_psd()
            && self.localizing.iter().all(|(_, o)| o.is_psd())
            && self.equality_violations.is_empty()
    }
}

fn moment_basis(n: usize, half: usize) -> Result<Vec<VarSet>, LiftError> {
    let count: usize = (0..=half.min(n)).map(|k| crate::rational::binomial(n as u64, k as u64))
        .map(|b| usize::try_from(b).unwrap_or(usize::MAX))
        .fold(0usize, usize::saturating_add);
    if count > MOMENT_MATRIX_LIMIT {
        return Err(LiftError::MatrixTooLarge { size: count, limit: MOMENT_MATRIX_LIMIT });
    }
    Ok(subsets_up_to(n, half))
}

/// Moment matrix `E(x_I x_J)` over `|I|, |J| <= degree / 2`, localizing
/// matrices `E(x_I x_J g)` over `|I|, |J| <= (degree - 1) / 2` for each
/// inequality `g >= 0`, and `E(x_S h) = 0` for equalities whenever
/// `deg(x_S h) <= degree`.
pub fn verify_sos_pe<M: Moments + ?Sized>(pe: &M, base: &RationalLP, degree: usize) -> Result<SosReport, LiftError> {
    let n = base.num_vars();
    let basis = moment_basis(n, degree / 2)?;
    let moment_matrix: Vec<Vec<Rational>> =
        basis.iter().map(|i| basis.iter().map(|j| pe.moment(&i.union(j))).collect()).collect();
    let moment_matrix = psd_check(&moment_matrix);

    let rows = base_rows(base);
    let mut localizing = Vec::new();
    let mut equality_violations = Vec::new();
    let loc_basis = if degree >= 1 { Some(moment_basis(n, (degree - 1) / 2)?) } else { None };
    for (k, row) in rows.iter().enumerate() {
        match row.relation {
            Relation::Eq => {
                for s in subsets_up_to(n, degree) {
                    if !admissible(&s, &row.support, degree) {
                        continue;
                    }
                    let value = lifted_value(pe, row, &s, &VarSet::empty());
                    if !value.is_zero() {
                        equality_violations.push((k, s, value));
                    }
                }
            }
            Relation::Le | Relation::Ge => {
                let Some(lb) = &loc_basis else { continue };
                let sign = if row.relation == Relation::Ge { one() } else { -one() };
                let m: Vec<Vec<Rational>> = lb
                    .iter()
                    .map(|i| {
                        lb.iter()
                            .map(|j| &sign * lifted_value(pe, row, &i.union(j), &VarSet::empty()))
                            .collect()
                    })
                    .collect();
                localizing.push((k, psd_check(&m)));
            }
        }
    }
    Ok(SosReport {
        moment_matrix,
        localizing,
        equality_violations,
        normalized: pe.moment(&VarSet::empty()).is_one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn sum_is(n: usize, total: Rational) -> RationalLP {
        let mut lp = RationalLP::new("sum");
        for k in 0..n {
            lp.add_var(format!("x{k}"), Some(int(0)), Some(int(1)));
        }
        lp.add_row("sum", (0..n).map(|k| (k, int(1))).collect(), Relation::Eq, total);
        lp
    }

    #[test]
    fn degree_one_lift_is_the_base() {
        let base = sum_is(3, frac(3, 2));
        let lift = build_sa_lift(&base, 1, 1000).unwrap();
        assert_eq!(lift.lp.num_vars(), 3);
        assert_eq!(lift.lp.rows.len(), 1);
        assert_eq!(lift.lp.rows[0].coeffs, base.rows[0].coeffs);
        assert_eq!(lift.lp.rows[0].rhs, base.rows[0].rhs);
    }

    #[test]
    fn single_variable_row_is_exact_at_degree_one() {
        // x_a (x_a - 1/2) reduces to x_a / 2, so degree one already sees
        // both atoms of the row.
        let mut base = RationalLP::new("half");
        base.add_var("a", Some(int(0)), Some(int(1)));
        base.add_row("fix", vec![(0, int(1))], Relation::Eq, frac(1, 2));
        let lift = build_sa_lift(&base, 1, 100).unwrap();
        assert_eq!(lift.lp.rows.len(), 2);
        let LiftSolution::Infeasible(LiftInfeasibility::Farkas(cert)) = solve_lift_lp(&base, 1, 100).unwrap() else {
            panic!("expected a certificate");
        };
        cert.verify(&lift.lp).unwrap();
    }

    #[test]
    fn conditioning_on_two_of_four() {
        let base = sum_is(4, frac(3, 2));
        let LiftSolution::Feasible(pe) = solve_lift_lp(&base, 2, 10_000).unwrap() else {
            panic!("degree two is feasible");
        };
        assert!(verify_sa_pe(&pe, &base, 2).is_empty());
        let cond = condition(&pe, &VarSet::singleton(0)).unwrap();
        assert_eq!(cond.degree(), 1);
        assert_eq!(cond.moment(&VarSet::singleton(0)), one());
        assert!(matches!(
            condition(&cond, &VarSet::from_iter([1, 2])),
            Err(LiftError::DegreeExhausted { .. })
        ));
    }

    #[test]
    fn full_degree_is_infeasible() {
        let base = sum_is(4, frac(3, 2));
        let sol = solve_lift(&base, 4, 10_000).unwrap();
        assert!(matches!(sol, LiftSolution::Infeasible(LiftInfeasibility::NoIntegralPoint(_))));
        let sol = solve_lift_lp(&base, 4, 10_000).unwrap();
        let LiftSolution::Infeasible(LiftInfeasibility::Farkas(cert)) = sol else {
            panic!("expected a certificate");
        };
        let lift = build_sa_lift(&base, 4, 10_000).unwrap();
        cert.verify(&lift.lp).unwrap();
    }

    #[test]
    fn dump_round_trip() {
        let pe = Pseudoexpectation::integral(4, 2, &VarSet::from_iter([1, 3]));
        let text = pe.dump();
        assert!(text.starts_with("# pseudoexpectation degree=2 vars=4\n{} 1\n{1} 1\n{3} 1\n{1,3} 1\n"));
        assert_eq!(Pseudoexpectation::parse(&text).unwrap(), pe);
    }

    #[test]
    fn integral_point_moment_matrix_is_rank_one() {
        let base = sum_is(3, int(1));
        let pe = Pseudoexpectation::integral(3, 2, &VarSet::singleton(2));
        let rep = verify_sos_pe(&pe, &base, 2).unwrap();
        assert!(rep.is_valid(), "{rep:?}");
        assert_eq!(rep.moment_matrix, PsdOutcome::Psd { rank: 1 });
    }
}
