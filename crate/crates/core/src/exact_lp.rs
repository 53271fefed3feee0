//! Exact rational simplex.
//!
//! The core is a bounded-variable revised simplex over `A x = b` with a
//! dense basis inverse and a phase 1 with one artificial per row. Entering
//! columns come from partial steepest-reduced-cost pricing; after a run of
//! degenerate pivots the smallest-index rule takes over until the point
//! moves again. Ratio-test ties always go to the smallest variable index.
//!
//! Two routes feed the core:
//!
//! * the primal route adds a slack per inequality and solves the program
//!   as given. The basis is `rows x rows`, so it suits programs with few
//!   rows and many columns (configuration programs);
//! * the dual route treats every variable as free, turns bounds into rows
//!   and solves the dual program. Its basis is `vars x vars`, so it suits
//!   lifted programs whose rows far outnumber their variables.
//!
//! Whatever the route, a returned point is substituted into the program and
//! a returned certificate is re-derived from the rows before the caller
//! sees it.

use crate::formulations::{RationalLP, Relation};
use crate::rational::{one, primitive_integer_vector, Rational};
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Primal route unless rows outnumber twice the variables.
    #[default]
    Auto,
    Primal,
    Dual,
}

/// Row multipliers proving infeasibility.
///
/// Every row is read as `a x >= b` (a `<=` row is negated first) and the
/// multipliers apply to those normalized rows: nonnegative on inequality
/// rows, free on equality rows. The combination `sum mu_r a_r` has maximum
/// over the variable box strictly below `sum mu_r b_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub point: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Feasible(x) => Some(x),
            LpOutcome::Infeasible(_) => None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("program is infeasible")]
    Infeasible(FarkasCertificate),
    #[error("objective is unbounded")]
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
    #[error("objective refers to variable {0}, which does not exist")]
    BadObjective(usize),
    #[error("internal certification failed: {0}")]
    CertificationFailed(String),
}

fn normalized(relation: Relation, coeffs: &[(usize, Rational)], rhs: &Rational) -> (Vec<(usize, Rational)>, Rational) {
    match relation {
        Relation::Le => (coeffs.iter().map(|(v, c)| (*v, -c)).collect(), -rhs),
        Relation::Ge | Relation::Eq => (coeffs.to_vec(), rhs.clone()),
    }
}

impl FarkasCertificate {
    /// Re-derives the contradiction from the rows of `lp`.
    pub fn verify(&self, lp: &RationalLP) -> Result<(), String> {
        if self.multipliers.len() != lp.rows.len() {
            return Err("multiplier count differs from row count".into());
        }
        let mut combo = vec![Rational::zero(); lp.num_vars()];
        let mut rhs = Rational::zero();
        for (row, mu) in lp.rows.iter().zip(&self.multipliers) {
            if mu.is_zero() {
                continue;
            }
            if row.relation != Relation::Eq && mu.is_negative() {
                return Err(format!("negative multiplier on inequality row {}", row.name));
            }
            let (coeffs, b) = normalized(row.relation, &row.coeffs, &row.rhs);
            for (v, c) in coeffs {
                combo[v] += mu * c;
            }
            rhs += mu * b;
        }
        let mut best = Rational::zero();
        for (k, c) in combo.iter().enumerate() {
            if c.is_positive() {
                match &lp.upper[k] {
                    Some(u) => best += c * u,
                    None => return Err(format!("combination unbounded above in {}", lp.var_names[k])),
                }
            } else if c.is_negative() {
                match &lp.lower[k] {
                    Some(l) => best += c * l,
                    None => return Err(format!("combination unbounded above in {}", lp.var_names[k])),
                }
            }
        }
        if best < rhs {
            Ok(())
        } else {
            Err(format!("combination reaches {best}, which is not below {rhs}"))
        }
    }
}

// ---------------------------------------------------------------------------
// Simplex core

struct Problem {
    rows: usize,
    cols: Vec<Vec<(usize, Rational)>>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    b: Vec<Rational>,
}

enum CoreResult {
    Optimal { x: Vec<Rational>, duals: Vec<Rational> },
    /// Phase 1 ended with positive infeasibility; carries the phase-1 duals.
    Infeasible { duals: Vec<Rational> },
    Unbounded { x: Vec<Rational>, ray: Vec<Rational> },
}

struct Simplex<'a> {
    p: &'a Problem,
    art_sign: Vec<Rational>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    x: Vec<Rational>,
    basis: Vec<usize>,
    /// Position in `basis` of each basic variable.
    position: Vec<Option<usize>>,
    binv: Vec<Vec<Rational>>,
    /// Consecutive pivots that did not move the point. Past
    /// [`BLAND_AFTER`] the smallest-index rule takes over, which cannot cycle.
    degenerate_streak: usize,
    /// Where the next partial pricing pass starts.
    offset: usize,
}

/// Degenerate pivots tolerated before switching to Bland's rule.
const BLAND_AFTER: usize = 50;

/// Columns priced per pass before settling on the best candidate seen.
const PRICING_WINDOW: usize = 4096;

enum Step {
    Optimal,
    Unbounded(Vec<Rational>),
    Moved,
}

impl<'a> Simplex<'a> {
    fn new(p: &'a Problem) -> Self {
        let n = p.cols.len();
        let m = p.rows;
        let mut x: Vec<Rational> = (0..n)
            .map(|j| {
                p.lower[j].clone().or_else(|| p.upper[j].clone()).unwrap_or_else(Rational::zero)
            })
            .collect();
        let mut residual = p.b.clone();
        for (j, col) in p.cols.iter().enumerate() {
            if !x[j].is_zero() {
                for (i, a) in col {
                    residual[*i] -= a * &x[j];
                }
            }
        }
        let art_sign: Vec<Rational> =
            residual.iter().map(|r| if r.is_negative() { -one() } else { one() }).collect();
        x.extend(residual.iter().map(|r| r.abs()));
        let mut lower = p.lower.clone();
        let mut upper = p.upper.clone();
        lower.extend((0..m).map(|_| Some(Rational::zero())));
        upper.extend((0..m).map(|_| None));
        let basis: Vec<usize> = (n..n + m).collect();
        let mut position = vec![None; n + m];
        for (r, &v) in basis.iter().enumerate() {
            position[v] = Some(r);
        }
        let binv = (0..m)
            .map(|r| {
                let mut row = vec![Rational::zero(); m];
                row[r] = art_sign[r].clone();
                row
            })
            .collect();
        Simplex { p, art_sign, lower, upper, x, basis, position, binv, degenerate_streak: 0, offset: 0 }
    }

    fn n(&self) -> usize {
        self.p.cols.len()
    }

    fn column(&self, j: usize) -> Vec<(usize, Rational)> {
        if j < self.n() {
            self.p.cols[j].clone()
        } else {
            let i = j - self.n();
            vec![(i, self.art_sign[i].clone())]
        }
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let m = self.p.rows;
        let mut pi = vec![Rational::zero(); m];
        for (r, &v) in self.basis.iter().enumerate() {
            if cost[v].is_zero() {
                continue;
            }
            for (k, pk) in pi.iter_mut().enumerate() {
                if !self.binv[r][k].is_zero() {
                    *pk += &cost[v] * &self.binv[r][k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, j: usize, cost: &[Rational], pi: &[Rational]) -> Rational {
        let mut d = cost[j].clone();
        if j < self.n() {
            for (i, a) in &self.p.cols[j] {
                if !pi[*i].is_zero() {
                    d -= &pi[*i] * a;
                }
            }
        } else {
            let i = j - self.n();
            d -= &pi[i] * &self.art_sign[i];
        }
        d
    }

    fn ftran(&self, j: usize) -> Vec<Rational> {
        let m = self.p.rows;
        let col = self.column(j);
        (0..m)
            .map(|r| {
                let mut acc = Rational::zero();
                for (i, a) in &col {
                    if !self.binv[r][*i].is_zero() {
                        acc += &self.binv[r][*i] * a;
                    }
                }
                acc
            })
            .collect()
    }

    fn can_increase(&self, j: usize) -> bool {
        self.upper[j].as_ref().is_none_or(|u| &self.x[j] < u)
    }

    fn can_decrease(&self, j: usize) -> bool {
        self.lower[j].as_ref().is_none_or(|l| &self.x[j] > l)
    }

    /// Entering candidate: `(column, increase)`.
    fn eligible(&self, j: usize, cost: &[Rational], pi: &[Rational]) -> Option<(Rational, bool)> {
        if self.position[j].is_some() {
            return None;
        }
        let d = self.reduced_cost(j, cost, pi);
        if d.is_negative() && self.can_increase(j) {
            Some((-d, true))
        } else if d.is_positive() && self.can_decrease(j) {
            Some((d, false))
        } else {
            None
        }
    }

    /// Picks the entering column: the first eligible one while degenerate
    /// pivots pile up, otherwise the steepest reduced cost within a window
    /// of columns that rotates between calls.
    fn choose_entering(&mut self, cost: &[Rational], pi: &[Rational]) -> Option<(usize, bool)> {
        let total = self.x.len();
        if self.degenerate_streak >= BLAND_AFTER {
            return (0..total).find_map(|j| self.eligible(j, cost, pi).map(|(_, inc)| (j, inc)));
        }
        let mut best: Option<(Rational, usize, bool)> = None;
        for step in 0..total {
            let j = (self.offset + step) % total;
            if let Some((score, inc)) = self.eligible(j, cost, pi) {
                if best.as_ref().is_none_or(|b| score > b.0) {
                    best = Some((score, j, inc));
                }
            }
            if best.is_some() && step + 1 >= PRICING_WINDOW {
                self.offset = (j + 1) % total;
                break;
            }
        }
        best.map(|(_, j, inc)| (j, inc))
    }

    /// One pivot. Returns the unbounded ray over all columns if the
    /// objective decreases without limit.
    fn step(&mut self, cost: &[Rational]) -> Step {
        let pi = self.duals(cost);
        let total = self.x.len();
        let entering = self.choose_entering(cost, &pi);
        let Some((j, increase)) = entering else {
            return Step::Optimal;
        };
        let alpha = self.ftran(j);
        // Basic variable r moves by -dir * alpha[r] per unit step.
        let dir_alpha: Vec<Rational> = if increase { alpha } else { alpha.into_iter().map(|a| -a).collect() };

        let mut best: Option<(Rational, usize, Option<usize>)> = None; // (t, var, row)
        let consider = |t: Rational, var: usize, row: Option<usize>, best: &mut Option<(Rational, usize, Option<usize>)>| {
            let better = match best {
                None => true,
                Some((bt, bv, _)) => t < *bt || (t == *bt && var < *bv),
            };
            if better {
                *best = Some((t, var, row));
            }
        };
        if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
            consider(u - l, j, None, &mut best);
        }
        for (r, a) in dir_alpha.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = self.basis[r];
            if a.is_positive() {
                if let Some(l) = &self.lower[v] {
                    consider((&self.x[v] - l) / a, v, Some(r), &mut best);
                }
            } else if let Some(u) = &self.upper[v] {
                consider((u - &self.x[v]) / -a, v, Some(r), &mut best);
            }
        }
        let Some((t, leaving, row)) = best else {
            let mut ray = vec![Rational::zero(); total];
            ray[j] = if increase { one() } else { -one() };
            for (r, a) in dir_alpha.iter().enumerate() {
                ray[self.basis[r]] = -a;
            }
            return Step::Unbounded(ray);
        };

        if t.is_zero() {
            self.degenerate_streak += 1;
        } else {
            self.degenerate_streak = 0;
            if increase {
                self.x[j] += &t;
            } else {
                self.x[j] -= &t;
            }
            for (r, a) in dir_alpha.iter().enumerate() {
                if !a.is_zero() {
                    let v = self.basis[r];
                    self.x[v] -= &t * a;
                }
            }
        }
        let Some(r) = row else {
            return Step::Moved; // bound flip of the entering variable
        };
        // Snap the leaving variable onto the bound it reached.
        let hit_lower = dir_alpha[r].is_positive();
        self.x[leaving] = if hit_lower {
            self.lower[leaving].clone().expect("finite lower bound")
        } else {
            self.upper[leaving].clone().expect("finite upper bound")
        };
        let alpha: Vec<Rational> =
            if increase { dir_alpha } else { dir_alpha.into_iter().map(|a| -a).collect() };
        self.pivot(r, j, &alpha);
        Step::Moved
    }

    fn pivot(&mut self, r: usize, j: usize, alpha: &[Rational]) {
        let leaving = self.basis[r];
        let piv = alpha[r].clone();
        let pivot_row: Vec<Rational> = self.binv[r].iter().map(|v| v / &piv).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == r || alpha[i].is_zero() {
                continue;
            }
            for (k, val) in row.iter_mut().enumerate() {
                if !pivot_row[k].is_zero() {
                    *val -= &alpha[i] * &pivot_row[k];
                }
            }
        }
        self.binv[r] = pivot_row;
        self.basis[r] = j;
        self.position[leaving] = None;
        self.position[j] = Some(r);
    }

    fn run(&mut self, cost: &[Rational]) -> Option<Vec<Rational>> {
        loop {
            match self.step(cost) {
                Step::Optimal => return None,
                Step::Unbounded(ray) => return Some(ray),
                Step::Moved => {}
            }
        }
    }

    /// Pivots zero-valued basic artificials out wherever a structural
    /// column allows it. Artificials that remain mark redundant rows and
    /// stay basic, fixed at zero.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        for r in 0..self.p.rows {
            if self.basis[r] < n {
                continue;
            }
            let candidate = (0..n).find(|&j| {
                let row = &self.binv[r];
                self.position[j].is_none()
                    && !self.p.cols[j].iter().map(|(i, a)| &row[*i] * a).sum::<Rational>().is_zero()
            });
            if let Some(j) = candidate {
                let alpha = self.ftran(j);
                self.pivot(r, j, &alpha);
            }
        }
    }
}

fn solve_core(p: &Problem, cost: &[Rational]) -> CoreResult {
    let n = p.cols.len();
    let m = p.rows;
    let mut s = Simplex::new(p);
    let mut phase1 = vec![Rational::zero(); n + m];
    for c in phase1.iter_mut().skip(n) {
        *c = one();
    }
    let ray = s.run(&phase1);
    debug_assert!(ray.is_none(), "phase 1 is bounded below by zero");
    let infeasibility: Rational = s.x[n..].iter().sum();
    if infeasibility.is_positive() {
        return CoreResult::Infeasible { duals: s.duals(&phase1) };
    }
    for k in n..n + m {
        s.upper[k] = Some(Rational::zero());
    }
    s.drive_out_artificials();
    let mut full_cost = cost.to_vec();
    full_cost.resize(n + m, Rational::zero());
    match s.run(&full_cost) {
        None => CoreResult::Optimal { duals: s.duals(&full_cost), x: s.x[..n].to_vec() },
        Some(ray) => CoreResult::Unbounded { x: s.x[..n].to_vec(), ray: ray[..n].to_vec() },
    }
}

// ---------------------------------------------------------------------------
// Routes

fn certificate(lp: &RationalLP, raw: Vec<Rational>) -> Result<FarkasCertificate, LpError> {
    let cert = FarkasCertificate { multipliers: primitive_integer_vector(&raw) };
    cert.verify(lp).map_err(LpError::CertificationFailed)?;
    Ok(cert)
}

enum RouteResult {
    Optimal(Vec<Rational>),
    Infeasible(FarkasCertificate),
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

fn primal_route(lp: &RationalLP, cost: &[Rational]) -> Result<RouteResult, LpError> {
    let n = lp.num_vars();
    let m = lp.rows.len();
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for (v, c) in &row.coeffs {
            cols[*v].push((i, c.clone()));
        }
    }
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    for (i, row) in lp.rows.iter().enumerate() {
        match row.relation {
            Relation::Le => cols.push(vec![(i, one())]),
            Relation::Ge => cols.push(vec![(i, -one())]),
            Relation::Eq => continue,
        }
        lower.push(Some(Rational::zero()));
        upper.push(None);
    }
    let mut full_cost = cost.to_vec();
    full_cost.resize(cols.len(), Rational::zero());
    let p = Problem { rows: m, cols, lower, upper, b: lp.rows.iter().map(|r| r.rhs.clone()).collect() };
    Ok(match solve_core(&p, &full_cost) {
        CoreResult::Optimal { x, .. } => RouteResult::Optimal(x[..n].to_vec()),
        CoreResult::Unbounded { x, ray } => {
            RouteResult::Unbounded { point: x[..n].to_vec(), ray: ray[..n].to_vec() }
        }
        CoreResult::Infeasible { duals } => {
            let raw = lp
                .rows
                .iter()
                .zip(duals)
                .map(|(row, pi)| if row.relation == Relation::Le { -pi } else { pi })
                .collect();
            RouteResult::Infeasible(certificate(lp, raw)?)
        }
    })
}

/// Rows of the dual program: one `>=` row per program row or finite bound,
/// one equality row per `=` row.
struct DualForm {
    ge: Vec<(Vec<(usize, Rational)>, Rational, Option<usize>)>,
    eq: Vec<(Vec<(usize, Rational)>, Rational, usize)>,
}

fn dual_form(lp: &RationalLP) -> DualForm {
    let mut ge = Vec::new();
    let mut eq = Vec::new();
    for (i, row) in lp.rows.iter().enumerate() {
        let (coeffs, b) = normalized(row.relation, &row.coeffs, &row.rhs);
        if row.relation == Relation::Eq {
            eq.push((coeffs, b, i));
        } else {
            ge.push((coeffs, b, Some(i)));
        }
    }
    for k in 0..lp.num_vars() {
        if let Some(l) = &lp.lower[k] {
            ge.push((vec![(k, one())], l.clone(), None));
        }
        if let Some(u) = &lp.upper[k] {
            ge.push((vec![(k, -one())], -u, None));
        }
    }
    DualForm { ge, eq }
}

fn dual_route(lp: &RationalLP, cost: &[Rational]) -> Result<RouteResult, LpError> {
    let n = lp.num_vars();
    let form = dual_form(lp);
    let mut cols = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut dual_cost = Vec::new();
    for (coeffs, b, _) in &form.ge {
        cols.push(coeffs.clone());
        lower.push(Some(Rational::zero()));
        upper.push(None);
        dual_cost.push(-b);
    }
    for (coeffs, b, _) in &form.eq {
        cols.push(coeffs.clone());
        lower.push(None);
        upper.push(None);
        dual_cost.push(-b);
    }
    let p = Problem { rows: n, cols, lower, upper, b: cost.to_vec() };
    Ok(match solve_core(&p, &dual_cost) {
        CoreResult::Optimal { duals, .. } => RouteResult::Optimal(duals.into_iter().map(|d| -d).collect()),
        CoreResult::Unbounded { ray, .. } => {
            let mut raw = vec![Rational::zero(); lp.rows.len()];
            let ge_len = form.ge.len();
            for (k, (_, _, row)) in form.ge.iter().enumerate() {
                if let Some(i) = row {
                    raw[*i] = ray[k].clone();
                }
            }
            for (k, (_, _, i)) in form.eq.iter().enumerate() {
                raw[*i] = ray[ge_len + k].clone();
            }
            RouteResult::Infeasible(certificate(lp, raw)?)
        }
        CoreResult::Infeasible { duals } => {
            // The dual is infeasible, so the program is infeasible or
            // unbounded. A zero objective settles which.
            match dual_route(lp, &vec![Rational::zero(); n])? {
                RouteResult::Optimal(point) => {
                    RouteResult::Unbounded { point, ray: duals.into_iter().map(|d| -d).collect() }
                }
                other => other,
            }
        }
    })
}

fn pick_route(lp: &RationalLP, route: Route) -> Route {
    match route {
        Route::Auto if lp.rows.len() > 2 * lp.num_vars().max(1) => Route::Dual,
        Route::Auto => Route::Primal,
        r => r,
    }
}

fn solve_route(lp: &RationalLP, cost: &[Rational], route: Route) -> Result<RouteResult, LpError> {
    match pick_route(lp, route) {
        Route::Dual => dual_route(lp, cost),
        _ => primal_route(lp, cost),
    }
}

fn check_point(lp: &RationalLP, point: &[Rational]) -> Result<(), LpError> {
    let bad = lp.violations(point);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(LpError::CertificationFailed(format!("returned point violates {}", bad.join(", "))))
    }
}

fn check_ray(lp: &RationalLP, ray: &[Rational], cost: &[Rational]) -> Result<(), LpError> {
    let fail = |what: &str| Err(LpError::CertificationFailed(format!("unbounded ray {what}")));
    for row in &lp.rows {
        let d = row.lhs_at(ray);
        let ok = match row.relation {
            Relation::Le => !d.is_positive(),
            Relation::Ge => !d.is_negative(),
            Relation::Eq => d.is_zero(),
        };
        if !ok {
            return fail(&format!("leaves row {}", row.name));
        }
    }
    for (k, d) in ray.iter().enumerate() {
        if (d.is_negative() && lp.lower[k].is_some()) || (d.is_positive() && lp.upper[k].is_some()) {
            return fail(&format!("leaves the bounds of {}", lp.var_names[k]));
        }
    }
    let slope: Rational = cost.iter().zip(ray).map(|(c, d)| c * d).sum();
    if slope.is_negative() {
        Ok(())
    } else {
        fail("does not improve the objective")
    }
}

/// Decides feasibility, choosing the route from the program's shape.
pub fn feasible(lp: &RationalLP) -> Result<LpOutcome, LpError> {
    feasible_with(lp, Route::Auto)
}

pub fn feasible_with(lp: &RationalLP, route: Route) -> Result<LpOutcome, LpError> {
    let zero = vec![Rational::zero(); lp.num_vars()];
    match solve_route(lp, &zero, route)? {
        RouteResult::Optimal(x) => {
            check_point(lp, &x)?;
            Ok(LpOutcome::Feasible(x))
        }
        RouteResult::Infeasible(cert) => Ok(LpOutcome::Infeasible(cert)),
        RouteResult::Unbounded { .. } => {
            Err(LpError::CertificationFailed("zero objective reported unbounded".into()))
        }
    }
}

/// Optimizes a sparse linear objective exactly.
pub fn optimize(lp: &RationalLP, objective: &[(usize, Rational)], sense: Sense) -> Result<Optimum, LpError> {
    optimize_with(lp, objective, sense, Route::Auto)
}

pub fn optimize_with(
    lp: &RationalLP,
    objective: &[(usize, Rational)],
    sense: Sense,
    route: Route,
) -> Result<Optimum, LpError> {
    let mut cost = vec![Rational::zero(); lp.num_vars()];
    for (v, c) in objective {
        let slot = cost.get_mut(*v).ok_or(LpError::BadObjective(*v))?;
        *slot += c;
    }
    if sense == Sense::Maximize {
        cost.iter_mut().for_each(|c| *c = -c.clone());
    }
    match solve_route(lp, &cost, route)? {
        RouteResult::Optimal(point) => {
            check_point(lp, &point)?;
            let value: Rational = objective.iter().map(|(v, c)| c * &point[*v]).sum();
            Ok(Optimum { value, point })
        }
        RouteResult::Infeasible(cert) => Err(LpError::Infeasible(cert)),
        RouteResult::Unbounded { point, ray } => {
            check_point(lp, &point)?;
            check_ray(lp, &ray, &cost)?;
            Err(LpError::Unbounded { point, ray })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn var(lp: &mut RationalLP, name: &str, lo: Option<i64>, hi: Option<i64>) -> usize {
        lp.add_var(name, lo.map(int), hi.map(int))
    }

    #[test]
    fn half_point_is_feasible() {
        for route in [Route::Primal, Route::Dual] {
            let mut lp = RationalLP::new("half");
            let x = var(&mut lp, "x", Some(0), Some(1));
            lp.add_row("fix", vec![(x, int(1))], Relation::Eq, frac(1, 2));
            assert_eq!(feasible_with(&lp, route).unwrap(), LpOutcome::Feasible(vec![frac(1, 2)]));
        }
    }

    #[test]
    fn contradictory_bounds_give_unit_certificate() {
        for route in [Route::Primal, Route::Dual] {
            let mut lp = RationalLP::new("clash");
            let x = var(&mut lp, "x", None, None);
            lp.add_row("low", vec![(x, int(1))], Relation::Ge, int(1));
            lp.add_row("high", vec![(x, int(1))], Relation::Le, int(0));
            let LpOutcome::Infeasible(cert) = feasible_with(&lp, route).unwrap() else {
                panic!("expected infeasible");
            };
            assert_eq!(cert.multipliers, vec![int(1), int(1)]);
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 2x + 3y, 2x + y <= 18, 6x + 5y <= 60, 2x + 5y <= 40
        for route in [Route::Primal, Route::Dual] {
            let mut lp = RationalLP::new("textbook");
            let x = var(&mut lp, "x", Some(0), None);
            let y = var(&mut lp, "y", Some(0), None);
            lp.add_row("a", vec![(x, int(2)), (y, int(1))], Relation::Le, int(18));
            lp.add_row("b", vec![(x, int(6)), (y, int(5))], Relation::Le, int(60));
            lp.add_row("c", vec![(x, int(2)), (y, int(5))], Relation::Le, int(40));
            let opt = optimize_with(&lp, &[(x, int(2)), (y, int(3))], Sense::Maximize, route).unwrap();
            assert_eq!(opt.value, int(28));
            assert_eq!(opt.point, vec![int(5), int(6)]);
        }
    }

    #[test]
    fn unbounded_is_reported() {
        for route in [Route::Primal, Route::Dual] {
            let mut lp = RationalLP::new("open");
            let x = var(&mut lp, "x", Some(0), None);
            lp.add_row("a", vec![(x, int(1))], Relation::Ge, int(1));
            let err = optimize_with(&lp, &[(x, int(1))], Sense::Maximize, route).unwrap_err();
            assert!(matches!(err, LpError::Unbounded { .. }), "{route:?}: {err:?}");
        }
    }
}
