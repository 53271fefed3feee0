//! Square-free polynomials over 0/1 variables and the scheduling ideal.
//!
//! Variables are `u32` indices. A monomial is a [`VarSet`] because
//! `x^2 = x` modulo the Boolean ideal. When variables encode
//! `(machine, item)` pairs through a [`GroundSet`], a monomial that puts two
//! different items on one machine is zero modulo the scheduling ideal.

use crate::rational::{frac, one, Rational};
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("monomial of degree {have} exceeds target degree {want}")]
    DegreeTooLarge { have: usize, want: usize },
    #[error("target degree {want} exceeds the machine count {machines}")]
    NotEnoughMachines { want: usize, machines: usize },
    #[error("exhaustive evaluation needs {points} points, above the limit {limit}")]
    TooManyPoints { points: u128, limit: u128 },
}

/// Sorted set of variable indices. Ordered by size first, then
/// lexicographically, which is the canonical order used in dumps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarSet(Vec<u32>);

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet(Vec::new())
    }

    pub fn singleton(v: u32) -> Self {
        VarSet(vec![v])
    }

    pub fn from_iter<I: IntoIterator<Item = u32>>(items: I) -> Self {
        let mut v: Vec<u32> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VarSet(v)
    }

    /// Wraps an already sorted, duplicate-free vector.
    pub fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VarSet(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VarSet(out)
    }

    pub fn with(&self, v: u32) -> VarSet {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut out = self.0.clone();
                out.insert(pos, v);
                VarSet(out)
            }
        }
    }

    pub fn minus(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    /// All subsets, in the order of the bit patterns over the elements.
    pub fn subsets(&self) -> impl Iterator<Item = VarSet> + '_ {
        let n = self.0.len();
        assert!(n < 63, "subset enumeration of a set with {n} elements");
        (0u64..(1u64 << n)).map(move |mask| {
            VarSet((0..n).filter(|b| mask >> b & 1 == 1).map(|b| self.0[b]).collect())
        })
    }
}

impl std::fmt::Display for VarSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// All subsets of `0..n` of size at most `d`, in canonical order.
pub fn subsets_up_to(n: usize, d: usize) -> Vec<VarSet> {
    let mut out = vec![VarSet::empty()];
    for size in 1..=d.min(n) {
        let mut idx: Vec<u32> = (0..size as u32).collect();
        loop {
            out.push(VarSet(idx.clone()));
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    out
}

/// Advances a strictly increasing index vector over `0..n` to the next
/// combination in lexicographic order. Returns false after the last one.
pub fn next_combination(idx: &mut [u32], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if (idx[i] as usize) < n - k + i {
            idx[i] += 1;
            for l in i + 1..k {
                idx[l] = idx[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Rational combination of square-free monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SquareFreePoly {
    terms: BTreeMap<VarSet, Rational>,
}

impl SquareFreePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(VarSet::empty(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(one())
    }

    pub fn var(v: u32) -> Self {
        Self::monomial(VarSet::singleton(v))
    }

    pub fn monomial(s: VarSet) -> Self {
        let mut p = Self::zero();
        p.add_term(s, one());
        p
    }

    /// `prod_{v in s} x_v * prod_{v in r} (1 - x_v)`.
    pub fn phi(s: &VarSet, r: &VarSet) -> Self {
        let mut p = Self::zero();
        for sub in r.subsets() {
            let sign = if sub.len() % 2 == 0 { one() } else { -one() };
            p.add_term(s.union(&sub), sign);
        }
        p
    }

    pub fn add_term(&mut self, s: VarSet, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarSet, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &VarSet) -> Rational {
        self.terms.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest monomial size, 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(VarSet::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (s, v) in &self.terms {
            out.terms.insert(s.clone(), v * c);
        }
        out
    }

    /// Product reduced with `x^2 = x`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.union(b), ca * cb);
            }
        }
        out
    }

    /// Product followed by removal of monomials rejected by `keep`.
    pub fn mul_filtered(&self, other: &Self, keep: impl Fn(&VarSet) -> bool) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let u = a.union(b);
                if keep(&u) {
                    out.add_term(u, ca * cb);
                }
            }
        }
        out
    }

    /// Value at a 0/1 point given as the set of variables equal to one.
    pub fn eval_at(&self, ones: impl Fn(u32) -> bool) -> Rational {
        let mut acc = Rational::zero();
        for (s, c) in &self.terms {
            if s.iter().all(&ones) {
                acc += c;
            }
        }
        acc
    }

    /// Renames variables; the map must be injective on the support.
    pub fn map_vars(&self, f: impl Fn(u32) -> u32) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            out.add_term(VarSet::from_iter(s.iter().map(&f)), c.clone());
        }
        out
    }
}

impl std::fmt::Display for SquareFreePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*x{s}")?;
        }
        Ok(())
    }
}

/// Variable layout `machine * items + item` for `(machine, item)` pairs.
/// Items are jobs for the assignment program and configurations for the
/// configuration program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    pub machines: usize,
    pub items: usize,
}

impl GroundSet {
    pub fn new(machines: usize, items: usize) -> Self {
        GroundSet { machines, items }
    }

    pub fn size(&self) -> usize {
        self.machines * self.items
    }

    pub fn var(&self, machine: usize, item: usize) -> u32 {
        debug_assert!(machine < self.machines && item < self.items);
        (machine * self.items + item) as u32
    }

    pub fn machine_of(&self, v: u32) -> usize {
        v as usize / self.items
    }

    pub fn item_of(&self, v: u32) -> usize {
        v as usize % self.items
    }

    /// True when no machine carries two different items.
    pub fn is_partial_schedule(&self, s: &VarSet) -> bool {
        s.as_slice().windows(2).all(|w| self.machine_of(w[0]) != self.machine_of(w[1]))
    }

    pub fn machines_of(&self, s: &VarSet) -> Vec<usize> {
        let mut ms: Vec<usize> = s.iter().map(|v| self.machine_of(v)).collect();
        ms.dedup();
        ms
    }

    /// `sum_items y_{machine, item}`.
    pub fn machine_sum(&self, machine: usize) -> SquareFreePoly {
        let mut p = SquareFreePoly::zero();
        for c in 0..self.items {
            p.add_term(VarSet::singleton(self.var(machine, c)), one());
        }
        p
    }
}

/// Drops monomials that are not partial schedules. Such monomials lie in the
/// scheduling ideal, so the result is congruent to `f`.
pub fn kill_non_partial(f: &SquareFreePoly, g: &GroundSet) -> SquareFreePoly {
    let mut out = SquareFreePoly::zero();
    for (s, c) in f.terms() {
        if g.is_partial_schedule(s) {
            out.add_term(s.clone(), c.clone());
        }
    }
    out
}

/// Homogenises `f` to degree `d` modulo the scheduling ideal: each surviving
/// monomial `y_S` is multiplied by `prod_{h in H} sum_C y_{hC}` where `H` is
/// the `d - |S|` smallest machines not touched by `S`.
pub fn expand_to_degree(
    f: &SquareFreePoly,
    g: &GroundSet,
    d: usize,
) -> Result<SquareFreePoly, RingError> {
    if d > g.machines {
        return Err(RingError::NotEnoughMachines { want: d, machines: g.machines });
    }
    let f = kill_non_partial(f, g);
    let mut out = SquareFreePoly::zero();
    for (s, c) in f.terms() {
        if s.len() > d {
            return Err(RingError::DegreeTooLarge { have: s.len(), want: d });
        }
        let used = g.machines_of(s);
        let extra: Vec<usize> =
            (0..g.machines).filter(|h| !used.contains(h)).take(d - s.len()).collect();
        let mut p = SquareFreePoly::monomial(s.clone()).scale(c);
        for h in extra {
            p = p.mul(&g.machine_sum(h));
        }
        out = out.add(&p);
    }
    Ok(out)
}

/// Limit on the number of points used by [`equal_mod_sched`].
pub const EVALUATION_POINT_LIMIT: u128 = 5_000_000;

/// Decides `f == h` modulo the scheduling ideal by evaluating both at every
/// map `machines -> items`. A polynomial vanishes on all these points iff it
/// lies in the ideal, since they are exactly its zero set.
pub fn equal_mod_sched(
    f: &SquareFreePoly,
    h: &SquareFreePoly,
    g: &GroundSet,
) -> Result<bool, RingError> {
    let diff = f.sub(h);
    let points = (g.items as u128).checked_pow(g.machines as u32).unwrap_or(u128::MAX);
    if points > EVALUATION_POINT_LIMIT {
        return Err(RingError::TooManyPoints { points, limit: EVALUATION_POINT_LIMIT });
    }
    let mut point = vec![0usize; g.machines];
    loop {
        let v = diff.eval_at(|var| point[g.machine_of(var)] == g.item_of(var));
        if !v.is_zero() {
            return Ok(false);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == g.machines {
                return Ok(true);
            }
            point[k] += 1;
            if point[k] < g.items {
                break;
            }
            point[k] = 0;
            k += 1;
        }
    }
}

/// Averages `f` over an explicit list of machine permutations. Each
/// permutation maps machine `i` to `perm[i]`.
pub fn symmetrize(f: &SquareFreePoly, g: &GroundSet, perms: &[Vec<usize>]) -> SquareFreePoly {
    let mut out = SquareFreePoly::zero();
    if perms.is_empty() {
        return out;
    }
    for perm in perms {
        out = out.add(&f.map_vars(|v| g.var(perm[g.machine_of(v)], g.item_of(v))));
    }
    out.scale(&frac(1, perms.len() as i64))
}

/// Average of `f` over the full symmetric group of the machines in `row`.
///
/// Rather than enumerating `|row|!` permutations, each monomial is averaged
/// over its orbit: the machines of the monomial lying in `row` are sent to
/// every injective image in `row`, all with the same weight.
pub fn symmetrize_over(f: &SquareFreePoly, g: &GroundSet, row: &[usize]) -> SquareFreePoly {
    let mut out = SquareFreePoly::zero();
    for (s, c) in f.terms() {
        let moving: Vec<usize> = g.machines_of(s).into_iter().filter(|m| row.contains(m)).collect();
        let mut images = Vec::new();
        injective_maps(moving.len(), row, &mut Vec::new(), &mut images);
        let weight = c * frac(1, images.len() as i64);
        for img in &images {
            let mapped = VarSet::from_iter(s.iter().map(|v| {
                let m = g.machine_of(v);
                match moving.iter().position(|&x| x == m) {
                    Some(k) => g.var(img[k], g.item_of(v)),
                    None => v,
                }
            }));
            out.add_term(mapped, weight.clone());
        }
    }
    out
}

fn injective_maps(k: usize, row: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for &r in row {
        if !cur.contains(&r) {
            cur.push(r);
            injective_maps(k, row, cur, out);
            cur.pop();
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    injective_maps(n, &(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn g22() -> GroundSet {
        GroundSet::new(2, 2)
    }

    #[test]
    fn subsets_up_to_counts() {
        assert_eq!(subsets_up_to(4, 2).len(), 1 + 4 + 6);
        assert_eq!(subsets_up_to(3, 5).len(), 8);
        assert_eq!(subsets_up_to(5, 0), vec![VarSet::empty()]);
        let s = subsets_up_to(4, 4);
        let mut sorted = s.clone();
        sorted.sort();
        assert_eq!(s, sorted);
    }

    #[test]
    fn squares_collapse() {
        let x = SquareFreePoly::var(0);
        assert_eq!(x.mul(&x), x);
    }

    #[test]
    fn non_partial_monomials_vanish() {
        let g = g22();
        let f = SquareFreePoly::monomial(VarSet::from_iter([g.var(0, 0), g.var(0, 1)]));
        assert!(kill_non_partial(&f, &g).is_zero());
    }

    #[test]
    fn expand_constant_to_degree_one() {
        let g = g22();
        let f = expand_to_degree(&SquareFreePoly::one(), &g, 1).unwrap();
        assert_eq!(f, g.machine_sum(0));
        assert!(equal_mod_sched(&f, &SquareFreePoly::one(), &g).unwrap());
    }

    #[test]
    fn expand_rejects_high_degree() {
        let g = g22();
        let f = SquareFreePoly::monomial(VarSet::from_iter([g.var(0, 0), g.var(1, 1)]));
        assert_eq!(
            expand_to_degree(&f, &g, 1),
            Err(RingError::DegreeTooLarge { have: 2, want: 1 })
        );
    }

    #[test]
    fn symmetrize_single_variable() {
        let g = g22();
        let f = SquareFreePoly::var(g.var(0, 0));
        let s = symmetrize(&f, &g, &all_permutations(2));
        let mut want = SquareFreePoly::zero();
        want.add_term(VarSet::singleton(g.var(0, 0)), frac(1, 2));
        want.add_term(VarSet::singleton(g.var(1, 0)), frac(1, 2));
        assert_eq!(s, want);
        assert_eq!(symmetrize_over(&f, &g, &[0, 1]), want);
    }

    #[test]
    fn phi_expansion() {
        let p = SquareFreePoly::phi(&VarSet::singleton(0), &VarSet::singleton(1));
        assert_eq!(p.coefficient(&VarSet::singleton(0)), int(1));
        assert_eq!(p.coefficient(&VarSet::from_iter([0, 1])), int(-1));
    }
}
