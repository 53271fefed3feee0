//! Partial schedules over (machine, configuration) pairs, configuration
//! profiles and the extension sets built from them.

use crate::rational::one;
use crate::ring::{GroundSet, SquareFreePoly, VarSet};

/// A set of (machine, configuration) pairs using every machine at most
/// once, kept sorted by machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartialSchedule(Vec<(usize, usize)>);

impl PartialSchedule {
    pub fn empty() -> Self {
        PartialSchedule(Vec::new())
    }

    /// `None` if a machine appears with two different configurations.
    /// Repeated identical pairs collapse.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Option<Self> {
        let mut v: Vec<(usize, usize)> = pairs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        v.windows(2).all(|w| w[0].0 != w[1].0).then_some(PartialSchedule(v))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn machines(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|p| p.0)
    }

    pub fn uses_machine(&self, machine: usize) -> bool {
        self.0.binary_search_by_key(&machine, |p| p.0).is_ok()
    }

    pub fn config_of(&self, machine: usize) -> Option<usize> {
        self.0.binary_search_by_key(&machine, |p| p.0).ok().map(|k| self.0[k].1)
    }

    /// `delta_S(C)` for every configuration index below `configs`.
    pub fn degrees(&self, configs: usize) -> Vec<u32> {
        let mut d = vec![0; configs];
        for &(_, c) in &self.0 {
            d[c] += 1;
        }
        d
    }

    /// Union as sets of pairs; `None` if the union is not a partial
    /// schedule.
    pub fn union(&self, other: &PartialSchedule) -> Option<PartialSchedule> {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a.1 != b.1 {
                        return None;
                    }
                    out.push(a);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Some(PartialSchedule(out))
    }

    /// No shared machine.
    pub fn machine_disjoint(&self, other: &PartialSchedule) -> bool {
        self.machines().all(|m| !other.uses_machine(m))
    }

    /// No shared pair.
    pub fn pair_disjoint(&self, other: &PartialSchedule) -> bool {
        self.0.iter().all(|p| !other.0.contains(p))
    }

    pub fn to_varset(&self, ground: &GroundSet) -> VarSet {
        VarSet::from_iter(self.0.iter().map(|&(i, c)| ground.var(i, c)))
    }

    pub fn from_varset(s: &VarSet, ground: &GroundSet) -> Option<Self> {
        Self::from_pairs(s.iter().map(|v| (ground.machine_of(v), ground.item_of(v))))
    }

    /// Image under a machine relabelling.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_pairs(self.0.iter().map(|&(i, c)| (perm[i], c))).expect("permutations are injective")
    }
}

impl std::fmt::Display for PartialSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, (i, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},C{})", i + 1, c + 1)?;
        }
        write!(f, "}}")
    }
}

/// Multiplicity of each configuration; `norm` is the total.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<u32>);

impl Profile {
    pub fn zero(configs: usize) -> Self {
        Profile(vec![0; configs])
    }

    pub fn unit(configs: usize, c: usize) -> Self {
        let mut p = Profile::zero(configs);
        p.0[c] = 1;
        p
    }

    pub fn norm(&self) -> usize {
        self.0.iter().map(|&g| g as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&c| self.0[c] > 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&g| g == 0)
    }

    /// All profiles over `configs` configurations with norm at most `max`,
    /// by norm and then lexicographically descending.
    pub fn all_up_to(configs: usize, max: usize) -> Vec<Profile> {
        if configs == 0 {
            return vec![Profile(Vec::new())];
        }
        let mut out = Vec::new();
        for norm in 0..=max {
            compositions(norm, 0, &mut vec![0; configs], &mut out);
        }
        out
    }
}

fn compositions(left: usize, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Profile>) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u32;
        out.push(Profile(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for take in (0..=left).rev() {
        cur[pos] = take as u32;
        compositions(left - take, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// The partial schedules over machines `0..machines` outside those of `t`
/// whose configuration counts equal `gamma`.
pub fn extensions(t: &PartialSchedule, gamma: &Profile, machines: usize) -> Vec<PartialSchedule> {
    let free: Vec<usize> = (0..machines).filter(|&i| !t.uses_machine(i)).collect();
    let mut out = Vec::new();
    let mut left = gamma.0.clone();
    let mut cur = Vec::new();
    extend(&free, 0, gamma.norm(), &mut left, &mut cur, &mut out);
    out
}

fn extend(
    free: &[usize],
    pos: usize,
    remaining: usize,
    left: &mut [u32],
    cur: &mut Vec<(usize, usize)>,
    out: &mut Vec<PartialSchedule>,
) {
    if remaining == 0 {
        out.push(PartialSchedule(cur.clone()));
        return;
    }
    if free.len() - pos < remaining {
        return;
    }
    for c in 0..left.len() {
        if left[c] > 0 {
            left[c] -= 1;
            cur.push((free[pos], c));
            extend(free, pos + 1, remaining - 1, left, cur, out);
            cur.pop();
            left[c] += 1;
        }
    }
    extend(free, pos + 1, remaining, left, cur, out);
}

/// `B_{T,gamma}`: the sum of `y_A` over the extensions `A`.
pub fn b_poly(t: &PartialSchedule, gamma: &Profile, ground: &GroundSet) -> SquareFreePoly {
    let mut p = SquareFreePoly::zero();
    for a in extensions(t, gamma, ground.machines) {
        p.add_term(a.to_varset(ground), one());
    }
    p
}

/// `y_T B_{T,gamma}`, reduced modulo the scheduling ideal.
pub fn spanning_poly(t: &PartialSchedule, gamma: &Profile, ground: &GroundSet) -> SquareFreePoly {
    let mut p = SquareFreePoly::zero();
    for a in extensions(t, gamma, ground.machines) {
        let u = t.union(&a).expect("extensions avoid the machines of T");
        p.add_term(u.to_varset(ground), one());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binomial, factorial};
    use num_bigint::BigInt;

    #[test]
    fn worked_extension_example() {
        // Machines 1..4, T = {(2,C1),(3,C2)}, one copy each of C1 and C2.
        let t = PartialSchedule::from_pairs([(1, 0), (2, 1)]).unwrap();
        let ext = extensions(&t, &Profile(vec![1, 1]), 4);
        let want = vec![
            PartialSchedule::from_pairs([(0, 0), (3, 1)]).unwrap(),
            PartialSchedule::from_pairs([(0, 1), (3, 0)]).unwrap(),
        ];
        assert_eq!(ext, want);
        assert_eq!(extensions(&t, &Profile(vec![0, 0]), 4), vec![PartialSchedule::empty()]);
    }

    #[test]
    fn extension_counts() {
        let t = PartialSchedule::from_pairs([(0, 2)]).unwrap();
        for gamma in Profile::all_up_to(3, 3) {
            let n = extensions(&t, &gamma, 6).len();
            let g = gamma.norm() as u64;
            let mut want = binomial(5, g) * factorial(g as u32);
            for &x in &gamma.0 {
                want /= factorial(x);
            }
            assert_eq!(BigInt::from(n), want, "{gamma:?}");
        }
    }

    #[test]
    fn profile_listing() {
        assert_eq!(Profile::all_up_to(6, 1).len(), 7);
        assert_eq!(Profile::all_up_to(3, 2).len(), 1 + 3 + 6);
        assert_eq!(Profile::all_up_to(2, 1)[1], Profile(vec![1, 0]));
    }

    #[test]
    fn union_conflicts() {
        let a = PartialSchedule::from_pairs([(0, 0)]).unwrap();
        let b = PartialSchedule::from_pairs([(0, 1)]).unwrap();
        assert!(a.union(&b).is_none());
        assert_eq!(a.union(&a), Some(a.clone()));
        assert!(PartialSchedule::from_pairs([(0, 0), (0, 1)]).is_none());
    }
}
