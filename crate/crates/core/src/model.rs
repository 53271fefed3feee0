//! Instances, configurations and the long/short size classes.

use crate::rational::{frac, int, parse_rational, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default bound on the number of enumerated configurations.
pub const DEFAULT_CONFIGURATION_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("1/epsilon must be an integer >= 2, got epsilon = {0}")]
    NonIntegralEpsilonInverse(String),
    #[error("configuration count exceeds the cap of {cap}")]
    ConfigurationExplosion { cap: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("instance JSON error: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    pub size: u64,
}

/// Identical-machines makespan instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub machines: usize,
    pub jobs: Vec<Job>,
}

impl Instance {
    pub fn new(machines: usize, jobs: Vec<Job>) -> Result<Self, ModelError> {
        let inst = Instance { machines, jobs };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance with ids `j00, j01, ...` in the given order.
    pub fn from_sizes(machines: usize, sizes: &[u64]) -> Self {
        let width = if sizes.len() > 100 { 3 } else { 2 };
        let jobs = sizes
            .iter()
            .enumerate()
            .map(|(k, &size)| Job { id: format!("j{k:0width$}"), size })
            .collect();
        Instance { machines, jobs }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.machines == 0 {
            return Err(ModelError::InvalidInstance("machine count must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for job in &self.jobs {
            if !seen.insert(job.id.as_str()) {
                return Err(ModelError::InvalidInstance(format!("duplicate job id {:?}", job.id)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let inst: Instance = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn total_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).sum()
    }

    pub fn max_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).max().unwrap_or(0)
    }

    /// Distinct sizes in ascending order.
    pub fn distinct_sizes(&self) -> Vec<u64> {
        self.jobs.iter().map(|j| j.size).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Number of jobs of each size.
    pub fn size_counts(&self) -> BTreeMap<u64, u32> {
        let mut counts = BTreeMap::new();
        for j in &self.jobs {
            *counts.entry(j.size).or_insert(0) += 1;
        }
        counts
    }

    /// Job indices sorted by ascending id.
    pub fn indices_by_id(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.jobs.len()).collect();
        idx.sort_by(|&a, &b| self.jobs[a].id.cmp(&self.jobs[b].id));
        idx
    }
}

/// A multiset of job sizes, stored as `(size, multiplicity)` pairs sorted by
/// descending size. The derived order compares these pairs lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Configuration {
    entries: Vec<(u64, u32)>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_multiplicities<I: IntoIterator<Item = (u64, u32)>>(items: I) -> Self {
        let mut map: BTreeMap<u64, u32> = BTreeMap::new();
        for (size, mult) in items {
            if mult > 0 {
                *map.entry(size).or_insert(0) += mult;
            }
        }
        let entries = map.into_iter().rev().collect();
        Configuration { entries }
    }

    pub fn from_sizes(sizes: &[u64]) -> Self {
        Self::from_multiplicities(sizes.iter().map(|&s| (s, 1)))
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn multiplicity(&self, size: u64) -> u32 {
        self.entries.iter().find(|(s, _)| *s == size).map_or(0, |(_, m)| *m)
    }

    pub fn load(&self) -> u64 {
        self.entries.iter().map(|(s, m)| s * u64::from(*m)).sum()
    }

    pub fn cardinality(&self) -> u32 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Every configuration obtained by removing one job.
    pub fn one_smaller(&self) -> Vec<Configuration> {
        self.entries
            .iter()
            .map(|&(size, _)| {
                Configuration::from_multiplicities(self.entries.iter().map(|&(s, m)| {
                    if s == size {
                        (s, m - 1)
                    } else {
                        (s, m)
                    }
                }))
            })
            .collect()
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for &(s, m) in &self.entries {
            for _ in 0..m {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

/// All multisets over `sizes` with load at most `t`, the empty one included,
/// in ascending [`Configuration`] order.
pub fn enumerate_configurations(
    sizes: &[u64],
    t: u64,
    cap: usize,
) -> Result<Vec<Configuration>, ModelError> {
    let mut distinct: Vec<u64> = sizes.iter().copied().filter(|&s| s > 0).collect();
    distinct.sort_unstable_by(|a, b| b.cmp(a));
    distinct.dedup();
    let mut out = Vec::new();
    let mut current: Vec<(u64, u32)> = Vec::new();
    fn rec(
        sizes: &[u64],
        remaining: u64,
        current: &mut Vec<(u64, u32)>,
        out: &mut Vec<Configuration>,
        cap: usize,
    ) -> Result<(), ModelError> {
        let Some((&size, rest)) = sizes.split_first() else {
            if out.len() >= cap {
                return Err(ModelError::ConfigurationExplosion { cap });
            }
            out.push(Configuration::from_multiplicities(current.iter().copied()));
            return Ok(());
        };
        for mult in 0..=(remaining / size) {
            current.push((size, mult as u32));
            rec(rest, remaining - mult * size, current, out, cap)?;
            current.pop();
        }
        Ok(())
    }
    rec(&distinct, t, &mut current, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// The accuracy parameter `epsilon = 1/inverse` with an integral inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epsilon {
    inverse: u64,
}

impl Epsilon {
    pub fn from_inverse(inverse: u64) -> Result<Self, ModelError> {
        if inverse < 2 {
            return Err(ModelError::NonIntegralEpsilonInverse(format!("1/{inverse}")));
        }
        Ok(Epsilon { inverse })
    }

    pub fn from_rational(eps: &Rational) -> Result<Self, ModelError> {
        let err = || ModelError::NonIntegralEpsilonInverse(eps.to_string());
        if !(eps > &Rational::zero() && eps < &Rational::one()) {
            return Err(err());
        }
        let inv = eps.recip();
        let inverse = crate::rational::to_u64(&inv).ok_or_else(err)?;
        Self::from_inverse(inverse)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let r = parse_rational(text).map_err(|_| ModelError::NonIntegralEpsilonInverse(text.into()))?;
        Self::from_rational(&r)
    }

    pub fn inverse(&self) -> u64 {
        self.inverse
    }

    pub fn value(&self) -> Rational {
        frac(1, self.inverse as i64)
    }

    /// Number of long-job classes, `(1 - eps) / eps^2`.
    pub fn num_classes(&self) -> usize {
        (self.inverse * (self.inverse - 1)) as usize
    }
}

/// Partition of the jobs into long classes `J_1..J_s` and the short jobs for
/// a given makespan guess `t`. Class `q` (1-based) holds the jobs with
/// `(1/eps + q - 1) eps^2 t <= p < (1/eps + q) eps^2 t`; jobs with `p >= t`
/// are placed in the top class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobClassification {
    pub t: u64,
    pub epsilon: Epsilon,
    /// `classes[q - 1]` lists job indices of class `q` by ascending job id.
    pub classes: Vec<Vec<usize>>,
    /// Short job indices by ascending job id.
    pub short: Vec<usize>,
    /// Class (1-based) of each job, `None` for short jobs.
    pub class_of: Vec<Option<usize>>,
}

impl JobClassification {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn long_jobs(&self) -> Vec<usize> {
        self.classes.iter().flatten().copied().collect()
    }

    pub fn max_class_size(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Lower end of class `q` (1-based): `(1/eps + q - 1) eps^2 t`.
    pub fn rounded_size(&self, q: usize) -> Rational {
        let inv = self.epsilon.inverse() as i64;
        frac((inv + q as i64 - 1) * self.t as i64, inv * inv)
    }

    pub fn class_upper(&self, q: usize) -> Rational {
        self.rounded_size(q + 1)
    }

    pub fn long_threshold(&self) -> Rational {
        frac(self.t as i64, self.epsilon.inverse() as i64)
    }

    /// Per-class job counts.
    pub fn class_counts(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// Load bound checked after rounding long jobs: `(1 + eps) t`.
    pub fn relaxed_makespan(&self) -> Rational {
        int(self.t as i64) * (Rational::one() + self.epsilon.value())
    }
}

pub fn classify_jobs(
    instance: &Instance,
    t: u64,
    epsilon: &Rational,
) -> Result<JobClassification, ModelError> {
    let eps = Epsilon::from_rational(epsilon)?;
    Ok(classify_with(instance, t, eps))
}

pub fn classify_with(instance: &Instance, t: u64, eps: Epsilon) -> JobClassification {
    let inv = eps.inverse() as u128;
    let s = eps.num_classes();
    let mut classes = vec![Vec::new(); s];
    let mut short = Vec::new();
    let mut class_of = vec![None; instance.jobs.len()];
    for idx in instance.indices_by_id() {
        let p = instance.jobs[idx].size as u128;
        let t128 = t as u128;
        if p * inv < t128 || t == 0 {
            short.push(idx);
            continue;
        }
        // floor(p inv^2 / t) - inv + 1, clamped to the top class.
        let q = ((p * inv * inv) / t128) as usize + 1 - inv as usize;
        let q = q.clamp(1, s);
        classes[q - 1].push(idx);
        class_of[idx] = Some(q);
    }
    JobClassification { t, epsilon: eps, classes, short, class_of }
}
