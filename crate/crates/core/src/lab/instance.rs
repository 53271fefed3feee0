//! The Petersen-based hard instance and the exhaustive search over
//! matching-only schedules.

use super::LabError;
use crate::model::{enumerate_configurations, Configuration, Instance, Job};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HARD_MAKESPAN: u64 = 1023;
pub const PETERSEN_VERTICES: usize = 10;
/// Potentials are drawn from this band so that edge sizes are pairwise
/// close and no long-job mix other than five edges reaches 1023.
const POTENTIAL_RANGE: (u64, u64) = (86, 127);
const SIZE_RANGE: (u64, u64) = (171, 255);
pub const DEFAULT_SEED: u64 = 0x5eed_1023;
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Edges of the Petersen graph as sorted vertex pairs, in sorted order:
/// the outer 5-cycle, the spokes and the inner pentagram.
pub fn petersen_edges() -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges
}

/// Every set of five pairwise disjoint edges, as sorted edge indices in
/// lexicographic order.
pub fn petersen_perfect_matchings() -> Vec<Vec<usize>> {
    let edges = petersen_edges();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(edges: &[(usize, usize)], start: usize, used: u32, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == PETERSEN_VERTICES / 2 {
            out.push(chosen.clone());
            return;
        }
        for e in start..edges.len() {
            let (a, b) = edges[e];
            if used >> a & 1 == 0 && used >> b & 1 == 0 {
                chosen.push(e);
                rec(edges, e + 1, used | 1 << a | 1 << b, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(&edges, 0, 0, &mut chosen, &mut out);
    out
}

/// Whether three of the matchings are pairwise disjoint, i.e. whether the
/// graph has a proper 3-edge-colouring.
pub fn has_three_disjoint_matchings(matchings: &[Vec<usize>]) -> bool {
    let disjoint = |a: &Vec<usize>, b: &Vec<usize>| a.iter().all(|e| !b.contains(e));
    let n = matchings.len();
    (0..n).any(|i| {
        (i + 1..n).any(|j| {
            (j + 1..n).any(|l| {
                disjoint(&matchings[i], &matchings[j])
                    && disjoint(&matchings[i], &matchings[l])
                    && disjoint(&matchings[j], &matchings[l])
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardInstance {
    pub k: usize,
    /// Size of each Petersen edge, indexed like [`petersen_edges`].
    pub sizes: Vec<u64>,
    /// Vertex potentials; each edge size is the sum over its endpoints.
    pub potentials: Vec<u64>,
    pub matchings: Vec<Vec<usize>>,
    /// Size multiset of each matching, in matching order.
    pub matching_configurations: Vec<Configuration>,
    /// `incidence[e][j]`: edge `e` lies in matching `j`.
    pub incidence: Vec<Vec<bool>>,
    pub instance: Instance,
    pub t: u64,
}

impl HardInstance {
    pub fn machines(&self) -> usize {
        3 * self.k
    }

    pub fn num_configurations(&self) -> usize {
        self.matching_configurations.len()
    }
}

/// Draws vertex potentials summing to 1023 until the edge sizes are
/// pairwise distinct and inside the size band. Every perfect matching
/// covers each vertex once, so its load is the potential total.
pub fn derive_sizes(seed: u64, budget: u64) -> Result<(Vec<u64>, Vec<u64>), LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = petersen_edges();
    let (lo, hi) = POTENTIAL_RANGE;
    for _ in 0..budget {
        let mut c: Vec<u64> = (0..PETERSEN_VERTICES - 1).map(|_| rng.gen_range(lo..=hi)).collect();
        let partial: u64 = c.iter().sum();
        let Some(last) = HARD_MAKESPAN.checked_sub(partial) else { continue };
        if !(lo..=hi).contains(&last) {
            continue;
        }
        c.push(last);
        let sizes: Vec<u64> = edges.iter().map(|&(a, b)| c[a] + c[b]).collect();
        let mut sorted = sizes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == sizes.len() && sizes.iter().all(|s| (SIZE_RANGE.0..=SIZE_RANGE.1).contains(s)) {
            return Ok((c, sizes));
        }
    }
    Err(LabError::SearchFailed { budget })
}

pub fn gen_hard_instance(k: usize) -> Result<HardInstance, LabError> {
    gen_hard_instance_with(k, DEFAULT_SEED, DEFAULT_SEARCH_BUDGET)
}

pub fn gen_hard_instance_with(k: usize, seed: u64, budget: u64) -> Result<HardInstance, LabError> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(LabError::BadParameter(format!("k must be odd and at least 3, got {k}")));
    }
    let (potentials, sizes) = derive_sizes(seed, budget)?;
    let matchings = petersen_perfect_matchings();
    let matching_configurations: Vec<Configuration> = matchings
        .iter()
        .map(|m| Configuration::from_sizes(&m.iter().map(|&e| sizes[e]).collect::<Vec<_>>()))
        .collect();
    let incidence = (0..sizes.len()).map(|e| matchings.iter().map(|m| m.contains(&e)).collect()).collect();
    let jobs = (0..sizes.len())
        .flat_map(|e| (0..k).map(move |c| (e, c)))
        .map(|(e, c)| Job { id: format!("e{e:02}.{c:02}"), size: sizes[e] })
        .collect();
    Ok(HardInstance {
        k,
        sizes,
        potentials,
        matchings,
        matching_configurations,
        incidence,
        instance: Instance { machines: 3 * k, jobs },
        t: HARD_MAKESPAN,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSearch {
    /// Machines per matching configuration, if some choice meets every
    /// size count.
    pub witness: Option<Vec<usize>>,
    pub nodes: u64,
}

/// Exhaustive search over schedules that give every machine one matching
/// configuration. Machines are interchangeable, so configurations are
/// chosen in non-decreasing order along the machines; a branch is cut as
/// soon as some size is used more than `k` times.
pub fn restricted_integral_search(hard: &HardInstance) -> RestrictedSearch {
    let c = hard.num_configurations();
    let mut used = vec![0usize; hard.sizes.len()];
    let mut counts = vec![0usize; c];
    let mut nodes = 0;
    let found = search(hard, 0, 0, &mut used, &mut counts, &mut nodes);
    RestrictedSearch { witness: found.then_some(counts), nodes }
}

fn search(
    hard: &HardInstance,
    machine: usize,
    start: usize,
    used: &mut [usize],
    counts: &mut [usize],
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if machine == hard.machines() {
        return used.iter().all(|&u| u == hard.k);
    }
    for j in start..hard.num_configurations() {
        let edges = &hard.matchings[j];
        if edges.iter().any(|&e| used[e] == hard.k) {
            continue;
        }
        edges.iter().for_each(|&e| used[e] += 1);
        counts[j] += 1;
        if search(hard, machine + 1, j, used, counts, nodes) {
            return true;
        }
        counts[j] -= 1;
        edges.iter().for_each(|&e| used[e] -= 1);
    }
    false
}

/// Looks for a schedule of the whole instance in which every machine has
/// load exactly `t`, over all configurations rather than only matchings.
/// Since the total size is `3k * 1023`, any schedule of makespan 1023 is of
/// this form. Configurations are tried in non-decreasing index order along
/// the machines. Returns the configuration of each machine.
pub fn exact_fill_search(hard: &HardInstance, cap: usize, budget: u64) -> Result<Option<Vec<Configuration>>, LabError> {
    let sizes = hard.instance.distinct_sizes();
    let configs: Vec<Configuration> = enumerate_configurations(&sizes, hard.t, cap)
        .map_err(|e| LabError::BadParameter(e.to_string()))?
        .into_iter()
        .filter(|c| c.load() == hard.t)
        .collect();
    let mut left: std::collections::BTreeMap<u64, u32> = hard.instance.size_counts();
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    let found = fill(&configs, 0, hard.machines(), &mut left, &mut chosen, &mut nodes, budget)?;
    Ok(found.then(|| chosen.iter().map(|&c| configs[c].clone()).collect()))
}

fn fill(
    configs: &[Configuration],
    start: usize,
    machines_left: usize,
    left: &mut std::collections::BTreeMap<u64, u32>,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, LabError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(LabError::SearchFailed { budget });
    }
    if machines_left == 0 {
        return Ok(left.values().all(|&v| v == 0));
    }
    for c in start..configs.len() {
        let fits = configs[c].entries().iter().all(|(p, m)| left.get(p).copied().unwrap_or(0) >= *m);
        if !fits {
            continue;
        }
        for (p, m) in configs[c].entries() {
            *left.get_mut(p).expect("size present") -= m;
        }
        chosen.push(c);
        if fill(configs, c, machines_left - 1, left, chosen, nodes, budget)? {
            return Ok(true);
        }
        chosen.pop();
        for (p, m) in configs[c].entries() {
            *left.get_mut(p).expect("size present") += m;
        }
    }
    Ok(false)
}
