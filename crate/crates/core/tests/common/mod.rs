#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symsched_core::model::Instance;

/// Seeded random instances with `machines in 2..=max_machines`, at most
/// `max_jobs` jobs, `machines * jobs <= max_vars` and sizes in `1..=9`.
pub fn micro_instances(count: usize, max_machines: usize, max_jobs: usize, max_vars: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.gen_range(2..=max_machines);
        let n = rng.gen_range(2..=max_jobs);
        if m * n > max_vars {
            continue;
        }
        let sizes: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        out.push(Instance::from_sizes(m, &sizes));
    }
    out
}

/// Every assignment of `jobs` jobs to `machines` machines, as a vector of
/// machine indices.
pub fn all_assignments(machines: usize, jobs: usize) -> Vec<Vec<usize>> {
    let total = machines.pow(jobs as u32);
    (0..total)
        .map(|mut code| {
            (0..jobs)
                .map(|_| {
                    let i = code % machines;
                    code /= machines;
                    i
                })
                .collect()
        })
        .collect()
}

pub fn loads(instance: &Instance, assignment: &[usize]) -> Vec<u64> {
    let mut l = vec![0; instance.machines];
    for (j, &i) in assignment.iter().enumerate() {
        l[i] += instance.jobs[j].size;
    }
    l
}
