//! Exhaustive enumeration, used to cross-check the branch-and-bound solver on
//! small single-experiment instances.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{IpError, IpInstance, IpSolution, SolveStatus, TOLERANCE};
use crate::oracle::InterventionSet;

/// Largest viable set enumerated by default.
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceSolution {
    /// The smallest optimal set in subset order.
    pub solution: IpSolution,
    /// Every optimal set.
    pub optima: Vec<BTreeSet<usize>>,
}

pub fn solve_bruteforce(instance: &IpInstance) -> Result<BruteForceSolution, IpError> {
    solve_bruteforce_with_limit(instance, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn solve_bruteforce_with_limit(instance: &IpInstance, limit: usize) -> Result<BruteForceSolution, IpError> {
    if instance.batch_count() != 1 {
        return Err(IpError::Config(
            "exhaustive search handles one experiment per round".into(),
        ));
    }
    let viable = instance.viable();
    if viable.len() > limit {
        return Err(IpError::TooLarge {
            viable: viable.len(),
            limit,
        });
    }
    let total = instance.config().batch.total_budget;
    let mut best = f64::NEG_INFINITY;
    let mut optima: Vec<BTreeSet<usize>> = Vec::new();
    let mut nodes = 0u64;
    for mask in 0u64..(1u64 << viable.len()) {
        if mask.count_ones() as usize > instance.k_max() {
            continue;
        }
        nodes += 1;
        let chosen: BTreeSet<usize> = (0..viable.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| viable[i])
            .collect();
        if !instance.feasible(&chosen, 0) {
            continue;
        }
        if let Some(t) = total {
            let used: f64 = chosen.iter().map(|&v| instance.costs().intervene(v)).sum();
            if used > t + TOLERANCE {
                continue;
            }
        }
        let value = instance.objective_of(core::slice::from_ref(&chosen));
        if value > best + TOLERANCE {
            best = value;
            optima.clear();
            optima.push(chosen);
        } else if value >= best - TOLERANCE {
            optima.push(chosen);
        }
    }
    if optima.is_empty() {
        return Err(IpError::Infeasible);
    }
    optima.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let solution = IpSolution {
        batches: alloc::vec![InterventionSet::new(optima[0].iter().copied())],
        objective_value: best,
        status: SolveStatus::Optimal,
        optima_seen: optima.len(),
        nodes,
    };
    Ok(BruteForceSolution { solution, optima })
}
