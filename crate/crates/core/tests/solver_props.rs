mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use intervene_core::graph::Pkg;
use intervene_core::ip::{
    build_instance, cost_of, gain, indicators_for, solve, solve_bruteforce, solve_with, CostModel, EdgeWeights,
    IpConfig, IpError, IpInstance, Objective, PairWeight, SolveOptions, TermKind, TOLERANCE,
};
use intervene_core::rng::Rng;
use proptest::prelude::*;
use rand::Rng as _;

fn random_costs(r: &mut Rng, n: usize) -> CostModel {
    let ci = (0..n).map(|_| r.gen_range(0..5) as f64).collect();
    let co = (0..n).map(|_| r.gen_range(0..2) as f64 * 0.5).collect();
    let mut costs = CostModel::new(ci, co).unwrap();
    let mut used = BTreeSet::new();
    for _ in 0..r.gen_range(0..3) {
        if n < 2 {
            break;
        }
        let size = r.gen_range(2..=n.min(3));
        let mut members: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut members[..], r);
        members.truncate(size);
        members.sort_unstable();
        if used.insert(members.clone()) {
            costs = costs.with_interaction(members, r.gen_range(-2..=6) as f64).unwrap();
        }
    }
    costs
}

fn random_objective(r: &mut Rng, pkg: &Pkg) -> Objective {
    let n = pkg.n();
    let pairs: Vec<(usize, usize)> = pkg.pairs().filter(|p| !p.2.is_resolved()).map(|p| (p.0, p.1)).collect();
    match r.gen_range(0..4) {
        0 => Objective::Plain,
        1 => {
            let pick = |r: &mut Rng| PairWeight {
                a: r.gen_range(0..n),
                b: r.gen_range(0..n),
                weight: r.gen_range(0..4) as f64 * 0.5,
            };
            let weights = EdgeWeights {
                default: r.gen_range(1..3) as f64,
                unknown: (0..3).map(|_| pick(r)).collect(),
                semidirected: (0..3).map(|_| pick(r)).collect(),
                adjacent: (0..3).map(|_| pick(r)).collect(),
            };
            Objective::Weighted { weights }
        }
        2 => Objective::Targeted {
            relevant: pairs
                .into_iter()
                .filter(|_| r.gen_bool(0.4))
                .map(|(a, b)| (b, a))
                .collect(),
        },
        _ => Objective::CostPenalty {
            lambda: r.gen_range(0..4) as f64 * 0.25,
            weights: None,
        },
    }
}

fn random_instance(seed: u64, max_n: usize) -> (Pkg, IpInstance) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_n);
    let pkg = random_pkg(&mut r, n);
    let costs = random_costs(&mut r, n);
    let mut cfg = IpConfig::with_k_max(r.gen_range(1..=4));
    if r.gen_bool(0.5) {
        cfg.budget = Some(r.gen_range(0..14) as f64);
    }
    cfg.objective = random_objective(&mut r, &pkg);
    let inst = build_instance(&pkg, &costs, &cfg).unwrap();
    (pkg, inst)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn branch_and_bound_matches_enumeration(seed in any::<u64>()) {
        let (_, inst) = random_instance(seed, 9);
        let brute = solve_bruteforce(&inst);
        let bb = solve(&inst, &mut rng(seed ^ 1));
        match (brute, bb) {
            (Err(IpError::Infeasible), Err(IpError::Infeasible)) => {}
            (Ok(b), Ok(s)) => {
                prop_assert!((b.solution.objective_value - s.objective_value).abs() <= TOLERANCE);
                let chosen = s.interventions().members().clone();
                prop_assert!(b.optima.contains(&chosen), "{chosen:?} not among {:?}", b.optima);
                prop_assert_eq!(s.optima_seen, b.optima.len());
                prop_assert!(inst.feasible(&chosen, 0));
            }
            (b, s) => prop_assert!(false, "enumeration {b:?} vs search {s:?}"),
        }
    }

    #[test]
    fn reservoir_mode_is_optimal(seed in any::<u64>()) {
        let (_, inst) = random_instance(seed, 9);
        if let Ok(b) = solve_bruteforce(&inst) {
            let s = solve_with(&inst, &mut rng(seed), &SolveOptions { tie_threshold: 0 }).unwrap();
            prop_assert!((b.solution.objective_value - s.objective_value).abs() <= TOLERANCE);
            prop_assert!(b.optima.contains(s.interventions().members()));
        }
    }

    /// The closed-form gain agrees with switching on every enabled test
    /// variable and every update indicator that one of them feeds.
    #[test]
    fn closed_form_gain_matches_indicators(seed in any::<u64>()) {
        let (pkg, inst) = random_instance(seed, 8);
        let mut r = rng(seed.wrapping_add(7));
        let chosen: BTreeSet<usize> = inst.viable().iter().copied().filter(|_| r.gen_bool(0.4)).collect();
        let ind = indicators_for(&inst, &chosen);
        let o: BTreeSet<(usize, usize)> = ind.o.iter().copied().collect();
        let a: BTreeSet<(usize, usize)> = ind.a.iter().copied().collect();
        for &(i, j) in &o {
            prop_assert!(chosen.contains(&i) && !chosen.contains(&j));
        }
        for &(i, j) in &a {
            prop_assert!(!chosen.contains(&i) && !chosen.contains(&j));
        }
        let mut expected = 0.0;
        for t in inst.terms() {
            let (lo, hi) = (t.a.min(t.b), t.a.max(t.b));
            let on = match t.kind {
                TermKind::Unknown => o.contains(&(t.a, t.b)) || o.contains(&(t.b, t.a)) || a.contains(&(lo, hi)),
                TermKind::SemiDirected => o.contains(&(t.a, t.b)) || a.contains(&(lo, hi)),
                TermKind::Adjacent => o.contains(&(t.a, t.b)) || o.contains(&(t.b, t.a)),
            };
            let listed = match t.kind {
                TermKind::Unknown => &ind.idu,
                TermKind::SemiDirected => &ind.ids,
                TermKind::Adjacent => &ind.ida,
            };
            prop_assert_eq!(on, listed.contains(&(t.a, t.b)));
            if on {
                expected += t.weight;
            }
        }
        let lambda = inst.config().objective.lambda();
        expected -= lambda * cost_of(&chosen, inst.costs(), inst.viable());
        let closed = gain(&pkg, &chosen, &inst.config().objective, inst.costs());
        prop_assert!((closed - expected).abs() < 1e-9);
        prop_assert!((inst.objective_of(std::slice::from_ref(&chosen)) - expected).abs() < 1e-9);
        // joint-cost indicators: y_S = 1 exactly when every member is chosen
        for (k, it) in inst.costs().interactions().iter().enumerate() {
            prop_assert_eq!(ind.y.contains(&k), it.members.iter().all(|m| chosen.contains(m)));
        }
    }

    #[test]
    fn optimum_grows_with_budget(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8);
        let pkg = random_pkg(&mut r, n);
        let costs = random_costs(&mut r, n);
        let k = r.gen_range(1..=3);
        let mut last = f64::NEG_INFINITY;
        for budget in [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
            let mut cfg = IpConfig::with_k_max(k);
            cfg.budget = Some(budget);
            let inst = build_instance(&pkg, &costs, &cfg).unwrap();
            let value = solve(&inst, &mut rng(seed)).map(|s| s.objective_value).unwrap_or(f64::NEG_INFINITY);
            prop_assert!(value >= last - TOLERANCE);
            last = value;
        }
    }

    #[test]
    fn unaffordable_vertices_are_never_chosen(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8);
        let pkg = random_pkg(&mut r, n);
        let pricey = r.gen_range(0..n);
        let mut ci = vec![1.0; n];
        ci[pricey] = 100.0;
        let costs = CostModel::new(ci, vec![0.0; n]).unwrap();
        let mut cfg = IpConfig::with_k_max(3);
        cfg.budget = Some(10.0);
        let inst = build_instance(&pkg, &costs, &cfg).unwrap();
        let sol = solve(&inst, &mut rng(seed)).unwrap();
        prop_assert!(!sol.interventions().contains(pricey));
    }

    /// Several experiments per round, checked against every assignment of
    /// viable vertices to experiments.
    #[test]
    fn batches_match_enumeration(seed in any::<u64>(), cap in any::<bool>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let pkg = random_pkg(&mut r, n);
        let costs = random_costs(&mut r, n);
        let mut cfg = IpConfig::with_k_max(r.gen_range(1..=3));
        cfg.batch.count = r.gen_range(2..=3);
        cfg.batch.cap_edge_credit = cap;
        if r.gen_bool(0.5) {
            cfg.batch.budgets = Some((0..cfg.batch.count).map(|_| r.gen_range(0..10) as f64).collect());
        }
        if r.gen_bool(0.3) {
            cfg.batch.total_budget = Some(r.gen_range(0..8) as f64);
        }
        if r.gen_bool(0.3) {
            cfg.objective = Objective::CostPenalty { lambda: 0.25, weights: None };
        }
        let inst = build_instance(&pkg, &costs, &cfg).unwrap();
        let best = enumerate_batches(&inst);
        match (best, solve(&inst, &mut rng(seed))) {
            (None, Err(IpError::Infeasible)) => {}
            (Some(v), Ok(s)) => {
                prop_assert!((v - s.objective_value).abs() <= TOLERANCE, "enumeration {v} vs {}", s.objective_value);
                let sets: Vec<BTreeSet<usize>> = s.batches.iter().map(|x| x.members().clone()).collect();
                prop_assert!((inst.objective_of(&sets) - v).abs() <= TOLERANCE);
            }
            (v, s) => prop_assert!(false, "enumeration {v:?} vs search {s:?}"),
        }
    }
}

fn enumerate_batches(inst: &IpInstance) -> Option<f64> {
    let m = inst.viable().len();
    let k = inst.batch_count();
    let mut best: Option<f64> = None;
    let total = (k + 1).pow(m as u32);
    for code in 0..total {
        let mut sets = vec![BTreeSet::new(); k];
        let mut c = code;
        for &v in inst.viable() {
            let slot = c % (k + 1);
            c /= k + 1;
            if slot > 0 {
                sets[slot - 1].insert(v);
            }
        }
        if !(0..k).all(|b| inst.feasible(&sets[b], b)) {
            continue;
        }
        if let Some(t) = inst.config().batch.total_budget {
            let used: f64 = sets.iter().flatten().map(|&v| inst.costs().intervene(v)).sum();
            if used > t + TOLERANCE {
                continue;
            }
        }
        let v = inst.objective_of(&sets);
        if best.is_none_or(|b| v > b) {
            best = Some(v);
        }
    }
    best
}

#[test]
fn ties_are_drawn_uniformly() {
    // two disjoint adjacent pairs, k_max = 1: each vertex tests one pair
    let pkg = Pkg::from_parts(4, &[], &[(0, 1), (2, 3)], &[], &[]).unwrap();
    let inst = build_instance(&pkg, &CostModel::zero(4), &IpConfig::with_k_max(1)).unwrap();
    let mut counts: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let draws = 4000;
    for seed in 0..draws {
        let s = solve(&inst, &mut rng(seed)).unwrap();
        *counts.entry(s.interventions().members().clone()).or_default() += 1;
    }
    assert_eq!(counts.len(), 4);
    let expected = draws as f64 / 4.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 3 degrees of freedom; 16.27 is the 0.001 upper quantile
    assert!(chi2 < 16.27, "chi-square {chi2} over {counts:?}");
}

#[test]
fn superadditive_joint_cost() {
    let pkg = Pkg::from_parts(2, &[], &[(0, 1)], &[], &[]).unwrap();
    let costs = CostModel::uniform(2, 1.0, 0.0).with_interaction([0, 1], 8.0).unwrap();
    let both: BTreeSet<usize> = [0, 1].into_iter().collect();
    assert_eq!(cost_of(&both, &costs, &[0, 1]), 10.0);
    let mut cfg = IpConfig::with_k_max(2);
    cfg.budget = Some(5.0);
    let inst = build_instance(&pkg, &costs, &cfg).unwrap();
    assert!(!inst.feasible(&both, 0));
    cfg.budget = Some(10.0);
    let inst = build_instance(&pkg, &costs, &cfg).unwrap();
    assert!(inst.feasible(&both, 0));
}
