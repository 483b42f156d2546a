mod common;

use std::collections::BTreeMap;

use common::*;
use intervene_core::generate::{erdos_renyi_dag, structural_stats};
use intervene_core::graph::{cpdag_of, Pkg};
use intervene_core::ip::CostModel;
use intervene_core::oracle::{InterventionSet, SimulatedOracle};
use intervene_core::planner::{propose, run, simulate, PlannerConfig, Strategy};
use proptest::prelude::*;
use rand::Rng as _;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn runs_recover_the_truth(seed in any::<u64>(), n in 1usize..=10, p in 0.0f64..=1.0, k in 1usize..=4, random in any::<bool>()) {
        let dag = erdos_renyi_dag(n, p, seed).unwrap();
        let strategy = if random { Strategy::Random } else { Strategy::Ip };
        let rec = simulate(&dag, &PlannerConfig::new(strategy, k, seed)).unwrap();
        prop_assert!(rec.terminated);
        prop_assert_eq!(rec.final_ambiguity, 0);
        prop_assert_eq!(&rec.final_edges, dag.edges());
        let mut last = cpdag_of(&dag).ambiguity();
        for log in &rec.per_round {
            prop_assert_eq!(log.ambiguity_before, last);
            prop_assert!(log.ambiguity_after <= log.ambiguity_before);
            prop_assert!(log.interventions.iter().all(|x| x.len() <= k));
            last = log.ambiguity_after;
        }
        if strategy == Strategy::Ip {
            // every exact round makes progress
            prop_assert!(rec.per_round.iter().all(|l| l.ambiguity_after < l.ambiguity_before));
        }
    }

    #[test]
    fn runs_from_a_coarsened_essential_graph(seed in any::<u64>(), n in 2usize..=8, p in 0.05f64..0.95, k in 1usize..=3, forget in 0.0f64..=1.0) {
        // forget part of the essential graph without ever hiding a collider
        // behind an undirected pair
        let mut r = rng(seed);
        let dag = random_dag(&mut r, n, p);
        let start = masked_pkg(&dag, &cpdag_of(&dag), &mut r, forget);
        prop_assert!(consistent(&start, &dag));
        let cfg = PlannerConfig::new(Strategy::Ip, k, seed);
        let rec = run(&start, &cfg, &mut SimulatedOracle::new(&dag)).unwrap();
        prop_assert_eq!(&rec.final_edges, dag.edges());
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), n in 2usize..=9, p in 0.1f64..0.9, k in 1usize..=3) {
        let dag = erdos_renyi_dag(n, p, seed).unwrap();
        for strategy in [Strategy::Ip, Strategy::Random] {
            let cfg = PlannerConfig::new(strategy, k, seed);
            prop_assert_eq!(simulate(&dag, &cfg).unwrap(), simulate(&dag, &cfg).unwrap());
        }
    }

    #[test]
    fn budgeted_runs_respect_costs(seed in any::<u64>(), n in 2usize..=8, p in 0.1f64..0.9) {
        let dag = erdos_renyi_dag(n, p, seed).unwrap();
        let mut r = rng(seed);
        let ci: Vec<f64> = (0..n).map(|_| r.gen_range(1..4) as f64).collect();
        let costs = CostModel::new(ci.clone(), vec![0.0; n]).unwrap();
        let mut cfg = PlannerConfig::new(Strategy::Ip, 3, seed);
        cfg.budget = Some(4.0);
        cfg.costs = Some(costs);
        let rec = simulate(&dag, &cfg).unwrap();
        prop_assert_eq!(&rec.final_edges, dag.edges());
        for log in &rec.per_round {
            let spent: f64 = log.interventions[0].iter().map(|v| ci[v]).sum();
            prop_assert!(spent <= 4.0);
        }
    }

    #[test]
    fn generated_graphs_are_forward_and_seeded(seed in any::<u64>(), n in 0usize..=20, p in 0.0f64..=1.0) {
        let a = erdos_renyi_dag(n, p, seed).unwrap();
        prop_assert_eq!(&a, &erdos_renyi_dag(n, p, seed).unwrap());
        prop_assert!(a.edges().iter().all(|&(i, j)| i < j && j < n));
        let s = structural_stats(&a);
        prop_assert_eq!(s.edges, a.edge_count());
        prop_assert!((s.avg_degree * n as f64 - 2.0 * s.edges as f64).abs() < 1e-9);
    }
}

#[test]
fn edge_density_tracks_p() {
    for &p in &[0.05, 0.2, 0.5, 0.95] {
        let (n, graphs) = (16u64, 400u64);
        let edges: usize = (0..graphs)
            .map(|s| erdos_renyi_dag(n as usize, p, s).unwrap().edge_count())
            .sum();
        let trials = (graphs * n * (n - 1) / 2) as f64;
        let observed = edges as f64 / trials;
        let sd = (p * (1.0 - p) / trials).sqrt();
        assert!((observed - p).abs() < 5.0 * sd, "p={p} observed {observed}");
    }
}

#[test]
fn random_baseline_draws_uniform_subsets() {
    // chain essential graph 0 - 1 - 2 - 3, all four vertices viable
    let pkg = Pkg::from_parts(4, &[], &[(0, 1), (1, 2), (2, 3)], &[], &[]).unwrap();
    let mut counts: BTreeMap<InterventionSet, usize> = BTreeMap::new();
    let draws = 6000;
    for seed in 0..draws {
        let p = propose(&pkg, &PlannerConfig::new(Strategy::Random, 2, seed), 0).unwrap();
        assert_eq!(p.batches[0].len(), 2);
        *counts.entry(p.batches[0].clone()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    let expected = draws as f64 / 6.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 5 degrees of freedom; 20.52 is the 0.001 upper quantile
    assert!(chi2 < 20.52, "chi-square {chi2} over {counts:?}");
}

#[test]
fn proposals_depend_only_on_seed_and_round() {
    let dag = erdos_renyi_dag(9, 0.4, 3).unwrap();
    let pkg = cpdag_of(&dag);
    let cfg = PlannerConfig::new(Strategy::Ip, 2, 11);
    assert_eq!(propose(&pkg, &cfg, 4).unwrap(), propose(&pkg, &cfg, 4).unwrap());
}
