//! Exact depth-first branch-and-bound over the intervention indicators.
//!
//! Each viable vertex is decided in turn: into one of the experiments, or
//! left out. A node is pruned when its cost lower bound breaks a budget or
//! when its objective upper bound cannot reach the incumbent. The bound
//! credits every pair that is still countable; adjacent pairs that still
//! need one of their endpoints picked are credited only up to the best
//! `r` per-vertex sums, `r` being the remaining room under `k_max`.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{IpError, IpInstance, IpSolution, SolveStatus, TermKind, TOLERANCE};
use crate::oracle::InterventionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Up to this many viable vertices every optimum is collected and the
    /// answer drawn uniformly among them; above it ties are broken by
    /// reservoir sampling over the optima the search happens to reach.
    pub tie_threshold: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tie_threshold: 18 }
    }
}

/// Solves `instance` exactly, breaking ties between optima with `rng`.
pub fn solve<R: Rng + ?Sized>(instance: &IpInstance, rng: &mut R) -> Result<IpSolution, IpError> {
    solve_with(instance, rng, &SolveOptions::default())
}

pub fn solve_with<R: Rng + ?Sized>(
    instance: &IpInstance,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<IpSolution, IpError> {
    let mut search = Search::new(instance, rng, options);
    search.dfs(0);
    let Search {
        best,
        optima,
        reservoir,
        ties,
        nodes,
        rng,
        ..
    } = search;
    if best == f64::NEG_INFINITY {
        return Err(IpError::Infeasible);
    }
    let (chosen, seen) = if optima.is_empty() {
        (reservoir.expect("a feasible leaf was recorded"), ties)
    } else {
        let k = rng.gen_range(0..optima.len());
        let count = optima.len();
        (optima.into_iter().nth(k).expect("index in range"), count)
    };
    let batches = (0..instance.batch_count())
        .map(|b| {
            instance
                .viable()
                .iter()
                .zip(&chosen)
                .filter(|(_, &s)| s == IN + b as u8)
                .map(|(&v, _)| v)
                .collect::<InterventionSet>()
        })
        .collect();
    Ok(IpSolution {
        batches,
        objective_value: best,
        status: SolveStatus::Optimal,
        optima_seen: seen,
        nodes,
    })
}

const UNDECIDED: u8 = 0;
const OUT: u8 = 1;
const IN: u8 = 2;

#[derive(Clone, Copy)]
struct Term {
    kind: TermKind,
    a: usize,
    b: usize,
    w: f64,
}

struct Search<'r, R: Rng + ?Sized> {
    k_max: usize,
    batches: usize,
    terms: Vec<Term>,
    ci: Vec<f64>,
    co: Vec<f64>,
    interactions: Vec<(Vec<usize>, f64)>,
    budgets: Vec<Option<f64>>,
    total_budget: Option<f64>,
    lambda: f64,
    cap: bool,
    track_cost: bool,
    symmetric: bool,
    collect: bool,
    order: Vec<usize>,
    state: Vec<u8>,
    counts: Vec<usize>,
    need: Vec<f64>,
    picks: Vec<f64>,
    best: f64,
    optima: Vec<Vec<u8>>,
    reservoir: Option<Vec<u8>>,
    ties: usize,
    nodes: u64,
    rng: &'r mut R,
}

impl<'r, R: Rng + ?Sized> Search<'r, R> {
    fn new(instance: &IpInstance, rng: &'r mut R, options: &SolveOptions) -> Self {
        let viable = instance.viable();
        let m = viable.len();
        let local = |v: usize| viable.binary_search(&v).expect("term endpoints are viable");
        let terms: Vec<Term> = instance
            .terms()
            .iter()
            .filter(|t| t.weight > 0.0)
            .map(|t| Term {
                kind: t.kind,
                a: local(t.a),
                b: local(t.b),
                w: t.weight,
            })
            .collect();
        let costs = instance.costs();
        let ci: Vec<f64> = viable.iter().map(|&v| costs.intervene(v)).collect();
        let co: Vec<f64> = viable.iter().map(|&v| costs.observe(v)).collect();
        // an interaction with a non-viable member can never activate
        let interactions = costs
            .interactions()
            .iter()
            .filter_map(|it| {
                let members: Option<Vec<usize>> = it.members.iter().map(|&v| viable.binary_search(&v).ok()).collect();
                members.map(|m| (m, it.delta))
            })
            .collect();
        let batches = instance.batch_count();
        let budgets: Vec<Option<f64>> = (0..batches).map(|b| instance.budget_for(b)).collect();
        let cfg = instance.config();
        let lambda = cfg.objective.lambda();
        let symmetric = budgets.windows(2).all(|w| w[0] == w[1]);

        let mut weight = vec![0.0; m];
        for t in &terms {
            weight[t.a] += t.w;
            weight[t.b] += t.w;
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        order.sort_by(|&x, &y| weight[y].total_cmp(&weight[x]));

        Search {
            k_max: cfg.k_max,
            batches,
            terms,
            ci,
            co,
            interactions,
            budgets: budgets.clone(),
            total_budget: cfg.batch.total_budget,
            lambda,
            cap: cfg.batch.cap_edge_credit && batches > 1,
            track_cost: lambda != 0.0 || budgets.iter().any(Option::is_some),
            symmetric,
            collect: m <= options.tie_threshold,
            order,
            state: vec![UNDECIDED; m],
            counts: vec![0; batches],
            need: vec![0.0; m],
            picks: Vec::with_capacity(m),
            best: f64::NEG_INFINITY,
            optima: Vec::new(),
            reservoir: None,
            ties: 0,
            nodes: 0,
            rng,
        }
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        let Some(bound) = self.bound() else { return };
        let promising = if self.collect {
            bound >= self.best - TOLERANCE
        } else {
            self.best == f64::NEG_INFINITY || bound > self.best + TOLERANCE
        };
        if !promising {
            return;
        }
        let full = self.counts.iter().all(|&c| c >= self.k_max);
        if depth == self.order.len() || full {
            self.leaf();
            return;
        }
        let v = self.order[depth];
        let used = self.counts.iter().filter(|&&c| c > 0).count();
        for b in 0..self.batches {
            if self.counts[b] >= self.k_max || (self.symmetric && b > used) {
                continue;
            }
            self.state[v] = IN + b as u8;
            self.counts[b] += 1;
            self.dfs(depth + 1);
            self.counts[b] -= 1;
        }
        self.state[v] = OUT;
        self.dfs(depth + 1);
        self.state[v] = UNDECIDED;
    }

    /// Objective upper bound over all completions, or `None` when no
    /// completion can meet the budgets.
    fn bound(&mut self) -> Option<f64> {
        if let Some(total) = self.total_budget {
            let used: f64 = self
                .state
                .iter()
                .zip(&self.ci)
                .filter(|(&s, _)| s >= IN)
                .map(|(_, c)| c)
                .sum();
            if used > total + TOLERANCE {
                return None;
            }
        }
        let mut gain = 0.0;
        let mut cost = 0.0;
        for b in 0..self.batches {
            if self.track_cost {
                let lb = self.cost_lower_bound(b);
                if matches!(self.budgets[b], Some(budget) if lb > budget + TOLERANCE) {
                    return None;
                }
                cost += lb;
            }
            gain += self.gain_bound(b);
        }
        if self.cap {
            gain = gain.min(self.countable_anywhere());
        }
        Some(gain - self.lambda * cost)
    }

    fn gain_bound(&mut self, b: usize) -> f64 {
        let tag = IN + b as u8;
        let view = |s: u8| -> u8 {
            if s == UNDECIDED {
                UNDECIDED
            } else if s == tag {
                IN
            } else {
                OUT
            }
        };
        self.need.iter_mut().for_each(|x| *x = 0.0);
        let mut free = 0.0;
        let mut needed = 0.0;
        for t in &self.terms {
            let (sa, sb) = (view(self.state[t.a]), view(self.state[t.b]));
            match t.kind {
                TermKind::Unknown => {
                    if !(sa == IN && sb == IN) {
                        free += t.w;
                    }
                }
                TermKind::SemiDirected => {
                    if sb != IN {
                        free += t.w;
                    }
                }
                TermKind::Adjacent => match (sa, sb) {
                    (IN, IN) | (OUT, OUT) => {}
                    (IN, _) | (_, IN) => free += t.w,
                    (OUT, UNDECIDED) => {
                        self.need[t.b] += t.w;
                        needed += t.w;
                    }
                    (UNDECIDED, OUT) => {
                        self.need[t.a] += t.w;
                        needed += t.w;
                    }
                    _ => {
                        self.need[t.a] += t.w;
                        self.need[t.b] += t.w;
                        needed += t.w;
                    }
                },
            }
        }
        let room = self.k_max.saturating_sub(self.counts[b]);
        if needed == 0.0 || room == 0 {
            return free;
        }
        self.picks.clear();
        self.picks.extend(
            self.state
                .iter()
                .zip(&self.need)
                .filter(|(&s, &w)| s == UNDECIDED && w > 0.0)
                .map(|(_, &w)| w),
        );
        let top: f64 = if self.picks.len() <= room {
            self.picks.iter().sum()
        } else {
            self.picks.sort_unstable_by(|x, y| y.total_cmp(x));
            self.picks[..room].iter().sum()
        };
        free + needed.min(top)
    }

    /// Weight of the pairs that some experiment can still credit.
    fn countable_anywhere(&self) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let (sa, sb) = (self.state[t.a], self.state[t.b]);
            let possible = (0..self.batches).any(|b| {
                let tag = IN + b as u8;
                let (ia, ib) = (sa == tag, sb == tag);
                match t.kind {
                    TermKind::Unknown => !(ia && ib),
                    TermKind::SemiDirected => !ib,
                    TermKind::Adjacent => !(ia && ib) && !(sa != UNDECIDED && sb != UNDECIDED && !ia && !ib),
                }
            });
            if possible {
                total += t.w;
            }
        }
        total
    }

    fn cost_lower_bound(&self, b: usize) -> f64 {
        let tag = IN + b as u8;
        let mut lb = 0.0;
        for (v, &s) in self.state.iter().enumerate() {
            lb += if s == tag {
                self.ci[v]
            } else if s == UNDECIDED {
                self.ci[v].min(self.co[v])
            } else {
                self.co[v]
            };
        }
        for (members, delta) in &self.interactions {
            let all_in = members.iter().all(|&v| self.state[v] == tag);
            let still_possible = members
                .iter()
                .all(|&v| self.state[v] == tag || self.state[v] == UNDECIDED);
            if (*delta >= 0.0 && all_in) || (*delta < 0.0 && still_possible) {
                lb += delta;
            }
        }
        lb
    }

    /// Scores the current assignment with undecided vertices left out.
    fn leaf(&mut self) {
        let mut gain = 0.0;
        let mut cost = 0.0;
        let mut credited = vec![false; if self.cap { self.terms.len() } else { 0 }];
        for b in 0..self.batches {
            let tag = IN + b as u8;
            let chosen = |v: usize| self.state[v] == tag;
            for (k, t) in self.terms.iter().enumerate() {
                let (x, y) = (chosen(t.a), chosen(t.b));
                let counted = match t.kind {
                    TermKind::Unknown => !(x && y),
                    TermKind::SemiDirected => !y,
                    TermKind::Adjacent => x != y,
                };
                if counted {
                    if self.cap {
                        if !credited[k] {
                            credited[k] = true;
                            gain += t.w;
                        }
                    } else {
                        gain += t.w;
                    }
                }
            }
            if self.track_cost {
                let mut c: f64 = (0..self.state.len())
                    .map(|v| if chosen(v) { self.ci[v] } else { self.co[v] })
                    .sum();
                c += self
                    .interactions
                    .iter()
                    .filter(|(members, _)| members.iter().all(|&v| chosen(v)))
                    .map(|(_, d)| d)
                    .sum::<f64>();
                if matches!(self.budgets[b], Some(budget) if c > budget + TOLERANCE) {
                    return;
                }
                cost += c;
            }
        }
        if let Some(total) = self.total_budget {
            let used: f64 = self
                .state
                .iter()
                .zip(&self.ci)
                .filter(|(&s, _)| s >= IN)
                .map(|(_, c)| c)
                .sum();
            if used > total + TOLERANCE {
                return;
            }
        }
        let value = gain - self.lambda * cost;
        let snapshot = || -> Vec<u8> {
            self.state
                .iter()
                .map(|&s| if s == UNDECIDED { OUT } else { s })
                .collect()
        };
        if self.best == f64::NEG_INFINITY || value > self.best + TOLERANCE {
            self.best = value;
            self.ties = 1;
            if self.collect {
                self.optima.clear();
                self.optima.push(snapshot());
            } else {
                self.reservoir = Some(snapshot());
            }
        } else if value >= self.best - TOLERANCE {
            self.ties += 1;
            if self.collect {
                self.optima.push(snapshot());
            } else if self.rng.gen_range(0..self.ties) == 0 {
                self.reservoir = Some(snapshot());
            }
        }
    }
}
