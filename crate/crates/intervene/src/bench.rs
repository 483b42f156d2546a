//! Experiment grids: many simulated runs per (graph, k_max, strategy) cell,
//! written as a flat table, plus paired random-minus-IP summaries.

use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use intervene_core::generate::erdos_renyi_dag;
use intervene_core::ip::Objective;
use intervene_core::planner::{simulate, PlanError, PlannerConfig, Strategy};
use intervene_core::rng::derive_seed;
use intervene_core::Dag;

use crate::fixtures::fixture;
use crate::formats::{parse_bif, parse_edge_list};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErGrid {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default)]
    pub er: Option<ErGrid>,
    /// Bundled fixture names or paths to edge-list / BIF files.
    #[serde(default)]
    pub fixtures: Vec<String>,
    pub k_max: Vec<usize>,
    #[serde(default = "both_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub objective: Objective,
    /// Runs per fixture (ER cells use `er.seeds` instead).
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub max_rounds: Option<usize>,
}

fn both_strategies() -> Vec<Strategy> {
    vec![Strategy::Ip, Strategy::Random]
}

fn one() -> usize {
    1
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid grid: {0}")]
    Spec(String),
    #[error("cannot load graph {name}: {message}")]
    Graph { name: String, message: String },
    #[error("run n={n} graph={graph} k_max={k_max} seed={seed} failed: {source}")]
    Run {
        n: usize,
        graph: String,
        k_max: usize,
        seed: u64,
        source: PlanError,
        /// Rows that finished before the failure was collected.
        partial: Vec<Row>,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One simulated run. `graph` is the edge probability for generated graphs
/// and the fixture name otherwise; `seed` indexes the graph within its cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub graph: String,
    pub k_max: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub rounds: usize,
    pub manipulations: usize,
    pub terminated: bool,
}

struct Job {
    n: usize,
    graph: String,
    truth: std::sync::Arc<Dag>,
    k_max: usize,
    strategy: Strategy,
    seed: u64,
    planner_seed: u64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.k_max.is_empty() || self.k_max.contains(&0) {
            return Err(BenchError::Spec("k_max needs at least one value, all >= 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(BenchError::Spec("no strategies".into()));
        }
        if self.er.is_none() && self.fixtures.is_empty() {
            return Err(BenchError::Spec("neither an ER grid nor fixtures given".into()));
        }
        if let Some(er) = &self.er {
            if let Some(p) = er.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(BenchError::Spec(format!("edge probability {p} outside [0, 1]")));
            }
        }
        self.objective.validate().map_err(|e| BenchError::Spec(e.to_string()))
    }

    fn graphs(&self) -> Result<Vec<(usize, String, u64, Dag)>, BenchError> {
        let mut out = Vec::new();
        if let Some(er) = &self.er {
            for &n in &er.n {
                for &p in &er.p {
                    for s in 0..er.seeds as u64 {
                        let gseed = derive_seed(self.master_seed, &[n as u64, p.to_bits(), s]);
                        let dag = erdos_renyi_dag(n, p, gseed).map_err(|e| BenchError::Spec(e.to_string()))?;
                        out.push((n, p.to_string(), s, dag));
                    }
                }
            }
        }
        for name in &self.fixtures {
            let dag = load_graph(name)?;
            for s in 0..self.repetitions as u64 {
                out.push((dag.n(), name.clone(), s, dag.clone()));
            }
        }
        Ok(out)
    }
}

/// Loads a bundled fixture by name, or an edge-list or BIF file by path.
pub fn load_graph(name: &str) -> Result<Dag, BenchError> {
    if let Some(f) = fixture(name) {
        return Ok(f.dag);
    }
    let err = |message: String| BenchError::Graph {
        name: name.to_owned(),
        message,
    };
    let text = std::fs::read_to_string(name).map_err(|e| err(e.to_string()))?;
    let parsed = if name.ends_with(".bif") {
        parse_bif(&text).map(|b| b.dag)
    } else {
        parse_edge_list(&text).map(|e| e.dag)
    };
    parsed.map_err(|e| err(e.to_string()))
}

/// Runs every cell of the grid on the rayon pool. Row order and content
/// depend only on the spec.
pub fn run_grid(spec: &GridSpec) -> Result<Vec<Row>, BenchError> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (n, graph, s, dag) in spec.graphs()? {
        let truth = std::sync::Arc::new(dag);
        for &k_max in &spec.k_max {
            for &strategy in &spec.strategies {
                let planner_seed = derive_seed(spec.master_seed, &[n as u64, s, k_max as u64, strategy as u64, 1]);
                jobs.push(Job {
                    n,
                    graph: graph.clone(),
                    truth: truth.clone(),
                    k_max,
                    strategy,
                    seed: s,
                    planner_seed,
                });
            }
        }
    }
    let results: Vec<Result<Row, (usize, PlanError)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| run_job(spec, job).map_err(|e| (i, e)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err((i, source)) => {
                let job = &jobs[i];
                return Err(BenchError::Run {
                    n: job.n,
                    graph: job.graph.clone(),
                    k_max: job.k_max,
                    seed: job.seed,
                    source,
                    partial: rows,
                });
            }
        }
    }
    Ok(rows)
}

fn run_job(spec: &GridSpec, job: &Job) -> Result<Row, PlanError> {
    let mut cfg = PlannerConfig::new(job.strategy, job.k_max, job.planner_seed);
    cfg.objective = spec.objective.clone();
    cfg.max_rounds = spec.max_rounds;
    let (rounds, manipulations, terminated) = match simulate(&job.truth, &cfg) {
        Ok(rec) => (rec.rounds, rec.total_manipulations, rec.terminated),
        Err(PlanError::RoundCap { record, .. }) => (record.rounds, record.total_manipulations, false),
        Err(e) => return Err(e),
    };
    Ok(Row {
        n: job.n,
        graph: job.graph.clone(),
        k_max: job.k_max,
        strategy: job.strategy,
        seed: job.seed,
        rounds,
        manipulations,
        terminated,
    })
}

pub fn write_csv<W: io::Write>(rows: &[Row], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Row>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Five-number summary, quartiles by linear interpolation between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Quantiles {
            min: v[0],
            q1: at(0.25),
            median: at(0.5),
            q3: at(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Random-minus-IP differences for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCell {
    pub n: usize,
    pub graph: String,
    pub k_max: usize,
    pub pairs: usize,
    pub rounds: Quantiles,
    pub variables: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("run n={n} graph={graph} k_max={k_max} seed={seed} has no {missing} partner")]
pub struct UnpairedError {
    pub n: usize,
    pub graph: String,
    pub k_max: usize,
    pub seed: u64,
    pub missing: &'static str,
}

/// Pairs the IP and random runs on the same graph and reports the
/// distribution of `random - ip` for rounds and manipulated variables.
pub fn summarize_delta(rows: &[Row]) -> Result<Vec<DeltaCell>, UnpairedError> {
    type Key = (usize, String, usize);
    type Pair<'a> = (Option<&'a Row>, Option<&'a Row>);
    let mut cells: BTreeMap<Key, BTreeMap<u64, Pair>> = BTreeMap::new();
    for row in rows {
        let slot = cells
            .entry((row.n, row.graph.clone(), row.k_max))
            .or_default()
            .entry(row.seed)
            .or_default();
        match row.strategy {
            Strategy::Ip => slot.0 = Some(row),
            Strategy::Random => slot.1 = Some(row),
        }
    }
    let mut out = Vec::new();
    for ((n, graph, k_max), seeds) in cells {
        let mut dr = Vec::new();
        let mut dv = Vec::new();
        for (seed, pair) in seeds {
            let unpaired = |missing| UnpairedError {
                n,
                graph: graph.clone(),
                k_max,
                seed,
                missing,
            };
            match pair {
                (Some(ip), Some(random)) => {
                    dr.push(random.rounds as f64 - ip.rounds as f64);
                    dv.push(random.manipulations as f64 - ip.manipulations as f64);
                }
                (None, _) => return Err(unpaired("ip")),
                (_, None) => return Err(unpaired("random")),
            }
        }
        out.push(DeltaCell {
            n,
            graph,
            k_max,
            pairs: dr.len(),
            rounds: Quantiles::of(&dr).expect("cells are never empty"),
            variables: Quantiles::of(&dv).expect("cells are never empty"),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: Strategy, seed: u64, rounds: usize) -> Row {
        Row {
            n: 4,
            graph: "0.5".into(),
            k_max: 1,
            strategy,
            seed,
            rounds,
            manipulations: rounds,
            terminated: true,
        }
    }

    #[test]
    fn quantiles() {
        let q = Quantiles::of(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!((q.min, q.median, q.max), (1.0, 2.5, 4.0));
        assert_eq!((q.q1, q.q3), (1.75, 3.25));
        assert!(Quantiles::of(&[]).is_none());
    }

    #[test]
    fn delta_is_random_minus_ip() {
        let rows = [
            row(Strategy::Ip, 0, 3),
            row(Strategy::Random, 0, 5),
            row(Strategy::Ip, 1, 2),
            row(Strategy::Random, 1, 2),
        ];
        let cells = summarize_delta(&rows).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].rounds.max, 2.0);
        assert_eq!(cells[0].rounds.min, 0.0);
    }

    #[test]
    fn unpaired_rows() {
        let err = summarize_delta(&[row(Strategy::Ip, 0, 3)]).unwrap_err();
        assert_eq!(err.missing, "random");
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(Strategy::Ip, 0, 3), row(Strategy::Random, 0, 4)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,graph,k_max,strategy,seed,rounds,manipulations,terminated\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }
}
