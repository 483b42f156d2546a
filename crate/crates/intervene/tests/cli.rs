use std::fs;
use std::process::{Command, Output};

fn intervene(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intervene"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let a = stdout(&intervene(&["gen", "--n", "12", "--p", "0.3", "--seed", "9"]));
    let b = stdout(&intervene(&["gen", "--n", "12", "--p", "0.3", "--seed", "9"]));
    let c = stdout(&intervene(&["gen", "--n", "12", "--p", "0.3", "--seed", "10"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("# n=12\n"));
}

#[test]
fn gen_writes_files_that_stats_reads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    stdout(&intervene(&["gen", "--n", "6", "--p", "1", "--out", p]));
    let stats = stdout(&intervene(&["stats", p]));
    assert!(stats.contains("edges 15\n"), "{stats}");
    assert!(stats.contains("v-structures 0\n"));
}

#[test]
fn bad_arguments_fail() {
    for args in [
        &["gen", "--n", "4", "--p", "1.5"][..],
        &["gen", "--n", "4", "--p", "-0.1"],
        &["stats", "/no/such/graph.txt"],
        &["simulate", "--graph", "chain", "--kmax", "0"],
        &["simulate", "--graph", "chain", "--objective", "cost-penalty=-1"],
        &["frobnicate"],
    ] {
        let out = intervene(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn stats_of_the_bundled_networks() {
    let asia = stdout(&intervene(&["stats", "asia"]));
    assert_eq!(
        asia,
        "nodes 8\nedges 8\nmin degree 1\navg degree 2.00\nmax degree 4\ndegree stdev 0.93\nv-structures 2\n"
    );
    let sachs = stdout(&intervene(&["stats", "sachs"]));
    assert!(sachs.contains("edges 17\n") && sachs.contains("max degree 7\n") && sachs.contains("v-structures 0\n"));
}

#[test]
fn simulate_chain_and_collider() {
    let chain = stdout(&intervene(&["simulate", "--graph", "chain", "--kmax", "1"]));
    assert!(chain.starts_with("rounds: 1, manipulations: 1\n"), "{chain}");
    // the collider's essential graph is already fully oriented
    let collider = stdout(&intervene(&["simulate", "--graph", "collider"]));
    assert!(collider.starts_with("rounds: 0, manipulations: 0\n"), "{collider}");
    assert!(collider.contains("recovered truth: true"));
}

#[test]
fn simulate_writes_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let args = [
        "simulate",
        "--n",
        "10",
        "--p",
        "0.4",
        "--seed",
        "4",
        "--strategy",
        "random",
        "--kmax",
        "2",
    ];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let first = stdout(&intervene(&with_out));
    assert_eq!(first, stdout(&intervene(&args)));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["k_max"], 2);
    assert_eq!(doc["record"]["final_edges"], doc["truth_edges"]);
    let rounds = doc["record"]["per_round"].as_array().unwrap().len();
    assert!(first.starts_with(&format!("rounds: {rounds},")));
}

#[test]
fn dump_ip_counts_variables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    fs::write(&path, r#"{"n": 3, "adjacent": [[0, 1], [1, 2]]}"#).unwrap();
    let lp = stdout(&intervene(&["dump-ip", path.to_str().unwrap()]));
    let count = |prefix: &str| lp.lines().filter(|l| l.trim().starts_with(prefix)).count();
    let binaries = lp.split("Binary\n").nth(1).unwrap();
    assert_eq!(binaries.lines().filter(|l| l.trim().starts_with("O_")).count(), 4);
    assert_eq!(binaries.lines().filter(|l| l.trim().starts_with("IDA_")).count(), 2);
    assert_eq!(binaries.lines().filter(|l| l.trim().starts_with("X_")).count(), 3);
    assert!(count("Maximize") == 1);

    let toml_path = dir.path().join("chain.toml");
    fs::write(&toml_path, "n = 3\nadjacent = [[0, 1], [1, 2]]\n").unwrap();
    assert_eq!(lp, stdout(&intervene(&["dump-ip", toml_path.to_str().unwrap()])));
}

#[test]
fn bench_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    fs::write(
        &grid,
        "k_max = [1, 2]\nfixtures = [\"chain\"]\nrepetitions = 2\n[er]\nn = [5]\np = [0.3, 0.7]\nseeds = 3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let text = stdout(&intervene(&[
        "bench",
        grid.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    // (2 p values x 3 seeds + 2 chain repetitions) x 2 k_max x 2 strategies
    assert_eq!(csv.lines().count(), 1 + 32);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 6);
    assert!(text.starts_with("32 runs\n"));
}

#[test]
fn complete_graph_has_every_edge() {
    let text = stdout(&intervene(&["gen", "--n", "3", "--p", "1.0"]));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn simulate_sachs_in_batches_of_four() {
    let out = stdout(&intervene(&[
        "simulate", "--graph", "sachs", "--kmax", "4", "--seed", "2",
    ]));
    assert!(out.contains("terminated: success, recovered truth: true"), "{out}");
}

#[test]
fn tiny_grid_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    fs::write(&grid, "k_max = [1, 2, 3]\n[er]\nn = [3, 4]\np = [0.5]\nseeds = 3\n").unwrap();
    let out = dir.path().join("out");
    stdout(&intervene(&[
        "bench",
        grid.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "8",
    ]));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count() - 1, 2 * 2 * 3 * 3);
}

#[test]
fn help_documents_flags() {
    for sub in ["gen", "simulate", "dump-ip", "serve", "bench"] {
        let help = stdout(&intervene(&[sub, "-h"]));
        for line in help
            .lines()
            .filter(|l| l.trim_start().starts_with("--") && !l.contains("--help"))
        {
            let flag = line.split_whitespace().next().unwrap();
            let documented = line.split("  ").filter(|s| !s.trim().is_empty()).count() > 1;
            assert!(documented, "{sub} {flag} has no help text");
        }
    }
    assert!(!intervene(&["gen", "--n", "3", "--p", "0.5", "--bogus"])
        .status
        .success());
}
