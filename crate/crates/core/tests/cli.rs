use std::path::Path;
use std::process::{Command, Output};

use balcut::graph::Graph;

fn bck(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bck"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("BCK_THREADS", t),
        None => cmd.env_remove("BCK_THREADS"),
    };
    cmd.output().expect("bck runs")
}

fn two_cliques(dir: &Path) -> String {
    let mut edges = vec![(3, 4, 0.5)];
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    let g = Graph::from_edges(8, edges).unwrap();
    let path = dir.join("cliques.txt");
    std::fs::write(&path, g.to_edge_list_string()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_the_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let graph = two_cliques(dir.path());
    let out = dir.path().join("sweep.csv");
    let o = bck(
        &[
            "run",
            "--graph",
            &graph,
            "--c-sweep",
            "0,0.5,1",
            "--random-inits",
            "4",
            "--spectral",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,avg,top10_avg,best,best_set_size"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        // the bridge cut: 0.5 / (4 * 4)
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.5 / 16.0);
        assert_eq!(fields[4], "4");
    }
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let graph = two_cliques(dir.path());
    let args = [
        "run",
        "--graph",
        &graph,
        "--c-sweep",
        "0,2",
        "--random-inits",
        "6",
        "--balance",
        "cheeger",
        "--seed",
        "3",
        "--out-format",
        "json",
    ];
    let a = bck(&args, Some("1"));
    let b = bck(&args, Some("2"));
    let c = bck(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn compare_extensions_counts_every_start() {
    let o = bck(
        &[
            "compare-extensions",
            "--graph",
            "two-moons:60:6:2",
            "--balance",
            "cheeger",
            "--random-inits",
            "5",
            "--spectral",
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<usize> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .take(4)
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[0], 6);
    assert_eq!(row[1] + row[2] + row[3], 6);
}

#[test]
fn oracle_prints_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let graph = two_cliques(dir.path());
    let o = bck(&["oracle", "--graph", &graph, "--balance", "cheeger"], None);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().trim(),
        "0.125 {0, 1, 2, 3}"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        bck(&["run", "--graph", missing.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2 1\n2 1 1\n").unwrap();
    assert_eq!(
        bck(&["oracle", "--graph", bad.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );

    assert_eq!(bck(&["run"], None).status.code(), Some(1));
    assert_eq!(bck(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(
        bck(
            &["run", "--graph", "two-moons:20:4:1", "--random-inits", "0"],
            None
        )
        .status
        .code(),
        Some(1)
    );
    assert_eq!(bck(&["--help"], None).status.code(), Some(0));
}
