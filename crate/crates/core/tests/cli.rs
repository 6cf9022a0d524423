mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lirgomax::graph;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lirgomax"))
}

fn run(args: &[&str]) -> Output {
    bin().arg("--quiet").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

#[test]
fn pagerank_on_cycle() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n");
    let out = run(&["--graph", s(&g), "pagerank"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("K\tnode_id\tlabel\tP\n"));
    let rows = table(&text);
    assert_eq!(rows.len(), 3);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (k + 1).to_string());
        let p: f64 = row[3].parse().unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn cheirank_uses_reversed_links() {
    let dir = TempDir::new().unwrap();
    // Node 0 links to everyone, nobody links back.
    let g = write(&dir, "g.txt", "0 1\n0 2\n0 3\n1 2\n2 3\n3 1\n");
    let labels = write(&dir, "l.tsv", "0\tHub\n1\tOne\n");
    let out = run(&["--graph", s(&g), "--labels", s(&labels), "cheirank"]);
    assert!(out.status.success());
    let rows = table(&stdout(&out));
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[0][2], "Hub");
    assert!(rows.iter().any(|r| r[1] == "2" && r[2] == "2"));
}

#[test]
fn pump_profile_on_cycle() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n");
    let out = run(&[
        "--graph",
        s(&g),
        "linres-pump",
        "--inject",
        "0",
        "--absorb",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("K_L\tnode_id\tP1\tabs_P1\tsign\n"));
    let rows = table(&text);
    let expected = [
        (1, 0.61127308, "+"),
        (2, -0.33041788, "-"),
        (0, -0.2808552, "-"),
    ];
    for (row, (node, p1, sign)) in rows.iter().zip(expected) {
        assert_eq!(row[1], node.to_string());
        assert!((row[2].parse::<f64>().unwrap() - p1).abs() < 1e-7);
        assert_eq!(row[4], sign);
    }
}

#[test]
fn pump_file_matches_pair() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n");
    let pump = write(&dir, "pump.tsv", "node_id\tD_value\n0\t3\n1\t-3\n");
    let from_file = run(&["--graph", s(&g), "linres-pump", "--pump-file", s(&pump)]);
    let from_pair = run(&[
        "--graph",
        s(&g),
        "linres-pump",
        "--inject",
        "0",
        "--absorb",
        "1",
    ]);
    assert!(from_file.status.success());
    let a = table(&stdout(&from_file));
    let b = table(&stdout(&from_pair));
    for (x, y) in a.iter().zip(&b) {
        let (x, y): (f64, f64) = (x[2].parse().unwrap(), y[2].parse().unwrap());
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn same_node_pump_gives_empty_profile() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n");
    let out = run(&[
        "--graph",
        s(&g),
        "linres-pump",
        "--inject",
        "2",
        "--absorb",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(table(&stdout(&out)).len(), 0);
}

#[test]
fn sensitivity_table() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n0 2\n");
    let out = run(&[
        "--graph",
        s(&g),
        "linres-sensitivity",
        "--target",
        "2",
        "--source",
        "0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("K_L\tnode_id\tlabel\tP0\tP1\tsensitivity\n"));
    let rows = table(&text);
    let total: f64 = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).sum();
    assert!(total.abs() < 1e-12);
    for r in &rows {
        let (p0, p1, d): (f64, f64, f64) = (
            r[3].parse().unwrap(),
            r[4].parse().unwrap(),
            r[5].parse().unwrap(),
        );
        assert!((p1 / p0 - d).abs() < 1e-12);
    }
    // Amplifying 0 -> 2 raises node 2.
    let node2 = rows.iter().find(|r| r[1] == "2").unwrap();
    assert!(node2[4].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn regomax_writes_all_components() {
    let dir = TempDir::new().unwrap();
    let mut rng = common::rng(7);
    let g = common::random_graph(&mut rng, 60, 5.0);
    let gp = dir.path().join("g.txt");
    graph::write_edge_list(fs::File::create(&gp).unwrap(), &g).unwrap();
    let subset = write(&dir, "subset.txt", "4\n9\n17\n33\n");
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--graph",
        s(&gp),
        "regomax",
        "--subset",
        s(&subset),
        "--out-dir",
        s(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["GR", "Grr", "Gpr", "Gqr", "Gqr_nd", "Grr+Gqr_nd"] {
        let m = fs::read_to_string(out_dir.join(format!("{name}.tsv"))).unwrap();
        assert!(m.starts_with("node_id\t4\t9\t17\t33\n"), "{name}");
        assert_eq!(m.lines().count(), 5);
        let plot = fs::read_to_string(out_dir.join(format!("{name}.plot.tsv"))).unwrap();
        assert!(plot.starts_with("row\tcol\tg\tscaled\n"));
        assert_eq!(plot.lines().count(), 17);
    }
    let meta = fs::read_to_string(out_dir.join("meta.txt")).unwrap();
    assert!(meta.contains("n_r = 4"));
    assert!(meta.contains("lambda_c = "));
}

#[test]
fn friend_net_emits_dot() {
    let dir = TempDir::new().unwrap();
    let mut rng = common::rng(8);
    let g = common::random_graph(&mut rng, 80, 4.0);
    let gp = dir.path().join("g.txt");
    graph::write_edge_list(fs::File::create(&gp).unwrap(), &g).unwrap();
    let p1 = dir.path().join("p1.tsv");
    let sub = dir.path().join("subset.tsv");
    let red = dir.path().join("red");
    let steps: [&[&str]; 3] = [
        &[
            "linres-pump",
            "--inject",
            "1",
            "--absorb",
            "2",
            "--out",
            s(&p1),
        ],
        &[
            "subset",
            "--response",
            s(&p1),
            "--top-m",
            "5",
            "--out",
            s(&sub),
        ],
        &["regomax", "--subset", s(&sub), "--out-dir", s(&red)],
    ];
    for step in steps {
        let o = bin()
            .args(["--quiet", "--graph", s(&gp)])
            .args(step)
            .output()
            .unwrap();
        assert!(
            o.status.success(),
            "{step:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let subset_text = fs::read_to_string(&sub).unwrap();
    assert!(subset_text.starts_with("i\tK_L\tK\tnode_id\tlabel\tP1\n"));
    assert_eq!(subset_text.lines().count(), 11);

    let out = run(&[
        "--graph",
        s(&gp),
        "friend-net",
        "--matrix-dir",
        s(&red),
        "--subset",
        s(&sub),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("penwidth=2"));
    assert!(dot.trim_end().ends_with('}'));

    let initial: Vec<String> = table(&subset_text)
        .iter()
        .take(2)
        .map(|r| r[3].clone())
        .collect();
    let initial = initial.join(",");
    let out = run(&[
        "--graph",
        s(&gp),
        "friend-net",
        "--matrix-dir",
        s(&red),
        "--matrix",
        "gqr",
        "--direction",
        "followers",
        "--initial",
        &initial,
        "--levels",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("dir=back"));
}

#[test]
fn verify_passes_and_reports_each_check() {
    let dir = TempDir::new().unwrap();
    let mut rng = common::rng(9);
    let g = common::random_graph(&mut rng, 40, 4.0);
    let gp = dir.path().join("g.txt");
    graph::write_edge_list(fs::File::create(&gp).unwrap(), &g).unwrap();
    let out = run(&["--graph", s(&gp), "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.ends_with("PASS")));

    let loose = run(&["--graph", s(&gp), "--tol", "1e-3", "verify"]);
    assert_eq!(loose.status.code(), Some(4));
    assert!(stdout(&loose).contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 2\n2 0\n2 1\n");
    let bad = write(&dir, "bad.txt", "0 1\n1 x\n");

    assert_eq!(
        run(&["--graph", s(&g), "pagerank", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--graph", s(&g), "--alpha", "1.5", "pagerank"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "--graph",
            s(&g),
            "linres-pump",
            "--inject",
            "0",
            "--absorb",
            "9"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--graph", s(&bad), "pagerank"]).status.code(),
        Some(1)
    );
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        run(&["--graph", s(&missing), "pagerank"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["--graph", s(&g), "--max-iter", "2", "pagerank"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_error_names_the_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "0 1\n\n1 x\n");
    let out = run(&["--graph", s(&bad), "pagerank"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "0 1\n1 0\n");
    let out_path = dir.path().join("rank.tsv");
    let out = run(&["--graph", s(&g), "pagerank", "--out", s(&out_path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(out_path).unwrap().lines().count(), 3);
}
