use std::path::Path;
use std::process::{Command, Output};

use pathopt::format::{read_graph, read_partition};

fn pathopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathopt"))
        .args(args)
        .output()
        .expect("spawn pathopt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn load(path: &Path) -> pathopt::Graph {
    read_graph(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap()
}

#[test]
fn generated_graph_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for (kind, extra) in [
        ("random", vec!["--p", "0.1"]),
        ("geometric", vec!["--deg", "5"]),
        ("regular", vec!["--r", "3"]),
        ("unbalanced-random", vec!["--p1", "0.3", "--p2", "0.02"]),
        ("unbalanced-regular", vec!["--k1", "5", "--k2", "2"]),
    ] {
        for out in [&a, &b] {
            let mut args = vec!["gen", "--kind", kind, "--n", "60", "--seed", "7", "--out"];
            args.push(out.to_str().unwrap());
            args.extend(&extra);
            let o = pathopt(&args);
            assert!(
                o.status.success(),
                "{kind}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
        let g = load(&a);
        assert_eq!(g, load(&b), "{kind}");
        assert_eq!(g.n(), 60);
        // the header names the generator, so reading it back regenerates the same graph
        let header = std::fs::read_to_string(&a).unwrap();
        let spec_line = header.lines().find(|l| l.starts_with("# genspec")).unwrap();
        let spec: pathopt::GenSpec = spec_line.parse().unwrap();
        assert_eq!(spec.generate().unwrap(), g, "{kind}");
    }
}

#[test]
fn single_vertex_graph_has_zero_cut() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "p 1 0\n").unwrap();
    let part = dir.path().join("p.txt");
    let o = pathopt(&[
        "run",
        "--graph",
        g.to_str().unwrap(),
        "--algo",
        "po",
        "--seed",
        "1",
        "--out",
        part.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(" cut=0 "), "{}", stdout(&o));
    let p = read_partition(
        std::io::BufReader::new(std::fs::File::open(&part).unwrap()),
        &load(&g),
    )
    .unwrap();
    assert_eq!(p.cut(), 0);
}

#[test]
fn missing_suite_is_a_usage_error() {
    let o = pathopt(&["bench", "--suite", "/no/such/suite.txt", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/suite.txt"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = pathopt(&["run", "--graph", "x", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreadable_graph_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "p 3 1\n0 7\n").unwrap();
    let o = pathopt(&["run", "--graph", g.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn first_line_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let o = pathopt(&[
        "gen",
        "--kind",
        "random",
        "--n",
        "30",
        "--p",
        "0.2",
        "--out",
        g.to_str().unwrap(),
    ]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("# pathopt gen "), "{first}");
    let seed = first
        .split_whitespace()
        .skip_while(|t| *t != "--seed")
        .nth(1)
        .unwrap();
    seed.parse::<u64>().unwrap();

    let run = |seed: &str| {
        let o = pathopt(&[
            "run",
            "--graph",
            g.to_str().unwrap(),
            "--algo",
            "kl",
            "--restarts",
            "3",
            "--seed",
            seed,
        ]);
        assert!(o.status.success());
        stdout(&o).lines().skip(2).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(run("11"), run("11"));
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.txt");
    std::fs::write(
        &suite,
        "# two small graphs\nkind=random n=40 p=0.2 seed=1\n# genspec kind=regular n=40 r=4 seed=2\n\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = pathopt(&[
        "bench",
        "--suite",
        suite.to_str().unwrap(),
        "--algos",
        "po,kl",
        "--time",
        "0.05",
        "--trials",
        "2",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    assert!(out.join("summary.txt").exists());
    assert!(out.join("intervals.csv").exists());
}

#[test]
fn nganalyze_and_pg_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("ng.txt");
    let csv = dir.path().join("ng.csv");
    let o = pathopt(&[
        "nganalyze",
        "--class",
        "kind=random n=30 p=0.2",
        "--ensemble",
        "8",
        "--oracle-restarts",
        "2",
        "--seed",
        "5",
        "--out",
        csv.to_str().unwrap(),
        "--profile-out",
        profile.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "index,raw,percentile,fitted");
    assert_eq!(text.lines().count(), 31);

    let g = dir.path().join("g.txt");
    pathopt(&[
        "gen",
        "--kind",
        "random",
        "--n",
        "30",
        "--p",
        "0.2",
        "--seed",
        "9",
        "--out",
        g.to_str().unwrap(),
    ]);
    for ng in ["fitted", "empirical"] {
        let o = pathopt(&[
            "run",
            "--graph",
            g.to_str().unwrap(),
            "--algo",
            "pg",
            "--restarts",
            "4",
            "--seed",
            "2",
            "--profile",
            profile.to_str().unwrap(),
            "--ng",
            ng,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn postprocess_labels_every_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let p = dir.path().join("p.txt");
    pathopt(&[
        "gen",
        "--kind",
        "random",
        "--n",
        "25",
        "--p",
        "0.3",
        "--seed",
        "4",
        "--out",
        g.to_str().unwrap(),
    ]);
    pathopt(&[
        "init",
        "--graph",
        g.to_str().unwrap(),
        "--method",
        "random",
        "--seed",
        "4",
        "--out",
        p.to_str().unwrap(),
    ]);
    let o = pathopt(&[
        "postprocess",
        "--graph",
        g.to_str().unwrap(),
        "--partition",
        p.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<_> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("step"))
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 25);
    let mut seen: Vec<usize> = rows
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    seen.sort_unstable();
    assert_eq!(seen, (0..25).collect::<Vec<_>>());
}
