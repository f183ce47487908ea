use std::path::PathBuf;
use std::process::{Command, Output};

use tww_core::divisions::{sample_latin_instance, Division};
use tww_core::io;
use tww_core::{OrderedGraph, OrderedMatrix};

fn tww(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tww")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tww-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_and_exit_codes() {
    assert_eq!(tww(&[]).status.code(), Some(1));
    assert_eq!(tww(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tww(&["--help"]).status.code(), Some(0));
    assert_eq!(tww(&["growth", "P"]).status.code(), Some(2));
    assert_eq!(tww(&["gridrank", "/definitely/not/here.txt"]).status.code(), Some(2));
    let bad = scratch("bad.txt", "2 2\n0 1\n0 7\n1 0\n");
    assert_eq!(tww(&["gridrank", s(&bad)]).status.code(), Some(2));
    assert_eq!(tww(&["growth", "P", "--n", "40"]).status.code(), Some(3));
}

#[test]
fn checkerboard_grid_rank() {
    let p = scratch("cb16.txt", &io::serialize_matrix(&OrderedMatrix::checkerboard(16)));
    let o = tww(&["gridrank", s(&p), "--max-k", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "gridrank=2\n");
}

#[test]
fn growth_report() {
    let o = tww(&["growth", "M=00", "--n", "4"]);
    assert!(stdout(&o).lines().any(|l| l == "count=9"));
    let o = tww(&["growth", "P", "--n", "4"]);
    assert_eq!(stdout(&o), "count=24\n");
}

#[test]
fn pattern_round_trip() {
    let o = tww(&["gen-pattern", "--s", "eq", "--sigma", "2 1"]);
    assert!(o.status.success());
    let m = io::parse_matrix(&stdout(&o)).unwrap();
    assert_eq!(m, OrderedMatrix::binary_from_rows(&[&[0, 1], &[1, 0]]).unwrap());
    let o = tww(&["gen-pattern", "--eta", "0110", "--sigma", "(135)(24)"]);
    let p = scratch("f.txt", &stdout(&o));
    let o = tww(&["decode-pattern", s(&p), "--eta", "0110"]);
    assert_eq!(stdout(&o), "decoded=true\nsigma=3 4 5 2 1\n");
}

#[test]
fn exact_then_verify() {
    let m = OrderedMatrix::binary_from_rows(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]).unwrap();
    let mp = scratch("m3.txt", &io::serialize_matrix(&m));
    let seq = std::env::temp_dir().join(format!("tww-cli-{}", std::process::id())).join("seq.txt");
    let o = tww(&["tww-exact", s(&mp), "--out", s(&seq)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    let tww_line = report.lines().find(|l| l.starts_with("tww=")).unwrap().to_string();
    let o = tww(&["verify-seq", s(&mp), s(&seq)]);
    let v = stdout(&o);
    assert!(v.starts_with("valid=true\n"));
    let get = |text: &str, key: &str| -> usize {
        text.lines().find_map(|l| l.strip_prefix(&format!("{key}="))).unwrap().parse().unwrap()
    };
    assert_eq!(get(&v, "overlap") + get(&v, "error"), tww_line[4..].parse::<usize>().unwrap());
    // a sequence that merges a missing block is rejected
    let broken = scratch("broken.txt", "R 1 2\nR 1 2\n");
    let o = tww(&["verify-seq", s(&mp), s(&broken)]);
    assert!(stdout(&o).starts_with("valid=false"));
}

#[test]
fn approx_outputs_verify() {
    let m = OrderedMatrix::binary_from_fn(8, 8, |i, j| (i * 3 + j * 5) % 7 < 3);
    let mp = scratch("a8.txt", &io::serialize_matrix(&m));
    let seq = std::env::temp_dir().join(format!("tww-cli-{}", std::process::id())).join("aseq.txt");
    let o = tww(&["tww-approx", "--k", "1", s(&mp), "--out", s(&seq)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("outcome=SEQ\n"));
    assert!(stdout(&tww(&["verify-seq", s(&mp), s(&seq)])).starts_with("valid=true"));
}

#[test]
fn rich_latin_and_mt() {
    let id = OrderedMatrix::identity(4);
    let mp = scratch("id4.txt", &io::serialize_matrix(&id));
    let d = scratch("d.txt", &io::serialize_division(&Division::new(4, 4, vec![2], vec![2]).unwrap()));
    let o = tww(&["verify-rich", s(&mp), s(&d), "--k", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("rich=false"));
    assert_eq!(stdout(&tww(&["mt-find", s(&mp), "--k", "2"])), "found=false\n");
    assert!(stdout(&tww(&["mt-find", s(&mp), "--k", "1"])).starts_with("found=true"));

    let (m, w) = sample_latin_instance();
    let mp = scratch("latin.txt", &io::serialize_matrix(&m));
    let wp = scratch("latin-w.txt", &io::serialize_latin_witness(&w));
    assert_eq!(stdout(&tww(&["verify-latin", s(&mp), s(&wp), "--k", "2"])), "valid=true\n");
}

#[test]
fn matching_both_decoders() {
    let g = OrderedGraph::from_edges(4, &[(0, 1), (1, 3), (2, 3)]).unwrap();
    let gp = scratch("g.txt", &io::serialize_graph(&g));
    let o = tww(&["encode-matching", s(&gp)]);
    let hp = scratch("h.txt", &stdout(&o));
    for extra in [&[][..], &["--fo"][..]] {
        let mut args = vec!["decode-matching", s(&hp)];
        args.extend_from_slice(extra);
        let o = tww(&args);
        assert!(o.status.success());
        assert_eq!(io::parse_graph(&stdout(&o)).unwrap(), g);
    }
}

#[test]
fn fo_commands() {
    let g = OrderedGraph::from_edges(3, &[(0, 1)]).unwrap();
    let gp = scratch("fo.txt", &io::serialize_structure(&tww_core::OrderedBinaryStructure::from_graph(&g)));
    assert_eq!(stdout(&tww(&["fo-eval", s(&gp), "E x. E y. E(x,y)"])), "value=true\n");
    assert_eq!(
        stdout(&tww(&["fo-eval", s(&gp), "E(x,y)", "--assign", "x=1", "--assign", "y=3"])),
        "value=false\n"
    );
    assert_eq!(tww(&["fo-eval", s(&gp), "E(x,"]).status.code(), Some(2));
    let ip = scratch("interp.txt", "domain x: T\nbinary E x y: ~E(x,y) & ~x = y\n");
    let o = tww(&["fo-interp", s(&gp), s(&ip)]);
    let out = io::parse_structure(&stdout(&o)).unwrap();
    assert_eq!(out.to_graph("E").unwrap(), g.complement());
}
