use std::path::Path;
use std::process::{Command, Output};

fn latfold(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latfold")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = latfold(dir, args);
    assert!(out.status.success(), "latfold {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    latfold(dir, args).status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Data rows of a CSV file, split on commas.
fn rows(dir: &Path, name: &str) -> Vec<Vec<String>> {
    read(dir, name).lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const L5: &str = r#"{"num_vars": 5, "offset": 0.0, "space": "boolean", "terms": [
 {"vars": [0], "coeff": -1.0}, {"vars": [1], "coeff": 0.5}, {"vars": [2], "coeff": -2.0},
 {"vars": [3], "coeff": 1.5}, {"vars": [4], "coeff": -0.5},
 {"vars": [0, 1], "coeff": 2.0}, {"vars": [1, 2], "coeff": -1.5}, {"vars": [2, 3], "coeff": 3.0},
 {"vars": [3, 4], "coeff": -1.0}, {"vars": [0, 4], "coeff": 1.25}, {"vars": [0, 2], "coeff": -2.5}]}"#;

#[test]
fn encode_reports_variable_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["encode", "coord-tet", "--seq", "HPPPPHPPPPH", "--L", "3", "--out", "c.json"]);
    assert_eq!(json(d, "c.json")["num_vars"], 297);
    let man = json(d, "c.json.manifest.json");
    assert_eq!(man["command"], "encode");
    assert_eq!(man["outputs"][0], "c.json");
    ok(d, &["encode", "turn-tet", "--seq", "HPH", "--out", "t.json"]);
    assert_eq!(json(d, "t.json")["num_vars"], 0);
    assert_eq!(code(d, &["encode", "coord-cart", "--seq", "HPPH", "--L", "1", "--out", "x.json"]), 2);
    assert_eq!(code(d, &["encode", "coord-cart", "--seq", "HPZH", "--out", "x.json"]), 2);
    assert!(!d.join("x.json").exists());
}

#[test]
fn fasta_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.fa"), ">pep\nLKD\nEFG\n").unwrap();
    ok(d, &["encode", "turn-tet", "--fasta", "s.fa", "--out", "a.json"]);
    ok(d, &["encode", "turn-tet", "--seq", "LKDEFG", "--out", "b.json"]);
    assert_eq!(json(d, "a.json")["terms"], json(d, "b.json")["terms"]);
}

#[test]
fn reduce_passes_through_and_rejects_weak_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["encode", "coord-cart", "--seq", "HPPH", "--L", "2", "--out", "c.json"]);
    ok(d, &["reduce", "--problem", "c.json", "--out", "cq.json"]);
    let (a, b) = (json(d, "c.json"), json(d, "cq.json"));
    assert_eq!(a["terms"], b["terms"]);
    assert!(b.get("aux_map").is_none());
    ok(d, &["encode", "turn-tet", "--seq", "LKDEFG", "--out", "t.json"]);
    ok(d, &["reduce", "--problem", "t.json", "--out", "tq.json"]);
    assert!(!json(d, "tq.json")["aux_map"].as_array().unwrap().is_empty());
    assert_eq!(code(d, &["reduce", "--problem", "t.json", "--alpha", "fixed:0.001", "--out", "w.json"]), 3);
}

#[test]
fn brute_force_and_decode_the_eleven_residue_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["encode", "turn-tet", "--seq", "LKKKKLKKKKL", "--out", "p.json"]);
    ok(d, &["solve", "--problem", "p.json", "--solver", "brute", "--out", "b.csv"]);
    let r = rows(d, "b.csv");
    assert_eq!(r.len(), 8);
    for row in &r {
        assert!((row[2].parse::<f64>().unwrap() + 1.474).abs() < 1e-3);
    }
    assert_eq!(json(d, "b.csv.summary.json")["method"], "branch_and_bound");
    ok(d, &["decode", "--problem", "p.json", "--samples", "b.csv", "--out", "d.json"]);
    let dec = json(d, "d.json");
    let phys = dec.as_array().unwrap().iter().filter(|s| s["physical"] == true).count();
    assert_eq!((dec.as_array().unwrap().len(), phys), (8, 4));
}

#[test]
fn refusals_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["encode", "coord-tet", "--seq", "LKDEF", "--out", "c.json"]);
    assert_eq!(code(d, &["solve", "--problem", "c.json", "--solver", "brute", "--out", "b.csv"]), 4);
    ok(d, &["encode", "turn-tet", "--seq", "LKDEFGA", "--out", "t.json"]);
    ok(d, &["reduce", "--problem", "t.json", "--out", "q.json"]);
    assert_eq!(code(d, &["solve", "--problem", "q.json", "--solver", "brute", "--out", "b.csv"]), 4);
    assert_eq!(code(d, &["solve", "--problem", "t.json", "--solver", "sa", "--out", "s.csv"]), 2);
}

#[test]
fn annealing_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("l5.json"), L5).unwrap();
    let sa = |out: &str, seed: &str| ok(d, &["solve", "--problem", "l5.json", "--solver", "sa", "--seed", seed, "--restarts", "16", "--sweeps", "20", "--out", out]);
    sa("a.csv", "3");
    sa("b.csv", "3");
    assert_eq!(read(d, "a.csv"), read(d, "b.csv"));
    assert_eq!(json(d, "a.csv.manifest.json")["seed"], 3);
    assert_eq!(rows(d, "a.csv").len(), 16);
    assert!(rows(d, "a.csv").iter().any(|r| r[2] == "-5.5"));
}

#[test]
fn tempering_writes_trajectory_and_window() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["encode", "coord-cart", "--seq", "HPPH", "--L", "2", "--out", "c.json"]);
    ok(d, &["solve", "--problem", "c.json", "--solver", "pt", "--seed", "2", "--num-temps", "8", "--sweeps", "120", "--measure-sweeps", "30", "--out", "p.csv"]);
    assert_eq!(rows(d, "p.csv").len(), 8);
    assert_eq!(rows(d, "p.csv.trajectory.csv").len(), 120);
    assert_eq!(rows(d, "p.csv.window.csv").len(), 30);
    ok(d, &["solve", "--problem", "c.json", "--solver", "pt", "--seed", "3", "--num-temps", "8", "--sweeps", "120", "--measure-sweeps", "30", "--out", "q.csv"]);
    let out = ok(d, &["analyze", "sod", "--run1", "p.csv.window.csv", "--run2", "q.csv.window.csv", "--out", "s.csv"]);
    assert!(out.contains("barriers"));
    let hist = rows(d, "s.csv");
    assert_eq!(hist.len(), 101);
    assert_eq!(hist.iter().map(|r| r[1].parse::<u64>().unwrap()).sum::<u64>(), 30);
}

#[test]
fn time_to_solution_with_every_run_at_ground() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.csv"), "replica,sweep,energy,bitstring\n0,5,-2,01\n1,7,-2,01\n2,3,-2,01\n").unwrap();
    ok(d, &["analyze", "tts", "--samples", "s.csv", "--reference", "-2", "--tau", "0.25", "--out", "t.csv"]);
    let r = &rows(d, "t.csv")[0];
    assert_eq!((r[4].as_str(), r[5].as_str()), ("1", "0.25"));
    std::fs::write(d.join("h.csv"), "replica,sweep,energy,bitstring\n0,5,-2,01\n1,7,0,00\n").unwrap();
    ok(d, &["analyze", "tts", "--samples", "h.csv", "--reference", "-2", "--tau", "1", "--out", "u.csv"]);
    let tts: f64 = rows(d, "u.csv")[0][5].parse().unwrap();
    assert!((tts - 6.643_856_189_774_724).abs() < 1e-9);
}

#[test]
fn scaling_report_shows_the_grid_staircase() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["analyze", "scaling", "--models", "coord-cart", "--n-min", "8", "--n-max", "10", "--out", "s.csv"]);
    let r = rows(d, "s.csv");
    let q: Vec<usize> = r.iter().map(|x| x[3].parse().unwrap()).collect();
    assert_eq!(r.iter().map(|x| x[2].as_str()).collect::<Vec<_>>(), ["3", "4", "4"]);
    // the grid step dwarfs the per-bead increment
    assert!(q[1] - q[0] > 2 * (q[2] - q[1]));
    assert_eq!(q[2], 320);
}

#[test]
fn embed_and_unembed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("l5.json"), L5).unwrap();
    let (emb, hw) = (fixture("embedding5.json"), fixture("hw16.txt"));
    ok(d, &["embed", "--problem", "l5.json", "--embedding", &emb, "--hardware", &hw, "--out", "e.json"]);
    assert_eq!(json(d, "e.json.manifest.json")["config"]["chain_strength"], 1.5);
    ok(d, &["solve", "--problem", "e.json", "--solver", "brute", "--out", "g.csv"]);
    let ground = rows(d, "g.csv")[0][3].clone();
    assert_eq!(ground, "0111110000");
    // physical order 1 2 3 5 6 7 9 10 11 13; clearing node 7 breaks chain {2, 3, 7}
    std::fs::write(d.join("p.csv"), format!("replica,sweep,energy,bitstring\n0,0,0,{ground}\n1,0,0,0111100000\n")).unwrap();
    ok(d, &["unembed", "--samples", "p.csv", "--problem", "e.json", "--embedding", &emb, "--logical", "l5.json", "--out", "u.csv"]);
    let u = rows(d, "u.csv");
    assert_eq!((u[0][3].as_str(), u[0][4].as_str()), ("10100", "0"));
    assert_eq!((u[1][3].as_str(), u[1][4].as_str()), ("10100", "0.2"));
    assert_eq!(u[0][2], "-5.5");
    let bad = r#"{"0": [5, 6], "1": [1], "2": [2, 7], "3": [10, 11], "4": [9, 13]}"#;
    std::fs::write(d.join("bad.json"), bad).unwrap();
    assert_eq!(code(d, &["embed", "--problem", "l5.json", "--embedding", "bad.json", "--hardware", &hw, "--out", "x.json"]), 2);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("l5.json"), L5).unwrap();
    std::fs::write(d.join("run.cfg"), "# sampler settings\nsolver = sa\nseed = 4\nrestarts = 4\nsweeps = 10\n").unwrap();
    ok(d, &["--config", "run.cfg", "solve", "--problem", "l5.json", "--out", "a.csv"]);
    assert_eq!(json(d, "a.csv.summary.json")["seed"], 4);
    assert_eq!(rows(d, "a.csv").len(), 4);
    ok(d, &["--config", "run.cfg", "solve", "--problem", "l5.json", "--seed", "5", "--out", "b.csv"]);
    assert_eq!(json(d, "b.csv.summary.json")["seed"], 5);
    assert_eq!(code(d, &["--config", "missing.cfg", "solve", "--problem", "l5.json", "--out", "c.csv"]), 2);
}

#[test]
fn dataset_has_prefixes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-dataset", "--count", "3", "--len", "6", "--seed", "1", "--out", "g.csv"]);
    let r = rows(d, "g.csv");
    assert_eq!(r.len(), 9);
    for w in r.windows(2).filter(|w| w[0][0] == w[1][0]) {
        assert!(w[1][2].starts_with(&w[0][2]));
    }
    ok(d, &["gen-dataset", "--count", "3", "--len", "6", "--seed", "1", "--out", "h.csv"]);
    assert_eq!(read(d, "g.csv"), read(d, "h.csv"));
}
