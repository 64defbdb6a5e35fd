use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn twopage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twopage")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    twopage(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn complete(n: usize) -> String {
    let mut s = String::new();
    for a in 0..n {
        for b in a + 1..n {
            s.push_str(&format!("{a} {b}\n"));
        }
    }
    s
}

#[test]
fn decide_exit_codes() {
    let dir = TempDir::new().unwrap();
    let k4 = write(dir.path(), "k4.edges", &complete(4));
    let k5 = write(dir.path(), "k5.edges", &complete(5));
    assert_eq!(code(&["decide", &k4]), 0);
    assert_eq!(code(&["decide", &k5]), 1);
    assert_eq!(code(&["decide", "--exact", &k4]), 0);
    assert_eq!(code(&["decide", &dir.path().join("missing").to_string_lossy()]), 2);
    assert_eq!(code(&["decide", "--pages", "3", &k4]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn embed_output_verifies_and_renders() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "w.edges", "0 1\n1 2\n2 3\n3 4\n4 0\n5 0\n5 1\n5 2\n5 3\n5 4\n0 2\n");
    let json = dir.path().join("emb.json");
    let svg = dir.path().join("emb.svg");
    let report = dir.path().join("report.json");
    let out = twopage(&["embed", &g, "--json", json.to_str().unwrap(), "--svg", svg.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(code(&["verify", &g, json.to_str().unwrap()]), 0);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "yes");
    assert_eq!(r["artifacts"].as_array().unwrap().len(), 2);
    let rendered = twopage(&["render", &g, json.to_str().unwrap()]);
    assert_eq!(rendered.status.code(), Some(0));
    assert_eq!(rendered.stdout, fs::read(&svg).unwrap());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let gen = twopage(&["gen", "planar-deg4", "30", "--seed", "4"]);
    assert_eq!(gen.status.code(), Some(0));
    let g = write(dir.path(), "g.edges", std::str::from_utf8(&gen.stdout).unwrap());
    let a = twopage(&["embed", &g]);
    let b = twopage(&["embed", &g]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(twopage(&["gen", "planar-deg4", "30", "--seed", "4"]).stdout, gen.stdout);
}

#[test]
fn verify_rejects_crossing_pages() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "k4.edges", &complete(4));
    let bad = write(dir.path(), "bad.json", r#"{"order":[0,1,2,3],"pages":{"0":1,"1":1,"2":1,"3":1,"4":1,"5":1}}"#);
    let good = write(dir.path(), "good.json", r#"{"order":[0,1,2,3],"pages":{"0":1,"1":1,"2":1,"3":1,"4":2,"5":1}}"#);
    assert_eq!(code(&["verify", &g, &bad]), 1);
    assert_eq!(code(&["verify", &g, &good]), 0);
    assert_eq!(code(&["render", &g, &bad]), 2);
    let garbage = write(dir.path(), "garbage.json", "{");
    assert_eq!(code(&["verify", &g, &garbage]), 2);
}

#[test]
fn oracle_and_kernel() {
    let dir = TempDir::new().unwrap();
    let k6 = write(dir.path(), "k6.edges", &complete(6));
    assert_eq!(code(&["oracle", &k6]), 1);
    assert_eq!(code(&["oracle", "--pages", "3", &k6]), 0);
    let big = write(dir.path(), "k12.edges", &complete(12));
    assert_eq!(code(&["oracle", &big]), 2);
    let cyc = twopage(&["gen", "cycle", "40"]);
    let c = write(dir.path(), "c.edges", std::str::from_utf8(&cyc.stdout).unwrap());
    let trace = dir.path().join("trace.json");
    let out = twopage(&["kernelize", &c, "--json", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let kernel = std::str::from_utf8(&out.stdout).unwrap();
    assert_eq!(kernel.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["pages"], 2);
}
