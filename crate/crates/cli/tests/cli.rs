use std::path::PathBuf;
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel).display().to_string()
}

fn gensift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gensift")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sift_random_is_verified_and_deterministic() {
    let args = ["sift", "--group", &data("groups/m11.gens"), "--chain", &data("chains/m11-1.chain"), "--random", "--seed", "7"];
    let first = gensift(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(stdout(&first).trim_end().ends_with("VERIFIED gx=1"));
    assert_eq!(stdout(&first), stdout(&gensift(&args)));
}

#[test]
fn sift_reads_a_program_from_random() {
    let group = data("groups/m11.gens");
    let out = gensift(&["random", "--group", &group, "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.slp");
    std::fs::write(&path, stdout(&out)).unwrap();
    let sift = gensift(&["sift", "--group", &group, "--chain", &data("chains/m11-2.chain"), "--slp", path.to_str().unwrap()]);
    assert_eq!(sift.status.code(), Some(0), "{}", stdout(&sift));
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.slp");
    std::fs::write(&bad, "slots=2 result=0\nFROB 1 2\nend\n").unwrap();
    let chain = data("chains/m11-1.chain");
    let group = data("groups/m11.gens");
    let out = gensift(&["sift", "--group", &group, "--chain", &chain, "--slp", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = gensift(&["verify", "--group", "/nonexistent.gens", "--chain", &chain]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&missing.stderr).is_empty());
    let usage = gensift(&["sift", "--group", &group, "--chain", &chain]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn verify_passes_shipped_chain() {
    let out = gensift(&["verify", "--group", &data("groups/m11.gens"), "--chain", &data("chains/m11-1.chain")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("CLAIM step1.p EXPECTED 13/165 COMPUTED 13/165 PASS"));
    assert!(stdout(&out).contains(" claims, 0 failed"));
}

#[test]
fn verify_rejects_a_wrong_parameter() {
    let text = std::fs::read_to_string(data("chains/m11-1.chain")).unwrap();
    assert!(text.contains("p 1/6\ntarget conj T2 L2"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.chain");
    std::fs::write(&path, text.replace("p 1/6\ntarget conj T2 L2", "p 1/3\ntarget conj T2 L2")).unwrap();
    let out = gensift(&["verify", "--group", &data("groups/m11.gens"), "--chain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("CLAIM step2.p EXPECTED 1/3 COMPUTED 1/6 FAIL"));
}

#[test]
fn bench_prints_a_row_per_chain() {
    let group = data("groups/m11.gens");
    let header = "group\tchain\ttrials\tseconds\tavg_mults\tfailures";
    let empty = gensift(&["bench", "--group", &group, "--chain", &data("chains/m11-1.chain"), "--trials", "0"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty).trim_end(), header);

    let out = gensift(&[
        "bench", "--group", &group, "--chain", &data("chains/m11-1.chain"), "--chain", &data("chains/m11-2.chain"),
        "--trials", "40", "--jobs", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][..3], ["m11", "m11-1", "40"]);
    assert_eq!(rows[1][1], "m11-2");
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn large_group_claims_are_uncertified() {
    let group = data("groups/hs.gens");
    let out = gensift(&["verify", "--group", &group, "--chain", &data("chains/hs-2.chain"), "--static"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("CLAIM step1.p EXPECTED 1/5 COMPUTED - UNCERTIFIED"));
    assert!(!text.contains(" FAIL"));
    let sift = gensift(&["sift", "--group", &group, "--chain", &data("chains/hs-2.chain"), "--random", "--seed", "1"]);
    assert_eq!(sift.status.code(), Some(0));
    assert!(stdout(&sift).trim_end().ends_with("VERIFIED gx=1"));
}
