use std::path::{Path, PathBuf};
use std::process::Command;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.out))
    }
}

fn hlc(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hlc").chain(args.iter().copied());
    let code = hlc_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GF25: &[&str] = &["--construction", "all_symbol", "--n", "24", "--k", "14", "--levels", "12:8,4:3"];
const GF13: &[&str] = &["--construction", "all_symbol", "--n", "12", "--k", "5", "--levels", "6:4,3:2"];
const PYRAMID: &[&str] = &["--construction", "pyramid", "--k", "4", "--d", "3", "--levels", "r1=2,r2=1", "--delta1", "3"];

fn design(dir: &TempDir, name: &str, flags: &[&str]) -> (PathBuf, Value) {
    let path = dir.path().join(name);
    let mut args = vec!["design"];
    args.extend_from_slice(flags);
    args.extend_from_slice(&["--out", s(&path)]);
    let r = hlc(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    (path, r.json())
}

fn encode(dir: &TempDir, profile: &Path, message: &str) -> (PathBuf, Vec<Value>) {
    let msg = dir.path().join("message.json");
    std::fs::write(&msg, message).unwrap();
    let shards = dir.path().join("shards.jsonl");
    let r = hlc(&["encode", "--profile", s(profile), "--in", s(&msg), "--out", s(&shards)]);
    assert_eq!(r.code, 0, "{}", r.err);
    (shards.clone(), read_lines(&shards))
}

fn read_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn write_lines(path: &Path, lines: &[Value]) {
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(path, text).unwrap();
}

fn values(lines: &[Value]) -> Vec<Value> {
    lines[1..].iter().map(|l| l["value"].clone()).collect()
}

#[test]
fn design_summaries() {
    let dir = TempDir::new().unwrap();
    let (_, v) = design(&dir, "a.json", GF25);
    assert_eq!(v["field"], "GF(5^2)");
    assert_eq!(v["bound_d"], 6);
    assert_eq!(v["designed_d"], 6);
    assert_eq!(v["optimal"], true);
    assert!(v["optimal_by"].as_array().unwrap().contains(&Value::from("Thm3")));

    let (_, v) = design(&dir, "b.json", GF13);
    assert_eq!(v["field"], "GF(13^1)");
    assert_eq!(v["designed_d"], 6);
    assert!(v["optimal_by"].as_array().unwrap().contains(&Value::from("Thm4")));

    let (p, v) = design(&dir, "c.json", PYRAMID);
    assert_eq!(v["n"], 10);
    let profile: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(profile["construction"], "pyramid");
    assert_eq!(profile["eval_points"], Value::Null);
}

#[test]
fn design_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    for flags in [GF25, GF13, PYRAMID] {
        let (a, _) = design(&dir, "one.json", flags);
        let (b, _) = design(&dir, "two.json", flags);
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}

#[test]
fn design_rejects_bad_parameters() {
    let r = hlc(&["design", "--construction", "all_symbol", "--n", "12", "--k", "5", "--levels", "6:4,4:2"]);
    assert_eq!(r.code, 3);
    assert!(!r.err.is_empty());
    let r = hlc(&["design", "--construction", "pyramid", "--k", "4", "--levels", "r1=2,r2=1"]);
    assert_eq!(r.code, 3);
    assert_eq!(hlc(&["design", "--bogus"]).code, 3);
    assert_eq!(hlc(&["frobnicate"]).code, 3);
    assert_eq!(hlc(&["--help"]).code, 0);
}

#[test]
fn encode_examples() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p.json", GF13);

    let (_, lines) = encode(&dir, &p, "[0,0,0,0,0]");
    assert_eq!(lines.len(), 13);
    assert!(values(&lines).iter().all(|v| v == 0));

    let (_, lines) = encode(&dir, &p, "[1,0,0,0,0]");
    assert!(values(&lines).iter().all(|v| v == 1));

    let (_, lines) = encode(&dir, &p, "[1,0,0,0,1]");
    assert_eq!(values(&lines).iter().filter(|v| *v != 0).count(), 6);

    let msg = dir.path().join("bad.json");
    std::fs::write(&msg, "[1,0,0,0,13]").unwrap();
    assert_eq!(hlc(&["encode", "--profile", s(&p), "--in", s(&msg)]).code, 3);
    std::fs::write(&msg, "[1,0,0]").unwrap();
    assert_eq!(hlc(&["encode", "--profile", s(&p), "--in", s(&msg)]).code, 3);
}

#[test]
fn encode_raw_bytes_to_stdout() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p.json", GF25);
    let msg = dir.path().join("bytes.bin");
    std::fs::write(&msg, b"hello").unwrap();
    let r = hlc(&["encode", "--profile", s(&p), "--in", s(&msg)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.lines().count(), 25);
    std::fs::write(&msg, [7u8; 64]).unwrap();
    assert_eq!(hlc(&["encode", "--profile", s(&p), "--in", s(&msg)]).code, 3);
}

#[test]
fn repair_reports() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p.json", GF25);
    let (shards, mut lines) = encode(&dir, &p, "[1,2,3,4,5,6,7,8,9,10,11,12,13,14]");

    let r = hlc(&["repair", "--profile", s(&p), "--shards", s(&shards)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v = r.json();
    assert_eq!(v["repairs"], Value::Array(vec![]));
    assert_eq!(v["total_reads"], 0);

    let original = lines.clone();
    lines[6]["value"] = Value::Null;
    let erased = dir.path().join("erased.jsonl");
    write_lines(&erased, &lines);
    let restored = dir.path().join("restored.jsonl");
    let r = hlc(&["repair", "--profile", s(&p), "--shards", s(&erased), "--out", s(&restored)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v = r.json();
    assert_eq!(v["repairs"][0]["level"], 2);
    assert_eq!(v["repairs"][0]["reads"], 3);
    assert_eq!(v["levels_used"], serde_json::json!([2]));
    assert_eq!(read_lines(&restored), original);

    let r = hlc(&["repair", "--profile", s(&p), "--shards", s(&erased)]);
    assert_eq!(r.code, 0);
    let mut default_out = erased.into_os_string();
    default_out.push(".restored.jsonl");
    assert_eq!(read_lines(Path::new(&default_out)), original);
}

#[test]
fn unrecoverable_pattern_exits_2() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p.json", GF13);
    let (_, mut lines) = encode(&dir, &p, "[1,2,3,4,5]");
    for line in lines.iter_mut().skip(1).take(8) {
        line["value"] = Value::Null;
    }
    let erased = dir.path().join("erased.jsonl");
    write_lines(&erased, &lines);
    let r = hlc(&["repair", "--profile", s(&p), "--shards", s(&erased)]);
    assert_eq!(r.code, 2);
    assert!(!r.json()["stuck"].as_array().unwrap().is_empty());
}

#[test]
fn foreign_shards_are_rejected() {
    let dir = TempDir::new().unwrap();
    let (p13, _) = design(&dir, "p13.json", GF13);
    let (p25, _) = design(&dir, "p25.json", GF25);
    let (shards, _) = encode(&dir, &p13, "[1,2,3,4,5]");
    let r = hlc(&["repair", "--profile", s(&p25), "--shards", s(&shards)]);
    assert_eq!(r.code, 1);

    // right hash, wrong point
    let mut lines = read_lines(&shards);
    lines[3]["point"] = Value::from(0);
    write_lines(&shards, &lines);
    assert_eq!(hlc(&["repair", "--profile", s(&p13), "--shards", s(&shards)]).code, 1);
}

#[test]
fn verify_profiles() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p13.json", GF13);
    let r = hlc(&["verify", "--profile", s(&p), "--oracle", "--audit"]);
    assert_eq!(r.code, 0, "{}", r.out);
    let v = r.json();
    assert_eq!(v["oracle_d"], 6);
    assert_eq!(v["bound"], 6);
    assert_eq!(v["pass"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"indicator_polynomials"));

    let (p, _) = design(&dir, "p25.json", GF25);
    let r = hlc(&["verify", "--profile", s(&p)]);
    assert_eq!(r.code, 0, "{}", r.out);
    let v = r.json();
    assert_eq!(v["designed_d"], 6);
    assert_eq!(v["bound"], 6);
    assert_eq!(v["oracle_d"], Value::Null);

    // q^k = 25^14 is far beyond the enumeration cap
    assert_eq!(hlc(&["verify", "--profile", s(&p), "--oracle"]).code, 3);

    let (p, _) = design(&dir, "pyr.json", PYRAMID);
    let r = hlc(&["verify", "--profile", s(&p), "--oracle", "--audit"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert_eq!(r.json()["oracle_d"], 3);
}

#[test]
fn tampered_profile_fails_verification() {
    let dir = TempDir::new().unwrap();
    let (p, _) = design(&dir, "p.json", GF13);
    let mut profile: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    profile["exp"][0] = Value::from(7);
    std::fs::write(&p, serde_json::to_string_pretty(&profile).unwrap()).unwrap();
    let r = hlc(&["verify", "--profile", s(&p)]);
    assert_eq!(r.code, 1);
    let v = r.json();
    assert_eq!(v["pass"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

fn round_trip(flags: &[&str], seeds: u64) {
    let dir = TempDir::new().unwrap();
    let (p, summary) = design(&dir, "p.json", flags);
    let n = summary["n"].as_u64().unwrap() as usize;
    let k = summary["k"].as_u64().unwrap() as usize;
    let d = summary["designed_d"].as_u64().unwrap() as usize;
    let profile: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let q = profile["field"]["p"].as_u64().unwrap().pow(profile["field"]["m"].as_u64().unwrap() as u32);
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let msg: Vec<u64> = (0..k).map(|_| rng.gen_range(0..q)).collect();
        let (_, lines) = encode(&dir, &p, &serde_json::to_string(&msg).unwrap());
        let mut erased = lines.clone();
        let count = rng.gen_range(0..d);
        for i in sample(&mut rng, n, count) {
            erased[i + 1]["value"] = Value::Null;
        }
        let file = dir.path().join("erased.jsonl");
        let out = dir.path().join("restored.jsonl");
        write_lines(&file, &erased);
        let r = hlc(&["repair", "--profile", s(&p), "--shards", s(&file), "--out", s(&out)]);
        assert_eq!(r.code, 0, "seed {seed}: {}", r.err);
        assert_eq!(read_lines(&out), lines, "seed {seed}");
    }
}

#[test]
fn round_trip_gf13() {
    round_trip(GF13, 100);
}

#[test]
fn round_trip_gf25() {
    round_trip(GF25, 100);
}

#[test]
fn round_trip_pyramid() {
    round_trip(PYRAMID, 100);
}

#[test]
fn binary_honors_field_cap() {
    let bin = env!("CARGO_BIN_EXE_hlc");
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let mut args = vec!["design"];
    args.extend_from_slice(GF25);
    args.extend_from_slice(&["--out", s(&out)]);

    let ok = Command::new(bin).args(&args).env_remove("HLC_MAX_FIELD").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let capped = Command::new(bin).args(&args).env("HLC_MAX_FIELD", "16").output().unwrap();
    assert_eq!(capped.status.code(), Some(3));
    assert!(!capped.stderr.is_empty());
    let garbage = Command::new(bin).args(&args).env("HLC_MAX_FIELD", "lots").output().unwrap();
    assert_eq!(garbage.status.code(), Some(3));
}
