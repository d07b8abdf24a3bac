use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn metrrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrrc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn random_file(dir: &Path, len: usize, seed: u64) -> Vec<u8> {
    let mut bytes = vec![0u8; len];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
    fs::write(dir.join("input.bin"), &bytes).unwrap();
    bytes
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const EX1: [&str; 10] = ["-n", "30", "-u", "5", "-k", "24", "-l", "3", "-d", "2"];
const EX5: [&str; 10] = ["-n", "16", "-u", "4", "-k", "13", "-l", "2", "-d", "2"];

fn encode(dir: &Path, params: &[&str], extra: &[&str]) -> Output {
    let (input, chunks) = (p(dir, "input.bin"), p(dir, "chunks"));
    let mut args = vec!["encode", &input, "--out", &chunks];
    args.extend_from_slice(params);
    args.extend_from_slice(extra);
    metrrc(&args)
}

fn decode(dir: &Path) -> (Output, Vec<u8>) {
    let out = metrrc(&["decode", &p(dir, "chunks"), "--out", &p(dir, "output.bin")]);
    let bytes = fs::read(dir.join("output.bin")).unwrap_or_default();
    (out, bytes)
}

fn chunk(dir: &Path, rack: usize, slot: usize) -> std::path::PathBuf {
    dir.join("chunks").join(format!("node-{rack:03}-{slot:03}.chunk"))
}

#[test]
fn params_prints_both_modes() {
    let out = metrrc(&["params", "-n", "150", "-u", "5", "-k", "144", "-l", "3", "-d", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mode=MSRR") && text.contains(" B=103 overhead=150/103 "), "{text}");
    assert!(text.contains("mode=MBRR") && text.contains(" B=768 overhead=25/16 overhead_approx=1.5625 "), "{text}");
}

#[test]
fn bad_parameters_exit_2() {
    let out = metrrc(&["params", "-n", "16", "-u", "4", "-k", "13", "-l", "2", "-d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d̄ < k̄"));
}

#[test]
fn msrr_round_trip_after_losing_n_minus_k_chunks() {
    let dir = TempDir::new().unwrap();
    let data = random_file(dir.path(), 100_000, 1);
    let out = encode(dir.path(), &EX1, &["--systematic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("B=19"));
    for (e, g) in [(0, 0), (1, 4), (2, 2), (3, 3), (5, 0), (5, 1)] {
        fs::remove_file(chunk(dir.path(), e, g)).unwrap();
    }
    let (out, bytes) = decode(dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(bytes, data);
}

#[test]
fn mbrr_chunks_hold_dbar_symbols_per_stripe() {
    let dir = TempDir::new().unwrap();
    let data = random_file(dir.path(), 1000, 2);
    let out = encode(dir.path(), &EX5, &["--mode", "mbrr", "--field", "p:17"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // GF(17) carries 4 bits per symbol and B = 20 symbols per stripe
    let stripes = (1000 * 8usize).div_ceil(20 * 4);
    assert!(stdout(&out).contains(&format!("stripes={stripes}")));
    let len = fs::metadata(chunk(dir.path(), 2, 3)).unwrap().len() as usize;
    assert_eq!(len, 41 + stripes * 2);
    for (e, g) in [(0, 1), (3, 0), (3, 3)] {
        fs::remove_file(chunk(dir.path(), e, g)).unwrap();
    }
    assert_eq!(decode(dir.path()).1, data);
}

#[test]
fn empty_file() {
    let dir = TempDir::new().unwrap();
    random_file(dir.path(), 0, 0);
    let out = encode(dir.path(), &EX5, &["--mode", "mbrr"]);
    assert!(stdout(&out).contains("stripes=0"));
    assert_eq!(fs::metadata(chunk(dir.path(), 0, 0)).unwrap().len(), 41);
    let (out, bytes) = decode(dir.path());
    assert!(out.status.success());
    assert!(bytes.is_empty());
    let out = metrrc(&["repair", &p(dir.path(), "chunks"), "--failed", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("event=files stripes=0 written=3"));
}

#[test]
fn repair_one_chunk_byte_identically() {
    let dir = TempDir::new().unwrap();
    random_file(dir.path(), 5000, 3);
    encode(dir.path(), &EX1, &["--systematic"]);
    let path = chunk(dir.path(), 1, 2);
    let original = fs::read(&path).unwrap();
    fs::remove_file(&path).unwrap();
    let out = metrrc(&["repair", &p(dir.path(), "chunks")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(
        text.starts_with("event=repair class=optimal rack=1 failed=7 helper_racks=0,2 local=5,6,8 cross_rack=2 "),
        "{text}"
    );
    assert!(text.contains("event=summary class=optimal failures=1 racks=1 cross_rack=2 "), "{text}");
    assert_eq!(fs::read(&path).unwrap(), original);
}

#[test]
fn repair_with_chosen_helpers_and_naive_fallback() {
    let dir = TempDir::new().unwrap();
    random_file(dir.path(), 3000, 4);
    encode(dir.path(), &EX5, &["--mode", "mbrr", "--systematic"]);
    let originals: Vec<Vec<u8>> = (0..16).map(|i| fs::read(chunk(dir.path(), i / 4, i % 4)).unwrap()).collect();
    let out = metrrc(&["repair", &p(dir.path(), "chunks"), "--failed", "1:0,1:3", "--helpers", "3,2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("failed=4,7 helper_racks=3,2 local=5,6 cross_rack=4"), "{}", stdout(&out));
    // three failures in one rack exceed u − l = 2
    for i in [8, 9, 10] {
        fs::remove_file(chunk(dir.path(), i / 4, i % 4)).unwrap();
    }
    let out = metrrc(&["repair", &p(dir.path(), "chunks")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("class=naive"));
    for (i, original) in originals.iter().enumerate() {
        assert_eq!(&fs::read(chunk(dir.path(), i / 4, i % 4)).unwrap(), original, "node {i}");
    }
}

#[test]
fn too_many_losses_exit_3() {
    let dir = TempDir::new().unwrap();
    random_file(dir.path(), 200, 5);
    encode(dir.path(), &EX5, &[]);
    for i in 0..4 {
        fs::remove_file(chunk(dir.path(), 0, i)).unwrap();
    }
    assert_eq!(decode(dir.path()).0.status.code(), Some(3));
    let out = metrrc(&["repair", &p(dir.path(), "chunks")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("class=unrecoverable"));
}

#[test]
fn chunk_problems() {
    let dir = TempDir::new().unwrap();
    random_file(dir.path(), 200, 6);
    encode(dir.path(), &EX5, &[]);
    // a chunk from another stripe set
    let other = TempDir::new().unwrap();
    random_file(other.path(), 200, 7);
    encode(other.path(), &EX5, &["--systematic"]);
    fs::copy(chunk(other.path(), 0, 0), chunk(dir.path(), 0, 0)).unwrap();
    let (out, _) = decode(dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("same stripe set"));
    // a damaged header
    let path = chunk(dir.path(), 0, 0);
    let mut bytes = fs::read(&path).unwrap();
    bytes[3] ^= 0xff;
    fs::write(&path, bytes).unwrap();
    assert_eq!(decode(dir.path()).0.status.code(), Some(4));
    // no such directory
    let out = metrrc(&["decode", &p(dir.path(), "nowhere"), "--out", &p(dir.path(), "x")]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_forty_four_failures() {
    let wide = ["-n", "150", "-u", "5", "-k", "144", "-l", "3", "-d", "8"];
    let mut args = vec!["simulate", "--pattern", "spread:22x2"];
    args.extend_from_slice(&wide);
    let out = metrrc(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("event=summary class=optimal failures=44 racks=22 cross_rack=352 "), "{text}");
    assert!(
        text.ends_with(
            "event=aggregate mode=MSRR trials=1 optimal=1 naive=0 unrecoverable=0 cross_rack=352 intra_rack=770\n"
        ),
        "{text}"
    );
    let mut args = vec!["simulate", "--pattern", "0,1,2,3,4,5,6"];
    args.extend_from_slice(&wide);
    let out = metrrc(&args);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_random_trials_are_deterministic() {
    let mut args = vec!["simulate", "--mode", "mbrr", "--failures", "3", "--trials", "25", "--seed", "11"];
    args.extend_from_slice(&EX5);
    let (a, b) = (metrrc(&args), metrrc(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("event=aggregate mode=MBRR trials=25 "));
}

#[test]
fn bounds_at_the_msrr_point() {
    let out = metrrc(&["bounds", "-n", "9", "-u", "3", "-k", "6", "-l", "1", "-d", "1", "--flow"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("event=bound alpha=2 beta=1 cutset=6 mincut=6"), "{text}");
    assert!(text.contains("event=point mode=MSRR alpha=1 beta=1 B=4 cutset=4 gamma=1"));
    assert!(text.contains("event=point mode=MBRR alpha=1 beta=1 B=4 cutset=4 gamma=1"));
}
