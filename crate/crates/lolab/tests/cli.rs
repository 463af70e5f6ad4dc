use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lolab::format::{decode_assignment, decode_instance, encode_chain, encode_instance, encode_table};
use lolab::record::{sha256_hex, Record};
use lolab_core::families::example_f;
use lolab_core::hypergraph::{plant_lo2, verify_lo};
use lolab_core::minors::{MinorChain, MinorMap};
use lolab_core::polymorph::projection;

fn lolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lolab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn records(o: &Output) -> Vec<Record> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_projection() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "proj3.poly", &encode_table(&projection(3, 2).unwrap()));
    let o = lolab(&["check", "--input", p.to_str().unwrap(), "--target", "lo3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "polymorphism: yes\n");

    let bad = write(dir.path(), "const.poly", "poly 2 3\n2222\n");
    let o = lolab(&["check", "--input", bad.to_str().unwrap(), "--format", "records"]);
    assert_eq!(o.status.code(), Some(1));
    let r = &records(&o)[0];
    assert_eq!(r.outcome, "violation");
    assert_eq!(r.payload["holds"], false);
    assert_eq!(r.input_digest, sha256_hex(b"poly 2 3\n2222\n"));
}

#[test]
fn aip_on_planted_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (h, _) = plant_lo2(30, 90, 11).unwrap();
    let p = write(dir.path(), "planted.hlo", &encode_instance(&h));
    let o = lolab(&["aip", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = decode_assignment(&stdout(&o)).unwrap();
    for &[x, y, z] in h.edges() {
        assert!(!(a.0[x] == a.0[y] && a.0[y] == a.0[z]));
    }

    let unsat = write(dir.path(), "loop.hlo", "p hlo 1 1\ne 1 1 1\n");
    let o = lolab(&["aip", "--input", unsat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NO_INTEGER_SOLUTION\n");
}

#[test]
fn reduce_writes_an_instance() {
    let dir = tempfile::tempdir().unwrap();
    let (h, plant) = plant_lo2(8, 12, 3).unwrap();
    let p = write(dir.path(), "in.hlo", &encode_instance(&h));
    let out = dir.path().join("out.hlo");
    let o = lolab(&["reduce", "--input", p.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let g = decode_instance(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.vertices(), 16);
    assert_eq!(g.edges().len(), 12 + 8);
    let mut lifted = plant.0.clone();
    lifted.extend(plant.0.iter().map(|c| c + 1));
    assert_eq!(verify_lo(&g, 3, &lolab_core::hypergraph::Assignment(lifted)).unwrap(), None);
}

#[test]
fn lemmas_at_arity_four() {
    let o = lolab(&["lemmas", "--arity", "4", "--budget", "1e8", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = records(&o);
    let last = rs.last().unwrap();
    assert_eq!(last.outcome, "ok");
    assert_eq!(last.payload["violations"], 0);
    assert!(rs.iter().any(|r| r.payload["lemma"] == "kneser" && r.payload["arity"] == 4 && r.payload["instances"] == 30144));
}

#[test]
fn enum_counts_and_budget() {
    let o = lolab(&["enum", "--arity", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("count 306\n"));
    assert_eq!(stdout(&o).matches("poly 3 3").count(), 306);
    let o = lolab(&["enum", "--arity", "2", "--target", "lo2"]);
    assert!(stdout(&o).ends_with("count 2\n"));
    let o = lolab(&["enum", "--arity", "4", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let o = lolab(&["enum", "--arity", "5", "--filter", "no-small-2set", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(records(&o).last().unwrap().payload["count"], 320);
}

#[test]
fn structure_and_saturate_on_the_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "f.poly", &encode_table(&example_f()));
    let o = lolab(&["structure", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("conformance: conforms\ndictator: 1\n"));
    let o = lolab(&["saturate", "--input", p.to_str().unwrap(), "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &records(&o)[0];
    assert_eq!(r.payload["pure"], true);
    assert_eq!(r.payload["steps"].as_array().unwrap().len(), 2);
    let o = lolab(&["structure", "--input", p.to_str().unwrap(), "--budget", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reconfig_and_zcheck() {
    let o = lolab(&["reconfig", "--arity", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("components 4\n"));
    for (t, verdict) in [("lo2", "NO_HOM"), ("lo5", "NO_HOM"), ("nae2", "INCONCLUSIVE")] {
        let o = lolab(&["zcheck", "--target", t]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).ends_with(&format!("verdict {verdict}\n")));
    }
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.rel", "rel 2\nt 0 0 0\n");
    let o = lolab(&["zcheck", "--input", p.to_str().unwrap()]);
    assert!(stdout(&o).ends_with("verdict INCONCLUSIVE\n"));
}

#[test]
fn chain_check_file_and_random() {
    let dir = tempfile::tempdir().unwrap();
    let f = example_f();
    let pi = MinorMap::new(2, vec![1, 1, 2, 2, 2, 2, 2, 2, 2]).unwrap();
    let chain = MinorChain::from_maps(f, vec![pi, MinorMap::identity(2).unwrap(), MinorMap::identity(2).unwrap()]).unwrap();
    let p = write(dir.path(), "c.chain", &encode_chain(&chain));
    let o = lolab(&["chain-check", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness (1, 2)"));
    let o = lolab(&["chain-check", "--seed", "100", "--count", "25"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("witness")).count(), 25);
}

#[test]
fn records_are_reproducible() {
    let args = ["chain-check", "--seed", "7", "--count", "5", "--format", "records"];
    let a = lolab(&args);
    let b = lolab(&args);
    assert_eq!(a.stdout, b.stdout);
    let rs = records(&a);
    assert_eq!(rs.len(), 5);
    assert!(rs.iter().all(|r| r.command == "chain-check" && r.input.is_none()));
    assert_eq!(rs[0].input_digest, rs[1].input_digest);
}

#[test]
fn usage_errors() {
    for args in [&["bogus"][..], &["check", "--nope"], &["enum"], &["check"], &["enum", "--arity", "3", "--budget", "lots"], &["check", "--target", "lo1"]] {
        let o = lolab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = lolab(&["check", "--input", "/nonexistent/file.poly"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lolab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
