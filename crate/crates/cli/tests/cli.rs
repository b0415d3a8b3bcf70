use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

fn idnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idnet")).args(args).output().expect("spawn idnet")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_ranking_file_exits_2_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("study.toml");
    fs::write(
        &cfg,
        format!("[input]\ncorpus = {:?}\nranking = \"nowhere/ranks.tsv\"\n", fixture().join("corpus.tsv")),
    )
    .unwrap();
    let out = idnet(&["run", s(&cfg), "--out", s(&tmp.path().join("out"))]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("nowhere/ranks.tsv"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&idnet(&["no-such-verb"])), 2);
    assert_eq!(code(&idnet(&["metrics"])), 2);
    assert_eq!(code(&idnet(&["rank", ".", "--key", "degree"])), 2);
    assert_eq!(code(&idnet(&["--help"])), 0);
}

#[test]
fn unknown_year_exits_3() {
    let f = fixture();
    let out = idnet(&[
        "view", "--corpus", s(&f.join("corpus.tsv")), "--ranking", s(&f.join("ranking.tsv")),
        "--tier", "I", "--year", "1985", "--count",
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn linkless_network_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let net = tmp.path().join("net");
    fs::create_dir(&net).unwrap();
    fs::write(net.join("nodes.tsv"), "code\tlabel\tstrength\nA01.100\ta\t0\nA01.200\tb\t0\n").unwrap();
    fs::write(net.join("edges.tsv"), "code_i\tcode_j\tw_ij\n").unwrap();
    let out = idnet(&["communities", s(&net)]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn view_counts_match_the_ledger() {
    let f = fixture();
    let ledger: serde_json::Value = serde_json::from_str(&fs::read_to_string(f.join("ledger.json")).unwrap()).unwrap();
    let (corpus, ranking) = (f.join("corpus.tsv"), f.join("ranking.tsv"));
    for (tier, month, key) in [("I", None, "I_2010"), ("NI", Some("6"), "NI-June_2010"), ("NI", None, "NI_2010")] {
        let mut args = vec![
            "view", "--corpus", s(&corpus), "--ranking", s(&ranking),
            "--tier", tier, "--year", "2010", "--count",
        ];
        if let Some(m) = month {
            args.extend(["--month", m]);
        }
        let out = idnet(&args);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), ledger["per_view"][key].to_string());
    }
}

#[test]
fn synth_reproduces_the_bundled_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let out = idnet(&["synth", "--out", s(tmp.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["corpus.tsv", "ranking.tsv", "concepts.tsv", "ledger.json"] {
        assert!(fs::read(tmp.path().join(name)).unwrap() == fs::read(fixture().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn run_matches_golden_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let out = idnet(&["run", s(&fixture().join("config.toml")), "--out", s(tmp.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["complete"], true);
    let mut listed = String::from("path\tsha256\n");
    for o in manifest["outputs"].as_array().unwrap() {
        listed.push_str(&format!("{}\t{}\n", o["path"].as_str().unwrap(), o["sha256"].as_str().unwrap()));
    }
    assert_eq!(listed, fs::read_to_string(fixture().join("golden.tsv")).unwrap());
}

#[test]
fn build_export_and_metrics_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    let net = tmp.path().join("i1999");
    let out = idnet(&[
        "build-net", "--corpus", s(&f.join("corpus.tsv")), "--ranking", s(&f.join("ranking.tsv")),
        "--concepts", s(&f.join("concepts.tsv")), "--tier", "I", "--year", "1999", "--out", s(&net),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let edges = tmp.path().join("edges.tsv");
    let out = idnet(&["export", s(&net), "--format", "edge-tsv", "--out", s(&edges)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&edges).unwrap(), fs::read_to_string(net.join("edges.tsv")).unwrap());

    let out = idnet(&["metrics", s(&net), "--component", "largest"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["network"], "I_1999");
    assert_eq!(report["node_count"], 69);
    assert!(report["modularity"].as_f64().unwrap() > 0.0);
}
