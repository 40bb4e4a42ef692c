mod common;

use std::path::Path;
use std::process::{Command, Output};

fn morphtrie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphtrie"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn pipeline_writes_every_artifact() {
    let toy = common::toy_dir();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = morphtrie(&[
        "pipeline",
        "--embeddings",
        p(&toy.join("embeddings.txt")),
        "--wordlist",
        p(&toy.join("wordlist.txt")),
        "--gold",
        p(&toy.join("gold.txt")),
        "--out",
        p(&out),
        "--iterations",
        "10",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "tries.tsv",
        "tries.tsv.manifest.json",
        "lexicon.tsv",
        "segmentations.tsv",
        "learned.tsv",
        "sweeps.tsv",
        "segmentation.tsv",
        "report.txt",
        "run.manifest.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let sweeps = std::fs::read_to_string(out.join("sweeps.tsv")).unwrap();
    assert_eq!(sweeps.lines().count(), 10);
    let segs = std::fs::read_to_string(out.join("segmentations.tsv")).unwrap();
    assert_eq!(segs.lines().count(), 40);
    let seg = std::fs::read_to_string(out.join("segmentation.tsv")).unwrap();
    assert_eq!(seg.lines().filter(|l| !l.starts_with('#')).count(), 45);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 1);

    // evaluate the segmentation separately and compare with the report
    let o = morphtrie(&[
        "evaluate",
        p(&out.join("segmentation.tsv")),
        "--gold",
        p(&toy.join("gold.txt")),
    ]);
    assert!(o.status.success());
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    let expected = format!("# strategy=all\n{}\n", String::from_utf8(o.stdout).unwrap());
    assert!(report.starts_with(&expected), "{report}");
    assert!(report.contains("# strategy=learned\n"));
    assert!(out.join("segmentation.learned.tsv").is_file());
}

#[test]
fn staged_commands_match_pipeline() {
    let toy = common::toy_dir();
    let dir = tempfile::tempdir().unwrap();
    let staged = dir.path().join("staged");
    let emb = toy.join("embeddings.txt");
    let wl = toy.join("wordlist.txt");
    let o = morphtrie(&[
        "build-tries",
        "--embeddings",
        p(&emb),
        "--wordlist",
        p(&wl),
        "--out",
        p(&staged),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = morphtrie(&[
        "train",
        "--embeddings",
        p(&emb),
        "--wordlist",
        p(&wl),
        "--tries",
        p(&staged),
        "--out",
        p(&staged),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let piped = dir.path().join("piped");
    let o = morphtrie(&[
        "pipeline",
        "--embeddings",
        p(&emb),
        "--wordlist",
        p(&wl),
        "--out",
        p(&piped),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(staged.join("lexicon.tsv")).unwrap(),
        std::fs::read(piped.join("lexicon.tsv")).unwrap()
    );
    let o = morphtrie(&[
        "segment",
        "--model",
        p(&staged),
        "--wordlist",
        p(&toy.join("heldout.txt")),
    ]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("# strategy=all min_morph_freq=5\n"));
    assert_eq!(stdout.lines().count(), 6);
    let o = morphtrie(&[
        "segment",
        "--model",
        p(&staged),
        "--wordlist",
        p(&toy.join("heldout.txt")),
        "--strategy",
        "learned",
    ]);
    assert!(o.status.success());
}

#[test]
fn invalid_parameters_exit_with_config_code() {
    let toy = common::toy_dir();
    let dir = tempfile::tempdir().unwrap();
    let o = morphtrie(&[
        "pipeline",
        "--embeddings",
        p(&toy.join("embeddings.txt")),
        "--wordlist",
        p(&toy.join("wordlist.txt")),
        "--out",
        p(dir.path()),
        "--iterations",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = morphtrie(&[
        "pipeline",
        "--embeddings",
        p(&toy.join("embeddings.txt")),
        "--wordlist",
        p(&toy.join("wordlist.txt")),
        "--out",
        p(dir.path()),
        "--alpha",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_strategy_is_rejected() {
    let o = morphtrie(&[
        "segment",
        "--model",
        "x",
        "--wordlist",
        "y",
        "--strategy",
        "greedy",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("greedy"));
}

#[test]
fn missing_and_malformed_inputs_exit_with_data_code() {
    let toy = common::toy_dir();
    let dir = tempfile::tempdir().unwrap();
    let o = morphtrie(&[
        "build-tries",
        "--embeddings",
        p(&dir.path().join("nope.txt")),
        "--wordlist",
        p(&toy.join("wordlist.txt")),
        "--out",
        p(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 3\nfoo 1 2\nbar 1 2 3\n").unwrap();
    let o = morphtrie(&[
        "build-tries",
        "--embeddings",
        p(&bad),
        "--wordlist",
        p(&toy.join("wordlist.txt")),
        "--out",
        p(&dir.path().join("out2")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.txt:2:"));

    let empty_gold = dir.path().join("gold.txt");
    std::fs::write(&empty_gold, "").unwrap();
    let o = morphtrie(&[
        "evaluate",
        p(&toy.join("gold.txt")),
        "--gold",
        p(&empty_gold),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
