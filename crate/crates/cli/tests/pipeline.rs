use std::fs;
use std::path::Path;
use std::process::Command;

fn novelty(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_novelty")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "novelty {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn synth_score_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let stream = path(dir.path(), "stream.jsonl");
    novelty(&["synth", "--seed", "1", "--clusters", "40", "-o", &stream]);
    assert!(fs::read_to_string(&stream).unwrap().lines().count() >= 40);

    let scores = path(dir.path(), "scores.tsv");
    let again = path(dir.path(), "again.tsv");
    for out in [&scores, &again] {
        novelty(&[
            "score",
            "-i",
            &stream,
            "-o",
            out,
            "--scheme",
            "nsd",
            "-n",
            "30",
            "--no-timing",
        ]);
    }
    let text = fs::read_to_string(&scores).unwrap();
    assert_eq!(text, fs::read_to_string(&again).unwrap());
    assert!(text.starts_with("doc_id\tscorer\tscheme\tN\traw_score\telapsed_ns\tflag\n"));
    assert!(text.lines().nth(1).unwrap().starts_with("d0\tns\tnsd\t30\t"));

    let det = path(dir.path(), "det.tsv");
    let report = novelty(&["evaluate", "--scores", &scores, "--stream", &stream, "--det", &det]);
    let avg: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("avgC_Det\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=0.5).contains(&avg), "{report}");
    assert_eq!(report.lines().filter(|l| l.starts_with("fold")).count(), 5);
    assert!(fs::read_to_string(&det).unwrap().starts_with("threshold\tp_miss\tp_fa"));
}

#[test]
fn temporal_scorer_saves_index() {
    let dir = tempfile::tempdir().unwrap();
    let stream = path(dir.path(), "stream.jsonl");
    let index = path(dir.path(), "index.tdf");
    novelty(&["synth", "--clusters", "10", "-o", &stream]);
    let scores = novelty(&[
        "score",
        "-i",
        &stream,
        "--scorer",
        "ns_t",
        "--decay",
        "linear",
        "--save-index",
        &index,
    ]);
    assert!(scores.lines().skip(1).all(|l| l.contains("\tns_t\t")));
    assert!(fs::read_to_string(&index).unwrap().starts_with("#tdf-index\t1\n"));
}

#[test]
fn sweep_writes_cost_table() {
    let dir = tempfile::tempdir().unwrap();
    let stream = path(dir.path(), "stream.jsonl");
    novelty(&["synth", "--clusters", "30", "-o", &stream]);
    let table = novelty(&["sweep", "-i", &stream, "--schemes", "nsd,nsn", "--windows", "10,20"]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "scorer,scheme,N,decay,alpha,avgC_Det");
    assert_eq!(lines.len(), 5);
}

#[test]
fn rejects_bad_scheme() {
    let out = Command::new(env!("CARGO_BIN_EXE_novelty"))
        .args(["score", "--scheme", "xyz"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
