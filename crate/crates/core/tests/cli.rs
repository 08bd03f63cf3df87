use std::path::Path;
use std::process::{Command, Output};

fn indictox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indictox"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn indictox")
}

fn ok(args: &[&str]) {
    let out = indictox(args);
    assert!(
        out.status.success(),
        "indictox {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn same(a: &Path, b: &Path) {
    let (x, y) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(x == y, "{} differs from {}", a.display(), b.display());
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_flag_prints_name() {
    let out = indictox(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("indictox "));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = indictox(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_fails_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = indictox(&["augment", "--corpus", s(&missing), "--out", s(&dir.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
}

#[test]
fn misaligned_probabilities_name_the_offending_id() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.csv");
    ok(&["gen-data", "--n", "12", "--seed", "3", "--out", s(&corpus)]);
    let text = std::fs::read_to_string(&corpus).unwrap();
    let first_id = text.lines().nth(1).unwrap().split(',').next().unwrap().to_string();

    let mut probs = String::from("comment_id,probability\n");
    for line in text.lines().skip(1) {
        let id = line.split(',').next().unwrap();
        let id = if id == first_id { "ghost".to_string() } else { id.to_string() };
        probs.push_str(&format!("{id},0.5\n"));
    }
    let p = dir.path().join("p.csv");
    std::fs::write(&p, probs).unwrap();
    let out = indictox(&["evaluate", "--probs", s(&p), "--corpus", s(&corpus)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ghost") || err.contains(&first_id), "{err}");
}

#[test]
fn transliterate_text_prints_romanization() {
    let out = indictox(&["transliterate", "--text", "नमस्ते 😀"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "namaste");
}

/// `run-all` must equal the composition of the individual subcommands.
#[test]
fn run_all_matches_manual_composition() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let m = dir.path().join("manual");
    std::fs::create_dir_all(&m).unwrap();
    ok(&["--seed", "11", "run-all", "--n", "1200", "--out", s(&run)]);

    let r = |p: &str| run.join(p);
    let w = |p: &str| m.join(p);
    let held = r("split/heldout.csv");
    let stack = r("split/stack.csv");

    let mut fused = Vec::new();
    for id in ["ngram_lo", "ngram_mid", "ngram_hi"] {
        let model = r(&format!("baseline/{id}.nglm"));
        let (o, t, f) = (w(&format!("{id}.o.csv")), w(&format!("{id}.t.csv")), w(&format!("{id}.csv")));
        ok(&["score", "--model", s(&model), "--corpus", s(&held), "--out", s(&o)]);
        ok(&["score", "--model", s(&model), "--corpus", s(&held), "--transliterated", "--out", s(&t)]);
        ok(&["fuse", "--original", s(&o), "--transliterated", s(&t), "--corpus", s(&held), "--out", s(&f)]);
        same(&o, &r(&format!("probs/heldout/{id}.original.csv")));
        same(&t, &r(&format!("probs/heldout/{id}.translit.csv")));
        same(&f, &r(&format!("probs/heldout/{id}.csv")));
        fused.push(f);
    }

    let ens = w("ensemble.csv");
    let mut args = vec!["ensemble", "--inputs"];
    args.extend(fused.iter().map(|p| s(p)));
    args.extend(["--corpus", s(&held), "--out", s(&ens)]);
    ok(&args);
    same(&ens, &r("probs/heldout/ensemble.csv"));

    let feats = w("features.csv");
    ok(&["features", "--corpus", s(&held), "--probs", s(&ens), "--out", s(&feats)]);
    same(&feats, &r("features/heldout.csv"));

    let model_a = w("gbdt_a.model");
    let oof_a = w("gbdt_a.oof.csv");
    ok(&[
        "--seed", "11", "stack-train", "--features", s(&r("features/stack.csv")), "--corpus", s(&stack),
        "--variant", "a", "--out", s(&model_a), "--oof-out", s(&oof_a),
    ]);
    same(&model_a, &r("stacker/gbdt_a.model"));
    same(&oof_a, &r("stacker/gbdt_a.oof.csv"));

    let (pa, pb) = (w("gbdt_a.csv"), w("gbdt_b.csv"));
    ok(&["stack-predict", "--model", s(&model_a), "--features", s(&feats), "--out", s(&pa)]);
    ok(&["stack-predict", "--model", s(&r("stacker/gbdt_b.model")), "--features", s(&feats), "--out", s(&pb)]);
    same(&pa, &r("probs/heldout/gbdt_a.csv"));
    same(&pb, &r("probs/heldout/gbdt_b.csv"));

    let bl = w("blend.csv");
    ok(&["blend", "--a", s(&pa), "--b", s(&pb), "--corpus", s(&held), "--out", s(&bl)]);
    same(&bl, &r("probs/heldout/blend.csv"));

    let th = w("thresholds.txt");
    ok(&[
        "calibrate", "--probs", s(&r("stacker/blend.oof.csv")), "--corpus", s(&stack), "--nudge", "0.01",
        "--out", s(&th),
    ]);
    same(&th, &r("thresholds.txt"));

    let preds = w("predictions.csv");
    ok(&["predict", "--probs", s(&bl), "--corpus", s(&held), "--thresholds", s(&th), "--out", s(&preds)]);
    same(&preds, &r("heldout/predictions.csv"));

    let rep = w("eval.txt");
    ok(&["evaluate", "--probs", s(&bl), "--corpus", s(&held), "--thresholds", s(&th), "--out", s(&rep)]);
    same(&rep, &r("eval/pipeline.txt"));
}

#[test]
fn calibrated_thresholds_beat_one_half_per_language() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    ok(&["--seed", "5", "run-all", "--n", "900", "--out", s(&run)]);
    let oof = run.join("stacker/blend.oof.csv");
    let stack = run.join("split/stack.csv");

    let tuned = dir.path().join("tuned.txt");
    let half = dir.path().join("half.txt");
    let th = run.join("thresholds.txt");
    ok(&["evaluate", "--probs", s(&oof), "--corpus", s(&stack), "--thresholds", s(&th), "--nudge", "0.01", "--out", s(&tuned)]);
    ok(&["evaluate", "--probs", s(&oof), "--corpus", s(&stack), "--threshold", "0.5", "--nudge", "0", "--out", s(&half)]);
    let per_language = |p: &Path| -> Vec<(String, f64)> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .filter(|(k, _)| k.ends_with(".mean_f1"))
            .map(|(k, v)| (k.to_string(), v.parse().unwrap()))
            .collect()
    };
    let (a, b) = (per_language(&tuned), per_language(&half));
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for ((lang, x), (_, y)) in a.iter().zip(&b) {
        assert!(x >= &(y - 1e-12), "{lang}: calibrated {x} < 0.5-threshold {y}");
    }
}
