use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rppg::io::{save_mask, write_landmarks};
use rppg_core::imaging::RoiMask;
use rppg_core::scales::{frontal_landmarks, LandmarkSet};

fn rppg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rppg")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let o = rppg(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn code(args: &[&str]) -> i32 {
    rppg(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, json: &str) {
    let spec = dir.join("spec.json");
    fs::write(&spec, json).unwrap();
    ok(&["synth", "--spec", s(&spec), "--out", s(&dir.join("video"))]);
}

#[test]
fn global_pipeline_and_render() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    synth(
        p,
        r#"{"width": 40, "height": 40, "duration": 12, "noise_sigma": 0.005,
            "dead_zones": [{"x0": 0, "y0": 0, "x1": 20, "y1": 40}], "seed": 4}"#,
    );
    assert!(p.join("video/frame_000359.png").is_file());
    assert!(p.join("video/truth.json").is_file());
    save_mask(&p.join("dead.png"), &RoiMask::rect(40, 40, 0, 0, 20, 40)).unwrap();
    save_mask(&p.join("live.png"), &RoiMask::rect(40, 40, 20, 0, 40, 40)).unwrap();

    let out = p.join("g");
    ok(&[
        "analyze-global", "--input", s(&p.join("video")), "--roi", s(&p.join("live.png")),
        "--ref", s(&p.join("live.png")), "--out", s(&out),
    ]);
    let csv = fs::read_to_string(out.join("roi.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    for line in csv.lines().skip(1) {
        let bpm: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((bpm - 72.0).abs() <= 1.0, "{line}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["roi"]["windows"], 3);
    assert_eq!(summary["correlation_reference"], "region");
    assert!(out.join("roi_pi.png").is_file());

    let out2 = p.join("g2");
    ok(&[
        "analyze-global", "--input", s(&p.join("video")), "--roi", s(&p.join("dead.png")),
        "--external-hr", "72", "--out", s(&out2), "--threads", "2",
    ]);
    let s2: serde_json::Value = serde_json::from_slice(&fs::read(out2.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s2["correlation_reference"], "external-hr");
    assert!(s2["roi"]["mean_rho_ref"].as_f64().unwrap() < 0.5);

    let local = p.join("l");
    ok(&[
        "analyze-local", "--input", s(&p.join("video")), "--ref", s(&p.join("live.png")),
        "--out", s(&local), "--target-px", "1600",
    ]);
    assert!(local.join("maps/w002_rho_ref.rpmap").is_file());
    assert!(local.join("maps/w000_snr_db.png").is_file());

    ok(&[
        "render", "--input", s(&local.join("maps/w000_magnitude.rpmap")), "--out", s(&p.join("r")),
        "--range", "0,0.5", "--scale", "2", "--contour", s(&p.join("live.png")),
    ]);
    let img = image::open(p.join("r/w000_magnitude.png")).unwrap();
    assert_eq!((img.width(), img.height()), (80, 80));
    ok(&["render", "--input", s(&out.join("roi.csv")), "--out", s(&p.join("r"))]);
    assert!(p.join("r/roi_pi.png").is_file());
}

#[test]
fn raw_stream_input() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fs::write(p.join("spec.json"), r#"{"width": 16, "height": 16, "duration": 10.5}"#).unwrap();
    ok(&["synth", "--spec", s(&p.join("spec.json")), "--out", s(&p.join("v")), "--raw", "--seed", "9"]);
    save_mask(&p.join("m.png"), &RoiMask::full(16, 16)).unwrap();
    ok(&[
        "analyze-global", "--input", s(&p.join("v/video.rgb")), "--roi", s(&p.join("m.png")),
        "--external-hr", "72", "--out", s(&p.join("o")),
    ]);
    let t: serde_json::Value = serde_json::from_slice(&fs::read(p.join("v/truth.json")).unwrap()).unwrap();
    assert_eq!(t["spec"]["seed"], 9);
}

#[test]
fn regions_features_and_pad() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    synth(p, r#"{"width": 96, "height": 96, "duration": 11, "noise_sigma": 0.005, "seed": 2}"#);
    let lm = LandmarkSet::new(frontal_landmarks(48.0, 40.0, 80.0), 96, 96).unwrap();
    write_landmarks(&p.join("lm.csv"), &lm).unwrap();
    let out = p.join("reg");
    ok(&[
        "analyze-regions", "--input", s(&p.join("video")), "--landmarks", s(&p.join("lm.csv")),
        "--pad-label", "0", "--subject", "alice", "--out", s(&out),
    ]);
    for name in ["right-forehead", "left-forehead", "right-cheek", "left-cheek", "nose"] {
        let csv = fs::read_to_string(out.join(format!("regions/{name}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 3, "{name}");
    }
    let feats = fs::read_to_string(out.join("features.csv")).unwrap();
    assert_eq!(feats.lines().count(), 1 + 10);
    assert!(feats.lines().all(|l| l.starts_with("subject_id") || l.starts_with("alice,")));

    // A separable feature table for training.
    let mut t = String::from("subject_id,region,window,snr_db,magnitude,rho_ref,label\n");
    for i in 0..120 {
        let (label, snr, rho) = if i % 2 == 0 { (0, 3.0, 0.9) } else { (1, -8.0, 0.1) };
        let jitter = (i % 7) as f64 * 0.05;
        t.push_str(&format!("v{},nose,{},{},{},{},{label}\n", i % 12, i / 12, snr + jitter, 0.01 + jitter / 100.0, rho - jitter / 10.0));
    }
    fs::write(p.join("train.csv"), t).unwrap();
    ok(&["pad-train", "--features", s(&p.join("train.csv")), "--folds", "4", "--out", s(&p.join("m"))]);
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(p.join("m/cv_report.json")).unwrap()).unwrap();
    assert_eq!(rep["cross_validation"]["folds"].as_array().unwrap().len(), 4);
    assert!(rep["pooled_accuracy"].as_f64().unwrap() >= 0.99);

    ok(&[
        "pad-classify", "--model", s(&p.join("m/model.json")), "--features", s(&out.join("features.csv")),
        "--out", s(&p.join("c")),
    ]);
    let pred = fs::read_to_string(p.join("c/predictions.csv")).unwrap();
    assert_eq!(pred.lines().count(), 11);
    let sum: serde_json::Value = serde_json::from_slice(&fs::read(p.join("c/summary.json")).unwrap()).unwrap();
    assert_eq!(sum["videos"][0]["subject_id"], "alice");
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["analyze-global", "--input", "x"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);

    fs::write(p.join("spec.json"), r#"{"width": 12, "height": 12, "duration": 4}"#).unwrap();
    ok(&["synth", "--spec", s(&p.join("spec.json")), "--out", s(&p.join("v"))]);
    save_mask(&p.join("m.png"), &RoiMask::full(12, 12)).unwrap();
    save_mask(&p.join("wrong.png"), &RoiMask::full(10, 12)).unwrap();
    let (v, o) = (p.join("v"), p.join("o"));
    let base = ["analyze-global", "--input", s(&v), "--out", s(&o)];
    let with = |extra: &[&str]| code(&[&base[..], extra].concat());

    // Missing inputs and malformed files.
    assert_eq!(with(&["--roi", s(&p.join("missing.png")), "--external-hr", "72"]), 2);
    assert_eq!(with(&["--roi", s(&p.join("wrong.png")), "--external-hr", "72"]), 2);
    assert_eq!(with(&["--roi", s(&p.join("m.png"))]), 2);
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "-5"]), 2);
    fs::write(p.join("cfg.json"), r#"{"t_win": -1}"#).unwrap();
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "72", "--config", s(&p.join("cfg.json"))]), 2);
    fs::write(p.join("cfg.json"), r#"{"t_window": 5}"#).unwrap();
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "72", "--config", s(&p.join("cfg.json"))]), 2);
    fs::remove_file(p.join("v/meta.json")).unwrap();
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "72"]), 2);

    // Well-formed but too short for one 10 s window.
    ok(&["synth", "--spec", s(&p.join("spec.json")), "--out", s(&p.join("v"))]);
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "72"]), 3);
    // A shorter window makes the same input analysable.
    fs::write(p.join("cfg.json"), r#"{"t_win": 3}"#).unwrap();
    assert_eq!(with(&["--roi", s(&p.join("m.png")), "--external-hr", "72", "--config", s(&p.join("cfg.json"))]), 0);

    fs::write(p.join("bad.json"), r#"{"pulse_hr": 500}"#).unwrap();
    assert_eq!(code(&["synth", "--spec", s(&p.join("bad.json")), "--out", s(&p.join("b"))]), 2);

    fs::write(p.join("one.csv"), "subject_id,region,window,snr_db,magnitude,rho_ref,label\na,nose,0,1,1,1,1\nb,nose,0,2,1,1,1\n").unwrap();
    assert_eq!(code(&["pad-train", "--features", s(&p.join("one.csv")), "--folds", "2", "--out", s(&p.join("m"))]), 3);
}
