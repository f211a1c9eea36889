//! End-to-end runs of the `darkscan` binary.

use std::path::Path;
use std::process::{Command, Output};

use darkscan::checker::DpType;
use darkscan::geometry::BBox;
use darkscan::schema::{EvidenceRecord, FindingRecord, FindingsReport, GroundTruthFile, GroundTruthRecord};
use darkscan::testkit::{corpus, fixture};
use serde_json::Value;

fn darkscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darkscan")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(stdout: &[u8]) -> Value {
    serde_json::from_slice(stdout).expect("report is JSON")
}

#[test]
fn benign_screen_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("benign_settings").unwrap().write_inputs(dir.path()).unwrap();
    let out = darkscan(&["analyze", s(&png)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(&out.stdout);
    assert_eq!(v["image"], "benign_settings.png");
    assert_eq!(v["findings"], Value::Array(vec![]));
}

#[test]
fn install_dialog_lists_both_patterns_and_draws_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("install_dialog_ad").unwrap().write_inputs(dir.path()).unwrap();
    let out_json = dir.path().join("report.json");
    let overlay = dir.path().join("overlay.png");
    let out = darkscan(&["analyze", s(&png), "--out", s(&out_json), "--overlay", s(&overlay)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    let types: Vec<&str> = v["findings"].as_array().unwrap().iter().map(|f| f["dp_type"].as_str().unwrap()).collect();
    assert_eq!(types, ["NG-POPUP-AD", "II-FALSE-HIERARCHY"]);
    assert_eq!(v["findings"][0]["tier"], "warning");
    assert_eq!(v["findings"][1]["strategy"], "II");
    assert_eq!(v["findings"][0]["explanation"], "Advertisement shown in a pop-up dialog.");
    let img = darkscan::pipeline::load_image(&overlay).unwrap();
    assert_eq!(img.dimensions(), (360, 640));
    let legend = std::fs::read_to_string(dir.path().join("overlay.txt")).unwrap();
    assert_eq!(legend.lines().count(), 2);
    assert!(legend.starts_with("1 [30,150,330,500] NG-POPUP-AD (warning)"));
}

#[test]
fn disabled_stage_suppresses_dependent_finding() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("popup_ad_template_only").unwrap().write_inputs(dir.path()).unwrap();
    let on = report(&darkscan(&["analyze", s(&png)]).stdout);
    assert_eq!(on["findings"].as_array().unwrap().len(), 1);
    let off = darkscan(&["analyze", s(&png), "--disable", "template"]);
    assert_eq!(off.status.code(), Some(0));
    assert_eq!(report(&off.stdout)["findings"], Value::Array(vec![]));
    assert_eq!(darkscan(&["analyze", s(&png), "--disable", "ocr"]).status.code(), Some(2));
}

#[test]
fn truncated_sidecar_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("benign_login").unwrap().write_inputs(dir.path()).unwrap();
    let sidecar = dir.path().join("benign_login.elements.json");
    let text = std::fs::read_to_string(&sidecar).unwrap();
    std::fs::write(&sidecar, &text[..text.len() * 2 / 3]).unwrap();
    let out = darkscan(&["analyze", s(&png)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("benign_login.elements.json") && err.contains("elements[") && err.contains("line"), "{err}");
}

#[test]
fn invalid_record_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("benign_login").unwrap().write_inputs(dir.path()).unwrap();
    let sidecar = dir.path().join("benign_login.elements.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    v["elements"][1]["bbox"] = serde_json::json!([10, 10, 5, 5]);
    std::fs::write(&sidecar, v.to_string()).unwrap();
    let out = darkscan(&["analyze", s(&png)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elements[1].bbox"));
}

#[test]
fn missing_image_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = darkscan(&["analyze", s(&dir.path().join("nope.png"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_sidecar_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let png = fixture("benign_login").unwrap().write_inputs(dir.path()).unwrap();
    std::fs::remove_file(dir.path().join("benign_login.ocr.json")).unwrap();
    assert_eq!(darkscan(&["analyze", s(&png)]).status.code(), Some(2));
}

#[test]
fn directory_mode_writes_one_report_per_image() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    for name in ["benign_chat", "rate_dialog", "trial_one_line"] {
        fixture(name).unwrap().write_inputs(dir.path()).unwrap();
    }
    let out = darkscan(&["analyze", s(dir.path()), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rate: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("rate_dialog.findings.json")).unwrap()).unwrap();
    assert_eq!(rate["findings"][0]["dp_type"], "NG-RATE");
    assert_eq!(std::fs::read_dir(&out_dir).unwrap().count(), 3);
}

fn write_gt(path: &Path, g: &GroundTruthFile) {
    std::fs::write(path, serde_json::to_string_pretty(g).unwrap()).unwrap();
}

fn write_report(path: &Path, g: &GroundTruthFile) {
    std::fs::write(path, as_report(g).to_json()).unwrap();
}

fn as_report(g: &GroundTruthFile) -> FindingsReport {
    FindingsReport {
        image: g.image.clone(),
        findings: g
            .instances
            .iter()
            .map(|i| FindingRecord {
                dp_type: i.dp_type,
                strategy: i.dp_type.strategy(),
                tier: i.dp_type.tier(),
                container: i.container,
                evidence: vec![EvidenceRecord { element: 0, role: "annotated".into() }],
                explanation: String::new(),
            })
            .collect(),
    }
}

fn metrics(pred: &Path, gt: &Path, extra: &[&str]) -> Value {
    let json = gt.parent().unwrap().join("metrics.json");
    let mut args = vec!["evaluate", "--pred", s(pred), "--gt", s(gt), "--json", s(&json)];
    args.extend_from_slice(extra);
    let out = darkscan(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap()
}

fn dirs() -> (tempfile::TempDir, std::path::PathBuf, std::path::PathBuf) {
    let root = tempfile::tempdir().unwrap();
    let (pred, gt) = (root.path().join("pred"), root.path().join("gt"));
    std::fs::create_dir(&pred).unwrap();
    std::fs::create_dir(&gt).unwrap();
    (root, pred, gt)
}

#[test]
fn predictions_equal_to_truth_score_one() {
    let (_root, pred, gt) = dirs();
    for f in corpus() {
        f.write_truth(&gt).unwrap();
        write_report(&pred.join(format!("{}.findings.json", f.name)), &f.ground_truth());
    }
    let m = metrics(&pred, &gt, &[]);
    for k in ["precision", "recall", "f1"] {
        assert_eq!(m["micro"][k], 1.0);
        assert_eq!(m["macro"][k], 1.0);
    }
    assert_eq!(m["binary_accuracy"], 1.0);
}

#[test]
fn empty_predictions_score_zero() {
    let (_root, pred, gt) = dirs();
    for f in corpus().into_iter().filter(|f| !f.is_benign()).take(5) {
        f.write_truth(&gt).unwrap();
    }
    let m = metrics(&pred, &gt, &[]);
    assert_eq!(m["micro"]["precision"], 0.0);
    assert_eq!(m["micro"]["recall"], 0.0);
    assert_eq!(m["binary_accuracy"], 0.0);
}

fn bx(x1: u32, y1: u32, x2: u32, y2: u32) -> BBox {
    BBox::new(x1, y1, x2, y2).unwrap()
}

#[test]
fn hand_counted_tallies() {
    let (_root, pred, gt) = dirs();
    let gt_rec = |dp_type, container| GroundTruthRecord { dp_type, container, elements: vec![] };
    let a = GroundTruthFile {
        image: "a.png".into(),
        instances: vec![gt_rec(DpType::NgRate, bx(0, 0, 100, 100)), gt_rec(DpType::FaWatchAd, bx(0, 200, 100, 240))],
    };
    let b = GroundTruthFile { image: "b.png".into(), instances: vec![gt_rec(DpType::IiSmallClose, bx(5, 5, 15, 15))] };
    let c = GroundTruthFile { image: "c.png".into(), instances: vec![] };
    for g in [&a, &b, &c] {
        write_gt(&gt.join(g.image.replace(".png", ".json")), g);
    }
    // a: rate shifted by 10 px (IoU 0.818, hit); watch-ad far away (miss)
    let pa = GroundTruthFile {
        image: "a.png".into(),
        instances: vec![gt_rec(DpType::NgRate, bx(10, 0, 110, 100)), gt_rec(DpType::FaWatchAd, bx(200, 500, 300, 540))],
    };
    // b: exact close button plus a spurious pay-to-remove finding
    let pb = GroundTruthFile {
        image: "b.png".into(),
        instances: vec![gt_rec(DpType::IiSmallClose, bx(5, 5, 15, 15)), gt_rec(DpType::FaPayAvoidAds, bx(0, 100, 200, 130))],
    };
    // c is benign and left unflagged, so it has no report at all
    write_report(&pred.join("a.findings.json"), &pa);
    write_report(&pred.join("b.findings.json"), &pb);
    let m = metrics(&pred, &gt, &[]);
    // tp 2, fp 2, fn 1
    assert_eq!(m["per_type"]["NG-RATE"]["tp"], 1);
    assert_eq!(m["per_type"]["FA-WATCH-AD"]["fp"], 1);
    assert_eq!(m["per_type"]["FA-WATCH-AD"]["fn"], 1);
    assert_eq!(m["per_type"]["FA-PAY-AVOID-ADS"]["fp"], 1);
    assert_eq!(m["micro"]["precision"], 0.5);
    assert_eq!(m["micro"]["recall"], 0.6667);
    assert_eq!(m["micro"]["f1"], 0.5714);
    // FA: p 0/2, r 0/1; II: 1/1; NG: 1/1 -> macro p = 2/3
    assert_eq!(m["macro"]["precision"], 0.6667);
    assert_eq!(m["binary_accuracy"], 1.0);
}

#[test]
fn analysis_then_evaluation_on_corpus() {
    let (_root, pred, gt) = dirs();
    let shots = pred.parent().unwrap().join("shots");
    std::fs::create_dir(&shots).unwrap();
    for f in corpus() {
        f.write_inputs(&shots).unwrap();
        f.write_truth(&gt).unwrap();
    }
    let out = darkscan(&["analyze", s(&shots), "--out", s(&pred)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = metrics(&pred, &gt, &[]);
    assert_eq!(m["micro"]["f1"], 1.0);

    let sweep = metrics(&shots, &gt, &["--ablation"]);
    let configs = sweep.as_array().unwrap();
    assert_eq!(configs.len(), 5);
    assert_eq!(configs[0]["configuration"], "Base Model (Text-only)");
    let f1: Vec<f64> = configs.iter().map(|c| c["metrics"]["micro"]["f1"].as_f64().unwrap()).collect();
    assert!(f1.windows(2).all(|w| w[0] <= w[1]), "{f1:?}");
    assert_eq!(f1[4], 1.0);
}
